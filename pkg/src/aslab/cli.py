"""Command line interface: ``aslab norm|verify|game|schreier``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .games import GameSpec, phi_lower_certificate, play, strategy_growth_playerII, strategy_constant_tail
from .harness import SUITE_ALIASES, SUITES, SuiteConfig, emit_report, exit_code, run_suite
from .norms import FinVec, NormParams, evens, norm
from .scalars import frac_to_json, parse_fraction
from .schreier import is_maximal, is_member, weights


def _fractions(text: str) -> tuple:
    return tuple(parse_fraction(t) for t in text.split(",") if t)


def _ints(text: str) -> tuple:
    return tuple(int(t) for t in text.split(",") if t)


def _load_vector(path: str) -> FinVec:
    with (sys.stdin if path == "-" else open(path)) as fh:
        obj = json.load(fh)
    if isinstance(obj, list):
        # plain coefficient list a_1, a_2, ...
        return FinVec({i + 1: parse_fraction(str(c)) for i, c in enumerate(obj)})
    if "coords" in obj:
        return FinVec.from_json(obj)
    return FinVec({int(k): parse_fraction(str(v)) for k, v in obj.items()})


def _cmd_norm(args) -> int:
    M = ()
    if args.M == "evens":
        M = evens(200)
    elif args.M:
        M = _ints(args.M)
    params = NormParams(args.family, parse_fraction(args.theta), args.q, M, args.convention)
    x = _load_vector(args.vector)
    v = norm(params, x, cap=args.cap)
    out = {"params": params.to_json(), "x": x.to_json(), "norm": v.to_json(), "value": str(v)}
    print(json.dumps(out, sort_keys=True, indent=1))
    return 0


def _cmd_verify(args) -> int:
    kw = dict(seed=args.seed, workers=args.workers, long=args.long, canary=args.canary,
              precision_bits=args.precision_bits, support_cap=args.support_cap)
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.theta:
        kw["thetas"] = _fractions(args.theta)
    if args.q:
        kw["qs"] = _ints(args.q)
    if args.family:
        kw["families"] = tuple(args.family.split(","))
    if args.M:
        kw["Ms"] = tuple(args.M.split(","))
    try:
        cfg = SuiteConfig(args.suite, **kw)
    except ValueError as e:
        print(f"aslab verify: {e}", file=sys.stderr)
        return 64
    rep = run_suite(cfg)
    data = emit_report(rep, args.format, timing=args.timing)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    s = rep.summary
    print(f"{cfg.suite}: {s['pass-certified']} pass, {s['fail-certified']} fail, "
          f"{s['undecided']} undecided ({s['total']} cases)", file=sys.stderr)
    return exit_code(rep)


def _cmd_game(args) -> int:
    theta = parse_fraction(args.theta)
    eps = parse_fraction(args.epsilon)
    C = parse_fraction(args.C)
    l = args.l
    if l % 2 == 0:
        print("aslab game phi: the Player II strategy plays odd orders 2l'-1", file=sys.stderr)
        return 64
    half = (l + 1) // 2
    params = NormParams("T", theta, args.q, (), args.convention)
    spec = GameSpec("Phi", C, args.q, l, params, "dual")
    tr = play(spec, strategy_constant_tail(args.tail), strategy_growth_playerII(theta, eps, half),
              seed=args.seed)
    out = tr.to_json()
    cert = phi_lower_certificate(theta, args.q, half, eps, tail=args.tail,
                                 convention=args.convention, seed=args.seed)
    out["certificate"] = {
        "P": {k: frac_to_json(v) for k, v in cert["P"].items()},
        "payoff_lower": cert["payoff_lower"].to_json(),
        "guaranteed": cert["guaranteed"].to_json(),
        "R": cert["R"],
    }
    print(json.dumps(out, sort_keys=True, indent=1))
    return 0


def _cmd_schreier(args) -> int:
    F = _ints(args.set)
    out = {"set": list(F), "k": args.k, "member": is_member(F, args.k)}
    if out["member"]:
        out["maximal"] = is_maximal(F, args.k)
    if args.action == "weights":
        if not out.get("maximal"):
            print(f"aslab schreier weights: {list(F)} is not maximal in S_{args.k}", file=sys.stderr)
            print(json.dumps(out, sort_keys=True))
            return 1
        W = weights(F, args.k)
        out["weights"] = W.to_json()
        out["total"] = frac_to_json(W.total())
    print(json.dumps(out, sort_keys=True, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aslab", description=__doc__)
    ap.add_argument("--version", action="version", version=f"aslab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("norm", help="exact norm of a finitely supported vector")
    p.add_argument("--family", choices=("T", "U"), default="T")
    p.add_argument("--theta", default="1/2")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--M", default="", help="'evens' or a comma-separated prefix")
    p.add_argument("--convention", choices=("theta_to_q", "theta_direct"), default="theta_to_q")
    p.add_argument("--vector", required=True, help="JSON file ('-' for stdin)")
    p.add_argument("--cap", type=int, default=40, help="support size cap")
    p.set_defaults(fn=_cmd_norm)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES) + sorted(SUITE_ALIASES))
    p.add_argument("--theta", help="comma-separated list")
    p.add_argument("--q", help="comma-separated list")
    p.add_argument("--family", help="T,U")
    p.add_argument("--M", help="plain,evens,odd5")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--precision-bits", type=int, default=256)
    p.add_argument("--support-cap", type=int, default=8)
    p.add_argument("--long", action="store_true", help="include the order-3 Schreier cases")
    p.add_argument("--canary", action="store_true", help="inject a deliberately false case")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--timing", action="store_true", help="include case timings (not reproducible)")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("game", help="play a certified game")
    gsub = p.add_subparsers(dest="game", required=True)
    g = gsub.add_parser("phi", help="Schreier game on the dual model space")
    g.add_argument("--l", type=int, default=1, help="Schreier order (odd)")
    g.add_argument("--q", type=int, default=1)
    g.add_argument("--theta", default="1/2")
    g.add_argument("--epsilon", default="1/4")
    g.add_argument("--C", default="5/4")
    g.add_argument("--tail", type=int, default=1, help="constant Player I tail")
    g.add_argument("--convention", choices=("theta_to_q", "theta_direct"), default="theta_direct")
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(fn=_cmd_game)

    p = sub.add_parser("schreier", help="Schreier family queries")
    p.add_argument("action", choices=("weights", "member"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--set", required=True, help="comma-separated increasing integers")
    p.set_defaults(fn=_cmd_schreier)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
