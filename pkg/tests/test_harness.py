import json
from fractions import Fraction

import pytest

from aslab.harness import (
    FAIL,
    PASS,
    SUITES,
    UNDECIDED,
    CaseRecord,
    MetricError,
    Report,
    SuiteConfig,
    UnknownSuite,
    build_4delta_net,
    emit_report,
    exit_code,
    run_suite,
)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_small(name):
    rep = run_suite(SuiteConfig(name, trials=4, seed=3))
    s = rep.summary
    assert s["total"] == 4 and s["pass-certified"] == 4, rep.to_json()
    assert exit_code(rep) == 0


def test_empty_suite():
    rep = run_suite(SuiteConfig("dp-oracle", trials=0))
    assert rep.summary["total"] == 0 and exit_code(rep) == 0


def test_config_validation():
    with pytest.raises(UnknownSuite):
        SuiteConfig("nope")
    with pytest.raises(ValueError):
        SuiteConfig("shuffle", thetas=())
    with pytest.raises(ValueError):
        SuiteConfig("shuffle", thetas=(Fraction(3, 2),))
    with pytest.raises(ValueError):
        SuiteConfig("shuffle", Ms=("primes",))
    with pytest.raises(ValueError):
        SuiteConfig("shuffle", workers=0)


def test_suite_aliases():
    assert SuiteConfig("prop73i").suite == "lower-estimates-i"
    assert SuiteConfig("prop73ii").suite == "lower-estimates-ii"


def test_defaults_from_suite():
    cfg = SuiteConfig("shuffle")
    assert cfg.trials == 500 and len(cfg.grid()) == 8
    assert SuiteConfig("dp-oracle").trials == 200


def test_determinism_and_parallelism():
    a = emit_report(run_suite(SuiteConfig("unconditionality", trials=12, seed=5)))
    b = emit_report(run_suite(SuiteConfig("unconditionality", trials=12, seed=5)))
    c = emit_report(run_suite(SuiteConfig("unconditionality", trials=12, seed=5, workers=2)))
    d = emit_report(run_suite(SuiteConfig("unconditionality", trials=12, seed=6)))
    assert a == b == c
    assert json.loads(d)["records"] != json.loads(a)["records"]


def test_tsv_report():
    data = emit_report(run_suite(SuiteConfig("nonuniversal-arith")), "tsv").decode()
    lines = data.splitlines()
    assert lines[0] == "# suite\tnonuniversal-arith"
    header = [ln for ln in lines if not ln.startswith("#")][0]
    assert header.split("\t")[:3] == ["index", "verdict", "statement"]
    assert sum(1 for ln in lines if ln.startswith(("0\t", "1\t", "2\t", "3\t", "4\t", "5\t"))) == 6


def test_timing_is_opt_in():
    rep = run_suite(SuiteConfig("nonuniversal-arith", trials=2))
    assert "seconds" not in json.loads(emit_report(rep))["records"][0]
    assert "seconds" in json.loads(emit_report(rep, timing=True))["records"][0]


def test_exit_codes():
    cfg = SuiteConfig("dp-oracle", trials=0)
    mk = lambda *vs: Report("dp-oracle", cfg, [CaseRecord(i, {}, v, "s") for i, v in enumerate(vs)])
    assert exit_code(mk(PASS, PASS)) == 0
    assert exit_code(mk(PASS, UNDECIDED)) == 2
    assert exit_code(mk(UNDECIDED, FAIL)) == 1


def test_canary_fail_certifies():
    rep = run_suite(SuiteConfig("ball-membership", trials=3, canary=True))
    s = rep.summary
    assert s["fail-certified"] == 1 and s["canaries"] == 1 and s["pass-certified"] == 2
    bad = [r for r in rep.records if r.verdict is FAIL][0]
    assert bad.canary and bad.counterexample["x"]["coords"] == {"1": ["1", "1"]}
    assert exit_code(rep) == 1


def test_phi_report_notes():
    rep = run_suite(SuiteConfig("phi-game", trials=1))
    assert any("tail" in n for n in rep.notes)


def _line(n):
    return [[Fraction(abs(a - b)) for b in range(n)] for a in range(n)]


def test_net_identity():
    pts = list(range(6))
    net = build_4delta_net(pts, _line(6), {p: p for p in pts}, pts, Fraction(1))
    d = _line(6)
    assert set(net) <= set(pts)
    assert all(any(d[x][c] <= 4 for c in net) for x in pts)


def test_net_large_delta():
    pts = list(range(5))
    f = {p: 0 for p in pts}
    net = build_4delta_net(pts, _line(5), f, [0, 1], Fraction(10))
    assert len(net) == 1


def test_net_empty_h():
    pts = [0, 1, 2]
    d = [[Fraction(0), Fraction(5), Fraction(5)], [Fraction(5), Fraction(0), Fraction(5)],
         [Fraction(5), Fraction(5), Fraction(0)]]
    assert build_4delta_net(pts, d, {0: 1, 1: 2, 2: 0}, [0, 1, 2], Fraction(1)) == []


def test_net_rejects_bad_metric():
    d = [[Fraction(0), Fraction(1), Fraction(5)], [Fraction(1), Fraction(0), Fraction(1)],
         [Fraction(5), Fraction(1), Fraction(0)]]
    with pytest.raises(MetricError):
        build_4delta_net([0, 1, 2], d, {0: 0, 1: 1, 2: 2}, [0, 1, 2], 1)
    with pytest.raises(MetricError):
        build_4delta_net([0, 1], _line(2), {0: 0, 1: 1}, [0], 1)
