import json

import pytest

from aslab.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norm_command(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text(json.dumps([0, 0, 1, 1, 1]))
    code, out, _ = _run(capsys, "norm", "--vector", str(p))
    assert code == 0 and json.loads(out)["value"] == "3/2"
    p.write_text(json.dumps({"coords": {"3": ["1", "1"], "4": ["1", "1"]}, "kind": "rational", "q": 1}))
    code, out, _ = _run(capsys, "norm", "--vector", str(p), "--family", "U")
    assert json.loads(out)["value"] == "1"


def test_norm_q2_irrational(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"3": "1", "4": "1", "5": "1"}))
    code, out, _ = _run(capsys, "norm", "--vector", str(p), "--q", "2", "--convention", "theta_direct")
    assert json.loads(out)["norm"] == {"exact": {"radicand": ["3", "2"], "root": 2}}


def test_schreier_command(capsys):
    code, out, _ = _run(capsys, "schreier", "weights", "--k", "1", "--set", "3,4,6")
    d = json.loads(out)
    assert code == 0 and d["total"] == ["1", "1"] and d["weights"]["6"] == ["1", "3"]
    code, out, err = _run(capsys, "schreier", "weights", "--k", "1", "--set", "3,5")
    assert code == 1 and "not maximal" in err
    code, out, _ = _run(capsys, "schreier", "member", "--k", "1", "--set", "2,3,4")
    assert json.loads(out)["member"] is False


def test_game_command(capsys):
    code, out, _ = _run(capsys, "game", "phi", "--l", "1", "--q", "1", "--theta", "1/2",
                        "--epsilon", "1/4", "--C", "5/4", "--seed", "42")
    d = json.loads(out)
    assert code == 0 and d["winner"] == "PlayerII" and d["F"][0] == 5
    assert d["certificate"]["guaranteed"] == {"radicand": ["4", "3"], "root": 1}
    code, _, err = _run(capsys, "game", "phi", "--l", "2")
    assert code == 64


def test_verify_command(tmp_path, capsys):
    out_file = tmp_path / "r.json"
    code, _, err = _run(capsys, "verify", "dp-oracle", "--trials", "5", "--out", str(out_file))
    assert code == 0 and "5 pass" in err
    rep = json.loads(out_file.read_text())
    assert rep["summary"]["pass-certified"] == 5
    code, _, _ = _run(capsys, "verify", "ball-membership", "--trials", "2", "--canary")
    assert code == 1
    code, _, err = _run(capsys, "verify", "shuffle", "--theta", "3/2")
    assert code == 64
    code, out, _ = _run(capsys, "verify", "prop73ii", "--trials", "2", "--format", "tsv")
    assert code == 0 and out.startswith("# suite\tlower-estimates-ii")


def test_unknown_suite_rejected(capsys):
    with pytest.raises(SystemExit):
        main(["verify", "nope"])
