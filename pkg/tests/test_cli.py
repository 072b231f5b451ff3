import json

import pytest

from hsstab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("suite", ["exact", "groups", "words", "chars", "reps"])
def test_verify_suites_pass(capsys, suite):
    code, out, err = run(capsys, "verify", suite, "--p", "3", "--trials", "40", "--seed", "11")
    assert code == 0, out
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["command"] == "verify" and rep["passed"]
    assert rep["config"]["suite"] == suite and rep["config"]["p"] == 3
    assert all(c["counterexample"] is None for c in rep["checks"])
    assert err.startswith("PASS")


def test_verify_failure_reports_counterexample(capsys, monkeypatch):
    import hsstab.suites as S

    monkeypatch.setattr(S, "hall_witt_check", lambda x, y, z: False)
    code, out, err = run(capsys, "verify", "words", "--trials", "5")
    assert code == 1 and err.startswith("FAIL")
    rep = json.loads(out)
    bad = [c for c in rep["checks"] if not c["passed"]]
    assert [c["name"] for c in bad] == ["Hall-Witt identity in G~_p"]
    ce = bad[0]["counterexample"]
    assert ce["case"] == 0 and len(ce["inputs"]) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "exact", "--p", "4"],
        ["verify", "exact", "--trials", "0"],
        ["verify", "exact", "--seed", "-1"],
        ["folner", "--p", "2", "--N", "3", "--M", "128"],
        ["folner", "--M", "0"],
        ["certificate", "--group", "Gp", "--tolerance", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["verify", "nosuch"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["certificate"])
    assert e.value.code == 2


def test_cap_boundary_is_allowed(capsys):
    code, out, _ = run(capsys, "folner", "--N", "3", "--M", "64", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1].startswith("2,3,64,4096,")


def test_json_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        assert cli.main(["verify", "groups", "--trials", "30", "--seed", "99", "--out", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    other = tmp_path / "c.json"
    cli.main(["verify", "groups", "--trials", "30", "--seed", "100", "--out", str(other)])
    assert other.read_bytes() != paths[0].read_bytes()


def test_folner_report(capsys):
    code, out, _ = run(capsys, "folner", "--p", "2", "--N", "2", "--M", "2,4,8,16")
    assert code == 0
    rep = json.loads(out)
    assert [f["frame"]["M"] for f in rep["frames"]] == [2, 4, 8, 16]
    assert [f["frame"]["size"] for f in rep["frames"]] == [32, 64, 128, 256]
    assert rep["hs_nonincreasing"]
    for f, w in zip(rep["frames"], rep["worst_hs_defect"]):
        assert w <= 2 / f["frame"]["M"] ** 0.5
        assert f["t1"] == "1" and f["t0"] == "0"


def test_folner_csv(capsys):
    code, out, _ = run(capsys, "folner", "--N", "1", "--M", "2,3", "--format", "csv")
    lines = out.strip().split("\n")
    assert code == 0
    assert lines[0] == "p,N,M,size,g,h,hs_defect,op_defect,op_converged,hs_bound"
    assert len(lines) == 1 + 2 * 25


@pytest.mark.parametrize("group", ["Gp", "Kp", "Gtilde"])
def test_certificate_command(capsys, group):
    code, out, _ = run(capsys, "certificate", "--group", group, "--p", "3", "--trials", "10")
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["certificate"] - 1 / 3) <= 1e-12
    assert rep["cross_check"]["min_distance"] >= rep["certificate"] - 1e-9
    assert rep["config"]["group"] == group


def test_certificate_csv(capsys, tmp_path):
    path = tmp_path / "cert.csv"
    code = cli.main(["certificate", "--group", "Kp", "--trials", "5", "--format", "csv", "--out", str(path)])
    capsys.readouterr()
    header, row = path.read_text().strip().split("\n")
    assert code == 0
    assert header == "group,p,N,M,size,t1,t0,certificate,embedding,min_distance,passed"
    assert row.startswith("Kp,2,1,4,16,1,0,0.3333333333333333,GK,")
    assert row.endswith(",1")


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "chars", "--trials", "10", "--format", "csv")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "suite,p,seed,check,cases,passed"
    assert all(line.startswith("chars,2,0,") and line.endswith(",1") for line in lines[1:])
