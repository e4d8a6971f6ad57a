import json
import subprocess
import sys

import pytest

from cayleyvf.cli import CONSISTENT, INCONCLUSIVE, INCONSISTENT, main, trend, verdict_matrix
from cayleyvf.langtools import local_geodesic_survey
from cayleyvf.groups import make_oracle


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def run_json(capsys, *argv):
    rc, out, err = run(capsys, *argv)
    return rc, (json.loads(out) if out else None)


def test_ball_json(capsys):
    rc, data = run_json(capsys, "ball", "--group", "free:2", "--radius", "2", "--json")
    assert rc == 0 and data["vertexCount"] == 17


def test_ball_dot(capsys):
    rc, out, _ = run(capsys, "ball", "--group", "free:2", "--radius", "2", "--dot")
    assert rc == 0 and out.startswith("graph") and out.count(" -- ") == 16


def test_survey_zn2_has_failures(capsys):
    rc, data = run_json(capsys, "triangulate-survey", "--group", "zn:2", "--L", "8", "--m", "1")
    assert rc == 0 and data["failed"] > 0


def test_survey_free_tree(capsys):
    rc, data = run_json(capsys, "triangulate-survey", "--group", "free:2", "--L", "6", "--tree")
    assert rc == 0 and data["failed"] == 0


def test_triangulate_square(capsys):
    rc, data = run_json(capsys, "triangulate", "--group", "zn:2", "--radius", "8", "--square", "1", "--m", "2")
    assert rc == 0 and data["verdict"] == "triangulable" and "trace" in data
    rc, data = run_json(capsys, "triangulate", "--group", "zn:2", "--radius", "8", "--square", "4", "--m", "2")
    assert rc == 0 and data["verdict"] == "not-triangulable"
    rc, data = run_json(capsys, "triangulate", "--group", "zn:2", "--radius", "8", "--square", "4", "--m", "2",
                        "--search-budget", "5")
    assert rc == 2 and data["verdict"] == "budget-exceeded"


def test_triangulate_word_and_tree(capsys):
    rc, data = run_json(capsys, "triangulate", "--group", "free:2", "--radius", "6",
                        "--word", "a b b^-1 a^-1", "--tree")
    assert rc == 0 and data["valid"] and data["fallbackSteps"] == 0
    rc, _, err = run(capsys, "triangulate", "--group", "free:2", "--word", "a b")
    assert rc == 1 and "error" in err


def test_minimal_m(capsys):
    rc, data = run_json(capsys, "minimal-m", "--group", "zn:2", "--radius", "12", "--square", "3")
    assert rc == 0 and data["minimalM"] == 4


def test_gromov(capsys):
    rc, data = run_json(capsys, "gromov", "--group", "free:2", "--radius", "6", "--x", "a b", "--y", "a a")
    assert rc == 0 and data["gromov"] == "1"
    rc, _, _ = run(capsys, "gromov", "--group", "free:2", "--radius", "3", "--x", "a a a", "--y", "b b b")
    assert rc == 1


def test_path_scan(capsys):
    rc, data = run_json(capsys, "path-scan", "--group", "zn:2", "--radius", "12", "--max-path-len", "4")
    assert rc == 0 and data["excess"] == "2" and data["exhaustive"]
    rc, data = run_json(capsys, "path-scan", "--group", "zn:2", "--radius", "10", "--max-path-len", "6",
                        "--sample-limit", "100")
    assert rc == 2 and not data["exhaustive"]


def test_boundary_profile_csv(capsys):
    rc, out, _ = run(capsys, "boundary-profile", "--group", "zn:2", "--radius", "12", "--csv")
    assert rc == 0
    assert out.splitlines() == ["n,maxDiameter,truncated", "0,2,0", "1,4,0", "2,6,0", "3,8,0"]
    rc, out, _ = run(capsys, "boundary-profile", "--group", "zn:2", "--radius", "12", "--n-max", "5", "--csv")
    assert rc == 2 and out.splitlines()[-1].endswith(",1")


def test_tree_decompose_and_spanning_tree(capsys):
    rc, data = run_json(capsys, "tree-decompose", "--group", "zn:2", "--radius", "9")
    assert rc == 0 and data["isTree"] and data["K_diam"] == 6 and data["width"]["K_width"] == 12
    rc, out, _ = run(capsys, "tree-decompose", "--group", "zn:2", "--radius", "9", "--dot")
    assert out.startswith("graph one_graph")
    rc, data = run_json(capsys, "spanning-tree", "--group", "lamplighter", "--radius", "9", "--center", "t")
    assert rc == 0 and data["violations"] == 0


def test_asdim_color(capsys):
    rc, data = run_json(capsys, "asdim-color", "--group", "free:2", "--radius", "6", "--m", "2")
    assert rc == 0
    assert data["minSameColorDistance"] == 3 and data["minSameAnnulusDistance"] == 6
    assert data["witness"]["ok"] and data["zr"]["failures"] == 0
    assert "parts" not in data and data["partCount"] > 0
    rc, _, err = run(capsys, "asdim-color", "--group", "zn:2", "--radius", "6")
    assert rc == 1 and "free" in err


def test_almost_invariant(capsys):
    rc, data = run_json(capsys, "almost-invariant", "--group", "free:2", "--radius", "6", "--m", "0")
    assert rc == 0 and len(data["labels"]) == 5 and data["invarianceChecked"]["violations"] == 0


def test_geodesic_survey(capsys):
    rc, data = run_json(capsys, "geodesic-survey", "--group", "zn:2", "--k", "2", "--L", "6")
    expected = local_geodesic_survey(make_oracle("zn:2"), 2, 6)
    assert rc == 0 and len(data["counterexamples"]) == len(expected.counterexamples) > 0


def test_pda(capsys):
    rc, data = run_json(capsys, "pda", "--group", "free:2", "--word", "a b b^-1 a^-1")
    assert rc == 0 and data["accepted"]
    rc, data = run_json(capsys, "pda", "--group", "free:2", "--word", "a b a^-1")
    assert rc == 0 and not data["accepted"]
    rc, data = run_json(capsys, "pda", "--group", "cyclic:3")
    assert rc == 0 and len(data["states"]) == 3
    rc, _, _ = run(capsys, "pda", "--group", "zn:2", "--word", "x")
    assert rc == 1


@pytest.mark.parametrize("argv", [
    ["ball"],                                            # missing --group
    ["ball", "--group", "free:2", "--bogus"],
    ["ball", "--group", "heisenberg"],
    ["nonsense", "--group", "free:2"],
    ["gromov", "--group", "free:2", "--x", "a q"],
    ["gromov", "--group", "free:2", "--csv"],            # format not available
])
def test_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 1
    capsys.readouterr()


def test_budget_exit_2(capsys):
    rc, _, err = run(capsys, "ball", "--group", "free:3", "--radius", "10", "--budget", "1000")
    assert rc == 2 and "inconclusive" in err


def test_out_file_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["path-scan", "--group", "lamplighter", "--radius", "8", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert capsys.readouterr().out == ""


def test_trend():
    assert trend([1, 2]) == INCONCLUSIVE
    assert trend([1, None, 2]) == INCONCLUSIVE
    assert trend([2, 2, 2]) == CONSISTENT
    assert trend([1, 3, 2]) == CONSISTENT
    assert trend([1, 2, 3]) == INCONSISTENT
    assert trend([3, 1, 2, 5]) == INCONSISTENT
    assert trend([1, 3, 2, 4]) == INCONCLUSIVE


@pytest.mark.parametrize("spec", ["free:2", "freeprod:2,3"])
def test_verdict_virtually_free(spec):
    data = verdict_matrix(spec, 9)
    flags = [r["flag"] for r in data["rows"]]
    assert len(flags) == 7 and INCONSISTENT not in flags
    if spec == "free:2":
        assert set(flags) == {CONSISTENT}
    assert data["heuristic"] is True


def test_verdict_zn2_not_all_consistent():
    flags = [r["flag"] for r in verdict_matrix("zn:2", 9)["rows"]]
    assert set(flags) != {CONSISTENT} and INCONSISTENT in flags


def test_verdict_cli_is_byte_stable(capsys):
    rc1, out1, _ = run(capsys, "verdict", "--group", "free:2", "--radius", "9")
    rc2, out2, _ = run(capsys, "verdict", "--group", "free:2", "--radius", "9")
    assert rc1 == rc2 == 0 and out1 == out2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "cayleyvf.cli", "ball", "--group", "zn:2", "--radius", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["vertexCount"] == 5
