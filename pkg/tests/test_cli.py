import json
import subprocess
import sys
from pathlib import Path

import pytest

from dercomp.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, ScenarioError, main, parse_scenario, strip_timing


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def test_complete_table(capsys):
    r = report(capsys, "complete", "--ring", "Z", "--ideal", "2", "--module", "Z", "--n_max", "3", "--d_max", "1")
    assert r["result"]["table"]["H0"] == "Z/2,Z/4,Z/8,Z/16"
    assert r["status"] == "COMPUTED"
    assert r["scenario"]["command"] == "complete"
    assert "tot" in r["conventions"] and r["engine"]["name"] == "dercomp"


def test_multitor_dimensions(capsys):
    r = report(capsys, "multitor", "ring=Z", "modules=Z/3,Z/3,Z/3", "d_max=3")
    assert r["result"]["elementary_ranks"] == "1,2,1,0"


def test_gm_zero_ideal(capsys):
    r = report(capsys, "gm", "ring=Z", "gens=0", "module=Z", "k_max=3", "d_max=1")
    assert r["result"]["table"]["H0"] == "Z,Z,Z"


@pytest.mark.parametrize("argv", [
    ["compare", "ring=Z", "ideal=3", "module=Z/9"],
    ["fiber-check", "ring=Z", "ideal=2", "module=Z", "n_max=2", "d_max=2"],
    ["main-shadow", "ring=Z", "algebra=2,2", "target=2", "n_max=3", "d_max=1"],
    ["ss-shadow", "ring=Z", "ideal=2", "h0=Z", "h1=Z/2", "n_max=3", "d_max=2"],
    ["cyclic-stage", "q_src=2", "q_tgt=4", "prime=2", "d_max=6"],
])
def test_judged_commands_pass(capsys, argv):
    r = report(capsys, *argv)
    assert r["status"] == "PASS"


@pytest.mark.parametrize("argv", [
    ["koszul", "--ring", "Z", "--gens", "4,3"],
    ["resolve", "ring=Z", "module=Z^2 + Z/4"],
    ["tower", "ring=Z", "stages=Z/2,Z/4,Z/8", "maps=1,1", "module=Z", "ideal=2"],
])
def test_computed_commands(capsys, argv):
    r = report(capsys, *argv)
    assert r["status"] in ("COMPUTED", "PASS")


def test_verdict_failure_exit_code(capsys):
    # unnormalized stages of a torsion module carry degenerate summands and are
    # not quotients of M, so no interleave through the augmentations exists
    code, out, _ = run(capsys, "compare", "ring=Z", "ideal=2", "module=Z/4", "--mode", "unnormalized")
    data = json.loads(out)
    assert code == EXIT_FAIL and data["status"] == "FAIL"
    assert data["result"]["verdict"] == "MISMATCH"


def test_unjudged_undetermined_is_computed(capsys):
    r = report(capsys, "tower", "ring=Z", "stages=Z/2,Z/4", "maps=1", "module=Z", "ideal=3")
    assert r["status"] == "COMPUTED" and r["result"]["adic"]["kind"] == "Undetermined"


def test_unknown_key(capsys):
    code, _, err = run(capsys, "complete", "foo=1", "ring=Z", "ideal=2", "module=Z")
    assert code == EXIT_INPUT
    assert "<args>:1:1: unknown key 'foo'" in err


def test_missing_required_key(capsys):
    code, _, err = run(capsys, "complete", "ring=Z", "module=Z")
    assert code == EXIT_INPUT and "ideal" in err


def test_bad_ring(capsys):
    code, _, err = run(capsys, "complete", "ring=F/4", "ideal=2", "module=Z")
    assert code == EXIT_INPUT


def test_parse_errors_carry_positions():
    text = "command = complete\nring = Z\n  bogus line\n"
    with pytest.raises(ScenarioError) as e:
        parse_scenario(text, "s.scn")
    assert str(e.value).startswith("s.scn:3:")
    with pytest.raises(ScenarioError) as e:
        parse_scenario("command = complete\nring = Z\nring = Q\n", "s.scn")
    assert "s.scn:3:1" in str(e.value) and "duplicate" in str(e.value)
    with pytest.raises(ScenarioError) as e:
        parse_scenario("command = complete\nwhat = 1\n", "s.scn")
    assert "s.scn:2:1" in str(e.value)


def test_scenario_comments_and_run(tmp_path, capsys):
    scn = tmp_path / "a.scn"
    scn.write_text("# a comment\ncommand = complete\nring = Z\nideal = 3\nmodule = Z\nn_max = 2\nd_max = 1\n")
    out = tmp_path / "a.json"
    code, stdout, _ = run(capsys, "run", "--scenario", str(scn), "--out", str(out))
    assert code == EXIT_OK and stdout == ""
    data = json.loads(out.read_text())
    assert data["result"]["table"]["H0"] == "Z/3,Z/9,Z/27"
    assert b"\r\n" not in out.read_bytes()


def test_mode_flag(capsys):
    a = report(capsys, "complete", "ring=Z", "ideal=2", "module=Z", "n_max=2", "d_max=1", "--mode", "normalized")
    b = report(capsys, "complete", "ring=Z", "ideal=2", "module=Z", "n_max=2", "d_max=1", "--mode", "unnormalized")
    assert a["scenario"]["mode"] == "normalized" and b["scenario"]["mode"] == "unnormalized"
    assert a["result"]["table"] == b["result"]["table"]


def test_determinism(capsys):
    argv = ["compare", "ring=Z", "ideal=2", "module=Z + Z/4", "n_max=3", "k_max=3", "d_max=1"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert strip_timing(a) == strip_timing(b)


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "dercomp", "koszul", "ring=Z", "ideal=3"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0 and json.loads(p.stdout)["scenario"]["ideal"] == "3"


# -- corpus -------------------------------------------------------------------

def test_empty_corpus(tmp_path, capsys):
    code, out, _ = run(capsys, "corpus", str(tmp_path))
    assert code == EXIT_OK and "0 scenarios" in out


def _write_corpus(d: Path):
    (d / "b.scn").write_text("command = koszul\nring = Z\nideal = 2,2\n")
    (d / "a.scn").write_text("command = complete\nring = Z\nideal = 2\nmodule = Z\nn_max = 2\nd_max = 1\n")


def test_corpus_update_then_pass(tmp_path, capsys):
    _write_corpus(tmp_path)
    assert run(capsys, "corpus", str(tmp_path), "--update")[0] == EXIT_OK
    code, out, _ = run(capsys, "corpus", str(tmp_path), "--jobs", "2")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[:2] == ["PASS a", "PASS b"]
    assert lines[-1] == "2 scenarios, 2 passed, 0 failed"


def test_corpus_detects_corruption(tmp_path, capsys):
    _write_corpus(tmp_path)
    run(capsys, "corpus", str(tmp_path), "--update")
    exp = tmp_path / "a.expected.json"
    exp.write_text(exp.read_text().replace("Z/4", "Z/5"))
    code, out, _ = run(capsys, "corpus", str(tmp_path))
    assert code != EXIT_OK
    assert "FAIL a" in out and "Z/5" in out and "PASS b" in out


def test_corpus_missing_expectation(tmp_path, capsys):
    _write_corpus(tmp_path)
    code, out, _ = run(capsys, "corpus", str(tmp_path))
    assert code != EXIT_OK and "MISSING a" in out


def test_shipped_corpus(capsys):
    corpus = Path(__file__).resolve().parent.parent / "corpus"
    code, out, _ = run(capsys, "corpus", str(corpus), "--jobs", "2")
    assert code == EXIT_OK, out
    assert out.strip().splitlines()[-1].endswith("0 failed")
