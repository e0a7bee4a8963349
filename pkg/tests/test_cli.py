import json
import subprocess
import sys

import pytest

from kleisli.cli import main

LOOP = {
    "kind": "ena", "states": ["x", "y", "z"], "alphabet": ["a", "b"], "final": ["z"],
    "transitions": [
        {"from": "x", "to": "y", "word": []},
        {"from": "y", "to": "y", "word": ["a"]},
        {"from": "y", "to": "z", "word": ["b"]},
        {"from": "z", "to": "x", "word": []},
    ],
}
SELF_LOOP = {"kind": "ena", "states": ["x"], "alphabet": ["a"],
             "transitions": [{"from": "x", "to": "x", "word": []}]}
TAU_A = {"kind": "lts", "states": ["x", "y", "z"], "alphabet": ["a"],
         "transitions": [{"from": "x", "to": "y", "label": "tau"},
                         {"from": "y", "to": "z", "label": "a"}]}
PLAIN = {"kind": "lts", "states": ["x", "x1"], "alphabet": ["a"],
         "transitions": [{"from": "x", "to": "x1", "label": "a"}]}
DELAYED = {"kind": "lts", "states": ["y", "m", "y1"], "alphabet": ["a"],
           "transitions": [{"from": "y", "to": "m", "label": "tau"},
                           {"from": "m", "to": "y1", "label": "a"}]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, doc in [("loop", LOOP), ("self", SELF_LOOP), ("tau", TAU_A),
                      ("plain", PLAIN), ("delayed", DELAYED)]:
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_trace_max_len(files, capsys):
    code, out, _ = run(capsys, "trace", files["loop"], "--state", "x", "--max-len", "2")
    assert code == 0
    assert out == "b\nab\nbb\n"


def test_trace_exact_of_self_loop_is_empty(files, capsys):
    code, out, _ = run(capsys, "trace", files["self"], "--state", "x", "--exact")
    assert code == 0
    assert out.startswith("empty language\n")
    assert "accepting=[]" in out


def test_trace_exact_prints_minimal_dfa(files, capsys):
    code, out, _ = run(capsys, "trace", files["loop"], "--state", "z", "--exact")
    # epsilon + (a*b)+ is (a*b)*: accept exactly after the empty word or a b
    assert out == ("dfa states=2 start=0 accepting=[0]\n"
                   "0 -a-> 1\n0 -b-> 0\n1 -a-> 1\n1 -b-> 0\n")


def test_saturate_star(files, capsys, tmp_path):
    code, out, _ = run(capsys, "saturate", files["tau"], "--strategy", "star", "--format", "aut")
    assert code == 0
    assert '(0, "a", 2)' in out.splitlines()
    edgeless = tmp_path / "none.json"
    edgeless.write_text(json.dumps({"kind": "lts", "states": ["p"], "alphabet": ["a"]}))
    code, out, _ = run(capsys, "saturate", str(edgeless), "--format", "aut")
    assert out == 'des (0, 1, 1)\n(0, "tau", 0)\n'


def test_saturate_free_summary(files, capsys):
    code, out, _ = run(capsys, "saturate", files["tau"], "--strategy", "free")
    assert code == 0
    doc = json.loads(out)
    cell = next(c for c in doc["cells"] if (c["from"], c["to"]) == ("x", "z"))
    assert ["a"] in cell["samples"]


def test_saturate_rejects_impossible_outputs(files, capsys):
    code, _, err = run(capsys, "saturate", files["loop"], "--format", "aut")
    assert code == 3 and err
    code, _, _ = run(capsys, "saturate", files["tau"], "--strategy", "free", "--format", "aut")
    assert code == 3


def test_bisim_pairs(files, capsys):
    code, out, _ = run(capsys, "bisim", files["plain"], files["delayed"],
                       "--kind", "weak", "--pairs", "x~y")
    assert (code, out) == (0, "x ~ y: yes\n")
    code, out, _ = run(capsys, "bisim", files["plain"], files["delayed"],
                       "--kind", "strong", "--pairs", "x~y")
    assert (code, out) == (1, "x ~ y: no\n")


def test_bisim_identical_files(files, capsys):
    code, out, _ = run(capsys, "bisim", files["plain"], files["plain"], "--kind", "strong")
    assert code == 0
    assert out == "{1:x, 2:x}\n{1:x1, 2:x1}\n"


@pytest.mark.parametrize("name", ["loop", "tau", "delayed"])
def test_bisim_via_star_and_free_agree(files, capsys, name):
    _, a, _ = run(capsys, "bisim", files[name], "--kind", "weak", "--via", "star")
    _, b, _ = run(capsys, "bisim", files[name], "--kind", "weak", "--via", "free")
    assert a == b


def test_bisim_single_system_pairs(files, capsys):
    code, out, _ = run(capsys, "bisim", files["delayed"], "--pairs", "y~m", "m~y1")
    assert code == 1
    assert out == "y ~ m: yes\nm ~ y1: no\n"


def test_unknown_state(files, capsys):
    assert run(capsys, "bisim", files["plain"], "--pairs", "x~q")[0] == 4
    assert run(capsys, "trace", files["loop"], "--state", "q", "--max-len", "1")[0] == 4


def test_trace_equiv(files, capsys, tmp_path):
    sat = tmp_path / "sat.json"
    assert run(capsys, "saturate", files["loop"], "-o", str(sat))[0] == 0
    for s in "xyz":
        code, out, _ = run(capsys, "trace-equiv", f"{files['loop']}:{s}", f"{sat}:{s}")
        assert (code, out) == (0, "equivalent\n")
    code, out, _ = run(capsys, "trace-equiv", f"{files['loop']}:x", f"{files['loop']}:z")
    assert (code, out) == (1, "not equivalent\n")


def test_minimize(files, capsys):
    code, out, _ = run(capsys, "minimize", files["delayed"], "--kind", "weak")
    doc = json.loads(out)
    assert doc["states"] == ["y", "y1"]
    assert doc["transitions"] == [{"from": "y", "label": "a", "to": "y1"}]
    code, out, _ = run(capsys, "minimize", files["delayed"], "--kind", "strong")
    assert json.loads(out)["states"] == ["y", "m", "y1"]


def test_convert_between_formats(files, capsys, tmp_path):
    aut = tmp_path / "d.aut"
    assert run(capsys, "convert", files["delayed"], "-o", str(aut))[0] == 0
    assert aut.read_text().startswith("des (0, 2, 3)")
    code, out, _ = run(capsys, "convert", str(aut), "--format", "dot")
    assert code == 0 and out.startswith("digraph G {")


def test_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, out, err = run(capsys, "convert", str(bad))
    assert code == 2 and out == "" and "line 1" in err
    assert run(capsys, "convert", str(tmp_path / "missing.json"))[0] == 2
    other = tmp_path / "model.txt"
    other.write_text("{}")
    assert run(capsys, "convert", str(other))[0] == 2


def test_check(capsys, monkeypatch):
    code, out, _ = run(capsys, "check", "--suite", "h-compat", "--seed", "7", "--cases", "200")
    assert (code, out) == (0, "PASS h-compat: 200 cases, 0 failures\n")
    code, out, _ = run(capsys, "check", "--suite", "weak-coincide", "--seed", "7", "--cases", "200")
    assert code == 0
    code, out, _ = run(capsys, "check", "--suite", "monad-laws", "--cases", "0")
    assert code == 0 and "0 cases" in out
    assert run(capsys, "check", "--suite", "nope")[0] == 5


def test_check_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("KLEISLI_SEED", "7")
    _, env_out, _ = run(capsys, "check", "--suite", "dagger", "--cases", "5", "--format", "json")
    _, flag_out, _ = run(capsys, "check", "--suite", "dagger", "--cases", "5", "--seed", "7",
                         "--format", "json")
    assert env_out == flag_out
    assert json.loads(env_out)["kind"] == "report"


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "kleisli.cli", "trace", files["loop"],
                           "--state", "y", "--max-len", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "b\n"
