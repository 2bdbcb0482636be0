import json
import subprocess
import sys

import pytest

from charvar.cli import main
from charvar.words import dumps_diagram, lens


def run(tmp_path, *args):
    out = tmp_path / "r.json"
    code = main([*args, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_census_lens(tmp_path, capsys):
    code, rep, _ = run(tmp_path, "census", "--family", "lens", "--p", "5", "--q", "1", "--seed", "7")
    assert code == 0
    assert [c["dim"] for c in rep["components"]] == [0, 2, 2]
    assert {"components", "h1", "euler_prediction"} <= set(rep)
    assert "isolated" in capsys.readouterr().out


def test_euler_to_stdout(capsys):
    assert main(["euler", "--family", "lens", "--p", "5", "--q", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["euler_prediction"] == 5


def test_missing_input_exit_two(tmp_path):
    assert main(["census", "--in", str(tmp_path / "missing.json")]) == 2


def test_malformed_input_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"genus": 1,\n "alpha": [}')
    assert main(["census", "--in", str(bad)]) == 2
    assert "bad.json:2:" in capsys.readouterr().err


def test_unwritable_output_exit_two(tmp_path):
    code = main(["euler", "--family", "s2xs1", "--out", str(tmp_path / "no" / "such" / "dir.json")])
    assert code == 2


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert main(["census"]) == 2
    assert main(["census", "--family", "lens", "--p", "4", "--q", "2"]) == 2
    assert main(["sur-census", "--family", "s2xs1", "--rank", "5"]) == 2


def test_diagram_file_input(tmp_path):
    path = tmp_path / "d.json"
    path.write_text(dumps_diagram(lens(3, 1)))
    code, rep, _ = run(tmp_path, "census", "--in", str(path), "--starts", "300")
    assert code == 0 and rep["diagram"]["name"] == "lens(3,1)"


def test_failed_check_exit_one(tmp_path):
    # mislabelled file: the census cannot match the family named in it
    d = json.loads(dumps_diagram(lens(3, 1)))
    d["name"] = "lens(5,1)"
    path = tmp_path / "d.json"
    path.write_text(json.dumps(d))
    code, rep, _ = run(tmp_path, "census", "--in", str(path), "--starts", "300")
    assert code == 1 and not all(c["pass"] for c in rep["checks"])


def test_other_verbs(tmp_path):
    assert run(tmp_path, "kunneth", "--summand", "lens:2:1", "--summand", "lens:3:1")[0] == 0
    assert run(tmp_path, "verify-move", "--family", "lens", "--p", "3", "--q", "1", "--move", "stabilize")[0] == 0
    assert run(tmp_path, "blowup")[0] == 0
    assert run(tmp_path, "compose-check", "--first", "cylinder:1", "--second", "cylinder:1", "--samples", "20")[0] == 0
    code, rep, _ = run(tmp_path, "sur-census", "--family", "s3", "--genus", "1", "--rank", "3", "--starts", "200")
    assert code == 0 and rep["rank"] == 3
    assert run(tmp_path, "genus0", "--rank", "2")[0] == 0


def test_seed_determines_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["census", "--family", "lens", "--p", "8", "--q", "3", "--seed", "3", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "charvar", "euler", "--family", "s2xs1"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0 and json.loads(out.stdout)["euler_prediction"] == 0
