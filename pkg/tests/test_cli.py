import csv
import io
import json
import subprocess
import sys

import pytest

from sympval.cli import render_csv, run

STD2 = json.dumps({"n": 2, "g": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]})
IRR2 = json.dumps({"n": 2, "g": [[2 ** 0.25, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2 ** -0.25]]})


def _read_csv(path):
    text = path.read_text()
    header, body = text.split("\n", 1)
    assert header.startswith("# ")
    return json.loads(header[2:]), list(csv.DictReader(io.StringIO(body)))


def test_count_writes_reproducible_csv(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["count", "--form", STD2, "--k", "2", "--interval", "1,2,0.5,1.5", "--T-list", "2,3", "--cg", "27.5"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    cfg, rows = _read_csv(a)
    assert cfg["k"] == 2 and "out" not in cfg
    assert [float(r["T"]) for r in rows] == [2.0, 3.0]
    assert all(r["elapsed_s"] == "" for r in rows)


def test_count_matches_library(tmp_path):
    from sympval.enumeration import count_tuples
    from sympval.forms import form_from_json

    out = tmp_path / "c.csv"
    assert run(["count", "--form", STD2, "--k", "2", "--interval-all", "-1", "1", "--T-list", "2.5",
                "--cg", "1", "--out", str(out)]) == 0
    _, rows = _read_csv(out)
    assert int(rows[0]["count"]) == count_tuples(form_from_json(STD2), 2, 2.5, (-1.0, 1.0))


def test_form_file_and_malformed_form(tmp_path, capsys):
    p = tmp_path / "f.json"
    p.write_text(STD2)
    assert run(["count", "--form", str(p), "--k", "2", "--interval-all", "0", "1", "--T-list", "2",
                "--cg", "1", "--out", str(tmp_path / "o.csv")]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "gram": [[0, 1], [-1, 0]]}))
    code = run(["count", "--form", str(bad), "--k", "2", "--interval-all", "0", "1", "--T-list", "2", "--cg", "1"])
    assert code == 2
    assert "gram" in capsys.readouterr().err
    code = run(["count", "--form", '{"g": [[1]]}', "--k", "2", "--interval-all", "0", "1", "--T-list", "2"])
    assert code == 2
    assert "'n'" in capsys.readouterr().err


def test_bad_arguments_exit_2(capsys):
    assert run(["count", "--form", STD2, "--k", "2", "--T-list", "2"]) == 2  # no intervals
    assert run(["count", "--bogus"]) == 2
    assert run(["nonsense"]) == 2
    assert run(["count", "--form", STD2, "--k", "2", "--interval", "2,1,0,1", "--T-list", "2"]) == 2
    assert run(["density", "--form", STD2, "--targets", '{"(2,1)": 0.5}', "--eps", "0.1"]) == 2
    capsys.readouterr()


def test_density_found_and_exhausted(tmp_path):
    out = tmp_path / "d.json"
    assert run(["density", "--form", IRR2, "--targets", '{"(1,2)": 0.3333333333}', "--eps", "1e-2",
                "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["status"] == "found"
    assert max(rep["residuals"].values()) < 1e-2
    assert run(["density", "--form", STD2, "--targets", '{"(1,2)": 0.3333333333}', "--eps", "0.1",
                "--out", str(out)]) == 3
    assert json.loads(out.read_text())["status"] == "exhausted"


def test_rogers_weights_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["rogers", "--k", "2", "--r", "1", "--q-max", "3", "--out", str(out)]) == 0
    cfg, rows = _read_csv(out)
    assert cfg["k"] == 2 and rows


def test_sample_csv(tmp_path):
    out = tmp_path / "s.csv"
    region = json.dumps({"type": "ball", "radius": 1.0})
    argv = ["sample", "--dim", "2", "--trials", "200", "--region-json", region, "--out", str(out)]
    assert run(argv) == 0
    first = out.read_bytes()
    assert run(argv) == 0
    assert out.read_bytes() == first


def test_lie_checks(tmp_path):
    out = tmp_path / "l.json"
    assert run(["lie", "--n", "2", "--checks", "all", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and rep["brackets"]["failures"] == []


def test_recipe_runs(tmp_path, capsys):
    out = tmp_path / "w.csv"
    assert run(["recipe", "window", "--out", str(out)]) == 0
    cfg, _ = _read_csv(out)
    assert cfg["verdict"] == "PASS"
    assert "PASS" in capsys.readouterr().err


def test_render_csv_header_is_sorted_json():
    text = render_csv({"b": 1, "a": [1, 2]}, [{"x": 0.1, "y": None}])
    head, body = text.split("\n", 1)
    assert head == '# {"a": [1, 2], "b": 1}'
    assert body.splitlines() == ["x,y", "0.1,"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "sympval", "--help"], capture_output=True, text=True)
    assert p.returncode == 0 and "count" in p.stdout
