from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dyncomplete.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    d = tmp_path / "in"
    assert run(capsys, "catalog", "--dir", str(d))[0] == 0
    return d


def test_catalog_files(files):
    assert sorted(p.name for p in files.iterdir()) == ["a1.json", "a2.json", "cohomology.json", "deg47.json",
                                                       "preimage.json", "rhom_p2.json", "window.json"]


def test_enumerate(capsys, files, tmp_path):
    dot = tmp_path / "h.dot"
    code, out, _ = run(capsys, "complete", "enumerate", "--quiver", str(files / "a2.json"), "--oracle",
                       "--dot", str(dot))
    doc = json.loads(out)
    assert code == 0 and doc["v"] == 1 and doc["count"] == 5 and doc["oracle_agrees"]
    assert [s["label"] for s in doc["subcategories"]] == ["0", "<S(2)>", "<S(1)>", "<P(2)>", "D^b"]
    assert dot.read_text().startswith("digraph")


def test_improve_degree_47(capsys, files):
    code, out, _ = run(capsys, "metric", "improve", "--quiver", str(files / "a1.json"),
                       "--metric", str(files / "deg47.json"))
    m = json.loads(out)["metric"]
    assert code == 0
    assert m["prefix"] == [{"1": "[-47,-47] [1,inf)"}]
    assert m["tail"] == {"kind": "shift", "d": 1, "moving": {"1": "[1,inf)"}}


def test_complete_run(capsys, files):
    code, out, _ = run(capsys, "complete", "run", "--quiver", str(files / "a2.json"),
                       "--metric", str(files / "preimage.json"))
    rep = json.loads(out)["report"]
    assert code == 0 and rep["label"] == "<S(2)>" and rep["completion_modules"] == ["S(2)"]


def test_functor_commands(capsys, files):
    base = ["--source", str(files / "a2.json"), "--target", str(files / "a1.json"), "--functor",
            str(files / "rhom_p2.json")]
    code, out, _ = run(capsys, "functor", "transport", *base, "--metric", "cohomology")
    assert code == 0 and json.loads(out)["transport"]["pairs"] == [["S(2)@t", "S(1)@t"]]
    code, out, _ = run(capsys, "functor", "apply", *base, "--object", "1,1@2 1,0@0")
    assert json.loads(out)["output"] == ["S(1)@2"]
    code, out, _ = run(capsys, "functor", "preimage", *base, "--metric", str(files / "cohomology.json"))
    assert json.loads(out)["metric"]["prefix"][0]["1,0"] == "(-inf,inf)"
    code, _, err = run(capsys, "functor", "image", *base, "--metric", "cohomology")
    assert code == 2 and "full" in err
    code, out, _ = run(capsys, "functor", "compress", "--source", "A1", "--target", "A2", "--functor",
                       "tensor-projective:2", "--metric", "cohomology", "--metric2", str(files / "preimage.json"))
    assert json.loads(out)["compression"] == {"verdict": "yes"}


def test_cauchy_commands(capsys, files):
    w = str(files / "window.json")
    code, out, _ = run(capsys, "cauchy", "cone", "--quiver", "A2", "--window", w)
    assert json.loads(out)["cones"][0] == {"from": 1, "to": 2, "cone": ["S(2)@0"]}
    code, out, _ = run(capsys, "cauchy", "null", "--quiver", "A2", "--window", w, "--metric", "cohomology")
    assert json.loads(out)["null"]["verdict"] == "obstruction"
    code, out, _ = run(capsys, "cauchy", "window", "--quiver", "A2", "--window", w, "--metric", "trivial")
    assert json.loads(out)["cauchy"]["verdict"] == "cauchy"


def test_other_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "quiver", "info", "--quiver", "D4")
    assert json.loads(out)["type"] == "D4" and len(json.loads(out)["roots"]) == 12
    code, out, _ = run(capsys, "dercat", "table", "--quiver", "A2")
    assert json.loads(out)["serre_failures"] == 0
    code, out, _ = run(capsys, "dercat", "ar-dot", "--quiver", "A2")
    assert out.startswith("digraph")
    code, out, _ = run(capsys, "complete", "supports", "--quiver", "A1", "--metric", "deg47")
    doc = json.loads(out)
    assert doc["compact"]["describe"] == "0" and doc["weak"]["shifts"] == {"1": "(-inf,-48] [-46,inf)"}
    code, out, _ = run(capsys, "complete", "realize", "--quiver", "A2", "--generators", "0,1@0")
    assert json.loads(out)["metric"]["prefix"] == [{"1,0": "(-inf,inf)"}]
    code, out, _ = run(capsys, "metric", "compare", "--quiver", "A1", "--metric", "slowdown", "--metric2",
                       "cohomology")
    assert json.loads(out)["relation"] == "equivalent"
    code, out, _ = run(capsys, "metric", "intersect", "--quiver", "A1", "--metric", "deg47", "--metric2",
                       "cohomology")
    assert code == 0 and json.loads(out)["metric"]["tail"]["kind"] == "shift"
    out_file = tmp_path / "r.json"
    assert run(capsys, "metric", "check", "--quiver", "A1", "--metric", "cohomology", "--out", str(out_file))[1] == ""
    assert json.loads(out_file.read_text())["verdict"]["is_good"]


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"prefix": [{"1": "[0,inf)"}, {"1": "[-1,inf)"}], "tail": {"kind": "constant"}}))
    code, out, _ = run(capsys, "metric", "check", "--quiver", "A1", "--metric", str(bad))
    assert code == 2 and not json.loads(out)["verdict"]["is_metric"]
    assert run(capsys, "metric", "compare", "--quiver", "A1", "--metric", str(bad), "--metric2", "cohomology")[0] == 0
    assert run(capsys, "metric", "compare", "--quiver", "A1", "--metric", str(bad), "--metric2", "cohomology",
               "--strict")[0] == 3
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"prefix": [{"1": "[0,inf]"}], "tail": {"kind": "constant"}}))
    code, _, err = run(capsys, "metric", "check", "--quiver", "A1", "--metric", str(schema))
    assert code == 2 and "$.prefix[0]" in err
    q = tmp_path / "q.json"
    q.write_text(json.dumps({"vertices": ["1", "2"], "arrows": [["1", "2"], ["2", "1"]]}))
    assert run(capsys, "quiver", "info", "--quiver", str(q))[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "metric", "wat")[0] == 2


def test_deterministic_across_cache_states(capsys, tmp_path):
    args = ["complete", "run", "--quiver", "D4", "--metric", "aisle", "--cache-dir", str(tmp_path / "c")]
    cold = run(capsys, *args)[1]
    warm = run(capsys, *args)[1]
    uncached = run(capsys, "complete", "run", "--quiver", "D4", "--metric", "aisle", "--no-cache")[1]
    assert cold == warm == uncached
    assert (tmp_path / "c").iterdir()


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "dyncomplete.cli", "complete", "enumerate", "--quiver", "A1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["count"] == 2
