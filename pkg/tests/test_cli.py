import json
from pathlib import Path

import pytest

from absdist.cli import main

ROOT = Path(__file__).resolve().parent.parent
TRUSTED = str(ROOT / "corpus/quicksort/quicksort_trust.pl")
OPEN = str(ROOT / "corpus/quicksort/quicksort_noimport.pl")


@pytest.fixture
def graphs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["analyze", TRUSTED, "-o", str(a)]) == 0
    assert main(["analyze", OPEN, "-o", str(b)]) == 0
    return a, b


def test_analyze_table(capsys):
    assert main(["analyze", TRUSTED, "--table"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5
    assert lines[0] == "(1) quicksort/2/0  quicksort(Xs,Ys)  {Xs/g,Ys/ng}  {Xs/g,Ys/g}"


def test_analyze_json_shape(graphs):
    data = json.loads(graphs[1].read_text())
    assert data["domain"] == "gr" and data["entry"] == "quicksort/2"
    assert len(data["nodes"]) == 8
    assert {"from", "clause", "literal", "to"} <= set(data["edges"][0])


def test_compare(graphs, capsys):
    a, b = graphs
    assert main(["compare", str(a), str(b), "--metric", "tree"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["value"] == pytest.approx(0.2803, abs=1e-3)
    assert main(["compare", str(a), str(b), "--metric", "top"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.35355, abs=1e-5)


def test_compare_weights(graphs, tmp_path, capsys):
    w = tmp_path / "w.csv"
    w.write_text("pp,weight\nqsort/3/1/1,1.0\n")
    assert main(["compare", *map(str, graphs), "--metric", "flat", "--weights", str(w)]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.427, abs=1e-3)
    w.write_text("bogus/1/1/1,1.0\n")
    assert main(["compare", *map(str, graphs), "--metric", "flat", "--weights", str(w)]) == 2


def test_compare_across_domains(graphs, tmp_path, capsys):
    sh = tmp_path / "sh.json"
    assert main(["analyze", OPEN, "--domain", "share", "-o", str(sh)]) == 0
    # the base defaults to the first analysis' domain; gr cannot be lifted to share
    assert main(["compare", str(sh), str(graphs[0])]) == 4
    assert "no translation" in capsys.readouterr().err
    assert main(["compare", str(graphs[0]), str(sh)]) == 0
    assert main(["compare", str(sh), str(graphs[0]), "--base", "gr"]) == 0


def test_intersect(graphs, capsys):
    assert main(["intersect", *map(str, graphs)]) == 0
    assert len(json.loads(capsys.readouterr().out)["nodes"]) == 8


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.pl"
    bad.write_text("p :- q, .\n")
    assert main(["analyze", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err
    nop = tmp_path / "nop.pl"
    nop.write_text("p.\n")
    assert main(["analyze", str(nop)]) == 2
    assert main(["analyze", str(tmp_path / "missing.pl")]) == 2
    assert main(["analyze", TRUSTED, "--entry", "qsort/3"]) == 2
    assert main(["analyze", TRUSTED, "--widen-share", "2"]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{}")
    assert main(["compare", str(junk), str(junk)]) == 2


def test_widened_share(capsys):
    assert main(["analyze", OPEN, "--domain", "share", "--widen-share", "1", "--table"]) == 0
    assert capsys.readouterr().out.count("\n") >= 5


def test_bench_cli(tmp_path):
    corpus = tmp_path / "c"
    corpus.mkdir()
    (corpus / "app.pl").write_text((ROOT / "corpus/micro/append.pl").read_text())
    cfg = tmp_path / "b.json"
    cfg.write_text(json.dumps({"corpus": "c", "domains": [{"name": "gr"}], "output": "out.csv", "plot": True}))
    assert main(["bench", str(cfg)]) == 0
    assert (tmp_path / "out.csv").read_text().startswith("program,domain")
    assert (tmp_path / "out_tree.gp").exists()
    cfg.write_text(json.dumps({"corpus": "c", "domains": [{"name": "gr", "widen": 2}]}))
    assert main(["bench", str(cfg)]) == 2
