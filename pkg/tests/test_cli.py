import csv
import json

import pytest

from onlinerank import instance_io
from onlinerank.cli import ExperimentConfig, UsageError, main
from onlinerank.generators import gen_figure1, gen_upper_triangular
from onlinerank.graph_core import BipartiteInstance


def _lines(path):
    return path.read_text().splitlines()


def test_generate_upper_triangular(tmp_path):
    out = tmp_path / "ut.json"
    assert main(["generate", "upper-triangular", "--n", "20", "-o", str(out)]) == 0
    assert instance_io.load(out) == gen_upper_triangular(20)
    assert json.loads(out.read_text())["generator"] == {"family": "upper_triangular",
                                                         "params": {"n": 20}}


def test_generate_figure1(tmp_path):
    out = tmp_path / "f.json"
    assert main(["generate", "figure1", "-o", str(out)]) == 0
    assert instance_io.load(out) == gen_figure1()


def test_generate_random_is_byte_stable(tmp_path):
    args = ["generate", "random-bipartite", "--ns", "6", "--nb", "5", "--p", "0.4",
            "--weights", "1", "10000", "--seed", "12"]
    assert main(args + ["-o", str(tmp_path / "a.json")]) == 0
    assert main(args + ["-o", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_generate_usage_errors(tmp_path):
    assert main(["generate", "upper-triangular"]) == 2
    assert main(["generate", "hexagon", "--n", "3"]) == 2
    assert main(["generate", "upper-triangular", "--n", "0"]) == 2


def test_oracle(tmp_path, capsys):
    p = tmp_path / "f.json"
    instance_io.save(gen_figure1(), p)
    assert main(["oracle", str(p), "--weighted"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["objective 10000000000.0", "pair 1 0"]


def test_run_single_edge(tmp_path):
    p = tmp_path / "e.json"
    instance_io.save(BipartiteInstance(1, 1, ((0,),), (0,)), p)
    out = tmp_path / "run.txt"
    assert main(["run", str(p), "--engine", "ranking", "--seed", "1", "-o", str(out)]) == 0
    lines = _lines(out)
    assert "objective 1" in lines and "pair 0 0" in lines


def test_run_with_rank_file(tmp_path):
    p = tmp_path / "f.json"
    instance_io.save(gen_figure1(), p)
    ranks = tmp_path / "x.txt"
    ranks.write_text("# light then heavy\n0.01, 0.999999999999\n")
    out = tmp_path / "run.txt"
    assert main(["run", str(p), "--engine", "vertex_weighted", "--ranks", str(ranks),
                 "-o", str(out)]) == 0
    lines = _lines(out)
    assert "objective 1.0" in lines and "pair 0 0" in lines
    assert any(line.startswith("revenue 0 ") for line in lines)
    assert main(["run", str(p), "--engine", "eps_ranking", "--eps", "0.1", "--ranks", str(ranks),
                 "-o", str(out)]) == 0
    assert "objective 10000000000.0" in _lines(out)


def test_run_errors(tmp_path):
    p = tmp_path / "f.json"
    instance_io.save(gen_figure1(), p)
    bad = tmp_path / "x.txt"
    bad.write_text("0.5\n")
    assert main(["run", str(p), "--engine", "ranking", "--ranks", str(bad)]) == 2
    assert main(["run", str(p), "--engine", "eps_ranking"]) == 2
    assert main(["run", str(tmp_path / "missing.json"), "--engine", "ranking"]) == 3
    junk = tmp_path / "junk.json"
    junk.write_text("[")
    assert main(["run", str(junk), "--engine", "ranking"]) == 2


def test_check_writes_csv(tmp_path):
    out = tmp_path / "l3.csv"
    assert main(["check", "L3", "--cases", "50", "--seed", "1", "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 50 and all(r["holds"] == "true" for r in rows)
    assert list(rows[0]) == ["lemma_id", "engine", "seed", "holds", "f_x", "f_xprime", "bound"]


def test_check_weighted_bound_column(tmp_path):
    out = tmp_path / "l7.csv"
    assert main(["check", "L7", "--cases", "20", "--eps", "0.25", "-o", str(out)]) == 0
    for r in csv.DictReader(out.open()):
        assert r["engine"] == "eps_ranking"
        assert float(r["bound"]) > 0


def test_check_single_case_and_errors(tmp_path):
    assert main(["check", "L4", "--cases", "1", "-o", str(tmp_path / "o.csv")]) == 0
    assert len(_lines(tmp_path / "o.csv")) == 2
    assert main(["check", "L99"]) == 2
    assert main(["check", "L3", "--eps", "0.1"]) == 2
    assert main(["check", "L3", "--cases", "0"]) == 2


def _concentrate(tmp_path, name, *extra):
    out = tmp_path / name
    code = main(["concentrate", "--family", "upper-triangular", "--n", "10", "--theorem", "T1",
                 "--trials", "3000", "--seed", "5", "-o", str(out), *extra])
    return code, out


def test_concentrate_is_byte_stable(tmp_path):
    code_a, a = _concentrate(tmp_path, "a.csv")
    code_b, b = _concentrate(tmp_path, "b.csv", "--workers", "2")
    assert code_a == code_b == 0
    assert a.read_bytes() == b.read_bytes()
    header = _lines(a)[0].split(",")
    assert header[:3] == ["instance_id", "engine", "eps"] and header[-1] == "oracle_objective"


def test_concentrate_config_round_trip(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    code, out = _concentrate(tmp_path, "a.csv", "--save-config", str(cfg_path),
                             "--alphas", "0.1,0.2")
    assert code == 0
    cfg = ExperimentConfig.from_json(cfg_path.read_text())
    assert cfg.alphas == [0.1, 0.2] and cfg.trials == 3000
    out2 = tmp_path / "b.csv"
    assert main(["concentrate", "--config", str(cfg_path), "-o", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_concentrate_disjoint_has_empty_tails(tmp_path):
    p = tmp_path / "d.json"
    assert main(["generate", "disjoint-perfect", "--n", "8", "-o", str(p)]) == 0
    out = tmp_path / "d.csv"
    assert main(["concentrate", "--instance", str(p), "--trials", "500", "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert all(float(r["empirical_tail"]) == 0.0 for r in rows)
    assert {r["instance_id"] for r in rows} == {"d"}


def test_concentrate_errors(tmp_path):
    assert main(["concentrate", "--trials", "10"]) == 2  # no instance
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"theorem": "T1", "colour": "red"}))
    assert main(["concentrate", "--config", str(cfg)]) == 2
    assert main(["concentrate", "--instance", str(tmp_path / "nope.json")]) == 3


def test_config_unknown_keys():
    with pytest.raises(UsageError):
        ExperimentConfig.from_json('{"bogus": 1}')
