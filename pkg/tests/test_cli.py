import json

import pytest

from coopl.cli import main


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_full_pipeline(work):
    assert run("gen-game", "--class", "wvg", "--n", 5, "--seed", 2, "--out", "g.json") == 0
    assert run("sample", "--game", "g.json", "--m", 60, "--seed", 3, "--out", "s.jsonl") == 0
    assert run("stabilize", "--game", "g.json", "--samples", "s.jsonl", "--out", "p.json") == 0
    assert run("check", "--game", "g.json", "--payoff", "p.json", "--n-test", 300,
               "--out", "c.json") == 0
    assert json.loads((work / "c.json").read_text())["tested"] == 300
    assert run("learn", "--class", "wvg", "--samples", "s.jsonl", "--out", "h.json") == 0
    hyp = json.loads((work / "h.json").read_text())
    assert hyp["learned"] is True and hyp["fit"]["replay"] == "exact"
    assert run("check", "--game", "g.json", "--hypothesis", "h.json", "--n-test", 300,
               "--out", "e.json") == 0
    assert "error_rate" in json.loads((work / "e.json").read_text())


def test_stabilize_draws_its_own_samples(work):
    write(work / "g.json", {"class": "wvg", "n": 3, "weights": [1, 1, 1], "quota": 2})
    assert run("stabilize", "--game", "g.json", "--m", 50, "--out", "p.json") == 0
    doc = json.loads((work / "p.json").read_text())
    assert doc["total"]["num"] == "3" and doc["total"]["den"] == "2"


def test_flow_learning_with_topology(work):
    assert run("gen-game", "--class", "flow", "--n", 6, "--weight-range", 1, 9, "--out", "net.json") == 0
    assert run("sample", "--game", "net.json", "--dist-kind", "random_walk_path", "--m", 40,
               "--out", "s.jsonl") == 0
    assert run("learn", "--class", "flow-path", "--samples", "s.jsonl", "--topology", "net.json",
               "--out", "h.json") == 0
    assert json.loads((work / "h.json").read_text())["class"] == "flow"


def test_ttg_and_ctsg_learning(work):
    assert run("gen-game", "--class", "ttg", "--n", 4, "--k", 2, "--out", "t.json") == 0
    assert run("sample", "--game", "t.json", "--m", 40, "--out", "s.jsonl") == 0
    assert run("learn", "--class", "ttg", "--samples", "s.jsonl", "--out", "h.json") == 0
    assert json.loads((work / "h.json").read_text())["fit"]["r"] == 0

    skills = [["a"], ["b"], ["a", "c"]]
    write(work / "k.json", {"class": "skill", "n": 3, "player_skills": skills,
                            "tasks": [["a", "b"]], "mode": "conjunctive", "starred": [0]})
    assert run("sample", "--game", "k.json", "--m", 30, "--out", "ks.jsonl") == 0
    assert run("learn", "--class", "ctsg", "--samples", "ks.jsonl", "--skills", "k.json",
               "--out", "kh.json") == 0


def test_reduce(work):
    write(work / "f.json", {"n": 2, "clauses": [[1, -2]]})
    assert run("reduce", "--from", "cnf", "--to", "minsum", "--in", "f.json", "--out", "m.json") == 0
    assert json.loads((work / "m.json").read_text())["class"] == "minsum"
    assert run("reduce", "--from", "minsum", "--to", "flow", "--in", "m.json", "--out", "g.json") == 0
    assert run("reduce", "--from", "dnf", "--to", "mcnet", "--in", "f.json", "--out", "mc.json") == 0
    assert run("reduce", "--from", "dnf", "--to", "flow", "--in", "f.json") == 2


def test_experiment_writes_report_and_figures(work):
    write(work / "cfg.json", {"game_spec": {"class": "wvg", "n": 4}, "trials": 3,
                              "held_out": 200, "m": 30})
    assert run("experiment", "--config", "cfg.json", "--out", "r.json") == 0
    report = json.loads((work / "r.json").read_text())
    assert report["kind"] == "stability" and len(report["rows"]) == 3
    assert (work / "r_rates.png").exists() and (work / "r_payments.png").exists()
    assert run("experiment", "--config", "cfg.json", "--format", "csv", "--no-figures",
               "--out", "r.csv") == 0
    assert (work / "r.csv").read_text().startswith("trial,")


def test_exit_code_invalid_input(work):
    assert run("sample", "--game", "missing.json", "--m", 3) == 2
    write(work / "bad.json", {"class": "wvg", "n": 2, "weights": [1], "quota": 1})
    assert run("sample", "--game", "bad.json", "--m", 3) == 2


def test_exit_code_not_realizable(work):
    lines = [{"header": True, "n": 2, "m": 3, "seed": None, "distribution": None},
             {"S": [0], "v": 1}, {"S": [1], "v": 1}, {"S": [0, 1], "v": 0}]
    (work / "xor.jsonl").write_text("\n".join(json.dumps(x) for x in lines))
    assert run("learn", "--class", "wvg", "--samples", "xor.jsonl") == 3


def test_exit_code_internal_limit(work, monkeypatch):
    import coopl.cli as cli
    from coopl.errors import ToleranceLimitExceeded

    def boom(*a, **k):
        raise ToleranceLimitExceeded("r_max reached")

    monkeypatch.setattr(cli, "learn_ttg", boom)
    lines = [{"header": True, "n": 1, "m": 1}, {"S": [0], "v": 1}]
    (work / "s.jsonl").write_text("\n".join(json.dumps(x) for x in lines))
    assert run("learn", "--class", "ttg", "--samples", "s.jsonl") == 4
