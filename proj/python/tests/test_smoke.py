import math

import numpy as np
import pytest

import tcl_py as tcl


def small_corpus(seed=1, scheme="bmes"):
    cfg = tcl.SynthConfig()
    cfg.vocab_a, cfg.vocab_b, cfg.chars_a, cfg.chars_b = 60, 40, 40, 30
    cfg.train_size, cfg.dev_size, cfg.test_size = 150, 30, 30
    cfg.scheme = scheme
    return tcl.generate_synthetic(cfg, seed)


def small_run(metric="bu"):
    cfg = tcl.RunConfig()
    cfg.e0, cfg.es, cfg.e_grow = 1, 4, 3
    cfg.embed_dim, cfg.hidden_dim = 8, 16
    cfg.metric = metric
    cfg.seed = 3
    return cfg


def test_scheduler():
    assert tcl.lambda_at(0.3, 10, 0) == 0.3
    assert abs(tcl.lambda_at(0.3, 10, 5) - 0.738241) < 1e-6
    assert tcl.lambda_at(0.3, 10, 10) == 1.0
    assert tcl.target_size(0.3, 10, 0, 4000) == 1200
    with pytest.raises(tcl.ConfigError):
        tcl.lambda_at(0.0, 10, 0)


def test_metrics():
    assert tcl.lc_token([0.25] * 4) == pytest.approx(0.75)
    d = np.array([[0.5, 0.2, 0.2, 0.1], [0.25, 0.25, 0.25, 0.25]])
    assert tcl.score_mnlp(d) == pytest.approx(1.039721, abs=1e-6)
    assert tcl.score_tlc(d, 1) == pytest.approx(0.75)
    passes = [np.array([[0.6, 0.4]]), np.array([[0.8, 0.2]])]
    assert tcl.bu_from_passes(passes) == pytest.approx(0.04)


def test_decode_and_f1():
    gold = tcl.decode_bmes(["B", "E", "B", "M", "E"])
    pred = tcl.decode_bmes(["B", "E", "S", "S", "S"])
    assert [(s, e) for s, e, _ in gold] == [(0, 2), (2, 5)]
    assert tcl.f1(pred, gold) == (0.25, 0.5, 1 / 3)
    assert tcl.decode_bmes(["M", "E"]) == [(0, 2, "")]
    assert tcl.decode_bmes(["NN-B", "NN-E", "VV-S"]) == [(0, 2, "NN"), (2, 3, "VV")]


def test_corpus_roundtrip(tmp_path):
    train, dev, test = small_corpus()
    assert (len(train), len(dev), len(test)) == (150, 30, 30)
    path = tmp_path / "train.txt"
    train.write(path)
    again = tcl.parse_column_file(path)
    assert again.to_column_text() == train.to_column_text()
    assert path.read_text(encoding="utf-8") == train.to_column_text()
    with pytest.raises(tcl.ParseError):
        bad = tmp_path / "bad.txt"
        bad.write_text("a B\n", encoding="utf-8")
        tcl.parse_column_file(bad)


def test_training_is_deterministic_and_saves_visits(tmp_path):
    train, dev, test = small_corpus()
    a = tcl.run_tcl(train, dev, small_run())
    b = tcl.run_tcl(train, dev, small_run())
    assert a.log_jsonl(False) == b.log_jsonl(False)
    assert a.final.to_json() == b.final.to_json()
    assert a.records[0]["stage"] == "teacher"
    base = tcl.run_baseline(train, dev, small_run())
    assert base.summary["total_visits"] == 4 * len(train)
    student = a.summary["total_visits"] - a.summary["teacher_visits"]
    assert student < 4 * len(train)

    report = a.best.evaluate(test)
    assert 0.0 <= report["cws"]["f1"] <= 1.0
    assert report["sentences"] == 30

    path = tmp_path / "model.json"
    a.best.save(path)
    loaded = tcl.load_model(path)
    assert loaded.evaluate(test) == report
    scores = loaded.score(test, "bu", seed=4)
    assert scores == loaded.score(test, "bu", seed=4)
    assert len(scores) == len(test) and all(math.isfinite(s) and s >= 0 for s in scores)
    assert tcl.score_model_free(test, "length") == [float(len(test.tokens(i))) for i in range(len(test))]


def test_incompatible_model_is_rejected():
    train, dev, _ = small_corpus()
    _, joint_dev, _ = small_corpus(scheme="joint")
    model = tcl.run_baseline(train, dev, small_run()).final
    with pytest.raises(tcl.ShapeError):
        model.evaluate(joint_dev)
