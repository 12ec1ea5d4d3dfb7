import math
import random

import pytest
import torch

from proptrainer.data import Example, collate, read_dataset
from proptrainer.models import ModelConfig, build_model
from proptrainer.training import (
    TrainConfig,
    load_checkpoint,
    noam_lr,
    save_checkpoint,
    teacher_forced_accuracy,
    train,
)
from proptrainer.vocab import VOCAB_SIZE


def _toy_examples(n=48):
    rng = random.Random(4)
    pool = [
        (["&", "a", "b"], ["a", "1", "b", "1"]),
        (["|", "a", "b"], ["b", "1"]),
        (["!", "a"], ["a", "0"]),
        (["xor", "a", "e"], ["a", "0", "e", "1"]),
        (["&", "!", "a", "|", "b", "c"], ["a", "0", "b", "1"]),
        (["e"], ["e", "1"]),
    ]
    return [Example(formula=f, target=t) for f, t in (rng.choice(pool) for _ in range(n))]


class TestSchedule:
    def test_noam_shape(self):
        peak = 3e-4
        warmup = 100
        assert noam_lr(1, peak, warmup) == pytest.approx(peak / 100)
        assert noam_lr(100, peak, warmup) == pytest.approx(peak)
        assert noam_lr(400, peak, warmup) == pytest.approx(peak / 2)
        assert noam_lr(50, peak, warmup) < noam_lr(100, peak, warmup)


class TestTraining:
    def test_initial_loss_near_uniform(self):
        torch.manual_seed(0)
        model = build_model(ModelConfig(encoder_kind="transformer_abs", dropout=0.0))
        batch = collate(_toy_examples(16), wrap=True, needs_paths=False, needs_adjacency=False)
        with torch.no_grad():
            loss = model.loss(batch).item()
        assert abs(loss - math.log(VOCAB_SIZE)) < 0.35

    def test_tiny_overfit(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(ModelConfig(encoder_kind="transformer_abs", dropout=0.0))
        examples = _toy_examples(48)
        cfg = TrainConfig(
            data="-", out_dir=str(tmp_path), steps=120, batch=16,
            warmup=30, lr=1e-3, seed=0, log_every=40,
        )
        train(model, cfg, examples)
        acc = teacher_forced_accuracy(model, examples)
        assert acc > 0.95, acc

    def test_metrics_log_written(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(ModelConfig(encoder_kind="transformer_abs", dropout=0.0))
        cfg = TrainConfig(
            data="-", out_dir=str(tmp_path), steps=4, batch=8,
            warmup=2, lr=1e-4, seed=0, log_every=2,
        )
        train(model, cfg, _toy_examples(16))
        lines = (tmp_path / "metrics.log").read_text().splitlines()
        header = [l for l in lines if l.startswith("#")]
        rows = [l for l in lines if l and not l.startswith("#")]
        assert any("schedule=noam" in h for h in header)
        assert any("dropout=" in h for h in header)
        assert rows[0].split("\t")[0] == "step"
        assert rows[-1].split("\t")[0] == "4"

    def test_checkpoint_round_trip(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(ModelConfig(encoder_kind="gcn", dropout=0.0))
        cfg = TrainConfig(data="-", out_dir=str(tmp_path))
        save_checkpoint(model, cfg, tmp_path / "model.pt")
        restored = load_checkpoint(tmp_path / "model.pt")
        assert restored.cfg.encoder_kind == "gcn"
        for a, b in zip(model.parameters(), restored.parameters()):
            assert torch.equal(a, b)

    def test_periodic_snapshots(self, tmp_path):
        torch.manual_seed(0)
        model = build_model(ModelConfig(encoder_kind="transformer_abs", dropout=0.0))
        cfg = TrainConfig(
            data="-", out_dir=str(tmp_path), steps=6, batch=8,
            warmup=2, lr=1e-4, seed=0, ckpt_every=2,
        )
        train(model, cfg, _toy_examples(16))
        assert sorted(p.name for p in tmp_path.glob("model_step*.pt")) == [
            "model_step2.pt", "model_step4.pt", "model_step6.pt",
        ]

    def test_snapshot_equals_shorter_run(self, tmp_path):
        # truncating a seeded run at step N reproduces a steps=N run exactly
        def run(steps, out, ckpt_every=0):
            torch.manual_seed(3)
            model = build_model(ModelConfig(encoder_kind="transformer_abs"))
            cfg = TrainConfig(
                data="-", out_dir=str(tmp_path / out), steps=steps, batch=8,
                warmup=2, lr=1e-4, seed=3, ckpt_every=ckpt_every,
            )
            train(model, cfg, _toy_examples(32))

        run(8, "long", ckpt_every=4)
        run(4, "short")
        long_snap = load_checkpoint(tmp_path / "long" / "model_step4.pt")
        short_final = load_checkpoint(tmp_path / "short" / "model.pt")
        for a, b in zip(long_snap.parameters(), short_final.parameters()):
            assert torch.equal(a, b)

    def test_deterministic_given_seed(self, tmp_path):
        def run(out):
            torch.manual_seed(7)
            model = build_model(ModelConfig(encoder_kind="transformer_abs"))
            cfg = TrainConfig(
                data="-", out_dir=str(tmp_path / out), steps=6, batch=8,
                warmup=4, lr=1e-4, seed=7,
            )
            train(model, cfg, _toy_examples(32))
            return [p.detach().clone() for p in model.parameters()]

        for a, b in zip(run("a"), run("b")):
            assert torch.equal(a, b)
