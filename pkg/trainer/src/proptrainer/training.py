"""Teacher-forced training with a Noam-shaped learning-rate schedule."""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import torch

from .data import Batch, Example, bucketed_batches, collate
from .models import ModelConfig, Seq2Seq, build_model
from .vocab import PAD_ID


@dataclass
class TrainConfig:
    data: str
    out_dir: str
    annotations: str | None = None
    steps: int = 20_000
    batch: int = 128
    warmup: int = 4000
    lr: float = 1e-4  # LSTM runs use 5e-5
    seed: int = 0
    log_every: int = 50
    eval_data: str | None = None
    eval_every: int = 500
    ckpt_every: int = 0  # also snapshot model_step{N}.pt every N steps


def noam_lr(step: int, peak: float, warmup: int) -> float:
    """Linear warmup to the peak rate, then inverse-sqrt decay."""
    step = max(step, 1)
    return peak * min(step / warmup, math.sqrt(warmup / step))


def _collate_for(cfg: ModelConfig, examples: list[Example]) -> Batch:
    return collate(
        examples,
        wrap=cfg.wraps_input,
        needs_paths=cfg.needs_paths,
        needs_adjacency=cfg.needs_adjacency,
    )


@torch.no_grad()
def teacher_forced_accuracy(model: Seq2Seq, examples: list[Example], batch_size: int = 256) -> float:
    """Fraction of non-pad target tokens predicted correctly under forcing."""
    model.eval()
    correct = total = 0
    for start in range(0, len(examples), batch_size):
        batch = _collate_for(model.cfg, examples[start : start + batch_size])
        logits = model(batch)
        mask = batch.dec_out != PAD_ID
        correct += ((logits.argmax(-1) == batch.dec_out) & mask).sum().item()
        total += mask.sum().item()
    model.train()
    return correct / total if total else 0.0


def save_checkpoint(model: Seq2Seq, cfg: TrainConfig, path) -> None:
    torch.save(
        {
            "model_state": model.state_dict(),
            "model_config": asdict(model.cfg),
            "train_config": asdict(cfg),
        },
        path,
    )


def load_checkpoint(path) -> Seq2Seq:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = build_model(ModelConfig(**payload["model_config"]))
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model


def train(model: Seq2Seq, cfg: TrainConfig, examples: list[Example],
          eval_examples: list[Example] | None = None) -> Path:
    """Run the training loop; returns the checkpoint path.

    The metrics log documents the otherwise-implicit defaults (dropout,
    initialization, schedule shape) in its header, then records one
    tab-separated row per logging interval.
    """
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(cfg.seed)
    rng = random.Random(f"train:{cfg.seed}")
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr, betas=(0.9, 0.998))
    lengths = [len(ex.formula) for ex in examples]

    log_path = out_dir / "metrics.log"
    ckpt_path = out_dir / "model.pt"
    with open(log_path, "w", encoding="utf-8") as log:
        log.write(f"# encoder={model.cfg.encoder_kind} params={model.parameter_count()}\n")
        log.write(
            f"# steps={cfg.steps} batch={cfg.batch} warmup={cfg.warmup} peak_lr={cfg.lr} "
            f"seed={cfg.seed} schedule=noam(linear-warmup,inv-sqrt-decay)\n"
        )
        log.write(
            f"# dropout={model.cfg.dropout} init=torch-defaults adam_betas=(0.9,0.998) "
            f"teacher_forcing=yes input_wrapped={model.cfg.wraps_input}\n"
        )
        log.write("step\tloss\tlr\texamples_per_s\teval_token_acc\n")
        model.train()
        step = 0
        running_loss = 0.0
        running_n = 0
        tick = time.monotonic()
        while step < cfg.steps:
            for batch_idx in bucketed_batches(len(examples), cfg.batch, lengths, rng):
                if step >= cfg.steps:
                    break
                step += 1
                lr = noam_lr(step, cfg.lr, cfg.warmup)
                for group in optimizer.param_groups:
                    group["lr"] = lr
                batch = _collate_for(model.cfg, [examples[i] for i in batch_idx])
                loss = model.loss(batch)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                running_loss += loss.item() * len(batch_idx)
                running_n += len(batch_idx)
                if step % cfg.log_every == 0 or step == cfg.steps:
                    elapsed = time.monotonic() - tick
                    eval_acc = ""
                    if eval_examples and (step % cfg.eval_every == 0 or step == cfg.steps):
                        eval_acc = f"{teacher_forced_accuracy(model, eval_examples):.4f}"
                    log.write(
                        f"{step}\t{running_loss / running_n:.4f}\t{lr:.2e}\t"
                        f"{running_n / elapsed:.1f}\t{eval_acc}\n"
                    )
                    log.flush()
                    running_loss = 0.0
                    running_n = 0
                    tick = time.monotonic()
                if cfg.ckpt_every and step % cfg.ckpt_every == 0:
                    save_checkpoint(model, cfg, out_dir / f"model_step{step}.pt")
    save_checkpoint(model, cfg, ckpt_path)
    return ckpt_path
