"""Greedy decoding into the prediction-file format."""

from __future__ import annotations

import torch

from .data import Example, collate
from .models import Seq2Seq
from .vocab import BOS_ID, EOS_ID, decode

MAX_OUTPUT_LEN = 16  # longest legal assignment is five var/bit pairs plus the end marker


@torch.no_grad()
def greedy_decode(model: Seq2Seq, examples: list[Example], batch_size: int = 64) -> list[list[str]]:
    """One output token sequence per example, original order preserved.

    Examples are decoded in length buckets to limit padding, then the
    results are scattered back to input order.
    """
    model.eval()
    order = sorted(range(len(examples)), key=lambda i: (len(examples[i].formula), i))
    outputs: list[list[str]] = [[] for _ in examples]
    cfg = model.cfg
    for start in range(0, len(order), batch_size):
        chunk = order[start : start + batch_size]
        batch = collate(
            [examples[i] for i in chunk],
            wrap=cfg.wraps_input,
            needs_paths=cfg.needs_paths,
            needs_adjacency=cfg.needs_adjacency,
        )
        memory = model.encoder(batch)
        b = len(chunk)
        generated = torch.full((b, 1), BOS_ID, dtype=torch.long)
        finished = torch.zeros(b, dtype=torch.bool)
        while generated.size(1) <= MAX_OUTPUT_LEN and not bool(finished.all()):
            logits = model.decoder(generated, memory, batch.src_pad)
            next_ids = logits[:, -1].argmax(-1)
            next_ids[finished] = EOS_ID
            generated = torch.cat([generated, next_ids.unsqueeze(1)], dim=1)
            finished |= next_ids == EOS_ID
        for row, example_idx in enumerate(chunk):
            outputs[example_idx] = decode(generated[row, 1:].tolist())
    return outputs


def write_predictions(path, predictions: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tokens in predictions:
            fh.write(" ".join(tokens))
            fh.write("\n")
