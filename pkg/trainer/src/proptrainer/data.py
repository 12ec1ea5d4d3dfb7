"""Readers for the dataset / annotation file contract, and batch assembly.

Dataset files hold ``formula-tokens<TAB>target-tokens`` lines. Annotation
files hold one JSON record per line with ``index``, ``tokens``, per-token
``paths`` vectors and ``adjacency`` neighbor lists; records must align with
the dataset by index and token sequence (the tree and graph encoders depend
on that alignment).

Batches are bucketed by input length to keep padding small; bucket order is
reshuffled per epoch from a seeded RNG, so runs are reproducible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

import torch

from .vocab import BOS_ID, EOS_ID, PAD_ID, encode


class DataMismatch(ValueError):
    """Dataset and annotation files disagree."""


@dataclass
class Example:
    formula: list[str]
    target: list[str]
    paths: list[list[int]] | None = None
    adjacency: list[list[int]] | None = None


def read_dataset(path) -> list[Example]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            formula, _, target = line.partition("\t")
            examples.append(Example(formula=formula.split(), target=target.split()))
    return examples


def attach_annotations(examples: list[Example], path) -> None:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    if len(records) != len(examples):
        raise DataMismatch(
            f"{len(examples)} datapoints but {len(records)} annotation records"
        )
    for i, (ex, rec) in enumerate(zip(examples, records)):
        if rec["index"] != i:
            raise DataMismatch(f"annotation record {i} carries index {rec['index']}")
        if rec["tokens"] != ex.formula:
            raise DataMismatch(f"annotation tokens diverge from datapoint {i}")
        ex.paths = rec["paths"]
        ex.adjacency = rec["adjacency"]


@dataclass
class Batch:
    src: torch.Tensor  # [B, S] token ids
    src_pad: torch.Tensor  # [B, S] bool, True on padding
    lengths: torch.Tensor  # [B] true input lengths
    dec_in: torch.Tensor  # [B, T] BOS + target
    dec_out: torch.Tensor  # [B, T] target + EOS
    paths: torch.Tensor | None = None  # [B, S, 2*depth_cap]
    adjacency: torch.Tensor | None = None  # [B, S, S] normalized

    def to(self, device):
        for name in ("src", "src_pad", "lengths", "dec_in", "dec_out", "paths", "adjacency"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, value.to(device))
        return self


def _normalized_adjacency(neighbor_lists: list[list[int]], size: int) -> torch.Tensor:
    """Symmetric degree-normalized dense adjacency; padding rows keep a
    self-loop only, so they cannot influence real nodes."""
    a = torch.zeros(size, size)
    n = len(neighbor_lists)
    for i, nbrs in enumerate(neighbor_lists):
        for j in nbrs:
            a[i, j] = 1.0
    for i in range(n, size):
        a[i, i] = 1.0
    deg = a.sum(dim=1)
    inv_sqrt = deg.rsqrt()
    return a * inv_sqrt.unsqueeze(0) * inv_sqrt.unsqueeze(1)


def collate(examples: list[Example], wrap: bool, needs_paths: bool, needs_adjacency: bool) -> Batch:
    """Pad a list of examples into one batch.

    wrap adds begin/end markers around the input (used by the encoders
    without any structural annotation); the annotated encoders keep inputs
    unwrapped so token i stays aligned with tree node i.
    """
    srcs = []
    for ex in examples:
        ids = encode(ex.formula)
        if wrap:
            ids = [BOS_ID] + ids + [EOS_ID]
        srcs.append(ids)
    s_max = max(len(s) for s in srcs)
    b = len(examples)
    src = torch.full((b, s_max), PAD_ID, dtype=torch.long)
    src_pad = torch.ones(b, s_max, dtype=torch.bool)
    lengths = torch.zeros(b, dtype=torch.long)
    for i, ids in enumerate(srcs):
        src[i, : len(ids)] = torch.tensor(ids)
        src_pad[i, : len(ids)] = False
        lengths[i] = len(ids)

    t_max = max(len(ex.target) for ex in examples) + 1
    dec_in = torch.full((b, t_max), PAD_ID, dtype=torch.long)
    dec_out = torch.full((b, t_max), PAD_ID, dtype=torch.long)
    for i, ex in enumerate(examples):
        tgt = encode(ex.target)
        dec_in[i, : len(tgt) + 1] = torch.tensor([BOS_ID] + tgt)
        dec_out[i, : len(tgt) + 1] = torch.tensor(tgt + [EOS_ID])

    paths = None
    if needs_paths:
        if any(ex.paths is None for ex in examples):
            raise DataMismatch("tree encoder needs an annotation file with path vectors")
        width = len(examples[0].paths[0])
        paths = torch.zeros(b, s_max, width)
        for i, ex in enumerate(examples):
            paths[i, : len(ex.paths)] = torch.tensor(ex.paths, dtype=torch.float)

    adjacency = None
    if needs_adjacency:
        if any(ex.adjacency is None for ex in examples):
            raise DataMismatch("graph encoder needs an annotation file with adjacency lists")
        adjacency = torch.stack(
            [_normalized_adjacency(ex.adjacency, s_max) for ex in examples]
        )

    return Batch(
        src=src,
        src_pad=src_pad,
        lengths=lengths,
        dec_in=dec_in,
        dec_out=dec_out,
        paths=paths,
        adjacency=adjacency,
    )


def bucketed_batches(
    n_examples: int, batch_size: int, lengths: list[int], rng: random.Random
) -> list[list[int]]:
    """Index batches bucketed by length, in seeded-shuffled order."""
    order = sorted(range(n_examples), key=lambda i: (lengths[i], i))
    batches = [order[i : i + batch_size] for i in range(0, n_examples, batch_size)]
    rng.shuffle(batches)
    return batches
