"""Tree-position and adjacency annotations consumed by the trainer.

Token order matches the Polish serialization, so token i is AST node i in
prefix order. Each token gets

  * a flattened root-to-node path vector: one-hot branch label per step
    (left / unary child -> slot 2*d, right -> slot 2*d + 1), zero-padded
    root-first to the depth cap, so the root is the all-zero vector;
  * its undirected tree neighborhood: parent, children, and itself.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

from .formulas import Bin, Formula, Not, to_polish

DEFAULT_DEPTH_CAP = 16


class DepthCapExceeded(ValueError):
    pass


def annotate(
    f: Formula, depth_cap: int = DEFAULT_DEPTH_CAP
) -> tuple[list[list[int]], list[list[int]]]:
    """Per-token (path vectors, sorted neighbor lists) for the formula tree."""
    paths: list[list[int]] = []
    neighbors: list[list[int]] = []
    counter = 0

    def visit(node: Formula, path: list[int], parent: int | None) -> None:
        nonlocal counter
        if len(path) > depth_cap:
            raise DepthCapExceeded(f"node depth {len(path)} exceeds cap {depth_cap}")
        index = counter
        counter += 1
        vec = [0] * (2 * depth_cap)
        for step, label in enumerate(path):
            vec[2 * step + label] = 1
        paths.append(vec)
        near = [index] if parent is None else [parent, index]
        neighbors.append(near)
        if parent is not None:
            neighbors[parent].append(index)
        if isinstance(node, Not):
            visit(node.child, path + [0], index)
        elif isinstance(node, Bin):
            visit(node.left, path + [0], index)
            visit(node.right, path + [1], index)

    visit(f, [], None)
    return paths, [sorted(n) for n in neighbors]


def annotation_record(index: int, f: Formula, depth_cap: int = DEFAULT_DEPTH_CAP) -> dict:
    paths, adjacency = annotate(f, depth_cap)
    return {
        "index": index,
        "tokens": to_polish(f),
        "paths": paths,
        "adjacency": adjacency,
    }


def write_annotations(
    fh: IO[str], formulas: Iterable[Formula], depth_cap: int = DEFAULT_DEPTH_CAP
) -> int:
    """One JSON record per line, keyed by datapoint index; returns the count."""
    n = 0
    for i, f in enumerate(formulas):
        fh.write(json.dumps(annotation_record(i, f, depth_cap), separators=(",", ":")))
        fh.write("\n")
        n += 1
    return n


def read_annotations(fh: IO[str]) -> list[dict]:
    return [json.loads(line) for line in fh if line.strip()]
