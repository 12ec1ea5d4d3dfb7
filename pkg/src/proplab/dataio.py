"""File formats shared between the CLI, the tests, and the trainer.

Dataset files are UTF-8 text, one datapoint per line:
``formula-tokens<TAB>target-tokens`` with both sides space-separated.
Prediction files carry one space-separated token sequence per line; an
empty line is an empty (malformed) output. Reports are JSON documents with
sorted keys, and plot-ready tables are tab-separated with a header row.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from .formulas import parse_polish, to_text
from .generate import Datapoint
from .semantics import assignment_tokens, parse_assignment


class UnwritablePath(OSError):
    pass


def dataset_line(dp: Datapoint) -> str:
    return f"{to_text(dp.formula)}\t{' '.join(assignment_tokens(dp.target))}"


def write_dataset(path: str | Path, dataset: Iterable[Datapoint]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for dp in dataset:
            fh.write(dataset_line(dp))
            fh.write("\n")


def read_dataset(path: str | Path) -> list[Datapoint]:
    dataset: list[Datapoint] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                formula_text, _, target_text = line.partition("\t")
                dataset.append(
                    Datapoint(
                        formula=parse_polish(formula_text),
                        target=parse_assignment(target_text),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return dataset


def write_predictions(path: str | Path, predictions: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tokens in predictions:
            fh.write(" ".join(tokens))
            fh.write("\n")


def read_predictions(path: str | Path) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n").split() for line in fh]


def write_pairs(path: str | Path, pairs: Iterable) -> None:
    """Behavior pairs as ``original-tokens<TAB>modified-tokens`` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(f"{to_text(pair.original)}\t{to_text(pair.modified)}\n")


def read_pairs(path: str | Path):
    from .templates import BehaviorPair

    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            orig_text, _, mod_text = line.partition("\t")
            pairs.append(
                BehaviorPair(original=parse_polish(orig_text), modified=parse_polish(mod_text))
            )
    return pairs


def write_json(path: str | Path, payload: dict) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise UnwritablePath(str(path)) from exc


def read_json(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Tab-separated table with a header row; floats rendered via repr."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(header))
            fh.write("\n")
            for row in rows:
                fh.write("\t".join(str(cell) for cell in row))
                fh.write("\n")
    except OSError as exc:
        raise UnwritablePath(str(path)) from exc
