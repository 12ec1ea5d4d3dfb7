"""Scoring of model prediction files against exact formula semantics.

A prediction is the raw token sequence a model emitted before its first
end marker. Scoring distinguishes

  syntactic  -- exactly the reference target serialization
  semantic   -- a different but genuinely satisfying partial assignment
  incorrect  -- parseable as an assignment, but not satisfying (or binding
                variables the formula does not mention)
  malformed  -- not parseable as an assignment at all (empty line included)

Sortedness is deliberately not required for the semantic tier: an unsorted
but satisfying output is still a correct reading of the formula, it merely
cannot match the canonical target. Reported semantic accuracy includes the
syntactic matches.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import semantics
from .formulas import Formula, Pattern, contains_pattern, vars_of
from .generate import Datapoint
from .templates import BehaviorPair


class LengthMismatch(ValueError):
    pass


class IndexGap(ValueError):
    pass


class Score(enum.Enum):
    SYNTACTIC = "syntactic"
    SEMANTIC = "semantic"
    INCORRECT = "incorrect"
    MALFORMED = "malformed"


class BehaviorClass(enum.Enum):
    """Response to re-introducing a negation, in priority order.

    A: output satisfies the negated formula (counts even when it would also
       satisfy the unnegated one). B: identical output on both formulas, so
       the negation was ignored. C: output instead satisfies the unnegated
       formula. D: anything else.
    """

    A = "A"
    B = "B"
    C = "C"
    D = "D"


@dataclass(frozen=True)
class PredictionRecord:
    index: int
    tokens: tuple[str, ...]


def parse_prediction(tokens: Sequence[str]) -> semantics.Assignment | None:
    """Lenient assignment parse; None when malformed (empty counts as malformed)."""
    if not tokens:
        return None
    try:
        return semantics.parse_assignment(tokens)
    except semantics.MalformedAssignment:
        return None


def _satisfying_for(formula: Formula, assignment: semantics.Assignment | None) -> bool:
    if assignment is None:
        return False
    if not set(assignment) <= vars_of(formula):
        return False
    return semantics.satisfies_partial(formula, assignment)


def score(dp: Datapoint, tokens: Sequence[str]) -> Score:
    assignment = parse_prediction(tokens)
    if assignment is None:
        return Score.MALFORMED
    if list(tokens) == semantics.assignment_tokens(dp.target):
        return Score.SYNTACTIC
    if _satisfying_for(dp.formula, assignment):
        return Score.SEMANTIC
    return Score.INCORRECT


@dataclass(frozen=True)
class SliceAccuracy:
    n: int
    syntactic_acc: float
    semantic_acc: float


@dataclass
class EvalReport:
    n: int
    counts: dict[str, int]
    syntactic_acc: float
    semantic_acc: float
    malformed_rate: float
    pattern_slices: dict[str, dict[str, SliceAccuracy]]
    behavior: dict | None = None
    overlap: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "counts": dict(self.counts),
            "syntactic_acc": self.syntactic_acc,
            "semantic_acc": self.semantic_acc,
            "malformed_rate": self.malformed_rate,
            "pattern_slices": {
                p: {
                    side: {
                        "n": acc.n,
                        "syntactic_acc": acc.syntactic_acc,
                        "semantic_acc": acc.semantic_acc,
                    }
                    for side, acc in sides.items()
                }
                for p, sides in self.pattern_slices.items()
            },
        }
        if self.behavior is not None:
            out["behavior"] = self.behavior
        if self.overlap is not None:
            out["overlap"] = self.overlap
        return out


def _check_aligned(n_data: int, records: Sequence[PredictionRecord]) -> None:
    if len(records) != n_data:
        raise LengthMismatch(f"{n_data} datapoints but {len(records)} predictions")
    for expected, rec in enumerate(records):
        if rec.index != expected:
            raise IndexGap(f"expected prediction index {expected}, found {rec.index}")


def _slice_accuracy(scores: Sequence[Score], member: Sequence[bool], keep: bool) -> SliceAccuracy:
    chosen = [s for s, m in zip(scores, member) if m == keep]
    n = len(chosen)
    if n == 0:
        return SliceAccuracy(n=0, syntactic_acc=0.0, semantic_acc=0.0)
    syn = sum(s is Score.SYNTACTIC for s in chosen)
    sem = sum(s in (Score.SYNTACTIC, Score.SEMANTIC) for s in chosen)
    return SliceAccuracy(n=n, syntactic_acc=syn / n, semantic_acc=sem / n)


def evaluate_records(
    dataset: Sequence[Datapoint],
    records: Sequence[PredictionRecord],
    patterns: Iterable[Pattern] = tuple(Pattern),
) -> EvalReport:
    """Aggregate accuracies plus, per pattern, the accuracies over the
    datapoints containing / not containing it."""
    _check_aligned(len(dataset), records)
    scores = [score(dp, rec.tokens) for dp, rec in zip(dataset, records)]
    n = len(scores)
    counts = {kind.value: sum(s is kind for s in scores) for kind in Score}
    syn = counts[Score.SYNTACTIC.value]
    sem = syn + counts[Score.SEMANTIC.value]
    slices: dict[str, dict[str, SliceAccuracy]] = {}
    for p in patterns:
        member = [contains_pattern(dp.formula, p) for dp in dataset]
        slices[p.value] = {
            "contains": _slice_accuracy(scores, member, True),
            "not_contains": _slice_accuracy(scores, member, False),
        }
    return EvalReport(
        n=n,
        counts=counts,
        syntactic_acc=syn / n if n else 0.0,
        semantic_acc=sem / n if n else 0.0,
        malformed_rate=counts[Score.MALFORMED.value] / n if n else 0.0,
        pattern_slices=slices,
    )


def records_from_token_lists(token_lists: Iterable[Sequence[str]]) -> list[PredictionRecord]:
    return [
        PredictionRecord(index=i, tokens=tuple(tokens))
        for i, tokens in enumerate(token_lists)
    ]


def classify_behavior(
    pair: BehaviorPair,
    pred_original: Sequence[str],
    pred_modified: Sequence[str],
) -> BehaviorClass:
    assignment = parse_prediction(pred_original)
    if _satisfying_for(pair.original, assignment):
        return BehaviorClass.A
    if list(pred_original) == list(pred_modified):
        return BehaviorClass.B
    if _satisfying_for(pair.modified, assignment):
        return BehaviorClass.C
    return BehaviorClass.D


def behavior_summary(
    pairs: Sequence[BehaviorPair],
    preds_original: Sequence[Sequence[str]],
    preds_modified: Sequence[Sequence[str]],
) -> dict:
    """Counts and fractions per behavior class; fractions sum to 1."""
    if not len(pairs) == len(preds_original) == len(preds_modified):
        raise LengthMismatch(
            f"{len(pairs)} pairs, {len(preds_original)} original and "
            f"{len(preds_modified)} modified predictions"
        )
    counts = {cls.value: 0 for cls in BehaviorClass}
    for pair, po, pm in zip(pairs, preds_original, preds_modified):
        counts[classify_behavior(pair, po, pm).value] += 1
    n = len(pairs)
    fractions = {cls: (c / n if n else 0.0) for cls, c in counts.items()}
    return {"n": n, "counts": counts, "fractions": fractions}


def overlap(preds_a: Sequence[Sequence[str]], preds_b: Sequence[Sequence[str]]) -> float:
    """Fraction of positions where both files hold the identical token sequence."""
    if len(preds_a) != len(preds_b):
        raise LengthMismatch(f"{len(preds_a)} vs {len(preds_b)} predictions")
    if not preds_a:
        return 0.0
    same = sum(list(a) == list(b) for a, b in zip(preds_a, preds_b))
    return same / len(preds_a)


def emit_report(report: EvalReport, out_dir, stem: str = "eval") -> dict[str, str]:
    """Write the report as JSON plus plot-ready TSV tables; returns the paths.

    Output is a pure function of the report contents (no timestamps), so
    re-running an evaluation reproduces the files byte for byte.
    """
    from pathlib import Path

    from .dataio import UnwritablePath, write_json, write_table

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritablePath(str(out)) from exc
    files = {"report": str(out / f"{stem}_report.json")}
    write_json(out / f"{stem}_report.json", report.to_dict())
    slice_rows = [
        (p, side, acc.n, acc.syntactic_acc, acc.semantic_acc)
        for p, sides in sorted(report.pattern_slices.items())
        for side, acc in sides.items()
    ]
    files["pattern_slices"] = str(out / f"{stem}_pattern_slices.tsv")
    write_table(
        out / f"{stem}_pattern_slices.tsv",
        ("pattern", "slice", "n", "syntactic_acc", "semantic_acc"),
        slice_rows,
    )
    if report.behavior is not None:
        files["behavior"] = str(out / f"{stem}_behavior.tsv")
        write_table(
            out / f"{stem}_behavior.tsv",
            ("class", "count", "fraction"),
            [
                (cls, report.behavior["counts"][cls], report.behavior["fractions"][cls])
                for cls in sorted(report.behavior["counts"])
            ],
        )
    return files


def overlap_matrix(preds_by_label: Mapping[str, Sequence[Sequence[str]]]) -> dict:
    """Pairwise identical-prediction fractions between labeled files."""
    labels = sorted(preds_by_label)
    return {
        a: {b: overlap(preds_by_label[a], preds_by_label[b]) for b in labels}
        for a in labels
    }


def aggregate_pattern_accuracies(
    reports_by_label: Mapping[str, Sequence[EvalReport]],
) -> list[dict]:
    """Across-seed summary rows: one per (label, pattern, slice) with the mean
    semantic accuracy and the standard error between seeds."""
    rows: list[dict] = []
    for label in sorted(reports_by_label):
        reports = reports_by_label[label]
        if not reports:
            continue
        patterns = sorted(reports[0].pattern_slices)
        for p in patterns:
            for side in ("contains", "not_contains"):
                values = [r.pattern_slices[p][side].semantic_acc for r in reports]
                mean = sum(values) / len(values)
                if len(values) > 1:
                    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
                    stderr = (var / len(values)) ** 0.5
                else:
                    stderr = 0.0
                rows.append(
                    {
                        "label": label,
                        "pattern": p,
                        "slice": side,
                        "n_seeds": len(values),
                        "mean_semantic_acc": mean,
                        "stderr": stderr,
                    }
                )
    return rows
