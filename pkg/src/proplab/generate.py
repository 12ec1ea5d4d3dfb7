"""Random satisfiable-formula datasets with exact length control.

A datapoint is a formula plus a deterministic satisfying partial assignment.
Formulas are sampled by recursive token-budget splitting: a budget of 1
becomes a variable, a budget of 2 a negated variable, and larger budgets
pick an operator uniformly among the eligible ones (negation is never
placed directly under another negation, and is infeasible at budget 3,
where its child could only be a negated variable). Unsatisfiable samples
are rejected and redrawn, so every emitted formula is satisfiable and free
of double negation.

Lengths follow a fixed profile: every length of at least 8 takes a 3%
share and the remainder is spread uniformly over the shorter lengths.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from . import semantics
from .formulas import (
    BINARY_OPS,
    VARIABLES,
    Bin,
    Formula,
    Not,
    Op,
    Pattern,
    Var,
    contains_pattern,
    flip_children,
    size,
    subtree_stats,
)

LONG_LENGTH_SHARE = 0.03
LONG_LENGTH_START = 8


class BudgetInfeasible(ValueError):
    """No formula of the requested token count exists (only possible below 1)."""


@dataclass(frozen=True)
class Datapoint:
    formula: Formula
    target: semantics.Assignment


@dataclass(frozen=True)
class DatasetSpec:
    n_examples: int
    seed: int
    min_len: int = 5
    max_len: int = 35

    def __post_init__(self) -> None:
        if not 1 <= self.min_len <= self.max_len:
            raise ValueError("need 1 <= min_len <= max_len")

    def length_profile(self) -> dict[int, float]:
        """Share of the dataset per formula length."""
        lengths = range(self.min_len, self.max_len + 1)
        long_lengths = [l for l in lengths if l >= LONG_LENGTH_START]
        short_lengths = [l for l in lengths if l < LONG_LENGTH_START]
        long_total = LONG_LENGTH_SHARE * len(long_lengths)
        if long_total >= 1.0 or not short_lengths:
            # no residual mass to place below 8; fall back to uniform
            return {l: 1.0 / len(lengths) for l in lengths}
        profile = {l: LONG_LENGTH_SHARE for l in long_lengths}
        rest = (1.0 - long_total) / len(short_lengths)
        profile.update({l: rest for l in short_lengths})
        return dict(sorted(profile.items()))

    def length_counts(self) -> dict[int, int]:
        """Exact per-length counts via largest-remainder rounding."""
        profile = self.length_profile()
        counts = {l: int(share * self.n_examples) for l, share in profile.items()}
        remainder = self.n_examples - sum(counts.values())
        leftovers = sorted(
            profile,
            key=lambda l: (profile[l] * self.n_examples - counts[l], -l),
            reverse=True,
        )
        for l in leftovers[:remainder]:
            counts[l] += 1
        return counts


_ALL_OPS = (Op.NOT,) + BINARY_OPS


def _sample_tree(budget: int, rng: random.Random, under_not: bool) -> Formula:
    if budget == 1:
        return Var(rng.choice(VARIABLES))
    if budget == 2:
        # only shape of size 2; caller never reaches here under a negation
        return Not(Var(rng.choice(VARIABLES)))
    if budget == 3 or under_not:
        # negation at budget 3 would force a doubly negated variable
        op = rng.choice(BINARY_OPS)
    else:
        op = rng.choice(_ALL_OPS)
    if op is Op.NOT:
        return Not(_sample_tree(budget - 1, rng, True))
    left_budget = rng.randint(1, budget - 2)
    return Bin(
        op,
        _sample_tree(left_budget, rng, False),
        _sample_tree(budget - 1 - left_budget, rng, False),
    )


def sample_formula(target_len: int, rng: random.Random) -> Formula:
    """A satisfiable, double-negation-free formula of exactly target_len tokens."""
    if target_len < 1:
        raise BudgetInfeasible(f"no formula has {target_len} tokens")
    while True:
        f = _sample_tree(target_len, rng, under_not=False)
        if semantics.is_satisfiable(f):
            return f


def _chunk_rng(seed: int, label: object) -> random.Random:
    # string seeding is stable across processes and platforms
    return random.Random(f"proplab:{seed}:{label}")


def generate_dataset(spec: DatasetSpec) -> list[Datapoint]:
    """n_examples datapoints; one derived RNG stream per length chunk."""
    dataset: list[Datapoint] = []
    for length, count in sorted(spec.length_counts().items()):
        rng = _chunk_rng(spec.seed, f"len={length}")
        for _ in range(count):
            f = sample_formula(length, rng)
            dataset.append(Datapoint(formula=f, target=semantics.pick_target(f)))
    return dataset


def balance_trees(dataset: Sequence[Datapoint], seed: int) -> list[Datapoint]:
    """Flip each binary node left/right with probability 0.5, keeping targets.

    Every binary operator is commutative, so the satisfying worlds (and
    hence target validity) are unchanged.
    """
    rng = _chunk_rng(seed, "balance")
    return [
        Datapoint(
            formula=flip_children(dp.formula, lambda: rng.random() < 0.5),
            target=dp.target,
        )
        for dp in dataset
    ]


def dataset_stats(
    dataset: Sequence[Datapoint], difficulty_sample: int | None = None
) -> dict:
    """Length histogram, subtree balance, per-pattern rates, mean difficulty.

    difficulty_sample caps how many formulas feed the difficulty means (the
    partial-assignment count is the one non-trivial per-formula cost);
    None means all of them. The sample is a deterministic even stride.
    """
    lengths: dict[int, int] = {}
    for dp in dataset:
        n = size(dp.formula)
        lengths[n] = lengths.get(n, 0) + 1
    tree = subtree_stats(dp.formula for dp in dataset)
    pattern_rates = {
        p.value: sum(contains_pattern(dp.formula, p) for dp in dataset) / len(dataset)
        for p in Pattern
    }
    if difficulty_sample is None or difficulty_sample >= len(dataset):
        sample: Sequence[Datapoint] = dataset
    else:
        stride = len(dataset) / difficulty_sample
        sample = [dataset[int(i * stride)] for i in range(difficulty_sample)]
    profiles = [semantics.difficulty(dp.formula) for dp in sample]
    # world_ratio distribution in tenths, and its mean conditioned on length
    histogram = [0] * 10
    by_length: dict[int, list[float]] = {}
    for dp, prof in zip(sample, profiles):
        histogram[min(int(prof.world_ratio * 10), 9)] += 1
        by_length.setdefault(size(dp.formula), []).append(prof.world_ratio)
    return {
        "n_examples": len(dataset),
        "length_histogram": dict(sorted(lengths.items())),
        "subtree_sizes": {
            "root_left_mean": tree.root_left,
            "root_right_mean": tree.root_right,
            "all_left_mean": tree.all_left,
            "all_right_mean": tree.all_right,
        },
        "pattern_rates": pattern_rates,
        "difficulty": {
            "n_sampled": len(sample),
            "mean_world_ratio": sum(p.world_ratio for p in profiles) / len(profiles),
            "mean_partial_ratio": sum(p.partial_ratio for p in profiles) / len(profiles),
            "world_ratio_histogram": histogram,
            "world_ratio_by_length": {
                l: sum(v) / len(v) for l, v in sorted(by_length.items())
            },
        },
    }
