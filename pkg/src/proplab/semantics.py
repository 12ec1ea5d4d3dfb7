"""Exact brute-force semantics for formulas over at most five variables.

A formula over n variables has 2**n possible worlds. We evaluate all of them
at once by folding the AST over n-variable truth tables packed into a single
int (bit w of the table = value in world w), which makes model counting,
partial-assignment checks, and difficulty metrics cheap enough to run over
datasets of 100k formulas.

Worlds are indexed so that ascending index order is lexicographic order of
the assignment tuple with variables sorted alphabetically and 0 before 1:
the first (alphabetically smallest) variable occupies the most significant
bit of the world index.

An assignment is a plain dict mapping variable names to 0/1. Its surface
form is the alphabetically sorted token sequence ``a 0 b 1``. Partial
assignments satisfy a formula iff every completion does.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .formulas import VARIABLES, Bin, Formula, Not, Op, Var, vars_of

Assignment = dict[str, int]


class ForeignVariable(ValueError):
    """An assignment binds a variable that does not occur in the formula."""


class Unsatisfiable(ValueError):
    pass


class MalformedAssignment(ValueError):
    pass


def sorted_vars(f: Formula) -> tuple[str, ...]:
    return tuple(sorted(vars_of(f)))


@lru_cache(maxsize=8)
def _var_masks(n: int) -> tuple[int, ...]:
    """masks[i] has bit w set iff variable i (alphabetical, MSB-first) is 1 in world w."""
    return tuple(
        sum(1 << w for w in range(1 << n) if (w >> (n - 1 - i)) & 1)
        for i in range(n)
    )


def truth_table(f: Formula, variables: Sequence[str] | None = None) -> tuple[int, int]:
    """Return (table, n) where bit w of table is f's value in world w.

    `variables` defaults to sorted_vars(f); passing a superset widens the
    world space (used when two formulas must be compared over shared vars).
    """
    if variables is None:
        variables = sorted_vars(f)
    n = len(variables)
    masks = _var_masks(n)
    by_name = {name: masks[i] for i, name in enumerate(variables)}
    full = (1 << (1 << n)) - 1

    def fold(node: Formula) -> int:
        if isinstance(node, Var):
            return by_name[node.name]
        if isinstance(node, Not):
            return full ^ fold(node.child)
        left = fold(node.left)
        right = fold(node.right)
        if node.op is Op.AND:
            return left & right
        if node.op is Op.OR:
            return left | right
        if node.op is Op.XOR:
            return left ^ right
        return full ^ left ^ right  # IFF

    return fold(f), n


def _world_assignment(w: int, variables: tuple[str, ...]) -> Assignment:
    n = len(variables)
    return {v: (w >> (n - 1 - i)) & 1 for i, v in enumerate(variables)}


def enumerate_models(f: Formula) -> list[Assignment]:
    """All satisfying complete assignments over vars(f), lexicographic order."""
    variables = sorted_vars(f)
    table, n = truth_table(f, variables)
    return [
        _world_assignment(w, variables) for w in range(1 << n) if (table >> w) & 1
    ]


def is_satisfiable(f: Formula) -> bool:
    table, _ = truth_table(f)
    return table != 0


def satisfies_partial(f: Formula, assignment: Assignment) -> bool:
    """True iff every completion of the assignment over vars(f) satisfies f.

    The empty assignment therefore satisfies exactly the tautologies.
    Binding a variable absent from f raises ForeignVariable.
    """
    variables = sorted_vars(f)
    foreign = set(assignment) - set(variables)
    if foreign:
        raise ForeignVariable(f"variables {sorted(foreign)} do not occur in the formula")
    table, n = truth_table(f, variables)
    masks = _var_masks(n)
    full = (1 << (1 << n)) - 1
    consistent = full
    for i, v in enumerate(variables):
        if v in assignment:
            consistent &= masks[i] if assignment[v] else (full ^ masks[i])
    return table & consistent == consistent


@dataclass(frozen=True)
class DifficultyProfile:
    """Fraction of satisfying complete / nonempty partial assignments."""

    world_ratio: float
    partial_ratio: float


def _count_satisfying_partials(table: int, n: int) -> int:
    """Count nonempty partial assignments whose every completion satisfies.

    Walks the 3**n assignment tree (unbound / 1 / 0 per variable) pruning
    whole subtrees once the current partial already satisfies: any further
    binding only shrinks the consistent-world set, so all refinements
    satisfy too.
    """
    masks = _var_masks(n)
    full = (1 << (1 << n)) - 1
    pow3 = [3**k for k in range(n + 1)]

    def rec(i: int, consistent: int, nonempty: bool) -> int:
        if table & consistent == consistent:
            # every refinement of this node satisfies as well
            return pow3[n - i] - (0 if nonempty else 1)
        if i == n:
            return 0
        return (
            rec(i + 1, consistent, nonempty)
            + rec(i + 1, consistent & masks[i], True)
            + rec(i + 1, consistent & (full ^ masks[i]), True)
        )

    return rec(0, full, False)


def difficulty(f: Formula) -> DifficultyProfile:
    table, n = truth_table(f)
    world_ratio = table.bit_count() / (1 << n)
    partial_ratio = _count_satisfying_partials(table, n) / (3**n - 1)
    return DifficultyProfile(world_ratio=world_ratio, partial_ratio=partial_ratio)


def random_guess_accuracy(formulas: Iterable[Formula]) -> float:
    """Chance a uniform random nonempty partial assignment over vars(f) is correct,
    averaged over the given formulas."""
    ratios = [difficulty(f).partial_ratio for f in formulas]
    if not ratios:
        return 0.0
    return sum(ratios) / len(ratios)


def pick_target(f: Formula) -> Assignment:
    """Deterministic satisfying partial assignment used as the dataset target.

    Takes the lexicographically first model, then greedily unbinds variables
    in reverse alphabetical order while the rest still satisfies f. The last
    binding is never dropped: an empty output is malformed by the prediction
    file contract, so even tautologies keep one variable (about 3% of
    randomly generated formulas are tautologies).
    """
    variables = sorted_vars(f)
    table, n = truth_table(f, variables)
    if table == 0:
        raise Unsatisfiable("formula has no satisfying assignment")
    first = (table & -table).bit_length() - 1
    masks = _var_masks(n)
    full = (1 << (1 << n)) - 1
    bound = dict(_world_assignment(first, variables))

    def still_satisfies(partial: Assignment) -> bool:
        consistent = full
        for i, v in enumerate(variables):
            if v in partial:
                consistent &= masks[i] if partial[v] else (full ^ masks[i])
        return table & consistent == consistent

    for v in reversed(variables):
        if len(bound) == 1:
            break
        trial = {k: b for k, b in bound.items() if k != v}
        if still_satisfies(trial):
            bound = trial
    return {v: bound[v] for v in variables if v in bound}


def assignment_tokens(assignment: Assignment) -> list[str]:
    """Canonical surface form: alphabetically sorted `var bit` token pairs."""
    out: list[str] = []
    for v in sorted(assignment):
        out.append(v)
        out.append(str(assignment[v]))
    return out


def parse_assignment(tokens: Sequence[str]) -> Assignment:
    """Strict inverse of assignment_tokens; raises MalformedAssignment."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    if len(tokens) % 2 != 0:
        raise MalformedAssignment("odd number of tokens")
    assignment: Assignment = {}
    for v, b in zip(tokens[0::2], tokens[1::2]):
        if v not in VARIABLES:
            raise MalformedAssignment(f"not a variable: {v!r}")
        if b not in ("0", "1"):
            raise MalformedAssignment(f"not a bit: {b!r}")
        if v in assignment:
            raise MalformedAssignment(f"variable {v} bound twice")
        assignment[v] = int(b)
    return assignment


def models_equal(f: Formula, g: Formula) -> bool:
    """Whether f and g have identical satisfying-world sets.

    Compared over the union of their variables so formulas mentioning
    different variable sets are handled correctly.
    """
    shared = tuple(sorted(vars_of(f) | vars_of(g)))
    table_f, _ = truth_table(f, shared)
    table_g, _ = truth_table(g, shared)
    return table_f == table_g


def naive_satisfies_partial(f: Formula, assignment: Assignment) -> bool:
    """Independent oracle: enumerate completions with itertools and evaluate().

    Deliberately shares no machinery with the truth-table path; tests use it
    to cross-check the fast implementations.
    """
    from .formulas import evaluate

    variables = sorted_vars(f)
    foreign = set(assignment) - set(variables)
    if foreign:
        raise ForeignVariable(f"variables {sorted(foreign)} do not occur in the formula")
    free = [v for v in variables if v not in assignment]
    for bits in itertools.product((0, 1), repeat=len(free)):
        world = dict(assignment)
        world.update(zip(free, bits))
        if not evaluate(f, world):
            return False
    return True
