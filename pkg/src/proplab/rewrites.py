"""Pattern-holdout training sets via equivalence rewrites or removal.

Four patterns can be eliminated by meaning-preserving rewrites, so the
split keeps every datapoint and its original target:

  P1  ! & A B   =>  | ! A ! B     (negation distributed over and)
  P2  ! | A B   =>  & ! A ! B     (negation distributed over or)
  P3  ! xor A B =>  <-> A B       (negated xor is iff)
  P5  & ! A ! B =>  ! | A B;  & ! A C => & C ! A  (C not negated)

The remaining patterns (P4 negated-b, P6 and-over-xor, P7 iff-over-negation)
have no local equivalence that avoids them, so those splits drop the
offending datapoints instead.

Rewriting runs innermost-first to a fixed point and collapses any double
negation it creates, so outputs contain neither the held-out pattern nor
``! !``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .formulas import Bin, Formula, Not, Op, Pattern, contains_pattern, count_pattern
from .generate import Datapoint

REWRITE_PATTERNS = frozenset({Pattern.P1, Pattern.P2, Pattern.P3, Pattern.P5})
REMOVE_PATTERNS = frozenset({Pattern.P4, Pattern.P6, Pattern.P7})


class SplitMethod(Enum):
    REWRITE = "rewrite"
    REMOVE = "remove"


@dataclass(frozen=True)
class SplitSpec:
    pattern: Pattern
    method: SplitMethod

    def __post_init__(self) -> None:
        expected = (
            SplitMethod.REWRITE if self.pattern in REWRITE_PATTERNS else SplitMethod.REMOVE
        )
        if self.method is not expected:
            raise ValueError(f"{self.pattern.value} splits use {expected.value}")

    @classmethod
    def for_pattern(cls, pattern: Pattern) -> "SplitSpec":
        method = (
            SplitMethod.REWRITE if pattern in REWRITE_PATTERNS else SplitMethod.REMOVE
        )
        return cls(pattern=pattern, method=method)


def _negate(f: Formula) -> Formula:
    """Build ! f, collapsing ! ! f to f."""
    return f.child if isinstance(f, Not) else Not(f)


def _rule_not_over(op: Op, replacement: Callable[[Formula, Formula], Formula]):
    def rule(node: Formula) -> Formula | None:
        if (
            isinstance(node, Not)
            and isinstance(node.child, Bin)
            and node.child.op is op
        ):
            return replacement(node.child.left, node.child.right)
        return None

    return rule


def _rule_p5(node: Formula) -> Formula | None:
    if not (isinstance(node, Bin) and node.op is Op.AND and isinstance(node.left, Not)):
        return None
    if isinstance(node.right, Not):
        return _negate(Bin(Op.OR, node.left.child, node.right.child))
    return Bin(Op.AND, node.right, node.left)


_RULES: dict[Pattern, Callable[[Formula], Formula | None]] = {
    Pattern.P1: _rule_not_over(Op.AND, lambda a, b: Bin(Op.OR, _negate(a), _negate(b))),
    Pattern.P2: _rule_not_over(Op.OR, lambda a, b: Bin(Op.AND, _negate(a), _negate(b))),
    Pattern.P3: _rule_not_over(Op.XOR, lambda a, b: Bin(Op.IFF, a, b)),
    Pattern.P5: _rule_p5,
}


def rewrite_eliminate(f: Formula, pattern: Pattern) -> Formula:
    """Rewrite until no occurrence of the pattern (or double negation) remains."""
    if pattern not in _RULES:
        raise ValueError(f"{pattern.value} has no elimination rewrite; remove instead")
    rule = _RULES[pattern]

    def rewrite(node: Formula) -> Formula:
        if isinstance(node, Not):
            node = _negate(rewrite(node.child))
        elif isinstance(node, Bin):
            node = Bin(node.op, rewrite(node.left), rewrite(node.right))
        replaced = rule(node)
        if replaced is not None:
            # the replacement can expose fresh redexes anywhere inside it
            return rewrite(replaced)
        return node

    return rewrite(f)


def make_split(dataset: Sequence[Datapoint], spec: SplitSpec) -> list[Datapoint]:
    """Training set with zero occurrences of spec.pattern.

    Rewrite splits keep every datapoint (targets included); remove splits
    drop the datapoints containing the pattern.
    """
    if spec.method is SplitMethod.REWRITE:
        return [
            Datapoint(formula=rewrite_eliminate(dp.formula, spec.pattern), target=dp.target)
            for dp in dataset
        ]
    return [dp for dp in dataset if not contains_pattern(dp.formula, spec.pattern)]


@dataclass(frozen=True)
class AbsenceReport:
    pattern: Pattern
    total_occurrences: int
    offending_indices: tuple[int, ...]

    @property
    def clean(self) -> bool:
        return self.total_occurrences == 0


def verify_absent(dataset: Sequence[Datapoint], pattern: Pattern) -> AbsenceReport:
    total = 0
    offending: list[int] = []
    for i, dp in enumerate(dataset):
        c = count_pattern(dp.formula, pattern)
        if c:
            total += c
            offending.append(i)
    return AbsenceReport(
        pattern=pattern, total_occurrences=total, offending_indices=tuple(offending)
    )
