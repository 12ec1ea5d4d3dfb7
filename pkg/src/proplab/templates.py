"""Templated diagnostic test set and negation-dropped companion formulas.

Seventeen context templates each embed a probe subformula E; thirteen probe
schemas each embed two slot fillers A and B drawn from six choices apiece,
giving 36 instantiations per (template, schema). Every formula that contains
a negated and/or/xor also yields a variant with that negation pushed onto
the first operand (``! op X Y`` becomes ``op ! X Y``). Instantiations with
double negation or without a satisfying assignment are dropped, and the
surviving pool is deduplicated on the exact token sequence, in generation
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import semantics
from .formulas import (
    Bin,
    Formula,
    Not,
    Op,
    Pattern,
    Var,
    contains_double_negation,
    contains_pattern,
    parse_polish,
    pattern_tags,
    to_polish,
)

TEMPLATES: tuple[str, ...] = (
    "E",
    "& E e",
    "& ! e E",
    "<-> E e",
    "| E & e ! e",
    "xor e E",
    "<-> E e",
    "! xor E e",
    "! xor ! e E",
    "! & ! e E",
    "! & e E",
    "! | E e",
    "! | ! e E",
    "& ! E e",
    "& e xor E e",
    "& xor E ! e e",
    "<-> ! E e",
)

SUBFORMULAS: tuple[str, ...] = (
    "! xor A B",
    "! <-> A B",
    "! | A B",
    "! & A B",
    "xor A B",
    "<-> A B",
    "| A B",
    "& ! A B",
    "& ! A ! B",
    "& xor A B c",
    "& c xor A B",
    "<-> ! B A",
    "<-> A ! B",
)

A_CHOICES: tuple[str, ...] = ("a", "e", "! e", "& a e", "! & a e", "| ! e ! a")
B_CHOICES: tuple[str, ...] = ("b", "c", "! c", "& c d", "xor b c", "<-> c b")

_ROMAN = (
    "i", "ii", "iii", "iv", "v", "vi", "vii",
    "viii", "ix", "x", "xi", "xii", "xiii",
)

_PUSHABLE_OPS = (Op.AND, Op.OR, Op.XOR)


@dataclass(frozen=True)
class TemplateInstance:
    template_id: int  # 1-based
    subformula_id: str  # roman numeral i..xiii
    a_choice: int
    b_choice: int
    is_variant: bool  # negation pushed onto the first operand
    formula: Formula
    tags: frozenset[Pattern]


@dataclass(frozen=True)
class BehaviorPair:
    """A formula with a probed negated pattern and the same formula without it."""

    original: Formula
    modified: Formula


def instantiate(template_idx: int, subformula_idx: int, a_idx: int, b_idx: int) -> list[str]:
    """Token list for template (1-based) with schema (1-based) and slot choices."""
    tokens: list[str] = []
    for tok in TEMPLATES[template_idx - 1].split():
        if tok != "E":
            tokens.append(tok)
            continue
        for sub in SUBFORMULAS[subformula_idx - 1].split():
            if sub == "A":
                tokens.extend(A_CHOICES[a_idx].split())
            elif sub == "B":
                tokens.extend(B_CHOICES[b_idx].split())
            else:
                tokens.append(sub)
    return tokens


def push_negation_onto_first(f: Formula) -> Formula:
    """Turn every negated and/or/xor into the operator applied to the negated
    first operand, children first, in a single pass."""
    if isinstance(f, Var):
        return f
    if isinstance(f, Not):
        child = f.child
        if isinstance(child, Bin) and child.op in _PUSHABLE_OPS:
            return Bin(
                child.op,
                Not(push_negation_onto_first(child.left)),
                push_negation_onto_first(child.right),
            )
        return Not(push_negation_onto_first(child))
    return Bin(f.op, push_negation_onto_first(f.left), push_negation_onto_first(f.right))


def _has_negated_pushable(f: Formula) -> bool:
    if isinstance(f, Var):
        return False
    if isinstance(f, Not):
        c = f.child
        return (isinstance(c, Bin) and c.op in _PUSHABLE_OPS) or _has_negated_pushable(c)
    return _has_negated_pushable(f.left) or _has_negated_pushable(f.right)


def generate_templated_set() -> list[TemplateInstance]:
    """The full deduplicated diagnostic set, in deterministic generation order."""
    instances: list[TemplateInstance] = []
    seen: set[tuple[str, ...]] = set()
    for t in range(1, len(TEMPLATES) + 1):
        for s in range(1, len(SUBFORMULAS) + 1):
            for a in range(len(A_CHOICES)):
                for b in range(len(B_CHOICES)):
                    base = parse_polish(instantiate(t, s, a, b))
                    candidates = [(base, False)]
                    if _has_negated_pushable(base):
                        candidates.append((push_negation_onto_first(base), True))
                    for formula, is_variant in candidates:
                        if contains_double_negation(formula):
                            continue
                        if not semantics.is_satisfiable(formula):
                            continue
                        key = tuple(to_polish(formula))
                        if key in seen:
                            continue
                        seen.add(key)
                        instances.append(
                            TemplateInstance(
                                template_id=t,
                                subformula_id=_ROMAN[s - 1],
                                a_choice=a,
                                b_choice=b,
                                is_variant=is_variant,
                                formula=formula,
                                tags=frozenset(pattern_tags(formula)),
                            )
                        )
    return instances


_PATTERN_OP = {Pattern.P1: Op.AND, Pattern.P2: Op.OR, Pattern.P3: Op.XOR}


def drop_pattern_negations(f: Formula, pattern: Pattern) -> Formula:
    """Delete the negation of every occurrence of a negated-operator pattern."""
    op = _PATTERN_OP[pattern]
    if isinstance(f, Var):
        return f
    if isinstance(f, Not):
        child = drop_pattern_negations(f.child, pattern)
        if isinstance(child, Bin) and child.op is op:
            return child
        return Not(child)
    return Bin(f.op, drop_pattern_negations(f.left, pattern), drop_pattern_negations(f.right, pattern))


def make_behavior_pairs(
    instances: Sequence[TemplateInstance], pattern: Pattern
) -> list[BehaviorPair]:
    """One (original, negation-dropped) pair per instance containing the pattern.

    Pairs whose modified formula is unsatisfiable are dropped; they could
    never be scored for alternative correct outputs.
    """
    if pattern not in _PATTERN_OP:
        raise ValueError(f"behavior pairs probe P1..P3, not {pattern.value}")
    pairs: list[BehaviorPair] = []
    for inst in instances:
        if not contains_pattern(inst.formula, pattern):
            continue
        modified = drop_pattern_negations(inst.formula, pattern)
        if not semantics.is_satisfiable(modified):
            continue
        pairs.append(BehaviorPair(original=inst.formula, modified=modified))
    return pairs
