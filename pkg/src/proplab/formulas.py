"""Formula ASTs over the five-operator, five-variable propositional vocabulary.

Formulas are immutable trees serialized as whitespace-separated Polish
(prefix) tokens: ``& ! a | b c`` denotes (not a) and (b or c). Prefix order
makes the serialization unambiguous without parentheses, so parsing and
printing are exact inverses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence, Union

VARIABLES = ("a", "b", "c", "d", "e")


class Op(enum.Enum):
    """Operator kind; the enum value is the surface token."""

    NOT = "!"
    AND = "&"
    OR = "|"
    IFF = "<->"
    XOR = "xor"

    @property
    def arity(self) -> int:
        return 1 if self is Op.NOT else 2


BINARY_OPS = (Op.AND, Op.OR, Op.IFF, Op.XOR)
_TOKEN_TO_OP = {op.value: op for op in Op}


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class Bin:
    op: Op
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Not, Bin]


class ParseError(ValueError):
    pass


class UnknownToken(ParseError):
    pass


class TruncatedFormula(ParseError):
    """The token stream ended while an operator still expected operands."""


class TrailingTokens(ParseError):
    """Tokens remained after a complete formula was consumed."""


class UnassignedVariable(KeyError):
    """evaluate() hit a variable the world does not bind."""


def parse_polish(tokens: Sequence[str]) -> Formula:
    """Parse whitespace-split Polish tokens into a Formula.

    Accepts a string (split on whitespace) or any token sequence. The
    parse consumes all tokens exactly; anything else is an error.
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    pos = 0

    def parse_one() -> Formula:
        nonlocal pos
        if pos >= len(tokens):
            raise TruncatedFormula(f"expected operand at position {pos}")
        tok = tokens[pos]
        pos += 1
        if tok in VARIABLES:
            return Var(tok)
        op = _TOKEN_TO_OP.get(tok)
        if op is None:
            raise UnknownToken(f"unknown token {tok!r} at position {pos - 1}")
        if op is Op.NOT:
            return Not(parse_one())
        return Bin(op, parse_one(), parse_one())

    formula = parse_one()
    if pos != len(tokens):
        raise TrailingTokens(f"{len(tokens) - pos} token(s) left after a complete formula")
    return formula


def to_polish(f: Formula) -> list[str]:
    """Serialize a Formula to its Polish token list (inverse of parse_polish)."""
    out: list[str] = []
    stack: list[Formula] = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.append(node.name)
        elif isinstance(node, Not):
            out.append(Op.NOT.value)
            stack.append(node.child)
        else:
            out.append(node.op.value)
            stack.append(node.right)
            stack.append(node.left)
    return out


def to_text(f: Formula) -> str:
    return " ".join(to_polish(f))


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Yield every node in prefix (token) order."""
    stack: list[Formula] = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, Bin):
            stack.append(node.right)
            stack.append(node.left)


def evaluate(f: Formula, world: dict[str, int]) -> bool:
    """Evaluate under a complete assignment; IFF is equality, XOR inequality."""
    if isinstance(f, Var):
        try:
            return bool(world[f.name])
        except KeyError:
            raise UnassignedVariable(f.name) from None
    if isinstance(f, Not):
        return not evaluate(f.child, world)
    left = evaluate(f.left, world)
    right = evaluate(f.right, world)
    if f.op is Op.AND:
        return left and right
    if f.op is Op.OR:
        return left or right
    if f.op is Op.XOR:
        return left != right
    return left == right


def vars_of(f: Formula) -> set[str]:
    return {node.name for node in iter_nodes(f) if isinstance(node, Var)}


def size(f: Formula) -> int:
    """Number of Polish tokens (= number of AST nodes)."""
    return sum(1 for _ in iter_nodes(f))


def depth(f: Formula) -> int:
    """Maximum number of edges from the root to a leaf."""
    if isinstance(f, Var):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.child)
    return 1 + max(depth(f.left), depth(f.right))


class Pattern(enum.Enum):
    """Parent-child operator combinations used for holdout splits and slicing.

    P1 negated and-node, P2 negated or-node, P3 negated xor-node, P4 negated
    variable b, P5 and-node whose left child is negated, P6 and-node with an
    xor child (either side), P7 iff-node with a negated child (either side).
    """

    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"
    P5 = "P5"
    P6 = "P6"
    P7 = "P7"


_NOT_CHILD_PATTERNS = {Pattern.P1: Op.AND, Pattern.P2: Op.OR, Pattern.P3: Op.XOR}


def _pattern_matches_at(node: Formula, p: Pattern) -> int:
    """Number of parent-child pairs matching p with `node` as the parent."""
    if isinstance(node, Not):
        child = node.child
        if p in _NOT_CHILD_PATTERNS:
            return int(isinstance(child, Bin) and child.op is _NOT_CHILD_PATTERNS[p])
        if p is Pattern.P4:
            return int(isinstance(child, Var) and child.name == "b")
        return 0
    if isinstance(node, Bin):
        if p is Pattern.P5:
            return int(node.op is Op.AND and isinstance(node.left, Not))
        if p is Pattern.P6 and node.op is Op.AND:
            return sum(
                isinstance(c, Bin) and c.op is Op.XOR for c in (node.left, node.right)
            )
        if p is Pattern.P7 and node.op is Op.IFF:
            return sum(isinstance(c, Not) for c in (node.left, node.right))
    return 0


def count_pattern(f: Formula, p: Pattern) -> int:
    return sum(_pattern_matches_at(node, p) for node in iter_nodes(f))


def contains_pattern(f: Formula, p: Pattern) -> bool:
    return any(_pattern_matches_at(node, p) for node in iter_nodes(f))


def pattern_tags(f: Formula) -> set[Pattern]:
    return {p for p in Pattern if contains_pattern(f, p)}


def contains_double_negation(f: Formula) -> bool:
    return any(
        isinstance(node, Not) and isinstance(node.child, Not) for node in iter_nodes(f)
    )


def flip_children(f: Formula, decide: Callable[[], bool]) -> Formula:
    """Swap left/right of each binary node for which decide() returns True.

    decide is consulted once per binary node, in prefix order of the input
    tree, so a seeded RNG yields a reproducible flip. All binary operators
    are commutative, so flipping never changes the satisfying worlds.
    """
    if isinstance(f, Var):
        return f
    if isinstance(f, Not):
        return Not(flip_children(f.child, decide))
    flip = decide()
    left = flip_children(f.left, decide)
    right = flip_children(f.right, decide)
    return Bin(f.op, right, left) if flip else Bin(f.op, left, right)


@dataclass(frozen=True)
class SubtreeStats:
    """Mean left/right child sizes over binary roots and over all binary nodes."""

    root_left: float
    root_right: float
    all_left: float
    all_right: float
    n_roots: int
    n_nodes: int


def subtree_stats(formulas: Iterable[Formula]) -> SubtreeStats:
    root_left = root_right = all_left = all_right = 0
    n_roots = n_nodes = 0

    def visit(node: Formula) -> int:
        # Returns the subtree size in one pass; quadratic re-measuring would
        # hurt on datasets of 100k formulas.
        nonlocal all_left, all_right, n_nodes
        if isinstance(node, Var):
            return 1
        if isinstance(node, Not):
            return 1 + visit(node.child)
        ls = visit(node.left)
        rs = visit(node.right)
        all_left += ls
        all_right += rs
        n_nodes += 1
        return 1 + ls + rs

    for f in formulas:
        if isinstance(f, Bin):
            ls = visit(f.left)
            rs = visit(f.right)
            all_left += ls
            all_right += rs
            n_nodes += 1
            root_left += ls
            root_right += rs
            n_roots += 1
        else:
            visit(f)
    return SubtreeStats(
        root_left=root_left / n_roots if n_roots else 0.0,
        root_right=root_right / n_roots if n_roots else 0.0,
        all_left=all_left / n_nodes if n_nodes else 0.0,
        all_right=all_right / n_nodes if n_nodes else 0.0,
        n_roots=n_roots,
        n_nodes=n_nodes,
    )
