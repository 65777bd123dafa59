"""LTL formulas over finite traces.

Formulas are hash-consed syntax DAGs: building the same subterm twice returns
the same node object, so identity comparison is structural comparison and the
formula size is simply the number of distinct reachable nodes.

Semantics are the usual finite-trace (LTLf) ones with a *strong* next
operator: ``X phi`` is false at the last position of a trace.  ``F``, ``G``
and ``U`` are reflexive (they include the current position).
"""

from __future__ import annotations

import re
import threading
import weakref
from typing import Iterable, Sequence

__all__ = [
    "Formula",
    "FormulaSyntaxError",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Next",
    "Finally",
    "Globally",
    "Until",
    "parse_formula",
    "print_formula",
    "evaluate",
    "evaluate_mask",
    "dag_size",
    "subformulas",
    "atoms",
    "formula_key",
    "UNARY_OPS",
    "BINARY_OPS",
]

UNARY_OPS = ("!", "X", "F", "G")
BINARY_OPS = ("&", "|", "->", "U")

# Internal node kinds used by the automata construction; never produced by the
# parser and not part of the surface grammar.
_INTERNAL_OPS = ("true", "false", "due")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class Formula:
    """A node of an interned LTL syntax DAG.

    Do not instantiate directly; use the constructor functions (:func:`Atom`,
    :func:`And`, ...) or :func:`parse_formula`.
    """

    __slots__ = ("op", "name", "children", "_hash", "__weakref__")

    op: str
    name: str | None
    children: tuple["Formula", ...]

    def __init__(self, op, name, children):
        self.op = op
        self.name = name
        self.children = children
        self._hash = hash((op, name, tuple(id(c) for c in children)))

    def __hash__(self):
        return self._hash

    # identity equality is structural equality thanks to interning
    def __eq__(self, other):
        return self is other

    def __ne__(self, other):
        return self is not other

    def __repr__(self):
        return f"Formula({print_formula(self)!r})"

    def __str__(self):
        return print_formula(self)

    def __reduce__(self):
        return (_make, (self.op, self.name, self.children))

    @property
    def left(self) -> "Formula":
        return self.children[0]

    @property
    def right(self) -> "Formula":
        return self.children[1]

    @property
    def size(self) -> int:
        return dag_size(self)


_table: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()
_table_lock = threading.Lock()


def _make(op: str, name: str | None, children: tuple) -> Formula:
    key = (op, name, children)
    with _table_lock:
        node = _table.get(key)
        if node is None:
            node = Formula(op, name, children)
            _table[key] = node
        return node


def Atom(name: str) -> Formula:
    if not isinstance(name, str) or not _IDENT.fullmatch(name) or name in ("X", "F", "G", "U"):
        raise ValueError(f"invalid proposition name {name!r}")
    return _make("ap", name, ())


def Not(a: Formula) -> Formula:
    return _make("!", None, (a,))


def And(a: Formula, b: Formula) -> Formula:
    return _make("&", None, (a, b))


def Or(a: Formula, b: Formula) -> Formula:
    return _make("|", None, (a, b))


def Implies(a: Formula, b: Formula) -> Formula:
    return _make("->", None, (a, b))


def Next(a: Formula) -> Formula:
    return _make("X", None, (a,))


def Finally(a: Formula) -> Formula:
    return _make("F", None, (a,))


def Globally(a: Formula) -> Formula:
    return _make("G", None, (a,))


def Until(a: Formula, b: Formula) -> Formula:
    return _make("U", None, (a, b))


_CONSTRUCTORS = {
    "!": Not,
    "X": Next,
    "F": Finally,
    "G": Globally,
    "&": And,
    "|": Or,
    "->": Implies,
    "U": Until,
}


def build(op: str, *children: Formula) -> Formula:
    """Build a node from an operator symbol (one of the grammar's tokens)."""
    return _CONSTRUCTORS[op](*children)


# ---------------------------------------------------------------------------
# structure


def subformulas(f: Formula) -> list[Formula]:
    """Distinct nodes reachable from ``f``, children before parents.

    The order is a left-to-right post-order and therefore deterministic.
    """
    order: list[Formula] = []
    seen: set[int] = set()
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            order.append(node)
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            if id(child) not in seen:
                stack.append((child, False))
    return order


def dag_size(f: Formula) -> int:
    return len(subformulas(f))


def atoms(f: Formula) -> list[str]:
    """Proposition names occurring in ``f``, sorted."""
    return sorted({n.name for n in subformulas(f) if n.op == "ap"})


def formula_key(f: Formula) -> tuple[int, str]:
    """Sort key used for deterministic tie-breaking: size, then printed form."""
    return (dag_size(f), print_formula(f))


# ---------------------------------------------------------------------------
# printing


def print_formula(f: Formula) -> str:
    """Render ``f`` in the concrete grammar accepted by :func:`parse_formula`.

    Operands of unary operators are parenthesized unless atomic; operands of
    binary operators are parenthesized when they are themselves binary, and
    operands of ``->`` are parenthesized whenever they are not atomic.
    """
    memo: dict[int, str] = {}
    for node in subformulas(f):
        memo[id(node)] = _render(node, memo)
    return memo[id(f)]


def _render(node: Formula, memo: dict[int, str]) -> str:
    op = node.op
    if op == "ap":
        return node.name
    if op in ("true", "false"):
        return op
    if op == "due":
        return f"due({memo[id(node.children[0])]})"
    if op in UNARY_OPS:
        child = node.children[0]
        text = memo[id(child)]
        if child.children:
            text = f"({text})"
        return f"!{text}" if op == "!" else f"{op} {text}"
    parts = []
    for child in node.children:
        text = memo[id(child)]
        if len(child.children) == 2 or (op == "->" and child.children):
            text = f"({text})"
        parts.append(text)
    return f"{parts[0]} {op} {parts[1]}"


# ---------------------------------------------------------------------------
# parsing


class FormulaSyntaxError(ValueError):
    """Raised for malformed formula text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(->)|([!&|()])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise FormulaSyntaxError(f"unknown operator token {text[bad]!r}", bad)
        if m.group(1):
            tokens.append(("op", "->", m.start(1)))
        elif m.group(2):
            tokens.append(("op", m.group(2), m.start(2)))
        else:
            word = m.group(3)
            kind = "op" if word in ("X", "F", "G", "U") else "id"
            tokens.append((kind, word, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "id":
            found = "end of input" if kind == "end" else repr(val)
            raise FormulaSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Formula:
        f = self.implication()
        kind, val, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected token {val!r}", pos)
        return f

    def implication(self):
        left = self.disjunction()
        if self.peek()[1] == "->" and self.peek()[0] == "op":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.until()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            left = And(left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.peek()[:2] == ("op", "U"):
            self.take()
            return Until(left, self.until())
        return left

    def unary(self):
        kind, val, pos = self.take()
        if kind == "op" and val in UNARY_OPS:
            return _CONSTRUCTORS[val](self.unary())
        if kind == "op" and val == "(":
            inner = self.implication()
            self.expect(")")
            return inner
        if kind == "id":
            return Atom(val)
        found = "end of input" if kind == "end" else repr(val)
        raise FormulaSyntaxError(f"unexpected {found}", pos)


def parse_formula(text: str) -> Formula:
    """Parse formula text.

    Precedence from loosest to tightest: ``->`` (right associative), ``|``,
    ``&``, ``U`` (right associative), then the unary operators ``! X F G``.

    >>> print_formula(parse_formula("(F x3) -> (G x3)"))
    '(F x3) -> (G x3)'
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# semantics


def evaluate_mask(f: Formula, trace: Sequence[Sequence[bool]], propositions: Sequence[str]) -> int:
    """Truth of ``f`` at every position of ``trace`` as a bitmask.

    Bit ``t`` of the result is set iff ``trace, t |= f``.
    """
    k = len(trace)
    if k == 0:
        raise ValueError("traces must be nonempty")
    full = (1 << k) - 1
    index = {p: j for j, p in enumerate(propositions)}
    masks: dict[int, int] = {}
    for node in subformulas(f):
        op = node.op
        if op == "ap":
            j = index.get(node.name)
            if j is None:
                raise KeyError(f"unknown proposition {node.name!r}")
            m = 0
            for t in range(k):
                if trace[t][j]:
                    m |= 1 << t
        elif op == "!":
            m = full ^ masks[id(node.children[0])]
        elif op == "&":
            m = masks[id(node.children[0])] & masks[id(node.children[1])]
        elif op == "|":
            m = masks[id(node.children[0])] | masks[id(node.children[1])]
        elif op == "->":
            m = (full ^ masks[id(node.children[0])]) | masks[id(node.children[1])]
        elif op == "X":
            m = masks[id(node.children[0])] >> 1
        elif op == "F":
            c = masks[id(node.children[0])]
            m = (1 << c.bit_length()) - 1
        elif op == "G":
            c = full ^ masks[id(node.children[0])]
            m = full ^ ((1 << c.bit_length()) - 1)
        elif op == "U":
            a = masks[id(node.children[0])]
            b = masks[id(node.children[1])]
            m = 0
            holds = False
            for t in range(k - 1, -1, -1):
                bit = 1 << t
                holds = bool(b & bit) or (bool(a & bit) and holds)
                if holds:
                    m |= bit
        elif op == "true":
            m = full
        elif op == "false":
            m = 0
        else:
            raise ValueError(f"cannot evaluate internal node {op!r}")
        masks[id(node)] = m
    return masks[id(f)]


def evaluate(
    f: Formula,
    trace: Sequence[Sequence[bool]],
    t: int = 0,
    propositions: Sequence[str] | None = None,
) -> bool:
    """Whether ``trace`` satisfies ``f`` at position ``t``.

    ``propositions`` names the valuation columns; it defaults to
    ``x0 .. x{k-1}``.
    """
    if not 0 <= t < len(trace):
        raise IndexError(f"position {t} out of range for trace of length {len(trace)}")
    if propositions is None:
        propositions = default_propositions(len(trace[0]))
    return bool((evaluate_mask(f, trace, propositions) >> t) & 1)


def default_propositions(width: int) -> list[str]:
    return [f"x{j}" for j in range(width)]


def conjunction(parts: Iterable[Formula]) -> Formula | None:
    """Left-nested conjunction of ``parts`` (None when empty)."""
    result = None
    for p in parts:
        result = p if result is None else And(result, p)
    return result


def disjunction(parts: Iterable[Formula]) -> Formula | None:
    result = None
    for p in parts:
        result = p if result is None else Or(result, p)
    return result
