"""LTLf to DFA compilation by formula progression.

A DFA state is a *residual obligation*: a Boolean combination of

* ``F a``, ``G a`` and ``a U b`` nodes: the remaining suffix must satisfy them
  (``G`` is vacuously true on the empty suffix, ``F`` and ``U`` are false), and
* ``due(a)`` nodes produced by ``X a``: the remaining suffix must be nonempty
  and satisfy ``a`` at its first position (strong next).

Reading a letter rewrites the obligation with :func:`progress`; a word is
accepted when the obligation left at its end holds on the empty suffix
(:func:`end_eval`).  States are identified by the truth table of their
obligation over the finite set of leaves that can occur, so the construction
is finite and propositionally equivalent residuals are merged.
"""

from __future__ import annotations

import functools
from collections import deque
from typing import Iterable, Mapping, Sequence

from .formula import Formula, _make, atoms, default_propositions, print_formula, subformulas
from .traces import Trace, Valuation

__all__ = [
    "TRUE",
    "FALSE",
    "due",
    "progress",
    "end_eval",
    "Dfa",
    "DfaTooLarge",
    "to_dfa",
    "inclusion_witness",
    "is_included",
    "compare_languages",
    "strictly_smaller",
    "language_equal",
    "shortest_accepted_excluding",
    "MAX_PROPOSITIONS",
    "DEFAULT_STATE_CAP",
]

MAX_PROPOSITIONS = 10
DEFAULT_STATE_CAP = 100_000

TRUE = _make("true", None, ())
FALSE = _make("false", None, ())


class DfaTooLarge(RuntimeError):
    """The construction exceeded its state cap or alphabet guard."""


def due(a: Formula) -> Formula:
    return _make("due", None, (a,))


def _neg(a: Formula) -> Formula:
    if a is TRUE:
        return FALSE
    if a is FALSE:
        return TRUE
    if a.op == "!":
        return a.children[0]
    return _make("!", None, (a,))


def _conj(a: Formula, b: Formula) -> Formula:
    if a is FALSE or b is FALSE:
        return FALSE
    if a is TRUE:
        return b
    if b is TRUE or a is b:
        return a
    return _make("&", None, (a, b))


def _disj(a: Formula, b: Formula) -> Formula:
    if a is TRUE or b is TRUE:
        return TRUE
    if a is FALSE:
        return b
    if b is FALSE or a is b:
        return a
    return _make("|", None, (a, b))


def progress(
    expr: Formula,
    letter: Mapping[str, bool] | Sequence[bool],
    propositions: Sequence[str] | None = None,
) -> Formula:
    """Residual obligation after reading one letter.

    ``letter`` maps proposition names to their values at the current step, or
    is a valuation tuple read against ``propositions`` (default ``x0, x1, ...``).
    """
    if not isinstance(letter, Mapping):
        if propositions is None:
            propositions = default_propositions(len(letter))
        letter = dict(zip(propositions, letter))
    memo: dict[int, Formula] = {}

    def prog(e: Formula) -> Formula:
        key = id(e)
        r = memo.get(key)
        if r is not None:
            return r
        op = e.op
        if op == "ap":
            r = TRUE if letter[e.name] else FALSE
        elif op in ("true", "false"):
            r = e
        elif op == "!":
            r = _neg(prog(e.children[0]))
        elif op == "&":
            r = _conj(prog(e.children[0]), prog(e.children[1]))
        elif op == "|":
            r = _disj(prog(e.children[0]), prog(e.children[1]))
        elif op == "->":
            r = _disj(_neg(prog(e.children[0])), prog(e.children[1]))
        elif op == "X":
            r = due(e.children[0])
        elif op == "due":
            r = prog(e.children[0])
        elif op == "F":
            r = _disj(prog(e.children[0]), e)
        elif op == "G":
            r = _conj(prog(e.children[0]), e)
        elif op == "U":
            r = _disj(prog(e.children[1]), _conj(prog(e.children[0]), e))
        else:
            raise ValueError(f"unknown node {op!r}")
        memo[key] = r
        return r

    return prog(expr)


def end_eval(expr: Formula) -> bool:
    """Truth of a residual obligation on the empty suffix.

    ``G`` obligations hold vacuously; ``F``, ``U``, ``X``/``due`` obligations
    and bare atoms fail because they need another position.
    """
    memo: dict[int, bool] = {}
    for node in subformulas(expr):
        op = node.op
        if op == "true" or op == "G":
            v = True
        elif op in ("false", "F", "U", "X", "due", "ap"):
            v = False
        elif op == "!":
            v = not memo[id(node.children[0])]
        elif op == "&":
            v = memo[id(node.children[0])] and memo[id(node.children[1])]
        elif op == "|":
            v = memo[id(node.children[0])] or memo[id(node.children[1])]
        elif op == "->":
            v = (not memo[id(node.children[0])]) or memo[id(node.children[1])]
        else:
            raise ValueError(f"unknown node {op!r}")
        memo[id(node)] = v
    return memo[id(expr)]


# ---------------------------------------------------------------------------


def _leaf_masks(m: int) -> list[int]:
    rows = 1 << m
    full_rep = (1 << rows) - 1
    masks = []
    for i in range(m):
        half = 1 << i
        period = half << 1
        block = ((1 << half) - 1) << half
        rep = full_rep // ((1 << period) - 1)
        masks.append(block * rep)
    return masks


class _TruthTables:
    """Canonical keys for Boolean combinations of a fixed leaf set."""

    def __init__(self, leaves: Sequence[Formula]):
        self.index = {id(leaf): i for i, leaf in enumerate(leaves)}
        self.masks = _leaf_masks(len(leaves))
        self.full = (1 << (1 << len(leaves))) - 1
        self.leaves = list(leaves)

    def key(self, expr: Formula) -> int:
        memo: dict[int, int] = {}
        index, masks, full = self.index, self.masks, self.full

        def table(node: Formula) -> int:
            nid = id(node)
            v = memo.get(nid)
            if v is not None:
                return v
            i = index.get(nid)
            op = node.op
            if i is not None:
                v = masks[i]
            elif op == "true":
                v = full
            elif op == "false":
                v = 0
            elif op == "!":
                v = full ^ table(node.children[0])
            elif op == "&":
                v = table(node.children[0]) & table(node.children[1])
            elif op == "|":
                v = table(node.children[0]) | table(node.children[1])
            elif op == "->":
                v = (full ^ table(node.children[0])) | table(node.children[1])
            else:
                raise ValueError(f"unexpected node {op!r} in residual")
            memo[nid] = v
            return v

        return table(expr)


def _leaves(f: Formula) -> list[Formula]:
    leaves = [due(f)]
    for node in subformulas(f):
        if node.op == "X":
            leaves.append(due(node.children[0]))
        elif node.op in ("F", "G", "U"):
            leaves.append(node)
    unique = []
    seen = set()
    for leaf in leaves:
        if id(leaf) not in seen:
            seen.add(id(leaf))
            unique.append(leaf)
    return unique


def letters(propositions: Sequence[str]) -> list[Valuation]:
    """All valuations, indexed as binary numbers with the first proposition least significant."""
    k = len(propositions)
    return [tuple(bool((a >> j) & 1) for j in range(k)) for a in range(1 << k)]


def letter_index(valuation: Sequence[bool]) -> int:
    return sum(1 << j for j, b in enumerate(valuation) if b)


class Dfa:
    """Complete DFA over the alphabet of all valuations of ``propositions``."""

    def __init__(self, propositions, transitions, accepting, exprs, dead, universal, source=None):
        self.propositions = tuple(propositions)
        self.transitions = transitions
        self.accepting = accepting
        self.exprs = exprs
        self.dead = dead
        self.universal = universal
        self.initial = 0
        self.source = source

    @property
    def num_states(self) -> int:
        return len(self.transitions)

    @property
    def num_letters(self) -> int:
        return 1 << len(self.propositions)

    def run(self, word: Iterable[Sequence[bool]]) -> int:
        q = self.initial
        for v in word:
            q = self.transitions[q][letter_index(v)]
        return q

    def accepts(self, word: Sequence[Sequence[bool]]) -> bool:
        if len(word) == 0:
            return False
        return self.accepting[self.run(word)]

    def to_dot(self) -> str:
        lines = ["digraph {", "  rankdir=LR;", '  init [shape=point];', "  init -> q0;"]
        for q in range(self.num_states):
            shape = "doublecircle" if self.accepting[q] else "circle"
            label = print_formula(self.exprs[q]).replace('"', '\\"')
            lines.append(f'  q{q} [shape={shape}, label="{q}: {label}"];')
        alphabet = letters(self.propositions)
        for q, row in enumerate(self.transitions):
            grouped: dict[int, list[str]] = {}
            for a, target in enumerate(row):
                text = ",".join("1" if b else "0" for b in alphabet[a])
                grouped.setdefault(target, []).append(text)
            for target, labels in grouped.items():
                lines.append(f'  q{q} -> q{target} [label="{" | ".join(labels)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def to_dfa(
    f: Formula,
    propositions: Sequence[str] | None = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> Dfa:
    """Compile ``f`` to a DFA accepting exactly the nonempty words satisfying it."""
    if propositions is None:
        propositions = atoms(f)
    return _to_dfa(f, tuple(propositions), state_cap)


@functools.lru_cache(maxsize=4096)
def _to_dfa(f: Formula, propositions: tuple[str, ...], state_cap: int) -> Dfa:
    if not propositions:
        raise ValueError("the alphabet needs at least one proposition")
    if len(propositions) > MAX_PROPOSITIONS:
        raise DfaTooLarge(f"{len(propositions)} propositions exceed the guard of {MAX_PROPOSITIONS}")
    missing = set(atoms(f)) - set(propositions)
    if missing:
        raise ValueError(f"formula uses propositions outside the alphabet: {sorted(missing)}")
    tables = _TruthTables(_leaves(f))
    alphabet = [dict(zip(propositions, v)) for v in letters(propositions)]
    init = due(f)
    exprs = [init]
    keys = {tables.key(init): 0}
    transitions: list[list[int]] = []
    q = 0
    while q < len(exprs):
        expr = exprs[q]
        row = []
        for letter in alphabet:
            nxt = progress(expr, letter)
            key = tables.key(nxt)
            target = keys.get(key)
            if target is None:
                target = len(exprs)
                if target >= state_cap:
                    raise DfaTooLarge(f"more than {state_cap} states for {print_formula(f)}")
                keys[key] = target
                exprs.append(nxt)
            row.append(target)
        transitions.append(row)
        q += 1
    accepting = [end_eval(e) for e in exprs]
    dead = frozenset(keys[k] for k in keys if k == 0)
    universal = frozenset(keys[k] for k in keys if k == tables.full)
    return Dfa(propositions, transitions, accepting, exprs, dead, universal, source=f)


# ---------------------------------------------------------------------------
# language queries


def _check_alphabets(a: Dfa, b: Dfa) -> None:
    if a.propositions != b.propositions:
        raise ValueError(f"alphabet mismatch: {a.propositions} vs {b.propositions}")


def inclusion_witness(a: Dfa, b: Dfa) -> Trace | None:
    """A shortest word accepted by ``a`` but not ``b``, or None if L(a) is a subset of L(b).

    Among shortest witnesses the lexicographically least is returned, letters
    being compared as binary numbers (see :func:`letters`).
    """
    _check_alphabets(a, b)
    start = (a.initial, b.initial)
    parent: dict[tuple[int, int], tuple | None] = {start: None}
    queue = deque([start])
    nl = a.num_letters
    ta, tb = a.transitions, b.transitions
    acc_a, acc_b = a.accepting, b.accepting
    while queue:
        pair = queue.popleft()
        qa, qb = pair
        ra, rb = ta[qa], tb[qb]
        for x in range(nl):
            nxt = (ra[x], rb[x])
            if nxt in parent:
                continue
            parent[nxt] = (pair, x)
            if acc_a[nxt[0]] and not acc_b[nxt[1]]:
                return _word(parent, nxt, a.propositions)
            if nxt[0] in a.dead or nxt[1] in b.universal:
                continue
            queue.append(nxt)
    return None


def _word(parent, node, propositions) -> Trace:
    alphabet = letters(propositions)
    out = []
    while parent[node] is not None:
        node, x = parent[node]
        out.append(alphabet[x])
    return tuple(reversed(out))


def is_included(a: Dfa, b: Dfa) -> bool:
    return inclusion_witness(a, b) is None


def compare_languages(f: Formula, g: Formula, propositions: Sequence[str]):
    """Return ``(f_minus_g, g_minus_f)`` shortest witnesses (None when empty)."""
    da = to_dfa(f, propositions)
    db = to_dfa(g, propositions)
    return inclusion_witness(da, db), inclusion_witness(db, da)


def strictly_smaller(f: Formula, g: Formula, propositions: Sequence[str] | None = None) -> bool:
    """Whether L(f) is a proper subset of L(g)."""
    if propositions is None:
        propositions = sorted(set(atoms(f)) | set(atoms(g)))
    f_minus_g, g_minus_f = compare_languages(f, g, propositions)
    return f_minus_g is None and g_minus_f is not None


def language_equal(f: Formula, g: Formula, propositions: Sequence[str] | None = None) -> bool:
    if propositions is None:
        propositions = sorted(set(atoms(f)) | set(atoms(g)))
    f_minus_g, g_minus_f = compare_languages(f, g, propositions)
    return f_minus_g is None and g_minus_f is None


def shortest_accepted_excluding(a: Dfa, exclude: Iterable[Sequence[Sequence[bool]]], max_len: int) -> Trace | None:
    """Shortest (then lexicographically least) accepted word not in ``exclude``."""
    excluded = {tuple(tuple(bool(b) for b in v) for v in w) for w in exclude}
    nl = a.num_letters
    alphabet = letters(a.propositions)
    # reach[r][q]: some word of length exactly r leads from q to acceptance
    reach = [list(a.accepting)]
    for _ in range(max_len):
        prev = reach[-1]
        reach.append([any(prev[a.transitions[q][x]] for x in range(nl)) for q in range(a.num_states)])
    for length in range(1, max_len + 1):
        if not reach[length][a.initial]:
            continue
        stack = [(a.initial, ())]
        while stack:
            q, word = stack.pop()
            if len(word) == length:
                if word not in excluded:
                    return word
                continue
            remaining = length - len(word) - 1
            for x in range(nl - 1, -1, -1):
                nq = a.transitions[q][x]
                if reach[remaining][nq]:
                    stack.append((nq, word + (alphabet[x],)))
    return None
