"""Independent reference implementations used as test oracles.

Nothing here imports the package's evaluator, solver or automata, so the
checks are not circular.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

import numpy as np

from ltlmine.formula import (
    And,
    Atom,
    Finally,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Until,
    dag_size,
)

UNARY_BUILDERS = {"!": Not, "X": Next, "F": Finally, "G": Globally}
BINARY_BUILDERS = {"&": And, "|": Or, "->": Implies, "U": Until}


def naive_eval(f, trace, t, props) -> bool:
    """Textbook finite-trace semantics, one position at a time."""
    k = len(trace)
    op = f.op
    if op == "ap":
        return trace[t][props.index(f.name)]
    if op == "!":
        return not naive_eval(f.children[0], trace, t, props)
    if op == "&":
        return naive_eval(f.children[0], trace, t, props) and naive_eval(f.children[1], trace, t, props)
    if op == "|":
        return naive_eval(f.children[0], trace, t, props) or naive_eval(f.children[1], trace, t, props)
    if op == "->":
        return (not naive_eval(f.children[0], trace, t, props)) or naive_eval(f.children[1], trace, t, props)
    if op == "X":
        return t + 1 < k and naive_eval(f.children[0], trace, t + 1, props)
    if op == "F":
        return any(naive_eval(f.children[0], trace, s, props) for s in range(t, k))
    if op == "G":
        return all(naive_eval(f.children[0], trace, s, props) for s in range(t, k))
    if op == "U":
        a, b = f.children
        return any(
            naive_eval(b, trace, s, props) and all(naive_eval(a, trace, r, props) for r in range(t, s))
            for s in range(t, k)
        )
    raise ValueError(op)


def all_words(width: int, max_len: int, min_len: int = 1):
    letters = list(itertools.product((False, True), repeat=width))
    for length in range(min_len, max_len + 1):
        yield from itertools.product(letters, repeat=length)


def random_formula(rng: random.Random, size: int, props: Sequence[str]):
    """Random syntax tree with exactly ``size`` tree nodes."""
    if size == 1:
        return Atom(rng.choice(list(props)))
    ops = list(UNARY_BUILDERS)
    if size >= 3:
        ops += list(BINARY_BUILDERS)
    op = rng.choice(ops)
    if op in UNARY_BUILDERS:
        return UNARY_BUILDERS[op](random_formula(rng, size - 1, props))
    left = rng.randint(1, size - 2)
    return BINARY_BUILDERS[op](random_formula(rng, left, props), random_formula(rng, size - 1 - left, props))


def formulas_up_to(n: int, props: Sequence[str]) -> list:
    """Every formula whose DAG has at most ``n`` nodes, built level by level."""
    levels: dict[int, set] = {1: {Atom(p) for p in props}}
    for size in range(2, n + 1):
        level = {build(a) for a in levels[size - 1] for build in UNARY_BUILDERS.values()}
        pool = [(f, k) for k in range(1, size) for f in levels[k]]
        for a, ka in pool:
            for b, kb in pool:
                # sharing puts the binary node somewhere in [max + 1, sum + 1]
                if max(ka, kb) + 1 > size or ka + kb + 1 < size:
                    continue
                for build in BINARY_BUILDERS.values():
                    f = build(a, b)
                    if dag_size(f) == size:
                        level.add(f)
        levels[size] = level
    return sorted((f for lv in levels.values() for f in lv), key=lambda f: (dag_size(f), repr(f)))


def brute_force_sat(num_vars: int, clauses: Iterable[Sequence[int]]):
    """First satisfying assignment in binary counting order, or None."""
    clauses = [tuple(c) for c in clauses]
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return bits
    return None


def count_models(num_vars: int, clauses: Iterable[Sequence[int]]) -> int:
    """Number of satisfying assignments, by evaluating all of them at once."""
    idx = np.arange(1 << num_vars, dtype=np.int64)
    ok = np.ones(1 << num_vars, dtype=bool)
    for c in clauses:
        sat = np.zeros_like(ok)
        for lit in c:
            bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
            sat |= bit if lit > 0 else ~bit
        ok &= sat
    return int(ok.sum())


def brute_force_models(num_vars: int, clauses: Iterable[Sequence[int]]):
    clauses = [tuple(c) for c in clauses]
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            yield bits


def pigeonhole(pigeons: int, holes: int) -> tuple[int, list[list[int]]]:
    var = lambda i, j: i * holes + j + 1  # noqa: E731
    clauses = [[var(i, j) for j in range(holes)] for i in range(pigeons)]
    for j in range(holes):
        for a in range(pigeons):
            for b in range(a + 1, pigeons):
                clauses.append([-var(a, j), -var(b, j)])
    return pigeons * holes, clauses


def random_3cnf(rng: random.Random, num_vars: int, num_clauses: int) -> list[list[int]]:
    out = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        out.append([v if rng.random() < 0.5 else -v for v in vs])
    return out


def misclassified(f, positives, negatives, props) -> int:
    return sum(not naive_eval(f, u, 0, props) for u in positives) + sum(
        naive_eval(f, u, 0, props) for u in negatives
    )


def trace(text: str):
    """``"1,0;0,1"`` -> trace tuple (independent of the package parser)."""
    return tuple(tuple(c == "1" for c in step.split(",")) for step in text.split(";"))
