"""Decision trees whose split predicates are small learned formulas."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .formula import (
    And,
    Atom,
    Formula,
    Not,
    Or,
    evaluate_mask,
    parse_formula,
    print_formula,
)
from .learning import LearnResult, LearnStatus, error_budget, learn_best, n_nodes, resolve_deadline
from .traces import Sample, Trace

__all__ = [
    "Leaf",
    "Split",
    "DecisionTree",
    "learn_tree",
    "tree_to_formula",
]


@dataclass(frozen=True)
class Leaf:
    label: bool
    pos: int
    neg: int

    @property
    def minority(self) -> int:
        return self.neg if self.label else self.pos


@dataclass(frozen=True)
class Split:
    predicate: Formula
    satisfy: "Node"
    falsify: "Node"


Node = Union[Leaf, Split]


def _leaf(pos: int, neg: int) -> Leaf:
    # ties are labeled negative
    return Leaf(pos > neg, pos, neg)


def _holds(f: Formula, trace: Trace, propositions) -> bool:
    return bool(evaluate_mask(f, trace, propositions) & 1)


@dataclass(frozen=True)
class DecisionTree:
    root: Node
    propositions: tuple[str, ...]

    def route(self, trace: Trace) -> Leaf:
        node = self.root
        while isinstance(node, Split):
            node = node.satisfy if _holds(node.predicate, trace, self.propositions) else node.falsify
        return node

    def classify(self, trace: Trace) -> bool:
        return self.route(trace).label

    def leaves(self) -> list[Leaf]:
        out = []

        def walk(node):
            if isinstance(node, Leaf):
                out.append(node)
            else:
                walk(node.satisfy)
                walk(node.falsify)

        walk(self.root)
        return out

    @property
    def depth(self) -> int:
        def d(node):
            return 0 if isinstance(node, Leaf) else 1 + max(d(node.satisfy), d(node.falsify))

        return d(self.root)

    @property
    def misclassified(self) -> int:
        return sum(leaf.minority for leaf in self.leaves())

    def to_dict(self) -> dict:
        def enc(node):
            if isinstance(node, Leaf):
                return {"label": node.label, "pos": node.pos, "neg": node.neg}
            return {
                "predicate": print_formula(node.predicate),
                "satisfy": enc(node.satisfy),
                "falsify": enc(node.falsify),
            }

        return {"propositions": list(self.propositions), "root": enc(self.root)}

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTree":
        def dec(obj):
            if "label" in obj:
                return Leaf(bool(obj["label"]), int(obj["pos"]), int(obj["neg"]))
            return Split(parse_formula(obj["predicate"]), dec(obj["satisfy"]), dec(obj["falsify"]))

        return cls(dec(data["root"]), tuple(data["propositions"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def learn_tree(
    sample: Sample,
    kappa: float = 0.0,
    predicate_size: int = 3,
    max_depth: int = 4,
    timeout: float | None = None,
    deadline: float | None = None,
) -> tuple[DecisionTree, LearnResult]:
    """Grow a tree top-down, each split maximizing correct classifications.

    A node becomes a leaf when its minority fraction is at most ``kappa``, at
    ``max_depth``, or when the best predicate sends every trace one way.
    When the deadline passes, the remaining open nodes become leaves and the
    status is Timeout.
    """
    if predicate_size < 1 or max_depth < 1:
        raise ValueError("predicate_size and max_depth must be at least 1")
    error_budget(kappa, 1)  # validates kappa
    kappa_q = Fraction(str(kappa)) if isinstance(kappa, float) else Fraction(kappa)
    start = time.monotonic()
    deadline = resolve_deadline(timeout, deadline)
    props = sample.propositions
    timed_out = False

    def grow(pos: list[Trace], neg: list[Trace], depth: int) -> Node:
        nonlocal timed_out
        leaf = _leaf(len(pos), len(neg))
        total = len(pos) + len(neg)
        if leaf.minority <= kappa_q * total or depth >= max_depth or timed_out:
            return leaf
        sub = Sample(props, tuple(pos), tuple(neg))
        if not pos:
            return leaf
        res = learn_best(sub, max_n=predicate_size, deadline=deadline)
        if res.status is LearnStatus.TIMEOUT:
            timed_out = True
        g = res.formula
        if g is None:
            return leaf
        pos_in = [u for u in pos if _holds(g, u, props)]
        neg_in = [u for u in neg if _holds(g, u, props)]
        n_in = len(pos_in) + len(neg_in)
        if n_in == 0 or n_in == total:
            return leaf
        pos_out = [u for u in pos if not _holds(g, u, props)]
        neg_out = [u for u in neg if not _holds(g, u, props)]
        return Split(g, grow(pos_in, neg_in, depth + 1), grow(pos_out, neg_out, depth + 1))

    tree = DecisionTree(grow(list(sample.positives), list(sample.negatives), 0), props)
    f = tree_to_formula(tree)
    count = tree.misclassified
    rate = Fraction(count, len(sample))
    if timed_out:
        status = LearnStatus.TIMEOUT
    elif rate <= kappa_q:
        status = LearnStatus.WITHIN_THRESHOLD
    else:
        status = LearnStatus.UNSAT
    elapsed = int(round((time.monotonic() - start) * 1000))
    return tree, LearnResult(f, n_nodes(f), count, rate, status, elapsed)


def tree_to_formula(tree: DecisionTree) -> Formula:
    """Disjunction over positive leaves of their path conditions.

    Satisfy branches come before falsify branches.  With no positive leaf the
    result is ``a & !a``; a positive leaf at the root gives ``a | !a`` (``a``
    being the first proposition).
    """
    a = Atom(tree.propositions[0])
    terms: list[Formula] = []

    def walk(node: Node, path: list[Formula]) -> None:
        if isinstance(node, Leaf):
            if node.label:
                if not path:
                    terms.append(Or(a, Not(a)))
                    return
                term = path[0]
                for lit in path[1:]:
                    term = And(term, lit)
                terms.append(term)
            return
        walk(node.satisfy, path + [node.predicate])
        walk(node.falsify, path + [Not(node.predicate)])

    walk(tree.root, [])
    if not terms:
        return And(a, Not(a))
    out = terms[0]
    for t in terms[1:]:
        out = Or(out, t)
    return out
