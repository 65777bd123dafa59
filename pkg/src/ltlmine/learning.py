"""SAT/MaxSAT learning of LTL formulas over bounded syntax DAGs.

A candidate formula with ``n`` nodes is encoded by structure variables

* ``x[i, lab]``: node ``i`` carries label ``lab`` (a proposition or operator),
* ``l[i, j]`` / ``r[i, j]``: the left/right child of node ``i`` is ``j < i``,

with node ``n`` as the root and node ``1`` forced to be a proposition.  For
every distinct trace *suffix* ``v`` there are semantic variables
``y[v, i]`` (node ``i`` holds at the first position of ``v``) plus helper
variables copying the values of the selected children.  A trace position
``t`` of trace ``u`` is the suffix ``u[t:]``, so traces sharing suffixes share
variables; temporal operators are encoded by their one-step recurrences
(e.g. ``F a`` at ``v`` iff ``a`` at ``v`` or ``F a`` at ``v[1:]``).
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .formula import Formula, _make, print_formula, subformulas
from .sat import CnfInstance, MaxSatStatus, SolverModel, SolverTimeout, maximize_satisfied_soft
from .traces import Sample, Trace, misclassification

__all__ = [
    "OPERATORS",
    "EncodingContext",
    "EncodingError",
    "LearnStatus",
    "LearnResult",
    "encode_structure",
    "encode_semantics_for_trace",
    "decode_model",
    "structure_assumptions",
    "learn_exact",
    "learn_noisy",
    "learn_best",
    "enumerate_consistent",
    "error_budget",
    "resolve_deadline",
]

UNARY = ("!", "X", "F", "G")
BINARY = ("&", "|", "->", "U")
OPERATORS = ("!", "&", "|", "->", "X", "F", "G", "U")


class EncodingError(RuntimeError):
    """A solver model violates the structural constraints."""


class LearnStatus(enum.Enum):
    EXACT = "Exact"
    WITHIN_THRESHOLD = "WithinThreshold"
    UNSAT = "Unsat"
    TIMEOUT = "Timeout"


@dataclass
class LearnResult:
    formula: Formula | None
    size: int | None
    misclassified: int | None
    rate: Fraction | None
    status: LearnStatus
    elapsed_ms: int
    unsat_sizes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "formula": None if self.formula is None else print_formula(self.formula),
            "size": self.size,
            "misclassified": self.misclassified,
            "rate": None if self.rate is None else float(self.rate),
            "status": self.status.value,
            "elapsed_ms": self.elapsed_ms,
        }


def resolve_deadline(timeout: float | None = None, deadline: float | None = None) -> float | None:
    """Combine a relative timeout (seconds) and an absolute monotonic deadline."""
    if timeout is not None:
        t = time.monotonic() + timeout
        deadline = t if deadline is None else min(deadline, t)
    return deadline


def error_budget(kappa, total: int) -> int:
    """Largest number of misclassified traces allowed by threshold ``kappa``."""
    k = Fraction(str(kappa)) if isinstance(kappa, float) else Fraction(kappa)
    if not 0 <= k <= 1:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    return (k * total).numerator // (k * total).denominator


# ---------------------------------------------------------------------------
# encoding


class EncodingContext:
    """Variables and clauses for DAGs with exactly ``n`` nodes.

    With ``symmetry=True`` (the default) two extra families of constraints
    cut down equivalent encodings: child selectors that a label does not use
    are pinned to node 1, and every non-root node must be used as a child.
    Together they make each satisfying structure a DAG with exactly ``n``
    reachable nodes; sizes below ``n`` are covered by smaller contexts.
    """

    def __init__(
        self,
        propositions: Sequence[str],
        n: int,
        inst: CnfInstance | None = None,
        symmetry: bool = True,
    ):
        if n < 1:
            raise ValueError("node budget must be at least 1")
        if not propositions:
            raise ValueError("at least one proposition is required")
        self.propositions = tuple(propositions)
        self.n = n
        self.symmetry = symmetry
        self.inst = inst if inst is not None else CnfInstance()
        self.labels = self.propositions + OPERATORS
        self.x: dict[tuple[int, str], int] = {}
        self.l: dict[tuple[int, int], int] = {}
        self.r: dict[tuple[int, int], int] = {}
        self.relax: list[int] = []
        self._suffixes: dict[Trace, tuple[list[int], list[int], list[int]]] = {}
        self._structure_done = False

    def node_labels(self, i: int) -> tuple[str, ...]:
        return self.propositions if i == 1 else self.labels

    def structure_vars(self) -> list[int]:
        return list(self.x.values()) + list(self.l.values()) + list(self.r.values())

    @property
    def num_suffixes(self) -> int:
        return len(self._suffixes)


def _exactly_one(inst: CnfInstance, lits: Sequence[int]) -> None:
    inst.add_clause(lits)
    for a in range(len(lits)):
        for b in range(a + 1, len(lits)):
            inst.add_clause([-lits[a], -lits[b]])


def encode_structure(ctx: EncodingContext) -> None:
    """Well-formedness of the DAG: one label per node, one child per selector."""
    if ctx._structure_done:
        return
    inst = ctx.inst
    n = ctx.n
    for i in range(1, n + 1):
        for lab in ctx.node_labels(i):
            ctx.x[i, lab] = inst.new_var()
        for j in range(1, i):
            ctx.l[i, j] = inst.new_var()
        for j in range(1, i):
            ctx.r[i, j] = inst.new_var()
    for i in range(1, n + 1):
        _exactly_one(inst, [ctx.x[i, lab] for lab in ctx.node_labels(i)])
        if i >= 2:
            _exactly_one(inst, [ctx.l[i, j] for j in range(1, i)])
            _exactly_one(inst, [ctx.r[i, j] for j in range(1, i)])
    if ctx.symmetry:
        for i in range(2, n + 1):
            for p in ctx.propositions:
                inst.add_clause([-ctx.x[i, p], ctx.l[i, 1]])
                inst.add_clause([-ctx.x[i, p], ctx.r[i, 1]])
            for op in UNARY:
                inst.add_clause([-ctx.x[i, op], ctx.r[i, 1]])
        for j in range(1, n):
            users = []
            for i in range(j + 1, n + 1):
                ul = inst.new_var()
                inst.add_clause([-ul, ctx.l[i, j]])
                inst.add_clause([-ul] + [ctx.x[i, op] for op in OPERATORS])
                ur = inst.new_var()
                inst.add_clause([-ur, ctx.r[i, j]])
                inst.add_clause([-ur] + [ctx.x[i, op] for op in BINARY])
                users += [ul, ur]
            inst.add_clause(users)
    ctx._structure_done = True


def _encode_suffix(ctx: EncodingContext, suffix: Trace, nxt) -> tuple[list[int], list[int], list[int]]:
    inst = ctx.inst
    n = ctx.n
    x = ctx.x
    letter = suffix[0]
    y = [0] + inst.new_vars(n)
    L = [0, 0] + inst.new_vars(n - 1)
    R = [0, 0] + inst.new_vars(n - 1)
    add = inst.add_clause
    for i in range(1, n + 1):
        yi = y[i]
        for idx, p in enumerate(ctx.propositions):
            add([-x[i, p], yi] if letter[idx] else [-x[i, p], -yi])
        if i == 1:
            continue
        Li, Ri = L[i], R[i]
        for j in range(1, i):
            lij = ctx.l[i, j]
            add([-lij, -Li, y[j]])
            add([-lij, Li, -y[j]])
            rij = ctx.r[i, j]
            add([-rij, -Ri, y[j]])
            add([-rij, Ri, -y[j]])
        xo = x[i, "!"]
        add([-xo, -yi, -Li])
        add([-xo, yi, Li])
        xo = x[i, "&"]
        add([-xo, -yi, Li])
        add([-xo, -yi, Ri])
        add([-xo, yi, -Li, -Ri])
        xo = x[i, "|"]
        add([-xo, yi, -Li])
        add([-xo, yi, -Ri])
        add([-xo, -yi, Li, Ri])
        xo = x[i, "->"]
        add([-xo, yi, Li])
        add([-xo, yi, -Ri])
        add([-xo, -yi, -Li, Ri])
        if nxt is None:
            # last position: strong next fails, F/G/U collapse to their operand
            add([-x[i, "X"], -yi])
            xo = x[i, "F"]
            add([-xo, -yi, Li])
            add([-xo, yi, -Li])
            xo = x[i, "G"]
            add([-xo, -yi, Li])
            add([-xo, yi, -Li])
            xo = x[i, "U"]
            add([-xo, -yi, Ri])
            add([-xo, yi, -Ri])
        else:
            ny, nL, _ = nxt
            yn = ny[i]
            xo = x[i, "X"]
            add([-xo, -yi, nL[i]])
            add([-xo, yi, -nL[i]])
            xo = x[i, "F"]
            add([-xo, -yi, Li, yn])
            add([-xo, yi, -Li])
            add([-xo, yi, -yn])
            xo = x[i, "G"]
            add([-xo, -yi, Li])
            add([-xo, -yi, yn])
            add([-xo, yi, -Li, -yn])
            xo = x[i, "U"]
            add([-xo, -yi, Ri, Li])
            add([-xo, -yi, Ri, yn])
            add([-xo, yi, -Ri])
            add([-xo, yi, -Li, -yn])
    return y, L, R


def encode_semantics_for_trace(ctx: EncodingContext, trace: Trace) -> int:
    """Encode the semantics of every node on ``trace``.

    Returns the literal stating that the root holds at position 0.
    """
    encode_structure(ctx)
    if not trace:
        raise ValueError("traces must be nonempty")
    suffixes = ctx._suffixes
    nxt = None
    for t in range(len(trace) - 1, -1, -1):
        suffix = trace[t:]
        entry = suffixes.get(suffix)
        if entry is None:
            entry = _encode_suffix(ctx, suffix, nxt)
            suffixes[suffix] = entry
        nxt = entry
    return nxt[0][ctx.n]


def semantic_literal(ctx: EncodingContext, trace: Trace, node: int, t: int = 0) -> int:
    """Variable for "node ``node`` holds on ``trace`` at position ``t``"."""
    return ctx._suffixes[tuple(trace[t:])][0][node]


# ---------------------------------------------------------------------------
# decoding


def _node_label(ctx: EncodingContext, model: SolverModel, i: int) -> str:
    chosen = [lab for lab in ctx.node_labels(i) if model[ctx.x[i, lab]]]
    if len(chosen) != 1:
        raise EncodingError(f"node {i} has labels {chosen}")
    return chosen[0]


def _child(ctx: EncodingContext, model: SolverModel, sel: dict, i: int) -> int:
    chosen = [j for j in range(1, i) if model[sel[i, j]]]
    if len(chosen) != 1:
        raise EncodingError(f"node {i} has children {chosen}")
    return chosen[0]


def decode_model(ctx: EncodingContext, model: SolverModel) -> Formula:
    """Read the formula rooted at node ``n`` out of a model."""
    built: dict[int, Formula] = {}

    def build(i: int) -> Formula:
        f = built.get(i)
        if f is not None:
            return f
        lab = _node_label(ctx, model, i)
        if lab in ctx.propositions:
            f = _make("ap", lab, ())
        elif lab in UNARY:
            f = _make(lab, None, (build(_child(ctx, model, ctx.l, i)),))
        else:
            left = build(_child(ctx, model, ctx.l, i))
            right = build(_child(ctx, model, ctx.r, i))
            f = _make(lab, None, (left, right))
        built[i] = f
        return f

    return build(ctx.n)


def structure_assumptions(ctx: EncodingContext, f: Formula) -> list[int]:
    """Literals fixing the structure variables to ``f``.

    Nodes are numbered in :func:`subformulas` order; ``f`` must have exactly
    ``ctx.n`` DAG nodes.
    """
    encode_structure(ctx)
    nodes = subformulas(f)
    if len(nodes) != ctx.n:
        raise ValueError(f"formula has {len(nodes)} nodes, context expects {ctx.n}")
    index = {id(node): i for i, node in enumerate(nodes, start=1)}
    lits = []
    for i, node in enumerate(nodes, start=1):
        lab = node.name if node.op == "ap" else node.op
        if (i, lab) not in ctx.x:
            raise ValueError(f"label {lab!r} not available at node {i}")
        lits.append(ctx.x[i, lab])
        if i == 1:
            continue
        left = index[id(node.children[0])] if node.children else 1
        right = index[id(node.children[1])] if len(node.children) == 2 else 1
        lits.append(ctx.l[i, left])
        lits.append(ctx.r[i, right])
    return lits


# ---------------------------------------------------------------------------
# learners


def _elapsed_ms(start: float) -> int:
    return int(round((time.monotonic() - start) * 1000))


def _consistent_context(sample: Sample, n: int) -> EncodingContext:
    ctx = EncodingContext(sample.propositions, n)
    encode_structure(ctx)
    for u in sample.positives:
        ctx.inst.add_clause([encode_semantics_for_trace(ctx, u)])
    for u in sample.negatives:
        ctx.inst.add_clause([-encode_semantics_for_trace(ctx, u)])
    return ctx


def _check_sample(sample: Sample) -> None:
    if not sample.positives:
        raise ValueError("learning needs at least one positive trace")


def learn_exact(
    sample: Sample,
    max_n: int = 8,
    timeout: float | None = None,
    deadline: float | None = None,
) -> LearnResult:
    """Smallest formula consistent with every trace (iterative deepening)."""
    _check_sample(sample)
    start = time.monotonic()
    deadline = resolve_deadline(timeout, deadline)
    unsat: list[int] = []
    for n in range(1, max_n + 1):
        try:
            if deadline is not None and time.monotonic() > deadline:
                raise SolverTimeout()
            ctx = _consistent_context(sample, n)
            model = ctx.inst.solve(deadline=deadline)
        except SolverTimeout:
            return LearnResult(None, None, None, None, LearnStatus.TIMEOUT, _elapsed_ms(start), unsat)
        if model is None:
            unsat.append(n)
            continue
        f = decode_model(ctx, model)
        count, rate = misclassification(sample, f)
        if count:
            raise EncodingError(f"decoded formula {print_formula(f)} misclassifies {count} traces")
        return LearnResult(f, n_nodes(f), 0, rate, LearnStatus.EXACT, _elapsed_ms(start), unsat)
    return LearnResult(None, None, None, None, LearnStatus.UNSAT, _elapsed_ms(start), unsat)


def n_nodes(f: Formula) -> int:
    return len(subformulas(f))


def _relaxed_context(sample: Sample, n: int) -> EncodingContext:
    ctx = EncodingContext(sample.propositions, n)
    encode_structure(ctx)
    inst = ctx.inst
    for u, label in sample.labeled():
        lit = encode_semantics_for_trace(ctx, u)
        s = inst.new_var()
        inst.add_clause([s, lit if label else -lit])
        ctx.relax.append(s)
    return ctx


def learn_noisy(
    sample: Sample,
    kappa: float = 0.1,
    max_n: int = 8,
    mode: str = "decision",
    timeout: float | None = None,
    deadline: float | None = None,
) -> LearnResult:
    """Smallest formula misclassifying at most ``floor(kappa * |S|)`` traces.

    ``mode="decision"`` bounds the number of relaxed traces with a cardinality
    constraint; ``mode="optimize"`` maximizes the number of correctly
    classified traces per size and accepts the first size reaching the
    threshold.  The reported error is always recomputed by the evaluator.
    """
    _check_sample(sample)
    if mode not in ("decision", "optimize"):
        raise ValueError(f"unknown mode {mode!r}")
    budget = error_budget(kappa, len(sample))
    start = time.monotonic()
    deadline = resolve_deadline(timeout, deadline)
    unsat: list[int] = []
    for n in range(1, max_n + 1):
        try:
            if deadline is not None and time.monotonic() > deadline:
                raise SolverTimeout()
            ctx = _relaxed_context(sample, n)
            if mode == "decision":
                ctx.inst.add_at_most(ctx.relax, budget)
                model = ctx.inst.solve(deadline=deadline)
            else:
                for s in ctx.relax:
                    ctx.inst.add_soft(-s)
                res = maximize_satisfied_soft(ctx.inst, deadline)
                if res.status is MaxSatStatus.TIMEOUT:
                    raise SolverTimeout()
                ok = res.status is MaxSatStatus.OPTIMAL and len(sample) - res.satisfied <= budget
                model = res.model if ok else None
        except SolverTimeout:
            return LearnResult(None, None, None, None, LearnStatus.TIMEOUT, _elapsed_ms(start), unsat)
        if model is None:
            unsat.append(n)
            continue
        f = decode_model(ctx, model)
        count, rate = misclassification(sample, f)
        if count > budget:
            raise EncodingError(f"decoded formula {print_formula(f)} exceeds the error budget")
        return LearnResult(
            f, n_nodes(f), count, rate, LearnStatus.WITHIN_THRESHOLD, _elapsed_ms(start), unsat
        )
    return LearnResult(None, None, None, None, LearnStatus.UNSAT, _elapsed_ms(start), unsat)


def learn_best(
    sample: Sample,
    max_n: int = 3,
    timeout: float | None = None,
    deadline: float | None = None,
) -> LearnResult:
    """Formula of size at most ``max_n`` classifying the most traces correctly.

    Ties go to the smaller size.  Used to pick decision-tree predicates.
    """
    _check_sample(sample)
    start = time.monotonic()
    deadline = resolve_deadline(timeout, deadline)
    best_f = None
    best_correct = -1
    for n in range(1, max_n + 1):
        ctx = _relaxed_context(sample, n)
        for s in ctx.relax:
            ctx.inst.add_soft(-s)
        res = maximize_satisfied_soft(ctx.inst, deadline)
        if res.model is not None and res.satisfied > best_correct:
            best_f = decode_model(ctx, res.model)
            best_correct = res.satisfied
        if res.status is MaxSatStatus.TIMEOUT:
            break
        if best_correct == len(sample):
            break
    if best_f is None:
        status = LearnStatus.TIMEOUT
        return LearnResult(None, None, None, None, status, _elapsed_ms(start))
    count, rate = misclassification(sample, best_f)
    status = LearnStatus.TIMEOUT if res.status is MaxSatStatus.TIMEOUT else LearnStatus.WITHIN_THRESHOLD
    return LearnResult(best_f, n_nodes(best_f), count, rate, status, _elapsed_ms(start))


def _blocking_clause(ctx: EncodingContext, model: SolverModel) -> list[int]:
    # with exactly-one groups, flipping any true structure variable is the
    # same as differing anywhere in the structure
    return [-v for v in ctx.structure_vars() if model[v]]


def enumerate_consistent(
    sample: Sample,
    n: int,
    timeout: float | None = None,
    deadline: float | None = None,
) -> Iterator[Formula]:
    """Yield every structurally distinct consistent DAG with at most ``n`` nodes.

    Sizes are visited in increasing order; each model is excluded with a
    blocking clause before the next call.  Different structures can decode
    to the same formula only through duplicated nodes; language duplicates
    are common.  Raises :class:`SolverTimeout` when the deadline passes.
    """
    _check_sample(sample)
    deadline = resolve_deadline(timeout, deadline)
    for size in range(1, n + 1):
        ctx = _consistent_context(sample, size)
        while True:
            model = ctx.inst.solve(deadline=deadline)
            if model is None:
                break
            yield decode_model(ctx, model)
            ctx.inst.add_clause(_blocking_clause(ctx, model))
