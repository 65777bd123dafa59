"""One-class learning: language-minimal formulas from positive traces.

Two methods are provided.  :func:`learn_minimal_enumerative` lists every
consistent formula up to the size bound and compares their languages with
DFAs; it is slow but obviously complete.  :func:`learn_minimal_guided` runs a
counterexample-guided descent: a word known to lie outside the current
candidate's language is added as a negative example, which reuses the
labeled-sample encoding unchanged.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from typing import Sequence

from .automata import (
    DEFAULT_STATE_CAP,
    Dfa,
    inclusion_witness,
    letters,
    to_dfa,
)
from .formula import Formula, dag_size, formula_key, print_formula
from .learning import (
    EncodingContext,
    decode_model,
    encode_semantics_for_trace,
    encode_structure,
    enumerate_consistent,
    resolve_deadline,
    structure_assumptions,
)
from .sat import SolverTimeout
from .traces import Sample, Trace, misclassification

__all__ = [
    "OccConfig",
    "OccStatus",
    "OccResult",
    "Certified",
    "CounterExample",
    "learn_minimal_enumerative",
    "learn_minimal_guided",
    "verify_minimal",
]


@dataclass(frozen=True)
class OccConfig:
    """Search parameters.

    ``max_witness_len`` defaults to ``2 * n * longest positive``; it only
    bounds :func:`ltlmine.automata.shortest_accepted_excluding` queries, the
    inclusion witnesses themselves are exact.
    """

    n: int = 3
    max_witness_len: int | None = None
    state_cap: int = DEFAULT_STATE_CAP
    timeout: float | None = None
    deadline: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("size bound n must be at least 1")
        if self.max_witness_len is not None and self.max_witness_len < 1:
            raise ValueError("max_witness_len must be positive")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def witness_len(self, sample: Sample) -> int:
        if self.max_witness_len is not None:
            return self.max_witness_len
        return 2 * self.n * max(1, sample.max_length)


class OccStatus(enum.Enum):
    CERTIFIED = "Certified"
    NOT_CERTIFIED = "NotCertified"
    UNSAT = "Unsat"
    TIMEOUT = "Timeout"


@dataclass
class OccResult:
    formula: Formula | None
    status: OccStatus
    elapsed_ms: int
    minimal: list[Formula] = field(default_factory=list)
    candidates: int = 0
    descents: int = 0
    witnesses: list[Trace] = field(default_factory=list)

    @property
    def size(self) -> int | None:
        return None if self.formula is None else dag_size(self.formula)

    def to_dict(self, sample: Sample | None = None) -> dict:
        out = {
            "formula": None if self.formula is None else print_formula(self.formula),
            "size": self.size,
            "misclassified": None,
            "rate": None,
            "status": self.status.value,
            "elapsed_ms": self.elapsed_ms,
        }
        if sample is not None and self.formula is not None:
            count, rate = misclassification(sample, self.formula)
            out["misclassified"] = count
            out["rate"] = float(rate)
        return out


@dataclass(frozen=True)
class Certified:
    formula: Formula


@dataclass(frozen=True)
class CounterExample:
    formula: Formula
    smaller: Formula


def _elapsed(start: float) -> int:
    return int(round((time.monotonic() - start) * 1000))


def _check_positive_sample(sample: Sample) -> None:
    if sample.negatives:
        raise ValueError("one-class learning expects a sample without negative traces")
    if not sample.positives:
        raise ValueError("sample has no positive traces")


def _cfg(cfg: OccConfig | None, n: int | None) -> OccConfig:
    if cfg is None:
        return OccConfig(n=3 if n is None else n)
    if n is not None and n != cfg.n:
        raise ValueError("conflicting size bounds")
    return cfg


# ---------------------------------------------------------------------------
# language classes


class _Languages:
    """Groups formulas by language using DFA fingerprints and exact checks."""

    FINGERPRINT_LEN = 4

    def __init__(self, propositions: Sequence[str], state_cap: int):
        self.propositions = tuple(propositions)
        self.state_cap = state_cap
        self._words = self._word_tree()
        self.classes: list[list[Formula]] = []
        self.fingerprints: list[int] = []
        self.dfas: list[Dfa] = []
        self._by_fp: dict[int, list[int]] = {}

    def _word_tree(self):
        nl = len(letters(self.propositions))
        max_len = self.FINGERPRINT_LEN
        if nl > 4:
            max_len = 2
        if nl > 16:
            max_len = 1
        return [w for length in range(1, max_len + 1) for w in itertools.product(range(nl), repeat=length)]

    def dfa(self, f: Formula) -> Dfa:
        return to_dfa(f, self.propositions, self.state_cap)

    def fingerprint(self, d: Dfa) -> int:
        fp = 0
        trans = d.transitions
        for i, w in enumerate(self._words):
            q = d.initial
            for x in w:
                q = trans[q][x]
            if d.accepting[q]:
                fp |= 1 << i
        return fp

    def add(self, f: Formula) -> int:
        """Class index of ``f``, creating a new class when needed."""
        d = self.dfa(f)
        fp = self.fingerprint(d)
        for c in self._by_fp.get(fp, ()):
            other = self.dfas[c]
            if inclusion_witness(d, other) is None and inclusion_witness(other, d) is None:
                self.classes[c].append(f)
                return c
        c = len(self.classes)
        self.classes.append([f])
        self.fingerprints.append(fp)
        self.dfas.append(d)
        self._by_fp.setdefault(fp, []).append(c)
        return c

    def strictly_below(self, a: int, b: int) -> bool:
        """Whether class ``a`` has a strictly smaller language than class ``b``."""
        if a == b or self.fingerprints[a] & ~self.fingerprints[b]:
            return False
        return inclusion_witness(self.dfas[a], self.dfas[b]) is None

    def representative(self, c: int) -> Formula:
        return min(self.classes[c], key=formula_key)


def _minimal_classes(langs: _Languages, deadline: float | None) -> list[int]:
    minimal = []
    count = len(langs.classes)
    for b in range(count):
        if deadline is not None and time.monotonic() > deadline:
            raise SolverTimeout()
        if not any(langs.strictly_below(a, b) for a in range(count)):
            minimal.append(b)
    return minimal


def learn_minimal_enumerative(
    sample: Sample,
    cfg: OccConfig | None = None,
    *,
    n: int | None = None,
) -> OccResult:
    """Reference method: enumerate, group by language, keep minimal classes.

    ``result.minimal`` lists one representative per minimal language (the
    antichain), ordered by size then printed form; ``result.formula`` is its
    first element.
    """
    cfg = _cfg(cfg, n)
    _check_positive_sample(sample)
    start = time.monotonic()
    deadline = resolve_deadline(cfg.timeout, cfg.deadline)
    langs = _Languages(sample.propositions, cfg.state_cap)
    seen: set[Formula] = set()
    try:
        for f in enumerate_consistent(sample, cfg.n, deadline=deadline):
            if f in seen:
                continue
            seen.add(f)
            langs.add(f)
        minimal = _minimal_classes(langs, deadline)
    except SolverTimeout:
        return OccResult(None, OccStatus.TIMEOUT, _elapsed(start), candidates=len(seen))
    if not minimal:
        return OccResult(None, OccStatus.UNSAT, _elapsed(start), candidates=len(seen))
    reps = sorted((langs.representative(c) for c in minimal), key=formula_key)
    return OccResult(reps[0], OccStatus.CERTIFIED, _elapsed(start), minimal=reps, candidates=len(seen))


# ---------------------------------------------------------------------------
# guided descent


class _Search:
    """Per-size incremental encodings of the positives.

    Each descent runs in its own *scope*: its negatives and structural blocks
    are guarded by a scope literal, so several descents can share the
    expensive encodings of the positive traces.
    """

    def __init__(self, sample: Sample, n: int, deadline: float | None):
        self.sample = sample
        self.n = n
        self.deadline = deadline
        self.ctxs: dict[int, EncodingContext] = {}
        self.acts: dict[tuple[int, int], int] = {}
        self.scope_negatives: dict[int, list[Trace]] = {}
        self._next_scope = 0
        self.candidates = 0

    def ctx(self, size: int) -> EncodingContext:
        ctx = self.ctxs.get(size)
        if ctx is None:
            ctx = EncodingContext(self.sample.propositions, size)
            encode_structure(ctx)
            for u in self.sample.positives:
                ctx.inst.add_clause([encode_semantics_for_trace(ctx, u)])
            self.ctxs[size] = ctx
        return ctx

    def new_scope(self) -> int:
        scope = self._next_scope
        self._next_scope += 1
        self.scope_negatives[scope] = []
        return scope

    def close_scope(self, scope: int) -> None:
        for (size, s), act in list(self.acts.items()):
            if s == scope:
                self.ctxs[size].inst.add_clause([-act])
                del self.acts[size, s]
        del self.scope_negatives[scope]

    def act(self, size: int, scope: int) -> int:
        lit = self.acts.get((size, scope))
        if lit is None:
            ctx = self.ctx(size)
            lit = ctx.inst.new_var()
            self.acts[size, scope] = lit
            for w in self.scope_negatives[scope]:
                ctx.inst.add_clause([-lit, -encode_semantics_for_trace(ctx, w)])
        return lit

    def add_negative(self, scope: int, w: Trace) -> None:
        self.scope_negatives[scope].append(w)
        for (size, s), lit in self.acts.items():
            if s == scope:
                ctx = self.ctxs[size]
                ctx.inst.add_clause([-lit, -encode_semantics_for_trace(ctx, w)])

    def block(self, scope: int, size: int, lits: Sequence[int]) -> None:
        ctx = self.ctx(size)
        ctx.inst.add_clause([-self.act(size, scope)] + [-l for l in lits])

    def block_formula(self, scope: int, f: Formula) -> None:
        size = dag_size(f)
        if size <= self.n:
            self.block(scope, size, structure_assumptions(self.ctx(size), f))

    def find(self, scope: int):
        """First candidate by size under the scope's constraints, or None."""
        for size in range(1, self.n + 1):
            ctx = self.ctx(size)
            model = ctx.inst.solve([self.act(size, scope)], self.deadline)
            if model is not None:
                self.candidates += 1
                true_struct = [v for v in ctx.structure_vars() if model[v]]
                return decode_model(ctx, model), size, true_struct
        return None


@dataclass
class _Descent:
    formula: Formula | None
    complete: bool
    descents: int = 0
    witnesses: list[Trace] = field(default_factory=list)


def _descend(search: _Search, langs: _Languages, start: Formula | None) -> _Descent:
    """Shrink the language from ``start`` (or the first candidate) until no consistent formula lies below."""
    scope = search.new_scope()
    state = _Descent(start, False)
    try:
        current = start
        cur_dfa = None if start is None else langs.dfa(start)
        if current is not None:
            search.block_formula(scope, current)
        while True:
            found = search.find(scope)
            if found is None:
                state.complete = current is not None
                return state
            cand, size, struct = found
            if current is None:
                current, cur_dfa = cand, langs.dfa(cand)
                state.formula = current
                search.block(scope, size, struct)
                continue
            cand_dfa = langs.dfa(cand)
            w = inclusion_witness(cand_dfa, cur_dfa)
            if w is not None:
                # no language below the current one contains w
                search.add_negative(scope, w)
                state.witnesses.append(w)
                continue
            if inclusion_witness(cur_dfa, cand_dfa) is None:
                search.block(scope, size, struct)
                continue
            current, cur_dfa = cand, cand_dfa
            state.formula = current
            state.descents += 1
            # blocks of the old language stay valid: it is strictly larger
            search.block(scope, size, struct)
    except SolverTimeout:
        return state
    finally:
        search.close_scope(scope)


def _consistent_by_key(search: _Search, bound: tuple[int, str]):
    """Consistent formulas with key below ``bound`` in increasing key order."""
    for size in range(1, bound[0] + 1):
        ctx = search.ctx(size)
        scope = search.new_scope()
        found: set[Formula] = set()
        try:
            act = search.act(size, scope)
            while True:
                model = ctx.inst.solve([act], search.deadline)
                if model is None:
                    break
                found.add(decode_model(ctx, model))
                search.block(scope, size, [v for v in ctx.structure_vars() if model[v]])
        finally:
            search.close_scope(scope)
        for f in sorted(found, key=formula_key):
            if formula_key(f) < bound:
                yield f


def learn_minimal_guided(
    sample: Sample,
    cfg: OccConfig | None = None,
    *,
    n: int | None = None,
) -> OccResult:
    """Counterexample-guided descent to a language-minimal formula.

    After the descent reaches some minimal language, formulas with a smaller
    (size, printed form) key are checked in order, so that among several
    incomparable minimal languages the same one as the enumerative method is
    returned.  If the deadline passes the best formula so far is returned
    with status ``NotCertified``.
    """
    cfg = _cfg(cfg, n)
    _check_positive_sample(sample)
    start = time.monotonic()
    deadline = resolve_deadline(cfg.timeout, cfg.deadline)
    search = _Search(sample, cfg.n, deadline)
    langs = _Languages(sample.propositions, cfg.state_cap)

    first = _descend(search, langs, None)
    witnesses = first.witnesses
    descents = first.descents
    if first.formula is None:
        status = OccStatus.UNSAT if first.complete or _nothing_consistent(search) else OccStatus.TIMEOUT
        return OccResult(None, status, _elapsed(start), candidates=search.candidates)
    best = first.formula
    if not first.complete:
        return OccResult(best, OccStatus.NOT_CERTIFIED, _elapsed(start), [best], search.candidates, descents, witnesses)

    # tie-break among incomparable minimal languages
    minimal = [langs.add(best)]
    # witnesses are reported for the descent that reached the answer's language
    found_with = {minimal[0]: witnesses}
    non_minimal: list[int] = []
    try:
        for cand in _consistent_by_key(search, formula_key(best)):
            c = langs.add(cand)
            if c in minimal:
                best = cand
                witnesses = found_with[c]
                break
            if c in non_minimal or any(langs.strictly_below(m, c) for m in minimal):
                continue
            res = _descend(search, langs, cand)
            descents += res.descents
            if not res.complete:
                raise SolverTimeout()
            if res.descents == 0:
                best = cand
                witnesses = res.witnesses
                break
            non_minimal.append(c)
            m = langs.add(res.formula)
            if m not in minimal:
                minimal.append(m)
                found_with[m] = res.witnesses
    except SolverTimeout:
        return OccResult(best, OccStatus.NOT_CERTIFIED, _elapsed(start), [best], search.candidates, descents, witnesses)
    return OccResult(best, OccStatus.CERTIFIED, _elapsed(start), [best], search.candidates, descents, witnesses)


def _nothing_consistent(search: _Search) -> bool:
    try:
        return all(search.ctx(size).inst.solve([], search.deadline) is None for size in range(1, search.n + 1))
    except SolverTimeout:
        return False


def verify_minimal(sample: Sample, f: Formula, n: int, cfg: OccConfig | None = None):
    """Certify that no consistent formula of size at most ``n`` lies strictly below ``f``.

    Returns :class:`Certified` or a :class:`CounterExample` holding the
    smallest-key formula among the minimal ones below ``f``.
    """
    cfg = cfg or OccConfig(n=n)
    _check_positive_sample(sample)
    count, _ = misclassification(sample, f)
    if count:
        raise ValueError(f"{print_formula(f)} rejects {count} positive traces")
    if dag_size(f) > n:
        raise ValueError(f"{print_formula(f)} is larger than the bound {n}")
    deadline = resolve_deadline(cfg.timeout, cfg.deadline)
    langs = _Languages(sample.propositions, cfg.state_cap)
    target = langs.add(f)
    below: dict[int, list[Formula]] = {}
    seen: set[Formula] = set()
    for g in enumerate_consistent(sample, n, deadline=deadline):
        if g in seen:
            continue
        seen.add(g)
        c = langs.add(g)
        if langs.strictly_below(c, target):
            below.setdefault(c, []).append(g)
    if not below:
        return Certified(f)
    # prefer a counterexample that is minimal itself
    bottom = [c for c in below if not any(langs.strictly_below(a, c) for a in below)]
    return CounterExample(f, min((g for c in bottom for g in below[c]), key=formula_key))

