"""Incremental CDCL SAT solver.

Two-watched-literal propagation (with a dedicated implication list for binary
clauses), first-UIP clause learning with local minimization, VSIDS branching
with phase saving, Luby restarts and LBD-based learnt clause deletion.

Externally literals are DIMACS-style nonzero ints.  Internally variable ``v``
has the literals ``2v`` (positive) and ``2v + 1`` (negative).
"""

from __future__ import annotations

import heapq
import time
from typing import Iterable, Sequence

__all__ = ["Solver", "SolverTimeout"]

_RESTART_UNIT = 100
_VAR_DECAY = 0.95
_DEADLINE_CHECK_CONFLICTS = 1000
_DEADLINE_CHECK_DECISIONS = 4096


class SolverTimeout(Exception):
    """The wall-clock deadline passed before the search finished."""


def _luby(i: int) -> int:
    # i is 0-based
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


def _internal(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


class Solver:
    def __init__(self) -> None:
        self.nvars = 0
        self.val: list[int] = [0, 0]
        self.level: list[int] = [0]
        self.reason: list = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[bool] = [False]
        self.seen: list[bool] = [False]
        self.in_heap: list[bool] = [False]
        self.watches: list[list] = [[], []]
        self.bin: list[list] = [[], []]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.max_learnts = 4000.0
        self.ok = True
        self.model: list[bool] | None = None
        self.conflicts = 0
        self.decisions = 0
        self.restarts = 0
        self.num_clauses = 0

    # ------------------------------------------------------------------
    # problem construction

    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.val += (0, 0)
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        self.seen.append(False)
        self.in_heap.append(True)
        self.watches += ([], [])
        self.bin += ([], [])
        heapq.heappush(self.heap, (-0.0, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.new_var()

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause of DIMACS literals; returns False once the formula is UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        val = self.val
        clause: list[int] = []
        present: set[int] = set()
        for lit in lits:
            if lit == 0 or abs(lit) > self.nvars:
                raise ValueError(f"literal {lit} out of range")
            il = _internal(lit)
            if il ^ 1 in present:
                return True
            if il in present:
                continue
            v = val[il]
            if v == 1:
                return True
            if v == -1:
                continue
            present.add(il)
            clause.append(il)
        if not clause:
            self.ok = False
            return False
        self.num_clauses += 1
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(clause)
        return True

    def _attach(self, c: list[int]) -> None:
        if len(c) == 2:
            a, b = c
            self.bin[a].append((b, c))
            self.bin[b].append((a, c))
        else:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)

    # ------------------------------------------------------------------
    # assignment

    def _enqueue(self, lit: int, reason) -> None:
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        trail = self.trail
        val = self.val
        reason = self.reason
        phase = self.phase
        in_heap = self.in_heap
        activity = self.activity
        heap = self.heap
        stop = self.trail_lim[lvl]
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            reason[v] = None
            phase[v] = not (lit & 1)
            if not in_heap[v]:
                in_heap[v] = True
                heapq.heappush(heap, (-activity[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = stop

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        val = self.val
        trail = self.trail
        watches = self.watches
        bins = self.bin
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        qhead = self.qhead
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            fl = p ^ 1
            for other, c in bins[fl]:
                vo = val[other]
                if vo == 1:
                    continue
                if vo == -1:
                    self.qhead = len(trail)
                    return c
                val[other] = 1
                val[other ^ 1] = -1
                v = other >> 1
                level[v] = dl
                reason[v] = c
                trail.append(other)
            ws = watches[fl]
            n = len(ws)
            i = j = 0
            while i < n:
                c = ws[i]
                i += 1
                first = c[0]
                if first == fl:
                    first = c[1]
                    c[0] = first
                    c[1] = fl
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return c
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        self.qhead = qhead
        return None

    # ------------------------------------------------------------------
    # learning

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            self._rescale()
        elif self.in_heap[v]:
            heapq.heappush(self.heap, (-act, v))

    def _rescale(self) -> None:
        self.activity = [a * 1e-100 for a in self.activity]
        self.var_inc *= 1e-100
        self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        act = self.activity
        self.heap = [(-act[v], v) for v in range(1, self.nvars + 1) if self.in_heap[v]]
        heapq.heapify(self.heap)

    def _analyze(self, confl):
        seen = self.seen
        level = self.level
        reason = self.reason
        trail = self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        touched = []
        while True:
            for q in confl:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        # local minimization: drop literals implied by the rest of the clause
        if len(learnt) > 2:
            kept = [learnt[0]]
            for q in learnt[1:]:
                r = reason[q >> 1]
                if r is None:
                    kept.append(q)
                    continue
                for x in r:
                    xv = x >> 1
                    if xv != q >> 1 and not seen[xv] and level[xv] > 0:
                        kept.append(q)
                        break
            learnt = kept

        for v in touched:
            seen[v] = False

        if len(learnt) == 1:
            bt = 0
        else:
            best = 1
            for i in range(2, len(learnt)):
                if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                    best = i
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, bt, lbd

    def _reduce_db(self) -> None:
        reason = self.reason
        val = self.val
        lbd = self.lbd
        candidates = []
        keep = []
        for c in self.learnts:
            locked = len(c) > 2 and reason[c[0] >> 1] is c and val[c[0]] == 1
            if locked or len(c) == 2 or lbd[id(c)] <= 2:
                keep.append(c)
            else:
                candidates.append(c)
        # older clauses first among equal lbd; delete the worse half
        order = sorted(range(len(candidates)), key=lambda i: (-lbd[id(candidates[i])], i))
        drop_idx = set(order[: len(candidates) // 2])
        dropped = [candidates[i] for i in drop_idx]
        keep.extend(c for i, c in enumerate(candidates) if i not in drop_idx)
        if dropped:
            dead = {id(c) for c in dropped}
            lits = {c[0] for c in dropped} | {c[1] for c in dropped}
            for lit in lits:
                self.watches[lit] = [c for c in self.watches[lit] if id(c) not in dead]
            for c in dropped:
                del lbd[id(c)]
        self.learnts = keep
        self.max_learnts *= 1.1

    # ------------------------------------------------------------------
    # search

    def _pick_branch(self) -> int:
        heap = self.heap
        act = self.activity
        in_heap = self.in_heap
        val = self.val
        while heap:
            neg_a, v = heapq.heappop(heap)
            if not in_heap[v] or -neg_a != act[v]:
                continue
            in_heap[v] = False
            if val[v << 1] == 0:
                return v
        return 0

    def _search(self, budget: int, assumptions: Sequence[int], deadline):
        """Returns True (model), False (UNSAT) or None (restart)."""
        conflicts = 0
        trail_lim = self.trail_lim
        val = self.val
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                self.conflicts += 1
                if not trail_lim:
                    self.ok = False
                    return False
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = lbd
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= _VAR_DECAY
                if deadline is not None and self.conflicts % _DEADLINE_CHECK_CONFLICTS == 0:
                    if time.monotonic() > deadline:
                        self._cancel_until(0)
                        raise SolverTimeout()
                continue
            if conflicts >= budget:
                self._cancel_until(0)
                return None
            if len(self.learnts) - len(self.trail) >= self.max_learnts:
                self._reduce_db()
            if len(self.heap) > 8 * self.nvars + 1024:
                self._rebuild_heap()
            nxt = 0
            while len(trail_lim) < len(assumptions):
                a = assumptions[len(trail_lim)]
                if val[a] == 1:
                    trail_lim.append(len(self.trail))
                elif val[a] == -1:
                    self._cancel_until(0)
                    return False
                else:
                    nxt = a
                    break
            if not nxt:
                v = self._pick_branch()
                if v == 0:
                    return True
                nxt = (v << 1) if self.phase[v] else (v << 1) | 1
                self.decisions += 1
                if deadline is not None and self.decisions % _DEADLINE_CHECK_DECISIONS == 0:
                    if time.monotonic() > deadline:
                        self._cancel_until(0)
                        raise SolverTimeout()
            trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)

    def solve(self, assumptions: Iterable[int] = (), deadline: float | None = None) -> bool:
        """Decide satisfiability under ``assumptions``.

        ``deadline`` is an absolute :func:`time.monotonic` timestamp; when it
        passes, :class:`SolverTimeout` is raised and the solver stays usable.
        On success the model is available as :attr:`model` (index = variable).
        """
        self.model = None
        if not self.ok:
            return False
        assumps = []
        for lit in assumptions:
            if lit == 0 or abs(lit) > self.nvars:
                raise ValueError(f"assumption {lit} out of range")
            assumps.append(_internal(lit))
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restarts = 0
        while True:
            if deadline is not None and time.monotonic() > deadline:
                self._cancel_until(0)
                raise SolverTimeout()
            status = self._search(_luby(restarts) * _RESTART_UNIT, assumps, deadline)
            restarts += 1
            self.restarts += 1
            if status is None:
                continue
            if status:
                val = self.val
                self.model = [False] + [val[v << 1] == 1 for v in range(1, self.nvars + 1)]
            self._cancel_until(0)
            return status

    def learnt_clauses(self) -> list[list[int]]:
        """Current learnt clauses as DIMACS literal lists."""
        return [[(l >> 1) if not l & 1 else -(l >> 1) for l in c] for c in self.learnts]

    def fixed_literals(self) -> list[int]:
        """Literals assigned at decision level 0 (facts derived so far)."""
        end = self.trail_lim[0] if self.trail_lim else len(self.trail)
        return [(l >> 1) if not l & 1 else -(l >> 1) for l in self.trail[:end]]
