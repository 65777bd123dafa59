"""CNF instances on top of the incremental solver.

:class:`CnfInstance` records every clause (for DIMACS export and brute-force
cross checks) and forwards it to a lazily created :class:`Solver`, so repeated
``solve`` calls are incremental.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .solver import Solver, SolverTimeout

__all__ = [
    "CnfInstance",
    "SolverModel",
    "Totalizer",
    "MaxSatStatus",
    "MaxSatResult",
    "maximize_satisfied_soft",
    "SolverTimeout",
]


class SolverModel:
    """A total assignment over variables ``1..num_vars``."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[bool]):
        # values[0] is padding so that values[v] is variable v
        self.values = list(values)

    def __getitem__(self, lit: int) -> bool:
        if lit > 0:
            return self.values[lit]
        return not self.values[-lit]

    def __len__(self) -> int:
        return len(self.values) - 1

    def true_literals(self) -> list[int]:
        return [v if b else -v for v, b in enumerate(self.values) if v]

    def satisfies(self, clauses: Iterable[Sequence[int]]) -> bool:
        return all(any(self[l] for l in c) for c in clauses)


class CnfInstance:
    """A growable CNF formula with registered unit-weight soft literals."""

    def __init__(self, num_vars: int = 0):
        self.num_vars = 0
        self.clauses: list[tuple[int, ...]] = []
        self.soft: list[int] = []
        self.trivially_unsat = False
        self._solver: Solver | None = None
        self._synced = 0
        for _ in range(num_vars):
            self.new_var()

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def new_vars(self, n: int) -> list[int]:
        return [self.new_var() for _ in range(n)]

    def add_clause(self, lits: Iterable[int]) -> None:
        """Append a clause; tautologies are dropped, an empty clause marks UNSAT."""
        clause = []
        seen = set()
        for lit in lits:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
            if -lit in seen:
                return
            if lit not in seen:
                seen.add(lit)
                clause.append(lit)
        if not clause:
            self.trivially_unsat = True
            return
        self.clauses.append(tuple(clause))

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def add_soft(self, lit: int) -> None:
        if lit == 0 or abs(lit) > self.num_vars:
            raise ValueError(f"literal {lit} out of range")
        self.soft.append(lit)

    def add_at_most(self, lits: Sequence[int], k: int) -> "Totalizer | None":
        """Constrain at most ``k`` of ``lits`` to be true."""
        if not 0 <= k <= len(lits):
            raise ValueError(f"bound {k} outside 0..{len(lits)}")
        if k == len(lits):
            return None
        if k == 0:
            for l in lits:
                self.add_clause([-l])
            return None
        tot = Totalizer(self, lits, cap=k + 1)
        self.add_clause([-tot.outputs[k]])
        return tot

    # ------------------------------------------------------------------

    def solver(self) -> Solver:
        if self._solver is None:
            self._solver = Solver()
        s = self._solver
        s.ensure_vars(self.num_vars)
        for c in self.clauses[self._synced :]:
            s.add_clause(c)
        self._synced = len(self.clauses)
        return s

    def solve(self, assumptions: Iterable[int] = (), deadline: float | None = None):
        """Return a :class:`SolverModel`, or None when UNSAT under ``assumptions``.

        Raises :class:`SolverTimeout` if ``deadline`` (a ``time.monotonic``
        timestamp) passes first.
        """
        if self.trivially_unsat:
            return None
        s = self.solver()
        if s.solve(assumptions, deadline):
            return SolverModel(s.model)
        return None

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses) + self.trivially_unsat}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        if self.trivially_unsat:
            lines.append("0")
        return "\n".join(lines) + "\n"

    def maximize_satisfied_soft(self, deadline: float | None = None, assumptions=()):
        return maximize_satisfied_soft(self, deadline, assumptions)


class Totalizer:
    """Unary counting network over ``lits``.

    ``outputs[j]`` is forced true whenever more than ``j`` inputs are true
    (only this direction is encoded, which is all an at-most bound needs).
    With ``cap`` the network only counts up to ``cap``.
    """

    def __init__(self, inst: CnfInstance, lits: Sequence[int], cap: int | None = None):
        if not lits:
            raise ValueError("totalizer needs at least one input")
        self.inst = inst
        self.cap = len(lits) if cap is None else min(cap, len(lits))
        self.outputs = self._build(list(lits))

    def _build(self, lits: list[int]) -> list[int]:
        if len(lits) == 1:
            return [lits[0]]
        mid = len(lits) // 2
        a = self._build(lits[:mid])
        b = self._build(lits[mid:])
        inst = self.inst
        width = min(len(a) + len(b), self.cap)
        out = inst.new_vars(width)
        for i in range(len(a)):
            if i < width:
                inst.add_clause([-a[i], out[i]])
        for j in range(len(b)):
            if j < width:
                inst.add_clause([-b[j], out[j]])
        for i in range(len(a)):
            for j in range(len(b)):
                s = i + j + 1
                if s < width:
                    inst.add_clause([-a[i], -b[j], out[s]])
        return out

    def at_most(self, k: int) -> int | None:
        """Assumption literal enforcing at most ``k`` true inputs (None if vacuous)."""
        if k >= len(self.outputs):
            return None
        return -self.outputs[k]


class MaxSatStatus(enum.Enum):
    OPTIMAL = "Optimal"
    UNSAT = "Unsat"
    TIMEOUT = "Timeout"


@dataclass
class MaxSatResult:
    status: MaxSatStatus
    model: SolverModel | None = None
    satisfied: int | None = None


def maximize_satisfied_soft(
    inst: CnfInstance, deadline: float | None = None, assumptions: Iterable[int] = ()
) -> MaxSatResult:
    """Maximize the number of true soft literals by upper-bound descent.

    Every improvement is witnessed by a model; the final UNSAT call at bound
    ``violations - 1`` certifies optimality.  On timeout the best model found
    so far is returned with status TIMEOUT.
    """
    assumptions = list(assumptions)
    try:
        model = inst.solve(assumptions, deadline)
    except SolverTimeout:
        return MaxSatResult(MaxSatStatus.TIMEOUT)
    if model is None:
        return MaxSatResult(MaxSatStatus.UNSAT)
    soft = list(inst.soft)
    if not soft:
        return MaxSatResult(MaxSatStatus.OPTIMAL, model, 0)
    best = model
    best_sat = sum(model[l] for l in soft)
    if best_sat == len(soft):
        return MaxSatResult(MaxSatStatus.OPTIMAL, best, best_sat)
    tot = Totalizer(inst, [-l for l in soft])
    while True:
        violations = len(soft) - best_sat
        bound = tot.at_most(violations - 1)
        try:
            model = inst.solve(assumptions + [bound], deadline)
        except SolverTimeout:
            return MaxSatResult(MaxSatStatus.TIMEOUT, best, best_sat)
        if model is None:
            return MaxSatResult(MaxSatStatus.OPTIMAL, best, best_sat)
        best = model
        best_sat = sum(model[l] for l in soft)
        if best_sat == len(soft):
            return MaxSatResult(MaxSatStatus.OPTIMAL, best, best_sat)
