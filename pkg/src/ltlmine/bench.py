"""Benchmark grid: ground truths x noise rates x learner configurations."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import IO, Sequence

from .dtree import learn_tree
from .formula import parse_formula
from .generate import derive_seed, gen_sample, inject_noise
from .learning import learn_exact, learn_noisy

__all__ = [
    "DEFAULT_GROUND_TRUTHS",
    "CSV_HEADER",
    "BenchSpec",
    "bench_combos",
    "run_bench",
    "format_rows",
]

# Twelve common specification patterns over two propositions: existence,
# universality, absence, until-response, next-step and recurrence.
DEFAULT_GROUND_TRUTHS = (
    "F p",
    "G p",
    "G !p",
    "p U q",
    "F (p & q)",
    "G (p -> F q)",
    "X p",
    "F p & F q",
    "G p | G q",
    "!p U q",
    "X (p & q)",
    "G (F p)",
)

CSV_HEADER = ("ground_truth", "noise", "mode", "kappa", "size", "misclassified", "rate", "elapsed_ms", "status")

MODES = ("exact", "noisy", "tree")


@dataclass(frozen=True)
class BenchSpec:
    ground_truths: tuple[str, ...] = DEFAULT_GROUND_TRUTHS
    propositions: tuple[str, ...] = ("p", "q")
    pos: int = 150
    neg: int = 150
    len_min: int = 2
    len_max: int = 8
    noise_rates: tuple[float, ...] = (0.0, 0.05)
    kappas: tuple[float, ...] = (0.10,)
    modes: tuple[str, ...] = ("exact", "noisy")
    max_size: int = 8
    timeout: float = 900.0
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        for name in ("ground_truths", "propositions", "noise_rates", "kappas", "modes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.ground_truths:
            raise ValueError("at least one ground truth is required")
        for text in self.ground_truths:
            parse_formula(text)
        if self.pos < 1 or self.neg < 1:
            raise ValueError("pos and neg counts must be at least 1")
        if not 1 <= self.len_min <= self.len_max:
            raise ValueError("need 1 <= len_min <= len_max")
        for r in self.noise_rates + self.kappas:
            if not 0 <= r <= 1:
                raise ValueError(f"rates and kappas must lie in [0, 1], got {r}")
        if not self.modes:
            raise ValueError("at least one mode is required")
        for m in self.modes:
            if m not in MODES:
                raise ValueError(f"unknown mode {m!r}; expected one of {', '.join(MODES)}")
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "BenchSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown bench spec fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "BenchSpec":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def bench_combos(spec: BenchSpec) -> list[tuple[str, float]]:
    """(mode, kappa) pairs; the exact learner only runs with kappa 0."""
    combos = []
    for mode in spec.modes:
        if mode == "exact":
            combos.append((mode, 0.0))
        else:
            combos.extend((mode, k) for k in spec.kappas)
    return combos


@dataclass(frozen=True)
class _Cell:
    spec: BenchSpec
    gt_index: int
    noise_index: int
    mode: str
    kappa: float


def _sample_for(spec: BenchSpec, gt_index: int, noise_index: int):
    f = parse_formula(spec.ground_truths[gt_index])
    sample = gen_sample(
        f, spec.pos, spec.neg, spec.len_min, spec.len_max,
        derive_seed(spec.seed, gt_index), spec.propositions,
    )
    rate = spec.noise_rates[noise_index]
    return inject_noise(sample, rate, derive_seed(spec.seed, gt_index, noise_index + 1))


def _run_cell(cell: _Cell) -> dict:
    spec = cell.spec
    sample = _sample_for(spec, cell.gt_index, cell.noise_index)
    if cell.mode == "exact":
        res = learn_exact(sample, max_n=spec.max_size, timeout=spec.timeout)
    elif cell.mode == "noisy":
        res = learn_noisy(sample, kappa=cell.kappa, max_n=spec.max_size, timeout=spec.timeout)
    else:
        _, res = learn_tree(sample, kappa=cell.kappa, timeout=spec.timeout)
    ok = res.formula is not None
    return {
        "ground_truth": spec.ground_truths[cell.gt_index],
        "noise": spec.noise_rates[cell.noise_index],
        "mode": cell.mode,
        "kappa": cell.kappa,
        "size": res.size if ok else None,
        "misclassified": res.misclassified if ok else None,
        "rate": float(res.rate) if ok else None,
        "elapsed_ms": res.elapsed_ms,
        "status": res.status.value,
    }


def _cells(spec: BenchSpec) -> list[_Cell]:
    return [
        _Cell(spec, g, r, mode, kappa)
        for g in range(len(spec.ground_truths))
        for r in range(len(spec.noise_rates))
        for mode, kappa in bench_combos(spec)
    ]


def run_bench(spec: BenchSpec, out: IO[str] | None = None) -> list[dict]:
    """Run every grid cell and return rows in grid order (truth, noise, mode).

    With ``out`` the rows are also written as CSV.  Samples are shared by
    all learner configurations of one (ground truth, noise rate) pair.
    """
    cells = _cells(spec)
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(c) for c in cells]
    if out is not None:
        out.write(format_rows(rows))
    return rows


def _cell_text(value) -> str:
    if value is None:
        return ""
    return str(value)


def format_rows(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_cell_text(row[k]) for k in CSV_HEADER])
    return buf.getvalue()

