"""Traces, labeled samples and the ``.trc`` sample file format.

A valuation is a tuple of booleans (one per proposition), a trace is a
nonempty tuple of valuations and a sample groups positive and negative traces
over a shared, ordered proposition list.

File format (UTF-8; LF or CRLF accepted, LF written)::

    # comment lines and blank lines are ignored
    aps: p,q          <- optional header, default names x0..x{k-1}
    1,0;0,1;1,1       <- positive traces, one per line
    ---               <- optional separator
    0,0;1,1           <- negative traces

Valuations inside a trace are separated by ``;`` and the bits of one
valuation by ``,``.  A file without ``---`` holds positives only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .formula import Formula, atoms, default_propositions, evaluate_mask

__all__ = [
    "Valuation",
    "Trace",
    "Sample",
    "SampleFormatError",
    "parse_sample",
    "serialize_sample",
    "read_sample",
    "write_sample",
    "misclassification",
    "format_trace",
    "parse_trace",
]

Valuation = tuple[bool, ...]
Trace = tuple[Valuation, ...]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class SampleFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _as_trace(trace: Iterable[Iterable]) -> Trace:
    return tuple(tuple(bool(b) for b in step) for step in trace)


@dataclass(frozen=True)
class Sample:
    """Positive and negative traces over named propositions.

    Duplicate traces are kept; each occurrence counts separately towards the
    misclassification budget.
    """

    propositions: tuple[str, ...]
    positives: tuple[Trace, ...] = ()
    negatives: tuple[Trace, ...] = ()
    _width: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        props = tuple(self.propositions)
        if not props:
            raise ValueError("a sample needs at least one proposition")
        if len(set(props)) != len(props):
            raise ValueError(f"duplicate proposition names in {props}")
        for p in props:
            if not _NAME.fullmatch(p) or p in ("X", "F", "G", "U"):
                raise ValueError(f"invalid proposition name {p!r}")
        pos = tuple(_as_trace(u) for u in self.positives)
        neg = tuple(_as_trace(u) for u in self.negatives)
        for u in pos + neg:
            if len(u) == 0:
                raise ValueError("traces must be nonempty")
            for v in u:
                if len(v) != len(props):
                    raise ValueError(
                        f"valuation width {len(v)} does not match {len(props)} propositions"
                    )
        object.__setattr__(self, "propositions", props)
        object.__setattr__(self, "positives", pos)
        object.__setattr__(self, "negatives", neg)
        object.__setattr__(self, "_width", len(props))

    @classmethod
    def from_traces(cls, positives, negatives=(), propositions=None) -> "Sample":
        positives = [_as_trace(u) for u in positives]
        negatives = [_as_trace(u) for u in negatives]
        if propositions is None:
            first = (positives + negatives)[0]
            propositions = default_propositions(len(first[0]))
        return cls(tuple(propositions), tuple(positives), tuple(negatives))

    @property
    def width(self) -> int:
        return self._width

    def __len__(self) -> int:
        return len(self.positives) + len(self.negatives)

    def labeled(self) -> list[tuple[Trace, bool]]:
        """All traces with their labels, positives first, in file order."""
        return [(u, True) for u in self.positives] + [(u, False) for u in self.negatives]

    @property
    def max_length(self) -> int:
        return max((len(u) for u in self.positives + self.negatives), default=0)

    def replace(self, positives=None, negatives=None) -> "Sample":
        return Sample(
            self.propositions,
            self.positives if positives is None else tuple(positives),
            self.negatives if negatives is None else tuple(negatives),
        )


# ---------------------------------------------------------------------------
# text format


def parse_trace(text: str, width: int | None = None, line: int | None = None) -> Trace:
    steps = []
    for token in text.split(";"):
        bits = []
        for b in token.split(","):
            b = b.strip()
            if b == "1":
                bits.append(True)
            elif b == "0":
                bits.append(False)
            else:
                raise SampleFormatError(f"invalid valuation {token.strip()!r}", line)
        if width is None:
            width = len(bits)
        elif len(bits) != width:
            raise SampleFormatError(
                f"inconsistent valuation width (expected {width}, got {len(bits)})", line
            )
        steps.append(tuple(bits))
    return tuple(steps)


def format_trace(trace: Sequence[Sequence[bool]]) -> str:
    return ";".join(",".join("1" if b else "0" for b in step) for step in trace)


def parse_sample(text: str) -> Sample:
    """Parse the ``.trc`` text format into a :class:`Sample`."""
    propositions: list[str] | None = None
    positives: list[Trace] = []
    negatives: list[Trace] = []
    width: int | None = None
    in_negatives = False
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not seen_content and line.startswith("aps:"):
            seen_content = True
            names = [n.strip() for n in line[4:].split(",")]
            for n in names:
                if not _NAME.fullmatch(n) or n in ("X", "F", "G", "U"):
                    raise SampleFormatError(f"invalid proposition name {n!r}", lineno)
            if len(set(names)) != len(names):
                raise SampleFormatError("duplicate proposition names", lineno)
            propositions = names
            width = len(names)
            continue
        seen_content = True
        if line == "---":
            if in_negatives:
                raise SampleFormatError("second '---' separator", lineno)
            in_negatives = True
            continue
        if line.startswith("aps:"):
            raise SampleFormatError("'aps:' header must come first", lineno)
        trace = parse_trace(line, width, lineno)
        width = len(trace[0])
        (negatives if in_negatives else positives).append(trace)
    if not positives:
        raise SampleFormatError("sample has no positive traces")
    if propositions is None:
        propositions = default_propositions(width)
    return Sample(tuple(propositions), tuple(positives), tuple(negatives))


def serialize_sample(sample: Sample) -> str:
    """Inverse of :func:`parse_sample`.

    The header is written only when the names differ from the defaults; the
    ``---`` separator is always written, even with no negatives.
    """
    lines = []
    if list(sample.propositions) != default_propositions(sample.width):
        lines.append("aps: " + ",".join(sample.propositions))
    lines.extend(format_trace(u) for u in sample.positives)
    lines.append("---")
    lines.extend(format_trace(u) for u in sample.negatives)
    return "\n".join(lines) + "\n"


def read_sample(path) -> Sample:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_sample(fh.read())


def write_sample(sample: Sample, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_sample(sample))


# ---------------------------------------------------------------------------


def misclassification(sample: Sample, f: Formula) -> tuple[int, Fraction]:
    """Number and fraction of traces ``f`` labels wrongly.

    The rate is returned as an exact :class:`fractions.Fraction`.
    """
    unknown = set(atoms(f)) - set(sample.propositions)
    if unknown:
        raise ValueError(f"formula uses unknown propositions {sorted(unknown)}")
    count = 0
    for u in sample.positives:
        if not evaluate_mask(f, u, sample.propositions) & 1:
            count += 1
    for u in sample.negatives:
        if evaluate_mask(f, u, sample.propositions) & 1:
            count += 1
    total = len(sample)
    return count, (Fraction(count, total) if total else Fraction(0))
