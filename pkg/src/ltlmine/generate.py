"""Seeded sample generation and label noise.

All randomness comes from :class:`SplitMix64` so that samples can be
reproduced bit for bit by any implementation of the same recipe:

* a letter is drawn proposition by proposition, each bit being the top bit
  of one generator output;
* an integer in ``[0, n)`` is drawn by rejection from 64-bit outputs
  (outputs ``>= 2**64 - 2**64 % n`` are discarded, the rest taken modulo n);
* a trace length is ``len_min + below(len_max - len_min + 1)`` followed by
  its letters.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .formula import Formula, atoms, evaluate_mask
from .traces import Sample, Trace

__all__ = [
    "SplitMix64",
    "SampleGenerationError",
    "derive_seed",
    "gen_sample",
    "gen_positive_sample",
    "inject_noise",
    "noise_count",
    "round_half_up",
]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """The SplitMix64 generator (Steele, Lea and Flood)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def bit(self) -> bool:
        return bool(self.next() >> 63)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next()
            if x < limit:
                return x % n


def derive_seed(*parts: int) -> int:
    """Mix several integers into one 64-bit seed."""
    state = 0
    for p in parts:
        state = SplitMix64(state ^ (p & _MASK)).next()
    return state


class SampleGenerationError(ValueError):
    """The quotas could not be filled within the attempt budget."""


def _draw_trace(rng: SplitMix64, width: int, len_min: int, len_max: int) -> Trace:
    length = len_min + rng.below(len_max - len_min + 1)
    return tuple(tuple(rng.bit() for _ in range(width)) for _ in range(length))


def gen_sample(
    f: Formula,
    pos: int,
    neg: int,
    len_min: int,
    len_max: int,
    seed: int,
    propositions: Sequence[str] | None = None,
    max_attempts: int | None = None,
) -> Sample:
    """Rejection-sample ``pos`` traces satisfying ``f`` and ``neg`` violating it.

    ``neg=0`` produces a positives-only sample for one-class learning.
    """
    if pos < 1 or neg < 0:
        raise ValueError("need pos >= 1 and neg >= 0")
    if not 1 <= len_min <= len_max:
        raise ValueError("need 1 <= len_min <= len_max")
    props = tuple(propositions) if propositions is not None else tuple(atoms(f))
    missing = set(atoms(f)) - set(props)
    if missing:
        raise ValueError(f"formula uses propositions outside the alphabet: {sorted(missing)}")
    if max_attempts is None:
        max_attempts = max(10_000, 200 * (pos + neg))
    rng = SplitMix64(seed)
    positives: list[Trace] = []
    negatives: list[Trace] = []
    for _ in range(max_attempts):
        if len(positives) == pos and len(negatives) == neg:
            break
        u = _draw_trace(rng, len(props), len_min, len_max)
        if evaluate_mask(f, u, props) & 1:
            if len(positives) < pos:
                positives.append(u)
        elif len(negatives) < neg:
            negatives.append(u)
    if len(positives) < pos or len(negatives) < neg:
        raise SampleGenerationError(
            f"got {len(positives)}/{pos} positive and {len(negatives)}/{neg} negative traces "
            f"after {max_attempts} attempts"
        )
    return Sample(props, tuple(positives), tuple(negatives))


def gen_positive_sample(f, count, len_min, len_max, seed, propositions=None, max_attempts=None) -> Sample:
    return gen_sample(f, count, 0, len_min, len_max, seed, propositions, max_attempts)


def round_half_up(x: Fraction) -> int:
    return int((x + Fraction(1, 2)) // 1)


def noise_count(rate, total: int) -> int:
    r = Fraction(str(rate)) if isinstance(rate, float) else Fraction(rate)
    if not 0 <= r <= 1:
        raise ValueError(f"noise rate must lie in [0, 1], got {rate}")
    return round_half_up(r * total)


def inject_noise(sample: Sample, rate, seed: int) -> Sample:
    """Flip the labels of exactly ``round(rate * |sample|)`` distinct traces.

    Traces are indexed positives first; the flipped ones are chosen by a
    partial Fisher-Yates shuffle.  Unflipped traces keep their order and
    flipped ones are appended to the other list in their original order.
    """
    labeled = sample.labeled()
    total = len(labeled)
    k = noise_count(rate, total)
    rng = SplitMix64(seed)
    idx = list(range(total))
    for i in range(k):
        j = i + rng.below(total - i)
        idx[i], idx[j] = idx[j], idx[i]
    flipped = set(idx[:k])
    npos = len(sample.positives)
    positives = [u for i, (u, _) in enumerate(labeled) if i < npos and i not in flipped]
    negatives = [u for i, (u, _) in enumerate(labeled) if i >= npos and i not in flipped]
    positives += [u for i, (u, _) in enumerate(labeled) if i >= npos and i in flipped]
    negatives += [u for i, (u, _) in enumerate(labeled) if i < npos and i in flipped]
    return sample.replace(positives, negatives)
