from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import naive_eval, trace
from ltlmine.formula import parse_formula
from ltlmine.generate import (
    SampleGenerationError,
    SplitMix64,
    derive_seed,
    gen_positive_sample,
    gen_sample,
    inject_noise,
    noise_count,
    round_half_up,
)
from ltlmine.traces import Sample, misclassification


def test_splitmix64_reference_vector():
    rng = SplitMix64(1234567)
    assert [rng.next() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_bounded_draws_stay_in_range_and_cover_it():
    rng = SplitMix64(9)
    counts = Counter(rng.below(3) for _ in range(3000))
    assert set(counts) == {0, 1, 2}
    assert all(800 < c < 1200 for c in counts.values())
    with pytest.raises(ValueError):
        rng.below(0)


def test_derived_seeds_differ_and_are_stable():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, i) for i in range(100)}) == 100
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)


def test_globally_sample():
    g = parse_formula("G p")
    s = gen_sample(g, 5, 5, 2, 4, seed=7)
    assert s.propositions == ("p",)
    assert len(s.positives) == 5 and len(s.negatives) == 5
    for u in s.positives:
        assert all(a[0] for a in u) and 2 <= len(u) <= 4
    for u in s.negatives:
        assert not all(a[0] for a in u)


def test_empty_language_fails():
    with pytest.raises(SampleGenerationError):
        gen_sample(parse_formula("p & !p"), 1, 1, 1, 3, seed=0, max_attempts=500)


def test_argument_validation():
    f = parse_formula("p")
    with pytest.raises(ValueError):
        gen_sample(f, 0, 1, 1, 2, seed=0)
    with pytest.raises(ValueError):
        gen_sample(f, 1, 1, 3, 2, seed=0)
    with pytest.raises(ValueError):
        gen_sample(f, 1, 1, 1, 2, seed=0, propositions=("q",))


def test_positive_only_mode():
    s = gen_positive_sample(parse_formula("F p"), 10, 1, 5, seed=3)
    assert len(s.positives) == 10 and s.negatives == ()


@given(
    st.sampled_from(["F p", "G p", "p U q", "X q", "G (p -> F q)"]),
    st.integers(0, 2**64 - 1),
)
def test_generated_labels_match_the_ground_truth(text, seed):
    f = parse_formula(text)
    s = gen_sample(f, 4, 4, 1, 5, seed=seed, propositions=("p", "q"))
    props = ["p", "q"]
    assert all(naive_eval(f, u, 0, props) for u in s.positives)
    assert not any(naive_eval(f, u, 0, props) for u in s.negatives)
    assert gen_sample(f, 4, 4, 1, 5, seed=seed, propositions=("p", "q")) == s


def test_default_sizes_mirror_the_protocol():
    s = gen_sample(parse_formula("p U q"), 150, 150, 2, 8, seed=1, propositions=("p", "q"))
    assert len(s) == 300


# --- noise ---------------------------------------------------------------------------------


def test_round_half_up():
    assert round_half_up(Fraction(5, 2)) == 3
    assert round_half_up(Fraction(7, 2)) == 4
    assert round_half_up(Fraction(12, 5)) == 2
    assert noise_count(0.05, 148) == 7  # 7.4
    assert noise_count(0.05, 150) == 8  # 7.5 rounds up
    assert noise_count(0.05, 100) == 5
    with pytest.raises(ValueError):
        noise_count(1.5, 10)


def _hundred():
    return gen_sample(parse_formula("F p"), 50, 50, 1, 6, seed=11, propositions=("p", "q"))


def test_five_percent_flips_exactly_five():
    s = _hundred()
    noisy = inject_noise(s, 0.05, seed=1)
    assert len(noisy) == 100
    assert Counter(noisy.positives + noisy.negatives) == Counter(s.positives + s.negatives)
    assert misclassification(noisy, parse_formula("F p"))[0] == 5


def test_zero_rate_is_identity():
    s = _hundred()
    assert inject_noise(s, 0, seed=5) == s


def test_full_rate_swaps_labels():
    s = _hundred()
    noisy = inject_noise(s, 1, seed=5)
    assert noisy.positives == s.negatives and noisy.negatives == s.positives
    assert misclassification(noisy, parse_formula("F p"))[1] == 1


def test_order_is_preserved():
    s = Sample(("x0",), tuple(trace(t) for t in ["1", "1;1", "1;1;1"]), tuple(trace(t) for t in ["0", "0;0"]))
    noisy = inject_noise(s, 0.4, seed=2)
    kept_pos = [u for u in s.positives if u in noisy.positives]
    assert list(noisy.positives[: len(kept_pos)]) == kept_pos
    kept_neg = [u for u in s.negatives if u in noisy.negatives]
    assert list(noisy.negatives[: len(kept_neg)]) == kept_neg


@given(st.integers(0, 2**64 - 1), st.sampled_from([0.0, 0.05, 0.1, 0.25, 0.5]))
def test_flip_count_and_determinism(seed, rate):
    s = _hundred()
    a = inject_noise(s, rate, seed)
    assert a == inject_noise(s, rate, seed)
    assert misclassification(a, parse_formula("F p"))[0] == noise_count(rate, 100)
