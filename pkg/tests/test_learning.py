import random
from fractions import Fraction

import pytest

from oracles import all_words, formulas_up_to, misclassified, random_formula, trace
from ltlmine.formula import dag_size, evaluate, parse_formula, print_formula
from ltlmine.learning import (
    EncodingContext,
    LearnStatus,
    decode_model,
    encode_semantics_for_trace,
    encode_structure,
    enumerate_consistent,
    error_budget,
    learn_best,
    learn_exact,
    learn_noisy,
    structure_assumptions,
)
from ltlmine.sat import SolverTimeout
from ltlmine.traces import Sample, misclassification

P = ("p", "q")


def sample(pos, neg, props=("x0",)):
    return Sample(tuple(props), tuple(trace(u) for u in pos), tuple(trace(u) for u in neg))


def consistent_oracle(s, n):
    """All formulas of DAG size <= n consistent with ``s``, by enumeration."""
    props = list(s.propositions)
    return {
        f
        for f in formulas_up_to(n, props)
        if misclassified(f, s.positives, s.negatives, props) == 0
    }


# --- structure and decoding -----------------------------------------------------------


def test_single_node_is_an_atom():
    ctx = EncodingContext(P, 1)
    encode_structure(ctx)
    models = set()
    for lab in P:
        m = ctx.inst.solve([ctx.x[1, lab]])
        models.add(decode_model(ctx, m))
    assert models == {parse_formula("p"), parse_formula("q")}
    assert set(ctx.x) == {(1, "p"), (1, "q")}


def test_two_nodes_decode_globally():
    ctx = EncodingContext(("p",), 2)
    encode_structure(ctx)
    m = ctx.inst.solve([ctx.x[2, "G"], ctx.l[2, 1], ctx.x[1, "p"]])
    assert print_formula(decode_model(ctx, m)) == "G p"


def test_two_labels_on_one_node_are_forbidden():
    ctx = EncodingContext(("p",), 2)
    encode_structure(ctx)
    assert ctx.inst.solve([ctx.x[2, "G"], ctx.x[2, "F"]]) is None


def test_unreachable_node_is_dropped():
    ctx = EncodingContext(P, 3, symmetry=False)
    encode_structure(ctx)
    m = ctx.inst.solve([ctx.x[3, "G"], ctx.l[3, 1], ctx.x[1, "p"], ctx.x[2, "q"]])
    f = decode_model(ctx, m)
    assert print_formula(f) == "G p"
    assert dag_size(f) <= 3


def test_symmetry_breaking_forces_exact_size():
    # with the extra constraints every node must be reachable from the root
    ctx = EncodingContext(P, 3)
    encode_structure(ctx)
    assert ctx.inst.solve([ctx.x[3, "G"], ctx.l[3, 1]]) is None


def test_every_variable_pair_is_unique():
    ctx = EncodingContext(P, 4)
    encode_structure(ctx)
    variables = ctx.structure_vars()
    assert len(variables) == len(set(variables))
    assert all((1, op) not in ctx.x for op in ("!", "&", "U"))


@pytest.mark.parametrize("seed", range(10))
def test_decoded_structures_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    ctx = EncodingContext(P, n)
    encode_structure(ctx)
    # a random satisfying structure, then re-encoding the decoded formula is SAT
    assumptions = [ctx.x[n, rng.choice(ctx.node_labels(n))]]
    m = ctx.inst.solve(assumptions)
    if m is None:
        return
    f = decode_model(ctx, m)
    assert dag_size(f) <= n
    if dag_size(f) == n:
        fresh = EncodingContext(P, n)
        assert fresh.inst.solve(structure_assumptions(fresh, f)) is not None


# --- semantics against the evaluator --------------------------------------------------


def _root_value(f, u, props):
    ctx = EncodingContext(props, dag_size(f))
    lits = structure_assumptions(ctx, f)
    root = encode_semantics_for_trace(ctx, u)
    m = ctx.inst.solve(lits)
    assert m is not None
    assert decode_model(ctx, m) is f
    return m[root]


def test_fixed_globally_on_all_ones():
    assert _root_value(parse_formula("G x0"), trace("1;1;1"), ("x0",)) is True


def test_strong_next_on_single_letter():
    assert _root_value(parse_formula("X x0"), trace("1"), ("x0",)) is False


def test_fixed_structure_matches_evaluate_on_random_pairs():
    rng = random.Random(2024)
    checked = 0
    while checked < 50:
        f = random_formula(rng, rng.randint(1, 4), P)
        u = tuple(tuple(rng.random() < 0.5 for _ in P) for _ in range(rng.randint(1, 8)))
        assert _root_value(f, u, P) == evaluate(f, u, 0, P), (print_formula(f), u)
        checked += 1


def test_fixed_structure_matches_evaluate_exhaustively_for_small_words():
    for text in ["p U q", "G (p -> F q)", "X (p & X q)", "!(F p) | G q"]:
        f = parse_formula(text)
        for u in all_words(2, 3):
            assert _root_value(f, u, P) == evaluate(f, u, 0, P)


# --- exact learning ---------------------------------------------------------------------


def test_learn_exact_globally_or_next():
    s = sample(["1;1;1"], ["1;0;1"])
    res = learn_exact(s)
    assert res.status is LearnStatus.EXACT
    assert res.size == 2 and res.misclassified == 0
    assert print_formula(res.formula) in {"G x0", "X x0"}
    assert res.unsat_sizes == [1]
    # the brute-force enumeration agrees on exactly two size-2 solutions
    assert {print_formula(f) for f in consistent_oracle(s, 2)} == {"G x0", "X x0"}


def test_learn_exact_single_atom():
    res = learn_exact(sample(["1"], ["0"]))
    assert print_formula(res.formula) == "x0" and res.size == 1


def test_contradictory_sample_is_unsat():
    res = learn_exact(sample(["1"], ["1"]), max_n=4)
    assert res.status is LearnStatus.UNSAT
    assert res.formula is None
    assert res.unsat_sizes == [1, 2, 3, 4]


def test_learn_exact_requires_positives():
    with pytest.raises(ValueError):
        learn_exact(Sample(("x0",), (), (trace("1"),)))


def _random_sample(rng, props, n_pos, n_neg, max_len=4):
    def tr():
        return tuple(tuple(rng.random() < 0.5 for _ in props) for _ in range(rng.randint(1, max_len)))

    pos = [tr() for _ in range(n_pos)]
    neg = [t for t in (tr() for _ in range(n_neg)) if t not in pos]
    return Sample(tuple(props), tuple(pos), tuple(neg))


@pytest.mark.parametrize("seed", range(12))
def test_exact_size_matches_brute_force_minimum(seed):
    rng = random.Random(seed)
    s = _random_sample(rng, P, rng.randint(1, 3), rng.randint(1, 3))
    oracle = consistent_oracle(s, 3)
    res = learn_exact(s, max_n=3)
    if not oracle:
        assert res.status is LearnStatus.UNSAT
        return
    assert res.status is LearnStatus.EXACT
    assert res.size == min(dag_size(f) for f in oracle)
    assert res.formula in oracle


def test_exact_learning_recovers_ground_truth_size():
    gt = parse_formula("p U q")
    rng = random.Random(5)
    words = list(all_words(2, 4))
    pos = [w for w in words if evaluate(gt, w, 0, P)]
    neg = [w for w in words if not evaluate(gt, w, 0, P)]
    s = Sample(P, tuple(rng.sample(pos, 15)), tuple(rng.sample(neg, 15)))
    res = learn_exact(s, max_n=3)
    assert res.size <= dag_size(gt)
    assert misclassification(s, res.formula)[0] == 0


def test_timeout_status():
    rng = random.Random(1)
    s = _random_sample(rng, P, 30, 30, max_len=8)
    res = learn_exact(s, max_n=8, timeout=0.0)
    assert res.status is LearnStatus.TIMEOUT
    assert res.formula is None


# --- noisy learning -----------------------------------------------------------------------


def _globally_sample():
    pos = ["1;1;1", "1;1", "1", "1;1;1;1", "1;0"]
    neg = ["0", "1;0;1", "0;1", "1;1;0", "0;0"]
    return sample(pos, neg)


def test_noisy_globally_with_one_bad_positive():
    s = _globally_sample()
    assert len(s) == 10
    assert not consistent_oracle(s, 2)  # nothing of size <= 2 fits exactly
    res = learn_noisy(s, kappa=0.10, max_n=2)
    assert res.status is LearnStatus.WITHIN_THRESHOLD
    assert print_formula(res.formula) == "G x0"
    assert res.misclassified == 1
    assert res.rate == Fraction(1, 10)


@pytest.mark.parametrize("mode", ["decision", "optimize"])
def test_zero_kappa_reproduces_exact(mode):
    for seed in range(8):
        rng = random.Random(100 + seed)
        s = _random_sample(rng, P, 3, 3)
        exact = learn_exact(s, max_n=3)
        noisy = learn_noisy(s, kappa=0, max_n=3, mode=mode)
        assert exact.size == noisy.size
        if exact.formula is not None:
            assert noisy.misclassified == 0


@pytest.mark.parametrize("seed", range(10))
def test_decision_and_optimize_agree_on_size(seed):
    rng = random.Random(300 + seed)
    s = _random_sample(rng, P, 5, 5)
    kappa = rng.choice([0.1, 0.2, 0.3])
    a = learn_noisy(s, kappa=kappa, max_n=3, mode="decision")
    b = learn_noisy(s, kappa=kappa, max_n=3, mode="optimize")
    assert a.size == b.size
    assert a.status == b.status


@pytest.mark.parametrize("seed", range(10))
def test_noisy_size_is_minimal_within_budget(seed):
    rng = random.Random(700 + seed)
    s = _random_sample(rng, P, 4, 4)
    kappa = Fraction(1, 4)
    budget = error_budget(kappa, len(s))
    props = list(s.propositions)
    fitting = [f for f in formulas_up_to(3, props) if misclassified(f, s.positives, s.negatives, props) <= budget]
    res = learn_noisy(s, kappa=kappa, max_n=3)
    if not fitting:
        assert res.status is LearnStatus.UNSAT
    else:
        assert res.size == min(dag_size(f) for f in fitting)
        assert res.misclassified == misclassified(res.formula, s.positives, s.negatives, props) <= budget
        assert res.rate <= kappa


def test_error_budget_rounds_down():
    assert error_budget(0.10, 15) == 1
    assert error_budget(0.10, 10) == 1
    assert error_budget(0, 100) == 0
    assert error_budget(1, 7) == 7
    assert error_budget(Fraction(1, 3), 10) == 3
    with pytest.raises(ValueError):
        error_budget(1.5, 10)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        learn_noisy(_globally_sample(), mode="fast")


def test_learn_best_maximizes_correct_traces():
    s = _globally_sample()
    res = learn_best(s, max_n=2)
    assert res.misclassified == 1
    props = list(s.propositions)
    best = min(misclassified(f, s.positives, s.negatives, props) for f in formulas_up_to(2, props))
    assert res.misclassified == best


def test_result_to_dict():
    d = learn_exact(sample(["1"], ["0"])).to_dict()
    assert d["formula"] == "x0" and d["status"] == "Exact" and d["rate"] == 0.0
    assert set(d) == {"formula", "size", "misclassified", "rate", "status", "elapsed_ms"}


# --- enumeration ----------------------------------------------------------------------------


def test_enumeration_of_globally_sample():
    s = sample(["1;1;1"], ["1;0;1"])
    got = {print_formula(f) for f in enumerate_consistent(s, 2)}
    assert got == {"G x0", "X x0"}


def test_enumeration_atoms_only():
    s = sample(["1"], [])
    assert [print_formula(f) for f in enumerate_consistent(s, 1)] == ["x0"]


@pytest.mark.parametrize("seed", range(6))
def test_enumeration_is_complete_and_sound(seed):
    rng = random.Random(900 + seed)
    s = _random_sample(rng, P, rng.randint(1, 3), rng.randint(0, 2))
    got = list(enumerate_consistent(s, 3))
    assert set(got) == consistent_oracle(s, 3)
    assert all(dag_size(f) <= 3 for f in got)


def test_enumeration_deadline():
    s = sample(["1;1;0"], [])
    with pytest.raises(SolverTimeout):
        for _ in enumerate_consistent(s, 4, timeout=0.0):
            pass
