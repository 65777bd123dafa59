import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ltlmine.estimators import LTLClassifier, LTLTreeClassifier, MinimalLTLLearner, NoFormulaFound
from ltlmine.automata import language_equal
from ltlmine.validation import check_labels, check_propositions, check_traces

X_SIMPLE = ["1;1;1", "1;0;1"]
Y_SIMPLE = [1, 0]


def test_get_params_and_clone():
    est = LTLClassifier(mode="noisy", kappa=0.2, max_size=5)
    params = est.get_params()
    assert params == {
        "mode": "noisy", "kappa": 0.2, "max_size": 5, "strategy": "decision",
        "timeout": None, "propositions": None,
    }
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(kappa=0.3)
    assert est.kappa == 0.3


def test_fit_predict_exact():
    est = LTLClassifier().fit(X_SIMPLE, Y_SIMPLE)
    assert est.formula_text_ in ("G x0", "X x0")
    assert list(est.predict(X_SIMPLE)) == [1, 0]
    assert est.score(X_SIMPLE, Y_SIMPLE) == 1.0
    assert est.n_features_in_ == 1
    assert list(est.classes_) == [0, 1]


def test_array_traces_and_named_propositions():
    X = [np.array([[1, 0], [0, 1]]), np.array([[0, 0]]), np.array([[1, 1], [0, 0], [0, 1]]), np.array([[0, 1]])]
    y = np.array([True, False, True, False])
    est = LTLClassifier(propositions=["p", "q"]).fit(X, y)
    assert est.propositions_ == ("p", "q")
    assert list(est.predict(X)) == list(y)
    assert est.satisfies(X).dtype == bool


def test_signed_labels_round_trip():
    est = LTLClassifier().fit(X_SIMPLE, [1, -1])
    assert list(est.predict(X_SIMPLE)) == [1, -1]


def test_noisy_mode_reports_result():
    X = ["1;1;1", "1;1", "1", "1;1;1;1", "1;0", "0", "1;0;1", "0;1", "1;1;0", "0;0"]
    y = [1] * 5 + [0] * 5
    est = LTLClassifier(mode="noisy", kappa=0.1, max_size=3).fit(X, y)
    assert est.formula_text_ == "G x0"
    assert est.result_.misclassified == 1
    assert est.score(X, y) == pytest.approx(0.9)


def test_unsat_raises():
    with pytest.raises(NoFormulaFound) as info:
        LTLClassifier(max_size=2).fit(["1", "1"], [1, 0])
    assert info.value.status == "Unsat"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        LTLClassifier().predict(X_SIMPLE)


def test_bad_mode():
    with pytest.raises(ValueError):
        LTLClassifier(mode="tree").fit(X_SIMPLE, Y_SIMPLE)


def test_width_mismatch_at_predict():
    est = LTLClassifier().fit(X_SIMPLE, Y_SIMPLE)
    with pytest.raises(ValueError):
        est.predict(["1,0"])


def test_tree_classifier_on_xor():
    X = ["1,0;0,0;0,0", "0,0;1,0", "1,0", "0,0;0,1;0,0", "0,0", "0,0;0,0;0,0", "0,0;0,0", "1,1"]
    y = [1, 1, 1, 1, 0, 0, 0, 0]
    est = LTLTreeClassifier(predicate_size=2, max_depth=2, propositions=("p", "q")).fit(X, y)
    assert est.tree_.depth == 2
    assert est.score(X, y) == 1.0
    assert list(est.predict(X)) == [bool(b) for b in est.satisfies(X)]
    assert clone(est).get_params()["max_depth"] == 2


def test_minimal_learner():
    est = MinimalLTLLearner(max_size=2).fit(["1;1;1", "1;1"])
    assert est.formula_text_ == "G x0"
    assert est.certified_
    assert list(est.predict(["1;1", "1;0", "1"])) == [1, -1, 1]


def test_minimal_learner_methods_agree():
    X = ["1,0;1,1", "1,1", "1,0;1,0;0,1"]
    a = MinimalLTLLearner(max_size=3, method="guided").fit(X)
    b = MinimalLTLLearner(max_size=3, method="enumerative").fit(X)
    assert language_equal(a.formula_, b.formula_, a.propositions_)
    with pytest.raises(ValueError):
        MinimalLTLLearner(method="fast").fit(X)


def test_minimal_learner_unsat():
    with pytest.raises(NoFormulaFound):
        MinimalLTLLearner(max_size=1).fit(["1", "0"])


# --- validation helpers -----------------------------------------------------------------------


def test_check_traces():
    assert check_traces(["1,0;0,1"]) == [((True, False), (False, True))]
    assert check_traces([[[1], [0]]]) == [((True,), (False,))]
    with pytest.raises(ValueError):
        check_traces("1;0")
    with pytest.raises(ValueError):
        check_traces([])
    with pytest.raises(ValueError):
        check_traces([[1, 0]])
    with pytest.raises(ValueError):
        check_traces([[[2]]])
    with pytest.raises(ValueError):
        check_traces(["1,0", "1"])
    with pytest.raises(ValueError):
        check_traces([np.zeros((0, 2))])


def test_check_labels():
    pos, classes = check_labels([1, 0, 1], 3)
    assert list(pos) == [True, False, True] and list(classes) == [0, 1]
    pos, classes = check_labels([-1, 1], 2)
    assert list(classes) == [-1, 1]
    with pytest.raises(ValueError):
        check_labels([0, 2], 2)
    with pytest.raises(ValueError):
        check_labels([0, 1], 3)
    with pytest.raises(ValueError):
        check_labels(["a", "b"], 2)
    with pytest.raises(ValueError):
        check_labels([[0, 1]], 1)


def test_check_propositions():
    assert check_propositions(None, 2) == ("x0", "x1")
    with pytest.raises(ValueError):
        check_propositions(["p"], 2)
