"""scikit-learn style wrappers around the learners.

``X`` is a sequence of traces (2-D 0/1 arrays of shape ``(length, k)`` or
``"1,0;0,1"`` strings); lengths may differ, so ``X`` is never one array.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .dtree import learn_tree
from .formula import evaluate_mask, print_formula
from .learning import learn_exact, learn_noisy
from .occ import OccConfig, OccStatus, learn_minimal_enumerative, learn_minimal_guided
from .traces import Sample
from .validation import check_labels, check_propositions, check_traces

__all__ = ["NoFormulaFound", "LTLClassifier", "LTLTreeClassifier", "MinimalLTLLearner"]


class NoFormulaFound(RuntimeError):
    """The learner finished without a formula (no solution or deadline)."""

    def __init__(self, status: str):
        super().__init__(f"no formula learned (status {status})")
        self.status = status


class _FormulaPredictor:
    def _traces(self, X):
        check_is_fitted(self, "formula_")
        return check_traces(X, self.n_features_in_)

    def satisfies(self, X) -> np.ndarray:
        """Boolean array: does the learned formula hold on each trace."""
        traces = self._traces(X)
        return np.array([bool(evaluate_mask(self.formula_, u, self.propositions_) & 1) for u in traces])

    @property
    def formula_text_(self) -> str:
        check_is_fitted(self, "formula_")
        return print_formula(self.formula_)


def _labeled_sample(estimator, X, y) -> Sample:
    traces = check_traces(X)
    positive, classes = check_labels(y, len(traces))
    width = len(traces[0][0])
    props = check_propositions(estimator.propositions, width)
    estimator.classes_ = classes
    estimator.n_features_in_ = width
    estimator.propositions_ = props
    pos = [u for u, b in zip(traces, positive) if b]
    neg = [u for u, b in zip(traces, positive) if not b]
    if not pos:
        raise ValueError("at least one positive trace is required")
    return Sample(props, tuple(pos), tuple(neg))


class LTLClassifier(_FormulaPredictor, ClassifierMixin, BaseEstimator):
    """Smallest formula classifying the traces, exactly or within ``kappa``.

    Parameters
    ----------
    mode : {"exact", "noisy"}
    kappa : float
        Tolerated misclassification fraction in noisy mode.
    max_size : int
        Largest DAG size tried.
    strategy : {"decision", "optimize"}
        How noisy mode enforces the threshold.
    timeout : float or None
        Seconds.
    propositions : sequence of str or None
        Names for the trace columns (default ``x0, x1, ...``).
    """

    def __init__(self, mode="exact", kappa=0.1, max_size=8, strategy="decision", timeout=None, propositions=None):
        self.mode = mode
        self.kappa = kappa
        self.max_size = max_size
        self.strategy = strategy
        self.timeout = timeout
        self.propositions = propositions

    def fit(self, X, y):
        if self.mode not in ("exact", "noisy"):
            raise ValueError(f"mode must be 'exact' or 'noisy', got {self.mode!r}")
        sample = _labeled_sample(self, X, y)
        if self.mode == "exact":
            res = learn_exact(sample, max_n=self.max_size, timeout=self.timeout)
        else:
            res = learn_noisy(sample, kappa=self.kappa, max_n=self.max_size, mode=self.strategy, timeout=self.timeout)
        self.result_ = res
        if res.formula is None:
            raise NoFormulaFound(res.status.value)
        self.formula_ = res.formula
        return self

    def predict(self, X):
        return np.where(self.satisfies(X), self.classes_[1], self.classes_[0])


class LTLTreeClassifier(_FormulaPredictor, ClassifierMixin, BaseEstimator):
    """Decision tree over learned formula predicates, flattened to ``formula_``."""

    def __init__(self, kappa=0.0, predicate_size=3, max_depth=4, timeout=None, propositions=None):
        self.kappa = kappa
        self.predicate_size = predicate_size
        self.max_depth = max_depth
        self.timeout = timeout
        self.propositions = propositions

    def fit(self, X, y):
        sample = _labeled_sample(self, X, y)
        self.tree_, self.result_ = learn_tree(
            sample, kappa=self.kappa, predicate_size=self.predicate_size,
            max_depth=self.max_depth, timeout=self.timeout,
        )
        self.formula_ = self.result_.formula
        return self

    def predict(self, X):
        return np.where(self.satisfies(X), self.classes_[1], self.classes_[0])


class MinimalLTLLearner(_FormulaPredictor, BaseEstimator):
    """One-class learner: a language-minimal formula accepting every trace.

    ``predict`` follows the outlier-detector convention: +1 for traces the
    formula accepts, -1 otherwise.
    """

    def __init__(self, max_size=3, method="guided", timeout=None, propositions=None):
        self.max_size = max_size
        self.method = method
        self.timeout = timeout
        self.propositions = propositions

    def fit(self, X, y=None):
        if self.method not in ("guided", "enumerative"):
            raise ValueError(f"method must be 'guided' or 'enumerative', got {self.method!r}")
        traces = check_traces(X)
        width = len(traces[0][0])
        self.n_features_in_ = width
        self.propositions_ = check_propositions(self.propositions, width)
        sample = Sample(self.propositions_, tuple(traces), ())
        cfg = OccConfig(n=self.max_size, timeout=self.timeout)
        learn = learn_minimal_guided if self.method == "guided" else learn_minimal_enumerative
        res = learn(sample, cfg)
        self.result_ = res
        if res.formula is None:
            raise NoFormulaFound(res.status.value)
        self.formula_ = res.formula
        self.certified_ = res.status is OccStatus.CERTIFIED
        return self

    def predict(self, X):
        return np.where(self.satisfies(X), 1, -1)

