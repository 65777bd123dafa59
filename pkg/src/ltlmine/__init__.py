"""Learning small LTLf formulas from finite example traces.

The package covers exact and noise-tolerant learning from labeled traces
(SAT and MaxSAT over bounded syntax DAGs), decision trees of learned
predicates, and language-minimal learning from positive traces only.
"""

__version__ = "0.1.0"

from .automata import Dfa, DfaTooLarge, inclusion_witness, strictly_smaller, to_dfa
from .dtree import DecisionTree, learn_tree, tree_to_formula
from .estimators import LTLClassifier, LTLTreeClassifier, MinimalLTLLearner, NoFormulaFound
from .formula import (
    Formula,
    FormulaSyntaxError,
    dag_size,
    evaluate,
    parse_formula,
    print_formula,
)
from .generate import gen_sample, inject_noise
from .learning import LearnResult, LearnStatus, enumerate_consistent, learn_exact, learn_noisy
from .occ import (
    OccConfig,
    OccResult,
    OccStatus,
    learn_minimal_enumerative,
    learn_minimal_guided,
    verify_minimal,
)
from .traces import Sample, misclassification, parse_sample, read_sample, serialize_sample, write_sample

__all__ = [
    "Dfa",
    "DfaTooLarge",
    "DecisionTree",
    "Formula",
    "FormulaSyntaxError",
    "LTLClassifier",
    "LTLTreeClassifier",
    "LearnResult",
    "LearnStatus",
    "MinimalLTLLearner",
    "NoFormulaFound",
    "OccConfig",
    "OccResult",
    "OccStatus",
    "Sample",
    "dag_size",
    "enumerate_consistent",
    "evaluate",
    "gen_sample",
    "inclusion_witness",
    "inject_noise",
    "learn_exact",
    "learn_minimal_enumerative",
    "learn_minimal_guided",
    "learn_noisy",
    "learn_tree",
    "misclassification",
    "parse_formula",
    "parse_sample",
    "print_formula",
    "read_sample",
    "serialize_sample",
    "strictly_smaller",
    "to_dfa",
    "tree_to_formula",
    "verify_minimal",
    "write_sample",
]
