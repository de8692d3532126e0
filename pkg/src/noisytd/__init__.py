"""Impurity-driven top-down decision tree learning under adversarial noise.

The package provides the greedy learner, the noise models it is analysed
against, a zero-gain lower-bound construction and brute-force oracles for
the identities and inequalities the analysis relies on.
"""
from .adversary import (
    build_lowerbound_instance,
    corrupt_labels_agnostic,
    corrupt_sample_nasty,
    draw_sample,
    shift_mixture,
)
from .analysis import (
    ProductDistribution,
    influence,
    tv_distance,
    weak_learning_advantage,
)
from .cube import (
    BitPoint,
    BooleanFunction,
    DecisionTree,
    HypothesisClass,
    LabeledDistribution,
    Restriction,
    apply_restriction,
    condition,
    eval_tree,
    make_explicit,
    moments,
    tree_as_function,
    tree_size_and_depth,
)
from .impurity import ImpurityFn, custom_concave, entropy, gini, kmsqrt, purity_gain
from .targets import TargetSpec, TribesSpec, random_monotone_target, tribes
from .topdown import TrainConfig, evaluate_error, progress_audit, sample_size_for, train

__version__ = "0.1.0"

__all__ = [
    "BitPoint",
    "BooleanFunction",
    "DecisionTree",
    "HypothesisClass",
    "ImpurityFn",
    "LabeledDistribution",
    "ProductDistribution",
    "Restriction",
    "TargetSpec",
    "TrainConfig",
    "TribesSpec",
    "apply_restriction",
    "build_lowerbound_instance",
    "condition",
    "corrupt_labels_agnostic",
    "corrupt_sample_nasty",
    "custom_concave",
    "draw_sample",
    "entropy",
    "eval_tree",
    "evaluate_error",
    "gini",
    "influence",
    "kmsqrt",
    "make_explicit",
    "moments",
    "progress_audit",
    "purity_gain",
    "random_monotone_target",
    "sample_size_for",
    "shift_mixture",
    "train",
    "tree_as_function",
    "tree_size_and_depth",
    "tribes",
    "tv_distance",
    "weak_learning_advantage",
]
