"""Reference learners (CART trees, kernel SVMs) and the k-fold harness."""

from .base import (
    EvaluationTimeout,
    Learner,
    get_learner,
    learner_names,
    register_learner,
)
from .harness import CvScore, accuracy, cross_validate, r_squared
from .svm import (
    SvmClassifierModel,
    SvmLearner,
    SvmParams,
    SvrModel,
    resolve_gamma,
    train_svm_classifier,
    train_svm_regressor,
)
from .tree import DecisionTreeLearner, DtParams, TreeModel, TreeNode, train_tree

__all__ = [
    "CvScore",
    "DecisionTreeLearner",
    "DtParams",
    "EvaluationTimeout",
    "Learner",
    "SvmClassifierModel",
    "SvmLearner",
    "SvmParams",
    "SvrModel",
    "TreeModel",
    "TreeNode",
    "accuracy",
    "cross_validate",
    "get_learner",
    "learner_names",
    "r_squared",
    "register_learner",
    "resolve_gamma",
    "train_svm_classifier",
    "train_svm_regressor",
    "train_tree",
]
