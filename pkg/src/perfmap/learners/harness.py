"""K-fold cross-validation of one learner at one settings point."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..datasets import CLASSIFICATION, Dataset, FoldPlan
from .base import EvaluationTimeout, Learner, check_deadline


@dataclass(frozen=True)
class CvScore:
    mean: float
    std: float


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    return float(np.mean(y_true == y_pred))


def r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Coefficient of determination, 1 - SSres/SStot over this fold."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res < 1e-12 else 0.0
    return 1.0 - ss_res / ss_tot


def cross_validate(
    ds: Dataset,
    folds: FoldPlan,
    learner: Learner,
    params: dict,
    deadline_seconds: float | None = None,
    seed: int = 0,
) -> CvScore:
    """Train on all-but-one fold, score the held-out fold, for every fold.

    Scores are accuracy for classification and R^2 for regression; the return
    value is their mean and population std. Raises
    :class:`~perfmap.learners.base.EvaluationTimeout` once wall time passes
    ``deadline_seconds`` (checked between folds and inside the solvers).
    """
    if len(folds.assignments) != ds.n_rows:
        raise ValueError("fold plan does not match the dataset's row count")
    deadline = (
        time.monotonic() + deadline_seconds if deadline_seconds is not None else None
    )
    learner.validate_task(ds)
    X = learner.encode_features(ds)
    y = ds.target
    scorer = accuracy if ds.task == CLASSIFICATION else r_squared
    scores = []
    for fold in range(folds.n_folds):
        check_deadline(deadline)
        train_idx = folds.train_indices(fold)
        test_idx = folds.test_indices(fold)
        X_train, X_test = learner.fold_matrices(X, train_idx, test_idx)
        model = learner.fit(X_train, y[train_idx], ds.task, params, seed, deadline)
        preds = learner.predict(model, X_test)
        scores.append(scorer(y[test_idx], preds))
    check_deadline(deadline)
    arr = np.asarray(scores, dtype=np.float64)
    return CvScore(mean=float(arr.mean()), std=float(arr.std()))
