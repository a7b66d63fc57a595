"""Common learner interface, registry and the evaluation deadline signal."""

from __future__ import annotations

import time

import numpy as np

from ..datasets import Dataset
from ..paramspace import ParamSpace, builtin_space


class EvaluationTimeout(Exception):
    """Raised when an evaluation runs past its wall-clock deadline."""


def check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise EvaluationTimeout("evaluation exceeded its deadline")


class Learner:
    """Train/predict pair behind a uniform interface.

    Subclasses may override the feature hooks: ``encode_features`` maps a
    dataset to the matrix this learner trains on, and ``fold_matrices``
    applies any train-fitted per-fold transform (e.g. standardization) so
    nothing leaks from held-out rows.
    """

    name = "base"
    param_names: tuple[str, ...] = ()

    def default_space(self) -> ParamSpace:
        return builtin_space(self.name)

    def validate_task(self, ds: Dataset) -> None:
        """Raise if this learner cannot train on the dataset's task."""

    def encode_features(self, ds: Dataset) -> np.ndarray:
        return ds.features

    def fold_matrices(
        self, X: np.ndarray, train_idx: np.ndarray, test_idx: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        return X[train_idx], X[test_idx]

    def fit(
        self,
        X: np.ndarray,
        y: np.ndarray,
        task: str,
        params: dict,
        seed: int = 0,
        deadline: float | None = None,
    ):
        raise NotImplementedError

    def predict(self, model, X: np.ndarray) -> np.ndarray:
        return model.predict(X)


_REGISTRY: dict[str, type[Learner]] = {}


def register_learner(cls: type[Learner]) -> type[Learner]:
    _REGISTRY[cls.name] = cls
    return cls


def get_learner(name: str) -> Learner:
    try:
        return _REGISTRY[name.lower()]()
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise ValueError(f"unknown learner {name!r} (known: {known})") from None


def learner_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))
