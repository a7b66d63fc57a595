"""Deterministic test-hook learners (top level so worker processes can pickle)."""

import time
import zlib

import numpy as np

from perfmap.datasets import CLASSIFICATION, Dataset, FeatureMeta
from perfmap.learners import Learner
from perfmap.paramspace import ParamDomain, ParamSpace


def all_zero_dataset(n_rows: int = 40, name: str = "flat") -> Dataset:
    """Every row is class 0; accuracy then equals the predicted-zero fraction."""
    rng = np.random.default_rng(0)
    X = rng.normal(size=(n_rows, 2))
    return Dataset(
        name=name,
        features=X,
        target=np.zeros(n_rows, dtype=np.int64),
        task=CLASSIFICATION,
        feature_meta=(FeatureMeta("f0", "real"), FeatureMeta("f1", "real")),
        class_names=("zero", "one"),
    )


def toy_space(sizes=(4, 5)) -> ParamSpace:
    return ParamSpace(
        domains=tuple(
            ParamDomain(f"p{i}", tuple(range(size))) for i, size in enumerate(sizes)
        )
    )


class LandscapeLearner(Learner):
    """Fitness is a stable hash of the settings: cheap, deterministic, bounded.

    Works on :func:`all_zero_dataset`; the model predicts class 0 for a
    settings-determined fraction of rows, so the CV accuracy approximates that
    fraction regardless of fold boundaries.
    """

    name = "landscape"
    param_names = ()

    def fitness(self, params: dict) -> float:
        key = ";".join(f"{k}={params[k]}" for k in sorted(params))
        return (zlib.crc32(key.encode()) % 1000) / 999.0

    def fit(self, X, y, task, params, seed=0, deadline=None):
        return self.fitness(params)

    def predict(self, model, X):
        n = X.shape[0]
        hits = int(round(model * n))
        out = np.ones(n, dtype=np.int64)
        out[:hits] = 0
        return out


class ConstantLearner(LandscapeLearner):
    """Same fitness at every settings point (exercises tie-break rules)."""

    name = "constant"

    def fitness(self, params: dict) -> float:
        return 0.75


class SleeperLearner(Learner):
    """Sleeps per fold; used to force evaluations past their deadline."""

    name = "sleeper"
    param_names = ()

    def __init__(self, nap_seconds: float = 2.0):
        self.nap_seconds = nap_seconds

    def fit(self, X, y, task, params, seed=0, deadline=None):
        if params.get("sleep", 1):
            time.sleep(self.nap_seconds)
        return 0

    def predict(self, model, X):
        return np.zeros(X.shape[0], dtype=np.int64)
