"""CART decision trees for classification (Gini) and regression (variance).

Split search is exact over all observed value boundaries when a feature has at
most ``max_bins`` distinct values; above that the candidate cuts are a
quantile subsample of the observed values. Stored thresholds are midpoints
between adjacent observed values and routing tests ``x <= threshold``. The
impurity decrease of a split is weighted by the node's fraction of the
training set, so the ``min_impurity`` stopping rule is scale-free across the
tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datasets import CLASSIFICATION
from .base import Learner, check_deadline, register_learner


@dataclass(frozen=True)
class DtParams:
    min_impurity_decrease: float
    min_samples_split: int
    max_depth: int

    def __post_init__(self) -> None:
        if self.min_impurity_decrease < 0:
            raise ValueError("min_impurity_decrease must be >= 0")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    @classmethod
    def from_mapping(cls, params: dict) -> "DtParams":
        return cls(
            min_impurity_decrease=float(params["min_impurity"]),
            min_samples_split=int(params["min_samples"]),
            max_depth=int(params["max_depth"]),
        )


@dataclass
class TreeNode:
    """One tree node; internal when ``feature`` is set, else a leaf."""

    n_samples: int
    value: float | int
    feature: int | None = None
    threshold: float = 0.0
    decrease: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class TreeModel:
    root: TreeNode
    task: str
    n_features: int
    params: DtParams

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} feature columns, got {X.shape}"
            )
        dtype = np.int64 if self.task == CLASSIFICATION else np.float64
        out = np.empty(X.shape[0], dtype=dtype)
        self._fill(self.root, X, np.arange(X.shape[0]), out)
        return out

    def _fill(self, node: TreeNode, X, idx, out) -> None:
        if node.is_leaf:
            out[idx] = node.value
            return
        mask = X[idx, node.feature] <= node.threshold
        self._fill(node.left, X, idx[mask], out)
        self._fill(node.right, X, idx[~mask], out)

    def depth(self) -> int:
        def walk(node: TreeNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)


def _bin_features(X: np.ndarray, max_bins: int | None) -> tuple[np.ndarray, list[np.ndarray]]:
    """Per-feature bin indices plus the candidate cut values between bins.

    Cut j separates bins <= j from the rest; its stored value is the midpoint
    between the bin's right edge and the next observed value, so routing by
    ``x <= cut`` reproduces the grouping the split scan counted.
    """
    n, d = X.shape
    bins = np.empty((n, d), dtype=np.int64)
    cuts: list[np.ndarray] = []
    for f in range(d):
        uniq = np.unique(X[:, f])
        if max_bins is not None and len(uniq) > max_bins:
            pick = np.unique(
                np.round(np.linspace(0, len(uniq) - 1, max_bins)).astype(np.int64)
            )
            edges = uniq[pick]
            next_up = uniq[np.minimum(pick[:-1] + 1, len(uniq) - 1)]
        else:
            edges = uniq
            next_up = uniq[1:]
        bins[:, f] = np.searchsorted(edges, X[:, f], side="left")
        cuts.append((edges[:-1] + next_up) / 2.0)
    return bins, cuts


def _gini(counts: np.ndarray) -> float:
    m = counts.sum()
    if m == 0:
        return 0.0
    p = counts / m
    return float(1.0 - np.dot(p, p))


class _Builder:
    """Split-search state shared by every node of one training run."""

    def __init__(self, X, y, task, params: DtParams, max_bins, deadline):
        self.y = y
        self.task = task
        self.params = params
        self.deadline = deadline
        self.n_root = X.shape[0]
        self.d = X.shape[1]
        self.bins, self.cuts = _bin_features(X, max_bins)
        self.k_max = max(len(c) + 1 for c in self.cuts)
        self.n_classes = 1
        if task == CLASSIFICATION:
            self.n_classes = int(y.max()) + 1
            self.y_int = y.astype(np.int64)
        # Per-feature flattened key offsets for the single-bincount split scan.
        self.offsets = (np.arange(self.d) * self.k_max * self.n_classes)[None, :]

    def build(self) -> TreeNode:
        root = self._leaf(np.arange(self.n_root))
        stack = [(root, np.arange(self.n_root), 0)]
        while stack:
            check_deadline(self.deadline)
            node, idx, depth = stack.pop()
            if not self._may_split(idx, depth):
                continue
            split = self._best_split(idx)
            if split is None or split[2] < self.params.min_impurity_decrease:
                continue
            f, cut, decrease = split
            go_left = self.bins[idx, f] <= cut
            node.feature = f
            node.threshold = float(self.cuts[f][cut])
            node.decrease = decrease
            node.left = self._leaf(idx[go_left])
            node.right = self._leaf(idx[~go_left])
            stack.append((node.left, idx[go_left], depth + 1))
            stack.append((node.right, idx[~go_left], depth + 1))
        return root

    def _leaf(self, idx: np.ndarray) -> TreeNode:
        y = self.y[idx]
        if self.task == CLASSIFICATION:
            counts = np.bincount(y.astype(np.int64), minlength=self.n_classes)
            value = int(np.argmax(counts))  # majority; ties -> lowest class index
        else:
            value = float(y.mean())
        return TreeNode(n_samples=len(idx), value=value)

    def _may_split(self, idx: np.ndarray, depth: int) -> bool:
        if depth >= self.params.max_depth or len(idx) < self.params.min_samples_split:
            return False
        y = self.y[idx]
        if self.task == CLASSIFICATION:
            return bool(np.bincount(self.y_int[idx]).max() < len(idx))
        return bool(y.min() < y.max())

    def _best_split(self, idx: np.ndarray):
        if self.k_max < 2:
            return None  # no feature has two distinct values anywhere
        if self.task == CLASSIFICATION:
            return self._best_split_gini(idx)
        return self._best_split_variance(idx)

    def _best_split_gini(self, idx: np.ndarray):
        m = len(idx)
        c = self.n_classes
        keys = self.offsets + self.bins[idx] * c + self.y_int[idx, None]
        counts = np.bincount(keys.ravel(), minlength=self.d * self.k_max * c)
        counts = counts.reshape(self.d, self.k_max, c).astype(np.float64)
        left = np.cumsum(counts, axis=1)[:, :-1, :]  # cut after bin j, j < k_max-1
        total = counts.sum(axis=1)[:, None, :]
        right = total - left
        nl = left.sum(axis=2)
        nr = m - nl
        gl = 1.0 - (left**2).sum(axis=2) / np.maximum(nl, 1) ** 2
        gr = 1.0 - (right**2).sum(axis=2) / np.maximum(nr, 1) ** 2
        child = (nl * gl + nr * gr) / m
        parent = _gini(np.bincount(self.y_int[idx], minlength=c).astype(np.float64))
        gains = (m / self.n_root) * (parent - child)
        # A split can never truly raise impurity; negatives are rounding noise,
        # and exact-zero gains must stay eligible (they can unlock purity).
        np.maximum(gains, 0.0, out=gains)
        gains[(nl == 0) | (nr == 0)] = -np.inf
        return self._pick(gains)

    def _best_split_variance(self, idx: np.ndarray):
        m = len(idx)
        y = self.y[idx]
        keys = (self.offsets + self.bins[idx]).ravel()
        size = self.d * self.k_max
        rep = np.repeat(y, self.d)  # matches the row-major key layout
        cnt = np.bincount(keys, minlength=size).reshape(self.d, self.k_max)
        sy = np.bincount(keys, weights=rep, minlength=size)
        syy = np.bincount(keys, weights=rep * rep, minlength=size)
        sy = sy.reshape(self.d, self.k_max)
        syy = syy.reshape(self.d, self.k_max)
        nl = np.cumsum(cnt, axis=1)[:, :-1].astype(np.float64)
        syl = np.cumsum(sy, axis=1)[:, :-1]
        syyl = np.cumsum(syy, axis=1)[:, :-1]
        nr = m - nl
        syr = y.sum() - syl
        syyr = (y * y).sum() - syyl
        var_l = syyl / np.maximum(nl, 1) - (syl / np.maximum(nl, 1)) ** 2
        var_r = syyr / np.maximum(nr, 1) - (syr / np.maximum(nr, 1)) ** 2
        child = (nl * np.maximum(var_l, 0) + nr * np.maximum(var_r, 0)) / m
        parent = float(y.var())
        gains = (m / self.n_root) * (parent - child)
        np.maximum(gains, 0.0, out=gains)
        gains[(nl == 0) | (nr == 0)] = -np.inf
        return self._pick(gains)

    def _pick(self, gains: np.ndarray):
        # Row-major argmax: ties resolve to the lowest feature index, then the
        # lowest threshold.
        flat = int(np.argmax(gains))
        best = gains.ravel()[flat]
        if not np.isfinite(best):
            return None  # no cut leaves both sides non-empty
        f, cut = divmod(flat, gains.shape[1])
        return f, cut, float(best)


def train_tree(
    X: np.ndarray,
    y: np.ndarray,
    task: str,
    params: DtParams,
    max_bins: int | None = 256,
    deadline: float | None = None,
) -> TreeModel:
    """Greedy CART induction; see the module docstring for split semantics."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("training partition needs at least 2 rows")
    y = np.asarray(y)
    if len(y) != X.shape[0]:
        raise ValueError("feature rows and target length differ")
    root = _Builder(X, y, task, params, max_bins, deadline).build()
    return TreeModel(root=root, task=task, n_features=X.shape[1], params=params)


@register_learner
class DecisionTreeLearner(Learner):
    """CART with the three exposed knobs: min_impurity, min_samples, max_depth."""

    name = "dt"
    param_names = ("min_impurity", "min_samples", "max_depth")

    def __init__(self, max_bins: int | None = 256):
        self.max_bins = max_bins

    def fit(self, X, y, task, params, seed=0, deadline=None) -> TreeModel:
        return train_tree(
            X, y, task, DtParams.from_mapping(params), self.max_bins, deadline
        )
