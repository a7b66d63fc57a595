"""Kernel SVMs solved by pairwise coordinate ascent (SMO) on the dual.

Both solvers select the maximal violating pair each round: classification on
the soft-margin dual over ``alpha`` in [0, C] with the class-balance
constraint, regression on the epsilon-insensitive dual over net coefficients
``beta`` in [-C, C] (the pair subproblem there is a piecewise quadratic with
kinks where either coefficient crosses zero, minimized exactly per segment).
Selection works on bias-free expansions, so the bias never perturbs the
working set; iteration stops once no pair violates the KKT conditions beyond
tolerance, and the bias is recovered from the final KKT window.

Kernels: linear, cubic poly (coef0 0), rbf, sigmoid (coef0 0).
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from ..datasets import CLASSIFICATION, Dataset, expand_categoricals, standardize
from .base import Learner, check_deadline, register_learner

KERNELS = ("linear", "poly", "rbf", "sigmoid")
POLY_DEGREE = 3
SVR_EPSILON = 0.1
DEFAULT_TOL = 1e-3

_SNAP = 1e-10  # relative snap of coefficients onto their box bounds


def resolve_gamma(mode: str | float, X: np.ndarray) -> float:
    """Numeric kernel width: 'scale' = 1/(d * var(X)), 'auto' = 1/d."""
    d = X.shape[1]
    if isinstance(mode, (int, float)):
        return float(mode)
    if mode == "auto":
        return 1.0 / d
    if mode == "scale":
        var = float(X.var())
        return 1.0 / (d * var) if var > 0 else 1.0 / d
    raise ValueError(f"unknown gamma mode {mode!r}")


def kernel_matrix(kind: str, gamma: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "poly":
        return (gamma * (A @ B.T)) ** POLY_DEGREE
    if kind == "rbf":
        sq = (
            (A * A).sum(axis=1)[:, None]
            + (B * B).sum(axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    if kind == "sigmoid":
        return np.tanh(gamma * (A @ B.T))
    raise ValueError(f"unknown kernel {kind!r}")


class _KernelTable:
    """Training-time kernel rows: full Gram for small n, an LRU cache above."""

    def __init__(self, X, kind, gamma, full_limit=4096, cache_capacity=256):
        self.X = X
        self.kind = kind
        self.gamma = gamma
        n = X.shape[0]
        if n <= full_limit:
            self.gram = kernel_matrix(kind, gamma, X, X)
        else:
            self.gram = None
            self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
            self._capacity = cache_capacity

    def row(self, i: int) -> np.ndarray:
        if self.gram is not None:
            return self.gram[i]
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        row = kernel_matrix(self.kind, self.gamma, self.X[i : i + 1], self.X)[0]
        self._rows[i] = row
        if len(self._rows) > self._capacity:
            self._rows.popitem(last=False)
        return row

    def entry(self, i: int, j: int) -> float:
        if self.gram is not None:
            return float(self.gram[i, j])
        return float(self.row(i)[j])


@dataclass(frozen=True)
class SvmParams:
    gamma: str | float
    kernel: str
    c_value: float

    def __post_init__(self) -> None:
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if isinstance(self.gamma, str) and self.gamma not in ("scale", "auto"):
            raise ValueError(f"unknown gamma mode {self.gamma!r}")
        if self.c_value <= 0:
            raise ValueError("C must be positive")

    @classmethod
    def from_mapping(cls, params: dict) -> "SvmParams":
        gamma = params["gamma"]
        if not isinstance(gamma, str):
            gamma = float(gamma)
        return cls(gamma=gamma, kernel=str(params["kernel"]), c_value=float(params["C"]))


@dataclass
class SvmClassifierModel:
    """Binary classifier: sign of the kernel expansion maps to class 1/0."""

    kernel: str
    gamma: float
    c_value: float
    support_vectors: np.ndarray
    coef: np.ndarray  # alpha_i * y_i over support vectors
    bias: float
    train_alpha: np.ndarray
    train_y_pm: np.ndarray
    constant_class: int | None = None

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.constant_class is not None:
            return np.full(X.shape[0], 1.0 if self.constant_class == 1 else -1.0)
        if len(self.coef) == 0:
            return np.full(X.shape[0], self.bias)
        return kernel_matrix(self.kernel, self.gamma, X, self.support_vectors) @ self.coef + self.bias

    def predict(self, X: np.ndarray) -> np.ndarray:
        # A decision value of exactly zero resolves to class index 1.
        return (self.decision_function(X) >= 0.0).astype(np.int64)


@dataclass
class SvrModel:
    """Epsilon-SVR: prediction is the raw kernel expansion value."""

    kernel: str
    gamma: float
    c_value: float
    epsilon: float
    support_vectors: np.ndarray
    coef: np.ndarray  # net beta_i over support vectors
    bias: float
    train_beta: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if len(self.coef) == 0:
            return np.full(X.shape[0], self.bias)
        return kernel_matrix(self.kernel, self.gamma, X, self.support_vectors) @ self.coef + self.bias


class _SmoClassifier:
    """Pairwise dual ascent with maximal-violating-pair selection.

    Works on the bias-free expansion ``F_i = sum_j alpha_j y_j K_ij``; the
    quantity ``V_i = y_i - F_i`` bounds the admissible bias from below over the
    can-increase set and from above over the can-decrease set, so the solver
    stops once the largest lower bound exceeds the smallest upper bound by at
    most tol and takes the bias as the window midpoint (per-point KKT
    violations are then within tol/2).
    """

    def __init__(self, K: _KernelTable, y_pm, C, tol, deadline):
        self.K = K
        self.y = y_pm
        self.C = C
        self.tol = tol
        self.deadline = deadline
        n = len(y_pm)
        self.n = n
        self.alpha = np.zeros(n)
        self.F = np.zeros(n)  # kernel expansion without bias

    def _bound_masks(self) -> tuple[np.ndarray, np.ndarray]:
        pos, neg = self.y > 0, self.y < 0
        can_up = (pos & (self.alpha < self.C)) | (neg & (self.alpha > 0.0))
        can_down = (pos & (self.alpha > 0.0)) | (neg & (self.alpha < self.C))
        return can_up, can_down

    def solve(self) -> tuple[np.ndarray, float]:
        blocked = np.zeros(self.n, dtype=bool)
        rounds = 0
        cap = 500 * self.n + 10_000
        while rounds < cap:
            rounds += 1
            if rounds % 64 == 0:
                check_deadline(self.deadline)
            can_up, can_down = self._bound_masks()
            v = self.y - self.F
            up = np.where(can_up & ~blocked, v, -np.inf)
            down = np.where(can_down, v, np.inf)
            i = int(np.argmax(up))
            j = int(np.argmin(down))
            if not np.isfinite(up[i]) or not np.isfinite(down[j]):
                break
            if up[i] - down[j] <= self.tol:
                break  # KKT gap closed
            if self._step(i, j):
                blocked[:] = False
                continue
            moved = False
            for j2 in np.argsort(down)[:8]:
                j2 = int(j2)
                if not np.isfinite(down[j2]) or j2 == j:
                    continue
                if self._step(i, j2):
                    moved = True
                    break
            if moved:
                blocked[:] = False
            else:
                blocked[i] = True
        return self.alpha, self._final_bias()

    def _final_bias(self) -> float:
        can_up, can_down = self._bound_masks()
        v = self.y - self.F
        lo = v[can_up].max() if can_up.any() else 0.0
        hi = v[can_down].min() if can_down.any() else 0.0
        if not can_up.any():
            return float(hi)
        if not can_down.any():
            return float(lo)
        return float(0.5 * (lo + hi))

    def _step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        s = y1 * y2
        if s > 0:
            L, H = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        else:
            L, H = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        if H - L < 1e-12:
            return False
        k11 = self.K.entry(i1, i1)
        k12 = self.K.entry(i1, i2)
        k22 = self.K.entry(i2, i2)
        eta = k11 + k22 - 2.0 * k12
        # Bias-free error difference: (F1 - y1) - (F2 - y2).
        e_diff = (self.F[i1] - y1) - (self.F[i2] - y2)
        if eta > 1e-15:
            a2_new = float(np.clip(a2 + y2 * e_diff / eta, L, H))
        else:
            # Flat or indefinite direction: compare the dual objective at the
            # two clip ends and move to the better one.
            a2_new = self._better_end(i1, i2, L, H, k11, k12, k22)
            if a2_new is None:
                return False
        snap = _SNAP * max(self.C, 1.0)
        if abs(a2_new - a2) < snap:
            return False
        a1_new = a1 + s * (a2 - a2_new)
        a1_new = min(max(a1_new, 0.0), self.C)
        if a1_new < snap:
            a1_new = 0.0
        elif a1_new > self.C - snap:
            a1_new = self.C
        if a2_new < snap:
            a2_new = 0.0
        elif a2_new > self.C - snap:
            a2_new = self.C
        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        self.F += d1 * self.K.row(i1) + d2 * self.K.row(i2)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        return True

    def _better_end(self, i1, i2, L, H, k11, k12, k22):
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        s = y1 * y2
        gamma_sum = a1 + s * a2
        # Kernel expansion minus this pair's own contributions.
        v1 = self.F[i1] - y1 * a1 * k11 - y2 * a2 * k12
        v2 = self.F[i2] - y1 * a1 * k12 - y2 * a2 * k22

        def objective(t: float) -> float:
            u = gamma_sum - s * t  # paired alpha_1 value
            return (
                u
                + t
                - 0.5 * k11 * u * u
                - 0.5 * k22 * t * t
                - s * k12 * u * t
                - y1 * u * v1
                - y2 * t * v2
            )

        obj_l, obj_h = objective(L), objective(H)
        margin = 1e-10 * (1.0 + abs(obj_l) + abs(obj_h))
        if obj_l > obj_h + margin:
            return L
        if obj_h > obj_l + margin:
            return H
        return None


class _SmoRegressor:
    def __init__(self, K: _KernelTable, y, C, epsilon, tol, deadline):
        self.K = K
        self.y = y
        self.C = C
        self.eps = epsilon
        self.tol = tol
        self.deadline = deadline
        n = len(y)
        self.n = n
        self.beta = np.zeros(n)
        self.b = float(np.mean(y))
        self.E = self.b - y.astype(np.float64)  # f - y with f == b

    def solve(self) -> tuple[np.ndarray, float]:
        """Maximal-violating-pair iteration until the KKT gap is within tol.

        Each round picks the steepest feasible up-move i and down-move j by
        the one-sided subgradients of the epsilon-insensitive dual, then
        solves that pair exactly. The bias cancels in the gap, so selection
        is unaffected by its running estimate.
        """
        blocked = np.zeros(self.n, dtype=bool)
        rounds = 0
        cap = 500 * self.n + 10_000
        while rounds < cap:
            rounds += 1
            if rounds % 64 == 0:
                check_deadline(self.deadline)
            sign_up = np.where(self.beta >= 0.0, 1.0, -1.0)
            sign_down = np.where(self.beta > 0.0, 1.0, -1.0)
            up = self.E + self.eps * sign_up
            down = self.E + self.eps * sign_down
            up[(self.beta >= self.C) | blocked] = np.inf
            down[self.beta <= -self.C] = -np.inf
            i = int(np.argmin(up))
            j = int(np.argmax(down))
            if not np.isfinite(up[i]) or not np.isfinite(down[j]):
                break
            if up[i] - down[j] >= -self.tol:
                break  # no pair violates KKT beyond tolerance
            if self._step(i, j):
                blocked[:] = False
                continue
            # Flat pairing (eta <= 0 degeneracies): try the next-best partners
            # before retiring i until some other pair makes progress.
            moved = False
            for j2 in np.argsort(-down)[:8]:
                j2 = int(j2)
                if not np.isfinite(down[j2]) or j2 == j:
                    continue
                if self._step(i, j2):
                    moved = True
                    break
            if moved:
                blocked[:] = False
            else:
                blocked[i] = True
        self._refit_bias()
        return self.beta, self.b

    def _interior(self) -> np.ndarray:
        a = np.abs(self.beta)
        return np.flatnonzero((a > 0.0) & (a < self.C))

    def _violated(self, i: int) -> bool:
        bi, Ei = self.beta[i], self.E[i]
        tol, eps = self.tol, self.eps
        if bi < self.C and Ei < -eps - tol:
            return True
        if bi > -self.C and Ei > eps + tol:
            return True
        if bi > 0.0 and Ei > -eps + tol:
            return True
        if bi < 0.0 and Ei < eps - tol:
            return True
        return False

    def _step(self, i: int, j: int) -> bool:
        if i == j:
            return False
        C, eps = self.C, self.eps
        bi, bj = self.beta[i], self.beta[j]
        gamma_sum = bi + bj
        lo = max(-C, gamma_sum - C)
        hi = min(C, gamma_sum + C)
        if hi - lo < 1e-12:
            return False
        kii = self.K.entry(i, i)
        kjj = self.K.entry(j, j)
        kij = self.K.entry(i, j)
        eta = kii + kjj - 2.0 * kij
        # Linear parts of the pair objective, bias-free (constant on the line).
        ci = self.E[i] - bi * kii - bj * kij
        cj = self.E[j] - bj * kjj - bi * kij

        def w(t: float) -> float:
            u = gamma_sum - t
            return (
                0.5 * kii * t * t
                + 0.5 * kjj * u * u
                + kij * t * u
                + ci * t
                + cj * u
                + eps * (abs(t) + abs(u))
            )

        breaks = sorted({lo, hi} | {p for p in (0.0, gamma_sum) if lo < p < hi})
        candidates = list(breaks)
        if eta > 1e-15:
            for a, b in zip(breaks[:-1], breaks[1:]):
                mid = 0.5 * (a + b)
                si = 1.0 if mid > 0 else -1.0
                sj = 1.0 if (gamma_sum - mid) > 0 else -1.0
                t_star = bi + (self.E[j] - self.E[i] - eps * (si - sj)) / eta
                if a < t_star < b:
                    candidates.append(t_star)
        w0 = w(bi)
        best_t, best_w = bi, w0
        for t in candidates:
            wt = w(t)
            if wt < best_w - 1e-12 * (1.0 + abs(w0)):
                best_t, best_w = t, wt
        snap = _SNAP * max(C, 1.0)
        if abs(best_t - bi) < snap:
            return False
        bi_new = best_t
        bj_new = gamma_sum - best_t
        bi_new = self._snap(bi_new)
        bj_new = self._snap(bj_new)
        di = bi_new - bi
        dj = bj_new - bj
        self.E += di * self.K.row(i) + dj * self.K.row(j)
        self.beta[i], self.beta[j] = bi_new, bj_new
        targets = []
        for idx, val in ((i, bi_new), (j, bj_new)):
            if 0.0 < val < C:
                targets.append(-eps - self.E[idx])
            elif -C < val < 0.0:
                targets.append(eps - self.E[idx])
        if targets:
            db = float(np.mean(targets))
        else:
            db = self._bound_correction(i, bi_new) + self._bound_correction(j, bj_new)
            db *= 0.5
        if db != 0.0:
            self.E += db
            self.b += db
        return True

    def _snap(self, val: float) -> float:
        snap = _SNAP * max(self.C, 1.0)
        if abs(val) < snap:
            return 0.0
        if val > self.C - snap:
            return self.C
        if val < -self.C + snap:
            return -self.C
        return val

    def _bound_correction(self, idx: int, val: float) -> float:
        E, eps = self.E[idx], self.eps
        if val == 0.0:
            if E < -eps:
                return -eps - E
            if E > eps:
                return eps - E
            return 0.0
        if val >= self.C:
            return min(0.0, -eps - E)
        return max(0.0, eps - E)

    def _refit_bias(self) -> None:
        interior = self._interior()
        if len(interior) > 0:
            db = float(np.mean(-np.sign(self.beta[interior]) * self.eps - self.E[interior]))
        else:
            lowers, uppers = [], []
            for idx in range(self.n):
                val, E = self.beta[idx], self.E[idx]
                if val >= self.C:
                    uppers.append(-self.eps - E)
                elif val <= -self.C:
                    lowers.append(self.eps - E)
                else:
                    lowers.append(-self.eps - E)
                    uppers.append(self.eps - E)
            lo = max(lowers) if lowers else 0.0
            hi = min(uppers) if uppers else 0.0
            db = 0.5 * (lo + hi)
        if db != 0.0:
            self.E += db
            self.b += db


def train_svm_classifier(
    X: np.ndarray,
    y: np.ndarray,
    params: SvmParams,
    tol: float = DEFAULT_TOL,
    deadline: float | None = None,
) -> SvmClassifierModel:
    """Soft-margin SMO on class indices {0, 1} (mapped internally to -1/+1)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    _check_trainable(X, y)
    classes = np.unique(y)
    if not np.isin(classes, (0, 1)).all():
        raise ValueError("classification targets must be class indices 0/1")
    gamma = resolve_gamma(params.gamma, X)
    if len(classes) == 1:
        return SvmClassifierModel(
            kernel=params.kernel,
            gamma=gamma,
            c_value=params.c_value,
            support_vectors=X[:0],
            coef=np.zeros(0),
            bias=0.0,
            train_alpha=np.zeros(len(y)),
            train_y_pm=np.where(y == 1, 1.0, -1.0),
            constant_class=int(classes[0]),
        )
    y_pm = np.where(y == 1, 1.0, -1.0)
    table = _KernelTable(X, params.kernel, gamma)
    solver = _SmoClassifier(table, y_pm, params.c_value, tol, deadline)
    alpha, bias = solver.solve()
    sv = alpha > 0.0
    return SvmClassifierModel(
        kernel=params.kernel,
        gamma=gamma,
        c_value=params.c_value,
        support_vectors=X[sv],
        coef=(alpha * y_pm)[sv],
        bias=bias,
        train_alpha=alpha,
        train_y_pm=y_pm,
    )


def train_svm_regressor(
    X: np.ndarray,
    y: np.ndarray,
    params: SvmParams,
    epsilon: float = SVR_EPSILON,
    tol: float = DEFAULT_TOL,
    deadline: float | None = None,
) -> SvrModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_trainable(X, y)
    gamma = resolve_gamma(params.gamma, X)
    table = _KernelTable(X, params.kernel, gamma)
    solver = _SmoRegressor(table, y, params.c_value, epsilon, tol, deadline)
    beta, bias = solver.solve()
    sv = beta != 0.0
    return SvrModel(
        kernel=params.kernel,
        gamma=gamma,
        c_value=params.c_value,
        epsilon=epsilon,
        support_vectors=X[sv],
        coef=beta[sv],
        bias=bias,
        train_beta=beta,
    )


def _check_trainable(X: np.ndarray, y: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("training partition needs at least 2 rows")
    if len(y) != X.shape[0]:
        raise ValueError("feature rows and target length differ")
    if np.ptp(X, axis=0).max(initial=0.0) == 0.0:
        raise ValueError("all training rows are identical")


@register_learner
class SvmLearner(Learner):
    """SVM with the three exposed knobs: gamma mode, kernel, C.

    Wide categorical columns are one-hot expanded and every column is
    standardized with train-fold statistics before the kernel sees it.
    """

    name = "svm"
    param_names = ("gamma", "kernel", "C")

    def __init__(self, tol: float = DEFAULT_TOL, epsilon: float = SVR_EPSILON):
        self.tol = tol
        self.epsilon = epsilon

    def validate_task(self, ds: Dataset) -> None:
        if ds.task == CLASSIFICATION and ds.n_classes != 2:
            raise ValueError("SVM classification supports binary targets only")

    def encode_features(self, ds: Dataset) -> np.ndarray:
        return expand_categoricals(ds)

    def fold_matrices(self, X, train_idx, test_idx):
        train, stats = standardize(X[train_idx])
        test, _ = standardize(X[test_idx], stats)
        return train, test

    def fit(self, X, y, task, params, seed=0, deadline=None):
        p = SvmParams.from_mapping(params)
        if task == CLASSIFICATION:
            return train_svm_classifier(X, y, p, self.tol, deadline)
        return train_svm_regressor(X, y, p, self.epsilon, self.tol, deadline)
