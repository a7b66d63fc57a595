"""Tabular dataset loading, encoding, standardization and fold planning.

CSV ingestion is schema-driven: every used column is declared categorical,
integer or real, plus one target column and a task kind. Categorical columns
are label-encoded against a lexicographically sorted lexicon; rows carrying a
missing marker ('?' or an empty cell) are dropped and counted. Fold plans are
seeded, round-robin and class-stratified for classification.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

MISSING_MARKERS = frozenset({"?", ""})

CLASSIFICATION = "classification"
REGRESSION = "regression"

COLUMN_KINDS = ("categorical", "integer", "real")


@dataclass(frozen=True)
class FeatureMeta:
    """Provenance of one original column in the encoded feature matrix."""

    name: str
    kind: str  # categorical | integer | real
    categories: tuple[str, ...] | None = None


@dataclass(frozen=True)
class TableSchema:
    """Column kinds, target column and task for one CSV file."""

    columns: dict[str, str]
    target: str
    task: str

    def __post_init__(self) -> None:
        if self.task not in (CLASSIFICATION, REGRESSION):
            raise ValueError(f"unknown task {self.task!r}")
        for col, kind in self.columns.items():
            if kind not in COLUMN_KINDS:
                raise ValueError(f"column {col!r} has unknown kind {kind!r}")
        if self.target in self.columns:
            raise ValueError("target column must not be listed among features")
        if not self.columns:
            raise ValueError("schema declares no feature columns")

    @classmethod
    def from_json_obj(cls, obj: dict, task: str) -> "TableSchema":
        return cls(columns=dict(obj["columns"]), target=obj["target"], task=task)

    def to_json_obj(self) -> dict:
        return {"columns": dict(self.columns), "target": self.target}


@dataclass(frozen=True)
class Dataset:
    """Encoded feature matrix plus target vector for one learning task.

    Immutable after construction; safe to share across concurrent evaluators.
    """

    name: str
    features: np.ndarray  # (n, d) float64
    target: np.ndarray  # (n,) int64 class indices or float64 values
    task: str
    feature_meta: tuple[FeatureMeta, ...]
    class_names: tuple[str, ...] = ()
    dropped_rows: int = 0
    subsampled_from: int | None = None

    def __post_init__(self) -> None:
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if self.features.shape[0] != self.target.shape[0]:
            raise ValueError("features and target row counts differ")
        if self.features.shape[0] < 2:
            raise ValueError("dataset needs at least 2 instances")
        if self.features.shape[1] != len(self.feature_meta):
            raise ValueError("feature_meta does not match feature column count")
        if self.task == CLASSIFICATION:
            if not self.class_names:
                raise ValueError("classification dataset needs class names")
            if self.target.max(initial=0) >= len(self.class_names):
                raise ValueError("class index out of range")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class ColumnStats:
    """Per-column mean / population stddev used by :func:`standardize`."""

    mean: np.ndarray
    std: np.ndarray


@dataclass(frozen=True)
class FoldPlan:
    """Seeded assignment of every instance to one of ``n_folds`` folds."""

    seed: int
    n_folds: int
    assignments: np.ndarray  # (n,) int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def _parse_numeric(raw: str, column: str, kind: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(
            f"non-numeric value {raw!r} in column {column!r} declared {kind}"
        ) from None


def load_csv(path: str | Path, schema: TableSchema, name: str | None = None) -> Dataset:
    """Load one CSV file into an encoded :class:`Dataset`.

    Categorical columns become integer codes in sorted-lexicon order; rows
    containing a missing marker in any used column are dropped (the count is
    kept on the returned dataset).
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc

    col_index = {h: i for i, h in enumerate(header)}
    for col in list(schema.columns) + [schema.target]:
        if col not in col_index:
            raise ValueError(f"{path}: column {col!r} not found in header")

    used = list(schema.columns) + [schema.target]
    kept: list[list[str]] = []
    dropped = 0
    for row in rows:
        cells = [row[col_index[c]].strip() if col_index[c] < len(row) else "" for c in used]
        if any(c in MISSING_MARKERS for c in cells):
            dropped += 1
        else:
            kept.append(cells)
    if len(kept) < 2:
        raise ValueError(f"{path}: fewer than 2 usable rows after cleaning")

    n = len(kept)
    feature_cols = list(schema.columns.items())
    features = np.empty((n, len(feature_cols)), dtype=np.float64)
    meta: list[FeatureMeta] = []
    for j, (col, kind) in enumerate(feature_cols):
        raw = [r[j] for r in kept]
        if kind == "categorical":
            lexicon = tuple(sorted(set(raw)))
            codes = {v: i for i, v in enumerate(lexicon)}
            features[:, j] = [codes[v] for v in raw]
            meta.append(FeatureMeta(col, kind, lexicon))
        else:
            features[:, j] = [_parse_numeric(v, col, kind) for v in raw]
            meta.append(FeatureMeta(col, kind))

    raw_target = [r[-1] for r in kept]
    if schema.task == CLASSIFICATION:
        class_names = tuple(sorted(set(raw_target)))
        mapping = {v: i for i, v in enumerate(class_names)}
        target = np.array([mapping[v] for v in raw_target], dtype=np.int64)
    else:
        class_names = ()
        target = np.array(
            [_parse_numeric(v, schema.target, "real") for v in raw_target],
            dtype=np.float64,
        )

    return Dataset(
        name=name or path.stem,
        features=features,
        target=target,
        task=schema.task,
        feature_meta=tuple(meta),
        class_names=class_names,
        dropped_rows=dropped,
    )


def standardize(
    features: np.ndarray, stats: ColumnStats | None = None
) -> tuple[np.ndarray, ColumnStats]:
    """Column-wise (x - mean) / std; zero-variance columns map to all zeros.

    With ``stats`` supplied (test folds) just applies them; otherwise computes
    population statistics from ``features`` (train folds) and returns them.
    """
    if features.ndim != 2 or features.shape[1] < 1:
        raise ValueError("need a matrix with at least one column")
    if stats is None:
        mean = features.mean(axis=0)
        std = features.std(axis=0)
        stats = ColumnStats(mean=mean, std=std)
    elif stats.mean.shape != (features.shape[1],) or stats.std.shape != (
        features.shape[1],
    ):
        raise ValueError("stats dimension does not match column count")
    safe = np.where(stats.std > 0, stats.std, 1.0)
    out = (features - stats.mean) / safe
    out[:, stats.std == 0] = 0.0
    return out, stats


def standardize_dataset(
    ds: Dataset, stats: ColumnStats | None = None
) -> tuple[Dataset, ColumnStats]:
    """Dataset-level convenience wrapper around :func:`standardize`."""
    features, stats = standardize(ds.features, stats)
    return replace(ds, features=features), stats


def expand_categoricals(ds: Dataset, min_cardinality: int = 3) -> np.ndarray:
    """Feature matrix with wide categorical columns one-hot expanded.

    Categorical columns with at least ``min_cardinality`` categories become one
    indicator column per category (lexicon order); everything else passes
    through unchanged. Used by kernel learners that need magnitude-free
    categorical geometry.
    """
    blocks: list[np.ndarray] = []
    for j, m in enumerate(ds.feature_meta):
        col = ds.features[:, j]
        if m.kind == "categorical" and m.categories and len(m.categories) >= min_cardinality:
            hot = np.zeros((ds.n_rows, len(m.categories)), dtype=np.float64)
            hot[np.arange(ds.n_rows), col.astype(np.int64)] = 1.0
            blocks.append(hot)
        else:
            blocks.append(col[:, None])
    return np.concatenate(blocks, axis=1)


def make_folds(ds: Dataset, n_folds: int, seed: int) -> FoldPlan:
    """Seeded shuffle + round-robin fold plan, class-stratified for classification.

    Fold sizes differ by at most one; for classification, each class is spread
    over consecutive folds so per-fold class counts stay within one of the
    proportional share.
    """
    n = ds.n_rows
    if n_folds < 2 or n_folds > n:
        raise ValueError(f"n_folds must be in [2, {n}], got {n_folds}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    if ds.task == CLASSIFICATION:
        cursor = 0
        shuffled_target = ds.target[perm]
        for cls in range(ds.n_classes):
            members = perm[shuffled_target == cls]
            for idx in members:
                assignments[idx] = cursor % n_folds
                cursor += 1
    else:
        for pos, idx in enumerate(perm):
            assignments[idx] = pos % n_folds
    return FoldPlan(seed=seed, n_folds=n_folds, assignments=assignments)


def subsample(ds: Dataset, n: int, seed: int) -> Dataset:
    """Seeded row subsample (stratified by class for classification)."""
    if n >= ds.n_rows:
        return ds
    if n < 2:
        raise ValueError("subsample needs at least 2 rows")
    rng = np.random.default_rng(seed)
    if ds.task == CLASSIFICATION:
        counts = np.bincount(ds.target, minlength=ds.n_classes)
        exact = counts * (n / ds.n_rows)
        take = np.floor(exact).astype(np.int64)
        # Largest remainders fill the rounding gap.
        for cls in np.argsort(-(exact - take)):
            if take.sum() == n:
                break
            if take[cls] < counts[cls]:
                take[cls] += 1
        picked = []
        for cls in range(ds.n_classes):
            members = np.flatnonzero(ds.target == cls)
            picked.append(rng.permutation(members)[: take[cls]])
        rows = np.sort(np.concatenate(picked))
    else:
        rows = np.sort(rng.permutation(ds.n_rows)[:n])
    return replace(
        ds,
        features=ds.features[rows],
        target=ds.target[rows],
        subsampled_from=ds.n_rows,
    )


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    path: Path
    schema: TableSchema


def load_manifest(path: str | Path) -> dict[str, ManifestEntry]:
    """Parse a dataset manifest: JSON mapping name -> {path, schema, task}."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"manifest {path} is not valid JSON: {exc}") from exc
    entries = {}
    for name, spec in obj.items():
        csv_path = Path(spec["path"])
        if not csv_path.is_absolute():
            csv_path = path.parent / csv_path
        schema = TableSchema.from_json_obj(spec["schema"], task=spec["task"])
        entries[name] = ManifestEntry(name=name, path=csv_path, schema=schema)
    return entries


def load_from_manifest(manifest_path: str | Path, name: str) -> Dataset:
    entries = load_manifest(manifest_path)
    if name not in entries:
        known = ", ".join(sorted(entries))
        raise ValueError(f"dataset {name!r} not in manifest (known: {known})")
    entry = entries[name]
    return load_csv(entry.path, entry.schema, name=entry.name)
