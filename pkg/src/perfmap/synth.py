"""Seeded desk-scale replica datasets mirroring four classic UCI table shapes.

The real archives cannot be bundled, so these generators produce deterministic
stand-ins with the same row counts, column kinds and difficulty profile:

* ``mushrooms-like``: 8124 rows, 22 categorical columns, binary target that is
  a deterministic rule of two columns (perfectly learnable).
* ``votes-like``: 435 rows, 16 binary categorical columns, party-style target
  driven by a handful of key columns plus label noise (high but imperfect
  ceiling).
* ``diabetes-like``: 769 rows, 8 numeric columns, overlapping classes with a
  moderate Bayes ceiling.
* ``abalone-like``: 4177 rows, 1 categorical + 7 numeric columns, regression
  target with a nonlinear latent driver and a bounded noise floor.

``write_corpus`` materializes any of them as CSV files plus a dataset manifest
so the normal loading path (and the CLI) can be exercised end to end.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .datasets import CLASSIFICATION, REGRESSION, Dataset, TableSchema, load_csv

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _cat(pick: np.ndarray) -> list[str]:
    return [_LETTERS[int(v)] for v in pick]


def mushrooms_like(n_rows: int = 8124, seed: int = 7) -> tuple[list[dict], TableSchema]:
    """Categorical binary table whose label is an exact rule of two columns."""
    rng = np.random.default_rng(seed)
    cards = [6, 4, 10, 2, 9, 2, 2, 2, 12, 2, 5, 4, 4, 9, 9, 2, 3, 5, 9, 6, 6, 7]
    names = [f"attr{i:02d}" for i in range(len(cards))]
    odor = rng.integers(0, 9, size=n_rows)  # attr04
    spore = rng.integers(0, 12, size=n_rows)  # attr08
    label = (odor <= 3) | ((odor <= 6) & (spore >= 7))
    columns: dict[str, list[str]] = {}
    for name, card in zip(names, cards):
        if name == "attr04":
            columns[name] = _cat(odor)
        elif name == "attr08":
            columns[name] = _cat(spore)
        else:
            # Weakly label-correlated noise so maps are not flat.
            base = rng.integers(0, card, size=n_rows)
            shift = (base + label.astype(np.int64)) % card
            use_shift = rng.random(n_rows) < 0.3
            columns[name] = _cat(np.where(use_shift, shift, base))
    rows = [
        {**{n: columns[n][i] for n in names}, "class": "p" if label[i] else "e"}
        for i in range(n_rows)
    ]
    schema = TableSchema(
        columns={n: "categorical" for n in names}, target="class", task=CLASSIFICATION
    )
    return rows, schema


def votes_like(n_rows: int = 435, seed: int = 11) -> tuple[list[dict], TableSchema]:
    """Two-party vote table: key votes track the party, labels carry noise."""
    rng = np.random.default_rng(seed)
    names = [f"vote{i:02d}" for i in range(16)]
    party = rng.random(n_rows) < 0.61
    key_votes = {0, 2, 5, 9, 12}
    columns: dict[str, np.ndarray] = {}
    for i, name in enumerate(names):
        flip_p = 0.08 if i in key_votes else 0.35
        flips = rng.random(n_rows) < flip_p
        columns[name] = party ^ flips
    label = party ^ (rng.random(n_rows) < 0.04)
    rows = [
        {
            **{n: ("y" if columns[n][i] else "n") for n in names},
            "party": "democrat" if label[i] else "republican",
        }
        for i in range(n_rows)
    ]
    schema = TableSchema(
        columns={n: "categorical" for n in names}, target="party", task=CLASSIFICATION
    )
    return rows, schema


def diabetes_like(n_rows: int = 769, seed: int = 13) -> tuple[list[dict], TableSchema]:
    """Numeric binary table with overlapping classes and a moderate ceiling."""
    rng = np.random.default_rng(seed)
    names = [f"meas{i}" for i in range(8)]
    x = rng.normal(size=(n_rows, 8))
    x[:, 0] = 120 + 30 * x[:, 0]  # glucose-like scale
    x[:, 1] = 32 + 7 * x[:, 1]  # bmi-like
    x[:, 2] = 33 + 11 * np.abs(x[:, 2])  # age-like, skewed
    x[:, 3:] = 50 + 15 * x[:, 3:]
    risk = (
        0.032 * (x[:, 0] - 120)
        + 0.09 * (x[:, 1] - 32)
        + 0.045 * (x[:, 2] - 33)
        + rng.normal(scale=1.15, size=n_rows)
    )
    label = risk > 0.45
    rows = [
        {
            **{n: f"{x[i, j]:.3f}" for j, n in enumerate(names)},
            "outcome": "pos" if label[i] else "neg",
        }
        for i in range(n_rows)
    ]
    schema = TableSchema(
        columns={n: "real" for n in names}, target="outcome", task=CLASSIFICATION
    )
    return rows, schema


def abalone_like(n_rows: int = 4177, seed: int = 17) -> tuple[list[dict], TableSchema]:
    """Mixed-kind regression table driven by one nonlinear latent size."""
    rng = np.random.default_rng(seed)
    sex = rng.integers(0, 3, size=n_rows)  # 0=F 1=I 2=M
    size = np.clip(rng.beta(2.4, 1.8, size=n_rows), 0.02, None)
    size = np.where(sex == 1, size * 0.72, size)  # infants run small
    length = np.clip(size * 0.78 + rng.normal(scale=0.035, size=n_rows), 0.01, None)
    diameter = np.clip(length * 0.80 + rng.normal(scale=0.02, size=n_rows), 0.01, None)
    height = np.clip(size * 0.28 + rng.normal(scale=0.02, size=n_rows), 0.005, None)
    whole = np.clip(1.9 * size**2.1 + rng.normal(scale=0.08, size=n_rows), 0.003, None)
    shucked = np.clip(whole * 0.43 + rng.normal(scale=0.05, size=n_rows), 0.001, None)
    viscera = np.clip(whole * 0.22 + rng.normal(scale=0.03, size=n_rows), 0.001, None)
    shell = np.clip(whole * 0.28 + rng.normal(scale=0.04, size=n_rows), 0.001, None)
    rings = np.rint(
        3.0
        + 11.5 * size**1.35
        + 1.1 * (sex == 0)
        + 0.9 * (sex == 2)
        + rng.normal(scale=2.35, size=n_rows)
    )
    rings = np.clip(rings, 1, 29).astype(np.int64)
    sex_label = np.array(["F", "I", "M"])[sex]
    names = ["sex", "length", "diameter", "height", "whole", "shucked", "viscera", "shell"]
    numeric = [length, diameter, height, whole, shucked, viscera, shell]
    rows = []
    for i in range(n_rows):
        row = {"sex": sex_label[i]}
        for name, col in zip(names[1:], numeric):
            row[name] = f"{col[i]:.4f}"
        row["rings"] = str(int(rings[i]))
        rows.append(row)
    schema = TableSchema(
        columns={"sex": "categorical", **{n: "real" for n in names[1:]}},
        target="rings",
        task=REGRESSION,
    )
    return rows, schema


GENERATORS = {
    "mushrooms-like": mushrooms_like,
    "votes-like": votes_like,
    "diabetes-like": diabetes_like,
    "abalone-like": abalone_like,
}


def write_csv(rows: list[dict], path: Path) -> None:
    header = list(rows[0].keys())
    lines = [",".join(header)]
    lines += [",".join(str(r[h]) for h in header) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_corpus(directory: str | Path, names: tuple[str, ...] | None = None) -> Path:
    """Write replica CSVs plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, dict] = {}
    for name in names or tuple(GENERATORS):
        rows, schema = GENERATORS[name]()
        csv_name = f"{name.replace('-', '_')}.csv"
        write_csv(rows, directory / csv_name)
        manifest[name] = {
            "path": csv_name,
            "task": schema.task,
            "schema": schema.to_json_obj(),
        }
    manifest_path = directory / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def generate(name: str) -> Dataset:
    """Build one replica dataset in memory (through the CSV loader semantics)."""
    rows, schema = GENERATORS[name]()
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "data.csv"
        write_csv(rows, path)
        return load_csv(path, schema, name=name)
