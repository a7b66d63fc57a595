"""Performance maps: storage, best point, HP(k) profiles, dominance, export.

A map is the set of (settings, mean, std) triples produced by meta-optimizing
one learning context, plus a context descriptor rich enough to rebuild the
parameter space. HP(k) is the fraction of evaluated settings whose mean is
within a relative distance k of the map's best: |{p : mean(p) >= best*(1-k)}|
divided by the number of entries. One context weakly dominates another when
its HP value is at least as large at every compared k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .paramspace import Atom, ParamSpace, render_atom

TIMEOUT_SENTINEL = -0.2


class UndefinedHpError(ValueError):
    """HP(k) is only defined for maps whose best mean is positive."""


@dataclass(frozen=True)
class MapEntry:
    settings: dict[str, Atom]
    mean: float
    std: float
    timed_out: bool = False
    clamped: bool = False


@dataclass
class PerformanceMap:
    """Append-only during a run, immutable afterwards."""

    context: dict
    entries: list[MapEntry] = field(default_factory=list)
    evaluated_points: int = 0
    wall_time_seconds: float = 0.0

    def space(self) -> ParamSpace:
        return ParamSpace.from_json_obj(self.context["space"])

    def check(self) -> None:
        if not self.entries:
            raise ValueError("a completed map must hold at least one entry")
        if self.evaluated_points != len(self.entries):
            raise ValueError("evaluated_points does not match the entry count")
        keys = [
            tuple((k, render_atom(v)) for k, v in e.settings.items())
            for e in self.entries
        ]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate settings in map entries")

    def means(self) -> np.ndarray:
        return np.array([e.mean for e in self.entries], dtype=np.float64)

    def best(self) -> MapEntry:
        """Entry with the maximum mean; ties resolve to the earliest entry."""
        if not self.entries:
            raise ValueError("map is empty")
        means = self.means()
        return self.entries[int(np.argmax(means))]

    def hp(self, k: float) -> float:
        """High-performance value at relative distance ``k`` from the best."""
        if not 0.0 < k < 1.0:
            raise ValueError("k must lie strictly between 0 and 1")
        best = self.best().mean
        if best <= 0.0:
            raise UndefinedHpError(
                f"HP undefined: best mean {best:.4g} is not positive"
            )
        means = self.means()
        return float(np.count_nonzero(means >= best * (1.0 - k)) / len(means))

    def hp_profile(self, ks: tuple[float, ...] = (0.05, 0.10, 0.20)) -> "HpProfile":
        return HpProfile(ks=tuple(ks), values=tuple(self.hp(k) for k in ks))


@dataclass(frozen=True)
class HpProfile:
    ks: tuple[float, ...]
    values: tuple[float, ...]


def dominates(a: HpProfile, b: HpProfile) -> bool:
    """Weak dominance: a's HP value is >= b's at every compared k."""
    if a.ks != b.ks:
        raise ValueError("profiles were computed at different k values")
    return all(x >= y for x, y in zip(a.values, b.values))


def compare_profiles(a: HpProfile, b: HpProfile) -> str:
    """'equivalent', 'a', 'b' or 'incomparable'."""
    a_dom = dominates(a, b)
    b_dom = dominates(b, a)
    if a_dom and b_dom:
        return "equivalent"
    if a_dom:
        return "a"
    if b_dom:
        return "b"
    return "incomparable"


@dataclass
class PlotProjection:
    """A map flattened onto two x parameters (joined labels) and one y parameter."""

    x_names: tuple[str, str]
    y_name: str
    x_labels: list[str]
    y_labels: list[str]
    values: np.ndarray  # (ny, nx), NaN where no entry covers the cell
    timed_out: np.ndarray  # (ny, nx) bool


def project_for_plot(
    pmap: PerformanceMap, x_params: tuple[str, str], y_param: str
) -> PlotProjection:
    """Arrange entries on a (x1 x x2) by y grid; absent cells stay NaN.

    Cell labels join the two x values as ``"v1 - v2"``. If the space has more
    parameters than the three projected ones, a cell keeps its best mean.
    """
    space = pmap.space()
    d1, d2 = space.domain(x_params[0]), space.domain(x_params[1])
    dy = space.domain(y_param)
    x_labels = [
        f"{render_atom(v1)} - {render_atom(v2)}" for v1 in d1.values for v2 in d2.values
    ]
    y_labels = [render_atom(v) for v in dy.values]
    nx, ny = len(x_labels), len(y_labels)
    values = np.full((ny, nx), np.nan)
    timed_out = np.zeros((ny, nx), dtype=bool)
    for entry in pmap.entries:
        xi = d1.index_of(entry.settings[x_params[0]]) * len(d2.values) + d2.index_of(
            entry.settings[x_params[1]]
        )
        yi = dy.index_of(entry.settings[y_param])
        if np.isnan(values[yi, xi]) or entry.mean > values[yi, xi]:
            values[yi, xi] = entry.mean
            timed_out[yi, xi] = entry.timed_out
    return PlotProjection(
        x_names=tuple(x_params),
        y_name=y_param,
        x_labels=x_labels,
        y_labels=y_labels,
        values=values,
        timed_out=timed_out,
    )


def to_json_obj(pmap: PerformanceMap) -> dict:
    entries = []
    for e in pmap.entries:
        obj: dict = {"settings": dict(e.settings), "mean": e.mean, "std": e.std}
        if e.timed_out:
            obj["timed_out"] = True
        if e.clamped:
            obj["clamped"] = True
        entries.append(obj)
    return {
        "context": pmap.context,
        "entries": entries,
        "evaluated_points": pmap.evaluated_points,
        "wall_time_seconds": pmap.wall_time_seconds,
    }


def from_json_obj(obj: dict) -> PerformanceMap:
    entries = [
        MapEntry(
            settings=dict(e["settings"]),
            mean=float(e["mean"]),
            std=float(e["std"]),
            timed_out=bool(e.get("timed_out", False)),
            clamped=bool(e.get("clamped", False)),
        )
        for e in obj["entries"]
    ]
    pmap = PerformanceMap(
        context=obj["context"],
        entries=entries,
        evaluated_points=int(obj["evaluated_points"]),
        wall_time_seconds=float(obj["wall_time_seconds"]),
    )
    pmap.check()
    return pmap


def save_json(pmap: PerformanceMap, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(to_json_obj(pmap), indent=2) + "\n", encoding="utf-8"
    )


def load_json(path: str | Path) -> PerformanceMap:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"cannot read map file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"map file {path} is not valid JSON: {exc}") from exc
    return from_json_obj(obj)


def save_csv(pmap: PerformanceMap, path: str | Path) -> None:
    """One row per entry: one column per parameter, then mean and std."""
    names = list(pmap.space().names)
    lines = [",".join(names + ["mean", "std"])]
    for e in pmap.entries:
        cells = [render_atom(e.settings[n]) for n in names]
        cells += [repr(e.mean), repr(e.std)]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
