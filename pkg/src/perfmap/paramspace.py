"""Discrete hyper-parameter spaces and their integer gene encoding.

A space is an ordered list of named domains, each holding an ordered list of
atoms (floats, ints or symbols). One point of the Cartesian product is a
``Settings`` tuple, with one atom per domain in domain order. Points can be
encoded as integer gene vectors (one index per domain) for the genetic
meta-optimizer, and rendered as canonical text keys for fitness caching.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

Atom = float | int | str
Settings = tuple[Atom, ...]

DT_PARAM_NAMES = ("min_impurity", "min_samples", "max_depth")
SVM_PARAM_NAMES = ("gamma", "kernel", "C")


def render_atom(value: Atom) -> str:
    """Deterministic text form of an atom (reals at fixed 10-digit precision)."""
    if isinstance(value, bool):  # bool is an int subclass; reject early
        raise TypeError("boolean atoms are not supported")
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


@dataclass(frozen=True)
class ParamDomain:
    """One named, ordered, discrete value domain."""

    name: str
    values: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("domain name must be non-empty")
        if not self.values:
            raise ValueError(f"domain {self.name!r} has no values")
        rendered = [render_atom(v) for v in self.values]
        if len(set(rendered)) != len(rendered):
            raise ValueError(f"domain {self.name!r} has duplicate values")

    def index_of(self, value: Atom) -> int:
        key = render_atom(value)
        for i, v in enumerate(self.values):
            if render_atom(v) == key:
                return i
        raise ValueError(f"value {value!r} is not in domain {self.name!r}")


@dataclass(frozen=True)
class ParamSpace:
    """Ordered collection of domains; points live in the Cartesian product."""

    domains: tuple[ParamDomain, ...]

    def __post_init__(self) -> None:
        names = [d.name for d in self.domains]
        if len(set(names)) != len(names):
            raise ValueError("domain names must be distinct")
        if not self.domains:
            raise ValueError("a parameter space needs at least one domain")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.domains)

    def size(self) -> int:
        n = 1
        for d in self.domains:
            n *= len(d.values)
        return n

    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(d.values) for d in self.domains)

    def domain(self, name: str) -> ParamDomain:
        for d in self.domains:
            if d.name == name:
                return d
        raise KeyError(f"no domain named {name!r}")

    def enumerate(self) -> list[Settings]:
        """All points in row-major order: the last domain varies fastest."""
        return list(itertools.product(*(d.values for d in self.domains)))

    def validate(self, settings: Sequence[Atom]) -> Settings:
        if len(settings) != len(self.domains):
            raise ValueError(
                f"settings has {len(settings)} atoms, space has {len(self.domains)} domains"
            )
        for atom, domain in zip(settings, self.domains):
            domain.index_of(atom)  # raises if absent
        return tuple(settings)

    def encode(self, settings: Sequence[Atom]) -> tuple[int, ...]:
        """Gene vector: the index of each atom within its domain."""
        if len(settings) != len(self.domains):
            raise ValueError("settings length does not match domain count")
        return tuple(d.index_of(a) for a, d in zip(settings, self.domains))

    def decode(self, genes: Sequence[int]) -> Settings:
        """Inverse of :meth:`encode`."""
        if len(genes) != len(self.domains):
            raise ValueError("gene vector length does not match domain count")
        out = []
        for g, d in zip(genes, self.domains):
            g = int(g)
            if not 0 <= g < len(d.values):
                raise ValueError(
                    f"gene {g} out of range for domain {d.name!r} of size {len(d.values)}"
                )
            out.append(d.values[g])
        return tuple(out)

    def canonical_key(self, settings: Sequence[Atom]) -> str:
        """Injective text key, ``name=value`` pairs joined by ``;`` in domain order."""
        if len(settings) != len(self.domains):
            raise ValueError("settings length does not match domain count")
        return ";".join(
            f"{d.name}={render_atom(a)}" for a, d in zip(settings, self.domains)
        )

    def as_dict(self, settings: Sequence[Atom]) -> dict[str, Atom]:
        return {d.name: a for d, a in zip(self.domains, settings)}

    def from_dict(self, mapping: dict[str, Atom]) -> Settings:
        """Settings tuple from a name->value mapping, normalized to domain atoms."""
        missing = [d.name for d in self.domains if d.name not in mapping]
        if missing:
            raise ValueError(f"missing parameters: {missing}")
        extra = [k for k in mapping if k not in self.names]
        if extra:
            raise ValueError(f"unknown parameters: {extra}")
        return tuple(d.values[d.index_of(mapping[d.name])] for d in self.domains)

    def to_json_obj(self) -> list[dict]:
        return [{"name": d.name, "values": list(d.values)} for d in self.domains]

    @classmethod
    def from_json_obj(cls, obj: Iterable[dict]) -> "ParamSpace":
        domains = []
        for entry in obj:
            values = tuple(entry["values"])
            domains.append(ParamDomain(name=entry["name"], values=values))
        return cls(domains=tuple(domains))


def _stepped(start: int, stop: int, step: int) -> tuple[int, ...]:
    # Inclusive start, stepping while <= stop.
    return tuple(range(start, stop + 1, step))


def builtin_space(learner: str) -> ParamSpace:
    """The stock search space for a builtin learner name ('dt' or 'svm')."""
    kind = learner.lower()
    if kind == "dt":
        return ParamSpace(
            domains=(
                ParamDomain("min_impurity", tuple(i / 10 for i in range(0, 7))),
                ParamDomain("min_samples", _stepped(2, 150, 10)),
                ParamDomain("max_depth", _stepped(1, 160, 10)),
            )
        )
    if kind == "svm":
        c_values: tuple[Atom, ...] = tuple(i / 100 for i in range(1, 201, 20)) + tuple(
            range(2, 201, 20)
        )
        return ParamSpace(
            domains=(
                ParamDomain("gamma", ("scale", "auto")),
                ParamDomain("kernel", ("linear", "poly", "rbf", "sigmoid")),
                ParamDomain("C", c_values),
            )
        )
    raise ValueError(f"no builtin space for learner {learner!r}")
