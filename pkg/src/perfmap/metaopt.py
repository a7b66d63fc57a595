"""Meta-optimizers that fill performance maps: exhaustive grid search and an
elitist simple genetic algorithm with a fitness cache and an early stop.

Every evaluation is one seeded k-fold cross-validation bounded by a wall-clock
deadline; a run that exceeds it is recorded with the sentinel value -0.2.
Identical settings are never cross-validated twice thanks to the cache, and
each settings point derives its own stable evaluation seed, so results do not
depend on evaluation order or worker count.
"""

from __future__ import annotations

import math
import threading
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset, FoldPlan, make_folds
from .learners import EvaluationTimeout, Learner, cross_validate
from .maps import TIMEOUT_SENTINEL, MapEntry, PerformanceMap
from .paramspace import ParamSpace, Settings

SELECTION_EPSILON = 1e-6


@dataclass(frozen=True)
class SgaConfig:
    population_size: int = 50
    max_generations: int = 50
    mutation_rate: float = 0.1
    crossover_rate: float = 0.9
    replacement_rate: float = 0.9
    crossover_type: str = "uniform"
    stop_fitness: float = 0.99
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        for name in ("mutation_rate", "crossover_rate", "replacement_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.crossover_type != "uniform":
            raise ValueError("only uniform crossover is supported")

    def to_json_obj(self) -> dict:
        return {
            "population_size": self.population_size,
            "max_generations": self.max_generations,
            "mutation_rate": self.mutation_rate,
            "crossover_rate": self.crossover_rate,
            "replacement_rate": self.replacement_rate,
            "crossover_type": self.crossover_type,
            "stop_fitness": self.stop_fitness,
            "seed": self.seed,
        }


@dataclass
class LearningContext:
    """The quadruple driving one run: learner, optimizer, space and data."""

    learner: Learner
    optimizer: str  # "grid" | "sga"
    space: ParamSpace
    dataset: Dataset
    sga: SgaConfig | None = None
    folds: int = 10
    seed: int = 0
    timeout: float | None = 40.0

    def __post_init__(self) -> None:
        if self.optimizer not in ("grid", "sga"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.optimizer == "sga" and self.sga is None:
            self.sga = SgaConfig(seed=self.seed)
        names = self.learner.param_names
        if names and set(self.space.names) != set(names):
            raise ValueError(
                f"space domains {self.space.names} do not match the learner's "
                f"parameters {names}"
            )


@dataclass(frozen=True)
class PointOutcome:
    mean: float
    std: float
    timed_out: bool = False
    clamped: bool = False


class FitnessCache:
    """Canonical-key memo of evaluation outcomes; first writer wins."""

    def __init__(self) -> None:
        self._entries: dict[str, PointOutcome] = {}
        self._lock = threading.Lock()
        self.evaluations = 0  # actual cross-validation runs

    def get(self, key: str) -> PointOutcome | None:
        return self._entries.get(key)

    def put(self, key: str, outcome: PointOutcome) -> PointOutcome:
        with self._lock:
            existing = self._entries.get(key)
            if existing is not None:
                return existing
            self._entries[key] = outcome
            self.evaluations += 1
            return outcome

    def __len__(self) -> int:
        return len(self._entries)


def selection_weights(fitness: np.ndarray) -> np.ndarray:
    """Non-negative roulette weights: fitness shifted above zero by epsilon."""
    fitness = np.asarray(fitness, dtype=np.float64)
    if len(fitness) == 0:
        raise ValueError("need at least one individual")
    return fitness - fitness.min() + SELECTION_EPSILON


def point_seed(context_seed: int, key: str) -> int:
    """Stable per-point seed so results are independent of evaluation order."""
    return (context_seed * 1_000_003 + zlib.crc32(key.encode())) % 2**32


def _run_point(
    ds: Dataset,
    plan: FoldPlan,
    learner: Learner,
    space: ParamSpace,
    settings: Settings,
    timeout: float | None,
    context_seed: int,
) -> PointOutcome:
    key = space.canonical_key(settings)
    params = space.as_dict(settings)
    try:
        score = cross_validate(
            ds, plan, learner, params, timeout, point_seed(context_seed, key)
        )
    except EvaluationTimeout:
        return PointOutcome(TIMEOUT_SENTINEL, 0.0, timed_out=True)
    if score.mean < TIMEOUT_SENTINEL:
        # Keep the sentinel as the map floor (possible for R^2 tasks).
        return PointOutcome(TIMEOUT_SENTINEL, score.std, clamped=True)
    return PointOutcome(score.mean, score.std)


def evaluate_point(
    lc: LearningContext,
    settings: Settings,
    cache: FitnessCache,
    plan: FoldPlan | None = None,
) -> PointOutcome:
    """Cached evaluation of one settings point under the context's deadline."""
    key = lc.space.canonical_key(settings)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if plan is None:
        plan = make_folds(lc.dataset, lc.folds, lc.seed)
    outcome = _run_point(
        lc.dataset, plan, lc.learner, lc.space, settings, lc.timeout, lc.seed
    )
    return cache.put(key, outcome)


# Worker-process state for parallel evaluation (populated by fork+initializer).
_WORKER: dict = {}


def _init_worker(ds, plan, learner, space, timeout, context_seed) -> None:
    _WORKER.update(
        ds=ds, plan=plan, learner=learner, space=space, timeout=timeout,
        context_seed=context_seed,
    )


def _worker_eval(settings: Settings) -> PointOutcome:
    return _run_point(
        _WORKER["ds"],
        _WORKER["plan"],
        _WORKER["learner"],
        _WORKER["space"],
        settings,
        _WORKER["timeout"],
        _WORKER["context_seed"],
    )


class _Evaluator:
    """Evaluates batches of settings through the cache, optionally in parallel."""

    def __init__(self, lc: LearningContext, cache: FitnessCache, jobs: int):
        self.lc = lc
        self.cache = cache
        self.jobs = max(1, jobs)
        self.plan = make_folds(lc.dataset, lc.folds, lc.seed)
        self._pool: ProcessPoolExecutor | None = None

    def __enter__(self) -> "_Evaluator":
        if self.jobs > 1:
            self._pool = ProcessPoolExecutor(
                max_workers=self.jobs,
                initializer=_init_worker,
                initargs=(
                    self.lc.dataset,
                    self.plan,
                    self.lc.learner,
                    self.lc.space,
                    self.lc.timeout,
                    self.lc.seed,
                ),
            )
        return self

    def __exit__(self, *exc) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def evaluate(self, batch: list[Settings]) -> list[PointOutcome]:
        """Outcomes aligned with ``batch``; each unique key runs at most once."""
        keys = [self.lc.space.canonical_key(s) for s in batch]
        pending: dict[str, Settings] = {}
        for key, settings in zip(keys, batch):
            if self.cache.get(key) is None and key not in pending:
                pending[key] = settings
        if pending:
            todo = list(pending.items())
            if self._pool is not None and len(todo) > 1:
                chunk = max(1, len(todo) // (self.jobs * 8))
                results = self._pool.map(
                    _worker_eval, [s for _, s in todo], chunksize=chunk
                )
                for (key, _), outcome in zip(todo, results):
                    self.cache.put(key, outcome)
            else:
                for key, settings in todo:
                    self.cache.put(
                        key,
                        _run_point(
                            self.lc.dataset,
                            self.plan,
                            self.lc.learner,
                            self.lc.space,
                            settings,
                            self.lc.timeout,
                            self.lc.seed,
                        ),
                    )
        return [self.cache.get(k) for k in keys]


def context_descriptor(lc: LearningContext) -> dict:
    desc: dict = {
        "learner": lc.learner.name,
        "optimizer": lc.optimizer,
        "dataset": lc.dataset.name,
        "folds": lc.folds,
        "seed": lc.seed,
        "timeout": lc.timeout,
        "subsample": (
            lc.dataset.n_rows if lc.dataset.subsampled_from is not None else None
        ),
        "space": lc.space.to_json_obj(),
    }
    if lc.optimizer == "sga" and lc.sga is not None:
        desc["sga"] = lc.sga.to_json_obj()
    return desc


class _MapBuilder:
    """Accumulates unique settings in first-evaluation order."""

    def __init__(self, lc: LearningContext):
        self.lc = lc
        self.entries: list[MapEntry] = []
        self._seen: set[str] = set()

    def add(self, settings: Settings, outcome: PointOutcome) -> None:
        key = self.lc.space.canonical_key(settings)
        if key in self._seen:
            return
        self._seen.add(key)
        self.entries.append(
            MapEntry(
                settings=self.lc.space.as_dict(settings),
                mean=outcome.mean,
                std=outcome.std,
                timed_out=outcome.timed_out,
                clamped=outcome.clamped,
            )
        )

    def finish(self, wall_time: float, extra_context: dict | None = None) -> PerformanceMap:
        context = context_descriptor(self.lc)
        if extra_context:
            context.update(extra_context)
        pmap = PerformanceMap(
            context=context,
            entries=self.entries,
            evaluated_points=len(self.entries),
            wall_time_seconds=wall_time,
        )
        pmap.check()
        return pmap


def grid_search(
    lc: LearningContext, jobs: int = 1, cache: FitnessCache | None = None
) -> tuple[Settings, PerformanceMap]:
    """Evaluate every point of the space; ties go to the earliest point."""
    cache = cache if cache is not None else FitnessCache()
    builder = _MapBuilder(lc)
    start = time.perf_counter()
    points = lc.space.enumerate()
    with _Evaluator(lc, cache, jobs) as ev:
        outcomes = ev.evaluate(points)
    for settings, outcome in zip(points, outcomes):
        builder.add(settings, outcome)
    pmap = builder.finish(time.perf_counter() - start)
    best = pmap.best()
    return lc.space.from_dict(best.settings), pmap


def sga(
    lc: LearningContext, jobs: int = 1, cache: FitnessCache | None = None
) -> tuple[Settings, PerformanceMap]:
    """Elitist simple genetic algorithm over integer gene vectors.

    Roulette selection on shifted fitness, uniform crossover of consecutive
    pool pairs, per-gene uniform resampling mutation, replacement of the worst
    ceil(rate * population) individuals by offspring, and one protected elite.
    Stops at max generations or once the best fitness reaches the stop level.
    """
    cfg = lc.sga if lc.sga is not None else SgaConfig(seed=lc.seed)
    cache = cache if cache is not None else FitnessCache()
    builder = _MapBuilder(lc)
    rng = np.random.default_rng(cfg.seed)
    cards = np.array(lc.space.cardinalities(), dtype=np.int64)
    d = len(cards)
    n = cfg.population_size
    start = time.perf_counter()

    def decode_all(genes: np.ndarray) -> list[Settings]:
        return [lc.space.decode(row) for row in genes]

    def evaluate(genes: np.ndarray, ev: _Evaluator) -> np.ndarray:
        settings = decode_all(genes)
        outcomes = ev.evaluate(settings)
        for s, o in zip(settings, outcomes):
            builder.add(s, o)
        return np.array([o.mean for o in outcomes], dtype=np.float64)

    with _Evaluator(lc, cache, jobs) as ev:
        population = rng.integers(0, cards, size=(n, d))
        fitness = evaluate(population, ev)
        elite_idx = int(np.argmax(fitness))
        elite = population[elite_idx].copy()
        elite_fitness = float(fitness[elite_idx])
        best_by_generation = [elite_fitness]
        generations = 1
        while elite_fitness < cfg.stop_fitness and generations < cfg.max_generations:
            weights = selection_weights(fitness)
            pool_idx = rng.choice(n, size=n, replace=True, p=weights / weights.sum())
            pool = population[pool_idx].copy()
            for i in range(0, n - 1, 2):
                if rng.random() < cfg.crossover_rate:
                    mask = rng.random(d) < 0.5
                    a = np.where(mask, pool[i], pool[i + 1])
                    b = np.where(mask, pool[i + 1], pool[i])
                    pool[i], pool[i + 1] = a, b
            mutate = rng.random((n, d)) < cfg.mutation_rate
            resampled = rng.integers(0, cards, size=(n, d))
            pool[mutate] = resampled[mutate]
            n_replace = math.ceil(cfg.replacement_rate * n)
            order = np.argsort(-fitness, kind="stable")
            population = np.concatenate(
                [population[order[: n - n_replace]], pool[:n_replace]]
            )
            fitness = evaluate(population, ev)
            if fitness.max() < elite_fitness:
                worst = int(np.argmin(fitness))
                population[worst] = elite
                fitness[worst] = elite_fitness
            gen_best = int(np.argmax(fitness))
            if fitness[gen_best] > elite_fitness:
                elite = population[gen_best].copy()
                elite_fitness = float(fitness[gen_best])
            best_by_generation.append(elite_fitness)
            generations += 1

    pmap = builder.finish(
        time.perf_counter() - start,
        extra_context={
            "generations_run": generations,
            "best_by_generation": best_by_generation,
        },
    )
    best = pmap.best()
    return lc.space.from_dict(best.settings), pmap


def run_context(
    lc: LearningContext, jobs: int = 1, cache: FitnessCache | None = None
) -> tuple[Settings, PerformanceMap]:
    if lc.optimizer == "grid":
        return grid_search(lc, jobs=jobs, cache=cache)
    return sga(lc, jobs=jobs, cache=cache)
