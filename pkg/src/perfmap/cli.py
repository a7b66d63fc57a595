"""Command-line front end: run contexts, summarize maps, compare, plot.

Exit codes: 0 on success, 1 for usage/config problems, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .datasets import Dataset, TableSchema, load_csv, load_from_manifest, subsample
from .learners import get_learner
from .maps import (
    PerformanceMap,
    UndefinedHpError,
    compare_profiles,
    load_json,
    project_for_plot,
    save_json,
)
from .metaopt import LearningContext, SgaConfig, run_context
from .paramspace import ParamSpace, builtin_space
from .svg import render_svg

DEFAULT_KS = (0.05, 0.10, 0.20)
PLOT_DEFAULTS = {
    "dt": (("min_impurity", "min_samples"), "max_depth"),
    "svm": (("gamma", "C"), "kernel"),
}


class ConfigError(ValueError):
    """Anything wrong before a run starts: flags, config file, resolution."""


def _parse_ks(text: str) -> tuple[float, ...]:
    try:
        ks = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"cannot parse k values from {text!r}") from None
    if not ks or not all(0.0 < k < 1.0 for k in ks):
        raise ConfigError("k values must lie strictly between 0 and 1")
    return ks


def _load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _resolve_dataset(cfg: dict, manifest_flag: str | None, config_dir: Path) -> Dataset:
    spec = cfg.get("dataset")
    if spec is None:
        raise ConfigError("config needs a 'dataset' entry")
    if isinstance(spec, str):
        manifest = manifest_flag or cfg.get("manifest")
        if manifest is None:
            raise ConfigError(
                "a dataset name needs a manifest (config 'manifest' or --manifest)"
            )
        manifest_path = Path(manifest)
        if not manifest_path.is_absolute():
            manifest_path = config_dir / manifest_path
        return load_from_manifest(manifest_path, spec)
    try:
        schema = TableSchema.from_json_obj(spec["schema"], task=spec["task"])
        csv_path = Path(spec["path"])
        if not csv_path.is_absolute():
            csv_path = config_dir / csv_path
        return load_csv(csv_path, schema, name=spec.get("name"))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed inline dataset spec: {exc}") from exc


def _build_context(cfg: dict, args) -> tuple[LearningContext, dict]:
    config_dir = Path(args.config).resolve().parent
    try:
        learner = get_learner(str(cfg.get("learner", "")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ds = _resolve_dataset(cfg, args.manifest, config_dir)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    n_sub = args.subsample if args.subsample is not None else cfg.get("subsample")
    info = {"dropped_rows": ds.dropped_rows, "total_rows": ds.n_rows}
    if n_sub is not None:
        ds = subsample(ds, int(n_sub), seed)
    optimizer = str(cfg.get("optimizer", "grid")).lower()
    if optimizer not in ("grid", "sga"):
        raise ConfigError(f"unknown optimizer {optimizer!r}")
    if "space" in cfg:
        space = ParamSpace.from_json_obj(cfg["space"])
    else:
        space = learner.default_space()
    sga_cfg = None
    if optimizer == "sga":
        overrides = dict(cfg.get("sga", {}))
        overrides.setdefault("seed", seed)
        try:
            sga_cfg = SgaConfig(**overrides)
        except TypeError as exc:
            raise ConfigError(f"bad sga settings: {exc}") from exc
    timeout = args.timeout if args.timeout is not None else cfg.get("timeout", 40.0)
    try:
        lc = LearningContext(
            learner=learner,
            optimizer=optimizer,
            space=space,
            dataset=ds,
            sga=sga_cfg,
            folds=int(cfg.get("folds", 10)),
            seed=seed,
            timeout=float(timeout) if timeout is not None else None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return lc, info


def _optimizer_label(lc: LearningContext) -> str:
    return f"{lc.learner.name.upper()} - {'Grid' if lc.optimizer == 'grid' else 'SGA'}"


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    lc, info = _build_context(cfg, args)
    out_path = args.out or cfg.get("out")
    if out_path is None:
        raise ConfigError("no output path (config 'out' or --out)")
    started = time.perf_counter()
    best_settings, pmap = run_context(lc, jobs=args.jobs)
    measured = time.perf_counter() - started
    if args.jobs <= 1:
        # Strict deterministic mode: identical invocations must write
        # byte-identical files, so the volatile timing is not stored.
        pmap.wall_time_seconds = 0.0
        print(f"strict deterministic mode; measured {measured:.2f}s", file=sys.stderr)
    save_json(pmap, out_path)
    best = pmap.best()
    print(
        f"{lc.dataset.name}  {_optimizer_label(lc)}  "
        f"best={best.mean:.4f}  std={best.std:.4f}  "
        f"points={pmap.evaluated_points}  time={pmap.wall_time_seconds:.2f}s"
    )
    if info["dropped_rows"]:
        print(f"note: dropped {info['dropped_rows']} rows with missing values")
    if lc.dataset.subsampled_from is not None:
        print(
            f"note: subsampled to {lc.dataset.n_rows} of "
            f"{lc.dataset.subsampled_from} rows (seed {lc.seed})"
        )
    if (
        lc.learner.name == "dt"
        and lc.optimizer == "grid"
        and pmap.evaluated_points == 1680
    ):
        print(
            "note: the builtin DT grid spans 1680 points "
            "(7 impurity x 15 min-samples x 16 depth levels); the often-quoted "
            "1440-point count corresponds to only 6 impurity levels"
        )
    print(f"map written to {out_path}")
    return 0


def _format_profile(pmap: PerformanceMap, ks: tuple[float, ...]) -> str:
    profile = pmap.hp_profile(ks)
    values = " ".join(f"{v:.2f}" for v in profile.values)
    labels = ",".join(f"{k:g}" for k in ks)
    return f"best={pmap.best().mean:.2f}  HP({labels}) = {values}"


def cmd_hp(args) -> int:
    ks = _parse_ks(args.ks)
    pmap = load_json(args.map)
    try:
        print(_format_profile(pmap, ks))
    except UndefinedHpError:
        print(f"HP undefined (best <= 0): best mean is {pmap.best().mean:.4f}")
    return 0


def cmd_compare(args) -> int:
    ks = _parse_ks(args.ks)
    map_a = load_json(args.map_a)
    map_b = load_json(args.map_b)
    print(f"A: {args.map_a}: {_format_profile(map_a, ks)}")
    print(f"B: {args.map_b}: {_format_profile(map_b, ks)}")
    verdict = compare_profiles(map_a.hp_profile(ks), map_b.hp_profile(ks))
    if verdict == "a":
        print("A dominates B")
    elif verdict == "b":
        print("B dominates A")
    else:
        print(verdict)
    return 0


def cmd_plot(args) -> int:
    pmap = load_json(args.map)
    learner = str(pmap.context.get("learner", ""))
    if args.x:
        x_names = tuple(args.x.split(","))
        if len(x_names) != 2:
            raise ConfigError("--x needs exactly two parameter names (a,b)")
    elif learner in PLOT_DEFAULTS:
        x_names = PLOT_DEFAULTS[learner][0]
    else:
        raise ConfigError("no default projection for this map; pass --x and --y")
    y_name = args.y or (PLOT_DEFAULTS[learner][1] if learner in PLOT_DEFAULTS else None)
    if y_name is None:
        raise ConfigError("no default projection for this map; pass --y")
    try:
        projection = project_for_plot(pmap, x_names, y_name)
    except KeyError as exc:
        raise ConfigError(f"unknown parameter name: {exc}") from exc
    render_svg(projection, args.out, title=_title_for(pmap))
    print(
        f"wrote {args.out}: {len(projection.x_labels)} x-labels x "
        f"{len(projection.y_labels)} y-values"
    )
    return 0


def _title_for(pmap: PerformanceMap) -> str:
    ctx = pmap.context
    opt = "Grid" if ctx.get("optimizer") == "grid" else "SGA"
    return f"{ctx.get('dataset', '?')}: {str(ctx.get('learner', '?')).upper()} - {opt}"


def cmd_spaces(args) -> int:
    for name in ("dt", "svm"):
        space = builtin_space(name)
        print(f"{name}: {space.size()} points")
        for domain in space.domains:
            values = " ".join(
                f"{v:g}" if isinstance(v, float) else str(v) for v in domain.values
            )
            print(f"  {domain.name} ({len(domain.values)}): {values}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfmap",
        description="Map learner performance over hyper-parameter spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one learning context from a JSON config")
    p_run.add_argument("--config", required=True, help="run-config JSON file")
    p_run.add_argument("--out", help="output map JSON path (overrides config)")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel evaluations")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--timeout", type=float, default=None, help="per-point seconds")
    p_run.add_argument("--subsample", type=int, default=None, help="row cap (seeded)")
    p_run.add_argument("--manifest", help="dataset manifest JSON")
    p_run.set_defaults(func=cmd_run)

    p_hp = sub.add_parser("hp", help="print best and HP(k) values of a map")
    p_hp.add_argument("map")
    p_hp.add_argument("--ks", default="0.05,0.10,0.20")
    p_hp.set_defaults(func=cmd_hp)

    p_cmp = sub.add_parser("compare", help="compare two maps by HP dominance")
    p_cmp.add_argument("map_a")
    p_cmp.add_argument("map_b")
    p_cmp.add_argument("--ks", default="0.05,0.10,0.20")
    p_cmp.set_defaults(func=cmd_compare)

    p_plot = sub.add_parser("plot", help="render a map projection as an SVG heatmap")
    p_plot.add_argument("map")
    p_plot.add_argument("--x", help="two parameter names joined on the x axis (a,b)")
    p_plot.add_argument("--y", help="parameter name for the y axis")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.set_defaults(func=cmd_plot)

    p_spaces = sub.add_parser("spaces", help="print the builtin parameter spaces")
    p_spaces.set_defaults(func=cmd_spaces)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
