"""Performance maps of learning algorithms over their hyper-parameter spaces.

Build maps with grid search or a genetic meta-optimizer, then compare learning
contexts by best performance, HP(k) profiles and dominance.
"""

from .datasets import (
    Dataset,
    FoldPlan,
    TableSchema,
    load_csv,
    load_from_manifest,
    make_folds,
    standardize,
    subsample,
)
from .learners import (
    EvaluationTimeout,
    Learner,
    cross_validate,
    get_learner,
    register_learner,
)
from .maps import (
    TIMEOUT_SENTINEL,
    HpProfile,
    MapEntry,
    PerformanceMap,
    UndefinedHpError,
    compare_profiles,
    dominates,
    load_json,
    project_for_plot,
    save_csv,
    save_json,
)
from .metaopt import (
    FitnessCache,
    LearningContext,
    SgaConfig,
    evaluate_point,
    grid_search,
    run_context,
    selection_weights,
    sga,
)
from .paramspace import ParamDomain, ParamSpace, Settings, builtin_space
from .svg import render_svg

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "EvaluationTimeout",
    "FitnessCache",
    "FoldPlan",
    "HpProfile",
    "Learner",
    "LearningContext",
    "MapEntry",
    "ParamDomain",
    "ParamSpace",
    "PerformanceMap",
    "Settings",
    "SgaConfig",
    "TIMEOUT_SENTINEL",
    "TableSchema",
    "UndefinedHpError",
    "builtin_space",
    "compare_profiles",
    "cross_validate",
    "dominates",
    "evaluate_point",
    "get_learner",
    "grid_search",
    "load_csv",
    "load_from_manifest",
    "load_json",
    "make_folds",
    "project_for_plot",
    "register_learner",
    "render_svg",
    "run_context",
    "save_csv",
    "save_json",
    "selection_weights",
    "sga",
    "standardize",
    "subsample",
]
