"""Sequential importance sampling and exact oracles for contingency-table fibers."""

from .bounds import CellBounds, PartialAssignment, bounds_exact_ip, bounds_lp
from .enumeration import FiberCount, cell_support, count_fiber, iter_fiber
from .errors import EmptyFiberError, FiberError, ResourceBudgetExceeded
from .genexp import ExperimentRow, GeneratorConfig, generate_table, run_experiment
from .model import (DesignMatrix, FiberSpec, ModelSpec, build_design_matrix, in_fiber, margin_of)
from .semigroup import SemigroupAnalysis, holes_in_box, in_saturation, in_semigroup
from .sis import (CountEstimate, SampleDraw, SISConfig, estimate_count, rejection_rate,
                  sample_classical, sample_rejection_free)

__version__ = "0.1.0"

__all__ = [
    "CellBounds", "CountEstimate", "DesignMatrix", "EmptyFiberError", "ExperimentRow",
    "FiberCount", "FiberError", "FiberSpec", "GeneratorConfig", "ModelSpec", "PartialAssignment",
    "ResourceBudgetExceeded", "SISConfig", "SampleDraw", "SemigroupAnalysis", "bounds_exact_ip",
    "bounds_lp", "build_design_matrix", "cell_support", "count_fiber", "estimate_count",
    "generate_table", "holes_in_box", "in_fiber", "in_saturation", "in_semigroup", "iter_fiber",
    "margin_of", "rejection_rate", "run_experiment", "sample_classical", "sample_rejection_free",
]
