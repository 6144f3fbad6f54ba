"""Budget-constrained measures of noncompactness for finite function families."""

from .core import (
    BallSpec,
    PointSet,
    SpaceTag,
    chebyshev_center_linf,
    diameter,
    distance_matrix,
    min_enclosing_ball_l2,
    norm,
)
from .errors import (
    CapacityError,
    InputError,
    UndefinedBudgetError,
    UnsupportedSpaceError,
    WitnessRejected,
)
from .set_measures import (
    BudgetedValue,
    CenterChoice,
    Partition,
    Subset,
    alpha_budget,
    beta_sep,
    gamma_budget,
)

__version__ = "0.1.0"

__all__ = [
    "BallSpec",
    "BudgetedValue",
    "CapacityError",
    "CenterChoice",
    "InputError",
    "Partition",
    "PointSet",
    "SpaceTag",
    "Subset",
    "UndefinedBudgetError",
    "UnsupportedSpaceError",
    "WitnessRejected",
    "alpha_budget",
    "beta_sep",
    "chebyshev_center_linf",
    "diameter",
    "distance_matrix",
    "gamma_budget",
    "min_enclosing_ball_l2",
    "norm",
    "__version__",
]
