"""Adaptive sampling toolkit for black-box combinatorial optimization.

The core loop maintains a factorized softmax distribution over category
strings, samples one candidate per step, and nudges the distribution's
parameters using a weighted log-likelihood gradient.  The weight comes from
a rank transform of the recent objective values, which makes the update
magnitudes independent of the objective's scale.  Baseline weightings
(raw value, mean-subtracted, z-scored, percentile-thresholded) and a
per-dimension Exp3 bandit are included for comparison, along with two
benchmark problem packs (maximal cliques, k-medoids) and the statistical
machinery used to rank methods across instances.
"""

__version__ = "0.1.0"

from .policy import SoftmaxPolicy, validate_solution
from .surrogate import (
    ObjectiveWindow,
    SurrogateKind,
    RAW,
    BASELINE,
    ZSCORE,
    CDF,
    SCALED_CDF,
    ecdf,
    weight,
)
from .updates import Sga, AdaGrad, Adam, make_rule
from .optimizer import RunConfig, RunResult, EmaConvergence, adaptive_run, exp3_run

__all__ = [
    "SoftmaxPolicy",
    "validate_solution",
    "ObjectiveWindow",
    "SurrogateKind",
    "RAW",
    "BASELINE",
    "ZSCORE",
    "CDF",
    "SCALED_CDF",
    "ecdf",
    "weight",
    "Sga",
    "AdaGrad",
    "Adam",
    "make_rule",
    "RunConfig",
    "RunResult",
    "EmaConvergence",
    "adaptive_run",
    "exp3_run",
    "__version__",
]
