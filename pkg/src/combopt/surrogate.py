"""Objective-value transforms that set the gradient step's sign and size.

The interesting ones are rank-based: the empirical CDF of a sliding window
of recent objective values, its rescaling onto [-1, 1], and a percentile
threshold.  Rank transforms pin the weight distribution regardless of the
objective's scale, which is what makes the optimizer robust to rescaled or
shifted objectives.  Mean-subtracted and z-scored variants are provided as
comparison baselines; they center the values but leave the distribution
unknown.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

_KNOWN = ("raw", "baseline", "zscore", "cdf", "scaled_cdf", "oce")


@dataclass(frozen=True)
class SurrogateKind:
    """Weighting variant tag; ``oce`` carries its percentile parameter."""

    name: str
    rho: float | None = None

    def __post_init__(self):
        if self.name not in _KNOWN:
            raise ValueError(f"unknown surrogate {self.name!r}, expected one of {_KNOWN}")
        if self.name == "oce":
            if self.rho is None or not 0.0 < self.rho < 1.0:
                raise ValueError("oce needs rho in (0, 1)")
        elif self.rho is not None:
            raise ValueError(f"{self.name} takes no rho parameter")

    @classmethod
    def from_string(cls, text):
        """Parse a config string: raw | baseline | zscore | cdf | scaled_cdf | oce:<rho>."""
        text = text.strip()
        if text.startswith("oce:"):
            return cls("oce", float(text[4:]))
        return cls(text)

    def __str__(self):
        if self.name == "oce":
            return f"oce:{self.rho:g}"
        return self.name


RAW = SurrogateKind("raw")
BASELINE = SurrogateKind("baseline")
ZSCORE = SurrogateKind("zscore")
CDF = SurrogateKind("cdf")
SCALED_CDF = SurrogateKind("scaled_cdf")


class ObjectiveWindow:
    """FIFO window of the most recent objective values (capacity k)."""

    def __init__(self, capacity):
        if capacity < 1:
            raise ValueError("window capacity must be >= 1")
        self.capacity = int(capacity)
        self._values = deque(maxlen=self.capacity)

    def push(self, y):
        self._values.append(float(y))

    def __len__(self):
        return len(self._values)

    def values(self):
        return np.fromiter(self._values, dtype=float, count=len(self._values))

    def mean(self):
        return float(self.values().mean())

    def std(self):
        # population (uncorrected) standard deviation
        return float(self.values().std())


def ecdf(window, y):
    """Fraction of stored values strictly below ``y``."""
    if len(window) == 0:
        raise ValueError("empirical CDF of an empty window is undefined")
    return float(np.count_nonzero(window.values() < y)) / len(window)


def weight(kind, window, y):
    """Gradient weight of objective value ``y`` given the recent window.

    raw        -> y
    baseline   -> y - mean(window)
    zscore     -> (y - mean) / std, or 0 when the window is degenerate
    cdf        -> ecdf(window, y), in [0, 1]
    scaled_cdf -> 2 * ecdf(window, y) - 1, in [-1, 1]
    oce:rho    -> 1 if ecdf(window, y) >= 1 - rho else 0
    """
    y = float(y)
    if kind.name == "raw":
        return y
    if len(window) == 0:
        raise ValueError(f"{kind} weight needs a non-empty window")
    if kind.name == "baseline":
        return y - window.mean()
    if kind.name == "zscore":
        sigma = window.std()
        if sigma < 1e-12:
            return 0.0
        return (y - window.mean()) / sigma
    if kind.name == "cdf":
        return ecdf(window, y)
    if kind.name == "scaled_cdf":
        return 2.0 * ecdf(window, y) - 1.0
    if kind.name == "oce":
        return 1.0 if ecdf(window, y) >= 1.0 - kind.rho else 0.0
    raise AssertionError(f"unhandled surrogate {kind}")
