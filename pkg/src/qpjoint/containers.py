"""Small value types shared between modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

M0_TOL = 1e-4


@dataclass(frozen=True)
class Density1D:
    """Probability density sampled on a uniform axis."""

    x: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.shape != v.shape or x.ndim != 1 or x.size < 2:
            raise InvalidInput("density needs matching 1-d axis and values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def mass(self):
        return float(np.sum(self.values) * self.dx)

    def cdf(self):
        return np.cumsum(self.values) * self.dx


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_0 .. m_K`` of a (real) probability measure.

    ``discrepancy`` optionally carries the per-order difference to an
    independent evaluation path; ``stderr`` optional standard errors.
    """

    values: np.ndarray
    label: str = ""
    discrepancy: np.ndarray | None = field(default=None, compare=False)
    stderr: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise InvalidInput("moments must be finite")
        if v.size == 0 or abs(v[0] - 1.0) > M0_TOL:
            raise InvalidInput(f"zeroth moment must be 1, got {v[:1]}")
        object.__setattr__(self, "values", v)

    @property
    def K(self):
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]
