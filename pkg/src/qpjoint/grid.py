"""Position-grid wavefunctions and their momentum densities.

The grid is periodic with the right end point excluded, ``x_j = x_min + j dx``
with ``dx = (x_max - x_min)/n``. All integrals use the trapezoid rule on this
periodic grid, which reduces to ``sum(f) * dx`` for functions that vanish at
the edges.

Momentum amplitudes follow the continuum convention
``psi_hat(p) = (2 pi)^(-1/2) \\int exp(-i p x) psi(x) dx``. The raw DFT is
corrected by the phase ``exp(-i p x_min)`` for the grid offset and by
``dx / sqrt(2 pi)`` for the measure, so ``psi_hat`` is sampled on the centred
conjugate grid ``p_k = 2 pi k / (n dx)``, ``k = -n/2 .. n/2 - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock
from .containers import Density1D, MomentSequence
from .errors import GridTooSmall, InvalidGeometry, InvalidInput, MomentsUnreliable

TOL_NORM = 1e-8
K_MAX = 12
EDGE_FRACTION = 0.05
EDGE_WEIGHT = 1e-12


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        n = int(self.n_points)
        if n < 256 or n & (n - 1):
            raise InvalidInput(f"n_points must be a power of two >= 256, got {self.n_points}", module="grid")
        if not self.x_max > self.x_min:
            raise InvalidInput("x_max must exceed x_min", module="grid")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def dp(self):
        return 2 * np.pi / (self.n_points * self.dx)

    @property
    def p(self):
        return self.dp * (np.arange(self.n_points) - self.n_points // 2)


@dataclass(frozen=True)
class GridWavefunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise InvalidInput("wavefunction length does not match grid", module="grid")
        norm = np.sum(np.abs(v) ** 2) * self.grid.dx
        if abs(norm - 1.0) > TOL_NORM:
            raise GridTooSmall(f"grid wavefunction norm {norm!r} differs from 1", module="grid")
        object.__setattr__(self, "values", v)

    def inner(self, other):
        return np.vdot(self.values, other.values) * self.grid.dx


def continuum_fft(values, x_min, dx, axis=-1):
    """Continuum-normalised Fourier transform along ``axis``.

    Returns amplitudes on the centred momentum grid (see module docstring).
    """
    values = np.asarray(values)
    n = values.shape[axis]
    p = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, dx))
    raw = np.fft.fftshift(np.fft.fft(values, axis=axis), axes=axis)
    shape = [1] * values.ndim
    shape[axis] = n
    phase = np.exp(-1j * p * x_min).reshape(shape)
    return raw * phase * (dx / np.sqrt(2 * np.pi))


def from_values(values, grid, normalize=False):
    v = np.asarray(values, dtype=complex)
    if normalize:
        v = v / np.sqrt(np.sum(np.abs(v) ** 2) * grid.dx)
    return GridWavefunction(grid, v)


def fock_to_grid(state, grid):
    """``psi(x) = sum_n c_n h_n(x)`` sampled on ``grid``."""
    c = state.coeffs[: state.support]
    h = fock.hermite_functions(c.size - 1, grid.x)
    psi = c @ h
    norm = np.sum(np.abs(psi) ** 2) * grid.dx
    if abs(norm - 1.0) > TOL_NORM:
        raise GridTooSmall(
            f"state leaks out of [{grid.x_min}, {grid.x_max}) (grid norm {norm:.12f})", module="grid"
        )
    return GridWavefunction(grid, psi)


def grid_to_fock(psi, nmax):
    """Project a grid wavefunction onto ``h_0 .. h_nmax``."""
    h = fock.hermite_functions(nmax, psi.grid.x)
    return h @ psi.values * psi.grid.dx


def position_density(psi):
    return Density1D(psi.grid.x, np.abs(psi.values) ** 2, "position")


def momentum_amplitude(psi):
    return continuum_fft(psi.values, psi.grid.x_min, psi.grid.dx)


def momentum_density(psi):
    """Momentum density ``|psi_hat(p)|^2`` on the conjugate grid."""
    return Density1D(psi.grid.p, np.abs(momentum_amplitude(psi)) ** 2, "momentum")


def bump(x, center, half_width):
    """Smooth compactly supported profile ``exp(-w^2 / (w^2 - (x - c)^2))``."""
    t2 = (np.asarray(x, dtype=float) - center) ** 2
    w2 = half_width**2
    out = np.zeros_like(t2)
    inside = t2 < w2
    out[inside] = np.exp(-w2 / (w2 - t2[inside]))
    return out


def double_slit_state(c1, c2, w, delta, grid):
    """``(phi_1 + e^{i delta} phi_2)/sqrt(2)`` with unit-norm bumps ``phi_j``."""
    if not w > 0 or abs(c1 - c2) <= 2 * w:
        raise InvalidGeometry(f"slits at {c1}, {c2} with half-width {w} overlap", module="grid")
    for c in (c1, c2):
        if c - w < grid.x_min or c + w > grid.x_max - grid.dx:
            raise GridTooSmall(f"slit [{c - w}, {c + w}] outside the grid", module="grid")
    x = grid.x
    parts = []
    for c in (c1, c2):
        b = bump(x, c, w)
        parts.append(b / np.sqrt(np.sum(b**2) * grid.dx))
    psi = (parts[0] + np.exp(1j * delta) * parts[1]) / np.sqrt(2)
    return GridWavefunction(grid, psi)


def grid_moments(d, K=K_MAX, label=None, edge_weight=EDGE_WEIGHT, relative=False):
    """Moments ``int x^k d(x) dx`` for ``k = 0 .. K``.

    Raises :class:`MomentsUnreliable` when ``|x|^K d(x)`` is not negligible on
    the outermost 5% of the axis, i.e. the grid edge contaminates the
    highest moment. By default the pointwise value is compared with
    ``edge_weight``. With ``relative=True`` the edge share of
    ``int |x|^K d(x) dx`` is compared instead; use that for heavy-tailed
    densities, where the floating-point floor of an FFT density times
    ``|x|^K`` already exceeds any fixed pointwise threshold.
    """
    if K > K_MAX:
        raise InvalidInput(f"K = {K} exceeds K_max = {K_MAX}", module="grid")
    x, v = d.x, d.values
    n_edge = max(1, int(np.ceil(EDGE_FRACTION * x.size / 2)))
    weighted = np.abs(x) ** K * v
    edge = np.r_[weighted[:n_edge], weighted[-n_edge:]]
    if relative:
        worst = np.sum(edge) / max(np.sum(weighted), 1e-300)
    else:
        worst = np.max(edge)
    if worst > edge_weight:
        kind = "edge share of" if relative else "edge value of"
        raise MomentsUnreliable(
            f"{kind} |x|^{K} d(x) reaches {worst:.2e} near the grid boundary", module="grid"
        )
    powers = x[None, :] ** np.arange(K + 1)[:, None]
    m = powers @ v * d.dx
    return MomentSequence(m, label or d.label)
