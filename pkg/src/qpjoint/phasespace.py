"""Covariant phase-space observables generated by a density operator ``S``.

The observable assigns to a phase-space cell the operator
``(2 pi)^-1 \\int W(q, p) S W(q, p)^dag dq dp``; its distribution in a state
``rho`` has the density ``g(q, p) = Tr[rho W S W^dag] / (2 pi)``. With
``S = |0><0|`` this is the Husimi function.

Densities are evaluated from the closed-form Weyl matrix elements restricted
to the supports of ``rho`` and ``S``, so no truncation error enters beyond
the truncation of the states themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

from . import fock
from .containers import Density1D, MomentSequence
from .errors import (
    ConditionViolated,
    GridTooSmall,
    InvalidInput,
    NumericsInconsistent,
    TruncationError,
)

TOL_IMAG = 1e-10
TOL_PSD = 1e-10
MASS_TOL = 1e-4
CROSS_TOL = 1e-6
CROSS_ORDER = 6
EDGE_TOL = 1e-10
K_MAX = 16


@dataclass(frozen=True)
class GridSpec:
    """Uniform axis of ``count`` cells covering ``[lo, hi]``."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not self.hi > self.lo or self.count < 1:
            raise InvalidInput(f"bad grid spec {self}", module="phasespace")

    @classmethod
    def from_centers(cls, centers):
        c = np.asarray(centers, dtype=float)
        d = c[1] - c[0]
        if not np.allclose(np.diff(c), d, rtol=1e-9, atol=0):
            raise InvalidInput("axis centres are not uniform", module="phasespace")
        return cls(float(c[0] - d / 2), float(c[-1] + d / 2), int(c.size))

    @property
    def width(self):
        return (self.hi - self.lo) / self.count

    @property
    def centers(self):
        return self.lo + self.width * (np.arange(self.count) + 0.5)

    @property
    def edges(self):
        return self.lo + self.width * np.arange(self.count + 1)

    def to_dict(self):
        return {"lo": self.lo, "hi": self.hi, "count": self.count}


DEFAULT_Q = GridSpec(-8.0, 8.0, 256)
DEFAULT_P = GridSpec(-8.0, 8.0, 256)


@dataclass(frozen=True)
class PhaseSpaceHistogram:
    """Density sampled at cell centres of a rectangular ``(q, p)`` grid."""

    q_spec: GridSpec
    p_spec: GridSpec
    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.q_spec.count, self.p_spec.count):
            raise InvalidInput("histogram shape does not match grid specs", module="phasespace")
        if np.min(v) < -TOL_PSD:
            raise TruncationError(f"negative density {np.min(v):.2e}", module="phasespace")
        v = np.clip(v, 0.0, None)
        object.__setattr__(self, "values", v)

    @property
    def q(self):
        return self.q_spec.centers

    @property
    def p(self):
        return self.p_spec.centers

    @property
    def cell_area(self):
        return self.q_spec.width * self.p_spec.width

    @property
    def mass(self):
        return float(self.values.sum() * self.cell_area)

    def l1_distance(self, other):
        if self.values.shape != other.values.shape or not (
            np.allclose(self.q, other.q) and np.allclose(self.p, other.p)
        ):
            raise InvalidInput("histograms live on different grids", module="phasespace")
        return float(np.abs(self.values - other.values).sum() * self.cell_area)


@dataclass(frozen=True)
class CoefficientTable:
    """Lower-triangular ``s[k, l] = C(k, l) (-1)^(k-l) Tr[X^(k-l) S]``."""

    axis: str
    s: np.ndarray

    @property
    def K(self):
        return self.s.shape[0] - 1


def _blocks(rho, S):
    rho = fock.as_density(rho)
    S = fock.as_density(S)
    nr, ns = rho.support, S.support
    return rho.matrix[:nr, :nr], S.matrix[:ns, :ns]


def gs_values(rho, S, q, p, chunk=8192):
    """Vectorised density ``Tr[rho W S W^dag] / (2 pi)`` at arrays ``q``, ``p``."""
    r, s = _blocks(rho, S)
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    qf, pf = q.ravel(), p.ravel()
    out = np.empty(qf.size, dtype=complex)
    for a in range(0, qf.size, chunk):
        B = fock.displacement_block(qf[a:a + chunk], pf[a:a + chunk], r.shape[0], s.shape[0])
        T = B @ s
        out[a:a + chunk] = np.einsum("ab,xbd,xad->x", r, T, B.conj(), optimize=True)
    out /= 2 * np.pi
    scale = max(1.0, float(np.max(np.abs(out.real), initial=0.0)))
    if np.max(np.abs(out.imag), initial=0.0) > TOL_IMAG * scale:
        raise TruncationError("phase-space density has a non-negligible imaginary part", module="phasespace")
    vals = out.real
    if np.min(vals, initial=0.0) < -TOL_PSD:
        raise TruncationError(f"negative phase-space density {np.min(vals):.2e}", module="phasespace")
    return np.clip(vals, 0.0, None).reshape(q.shape)


def gs_density(rho, S, q, p):
    """Phase-space density of ``rho`` for the observable generated by ``S``."""
    return float(gs_values(rho, S, np.array([q]), np.array([p]))[0])


def gs_histogram(rho, S, q_spec=DEFAULT_Q, p_spec=DEFAULT_P, mass_tol=MASS_TOL, label=""):
    """Tabulate :func:`gs_density` at the cell centres of the grid."""
    Qg, Pg = np.meshgrid(q_spec.centers, p_spec.centers, indexing="ij")
    vals = gs_values(rho, S, Qg, Pg)
    h = PhaseSpaceHistogram(q_spec, p_spec, vals, label)
    if h.mass < 1.0 - mass_tol:
        raise GridTooSmall(f"histogram mass {h.mass:.6f} below 1 - {mass_tol}", module="phasespace")
    return h


def _trace_powers(S, K, axis):
    S = fock.as_density(S)
    return np.array([np.trace(S.matrix @ fock.quadrature_power(S.dim, j, axis)).real for j in range(K + 1)])


def _check_edge(S, K, axis, edge_tol):
    """Finite proxy of ``X^K sqrt(S)`` being Hilbert-Schmidt.

    Every truncated trace is finite, so what is checked instead is that the
    Hilbert-Schmidt norm of ``X^K sqrt(S)`` is not carried by the top
    ``margin`` levels of the truncation.
    """
    S = fock.as_density(S)
    dim = S.dim
    big = dim + K + 1
    X = fock.quadratures(big)[0 if axis == "q" else 1]
    XK = np.linalg.matrix_power(X, K)[:, :dim]
    w, v = linalg.eigh(S.matrix)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    M = XK @ root
    weight = np.sum(np.abs(M) ** 2, axis=1)
    total = weight.sum()
    edge = weight[dim - min(S.margin, dim // 2):].sum()
    if total > 0 and edge / total > edge_tol:
        raise ConditionViolated(
            f"Tr[S X^{2 * K}] is dominated by the truncation edge ({edge / total:.2e})", module="phasespace"
        )


def s_coefficients(S, K, axis="q", edge_tol=EDGE_TOL):
    """Coefficient table linking state moments to marginal moments."""
    axis = fock._axis(axis)
    if K < 0 or K > K_MAX:
        raise InvalidInput(f"K must lie in [0, {K_MAX}]", module="phasespace")
    _check_edge(S, K, axis, edge_tol)
    t = _trace_powers(S, K, axis)
    s = np.zeros((K + 1, K + 1))
    for k in range(K + 1):
        for l in range(k + 1):
            s[k, l] = special.comb(k, l, exact=True) * (-1) ** (k - l) * t[k - l]
    return CoefficientTable(axis, s)


def moment_operator(S, k, axis="q", dim=None):
    """Operator whose expectation is the ``k``-th marginal moment."""
    S = fock.as_density(S)
    table = s_coefficients(S, k, axis)
    dim = dim or S.dim
    return sum(table.s[k, l] * fock.quadrature_power(dim, l, table.axis) for l in range(k + 1))


def marginal_density(h, axis="q"):
    axis = fock._axis(axis)
    if axis == "q":
        return Density1D(h.q, h.values.sum(axis=1) * h.p_spec.width, "marginal_q")
    return Density1D(h.p, h.values.sum(axis=0) * h.q_spec.width, "marginal_p")


def moments_of_density(d, K):
    return (d.x[None, :] ** np.arange(K + 1)[:, None]) @ d.values * d.dx


def marginal_moments(rho, S, K, axis="q", cross_check=True, histogram=None,
                     cross_tol=CROSS_TOL, cross_order=CROSS_ORDER):
    """Moments of one marginal of the phase-space distribution.

    Path (i) is ``Tr[rho L_k]`` with the moment operators of
    :func:`moment_operator`. With ``cross_check`` the moments are also
    integrated from the marginal of ``histogram`` (default grid if omitted)
    and the per-order difference is stored in ``discrepancy``; orders up to
    ``cross_order`` must agree within ``cross_tol``.
    """
    axis = fock._axis(axis)
    rho = fock.as_density(rho)
    S = fock.as_density(S)
    dim = max(rho.dim, S.dim)
    rho_m, S_m = rho.resized(dim), S.resized(dim)
    table = s_coefficients(S_m, K, axis)
    beta_op = np.array([np.trace(rho_m.matrix @ fock.quadrature_power(dim, l, axis)).real for l in range(K + 1)])
    alpha = table.s @ beta_op
    discrepancy = None
    if cross_check:
        h = histogram if histogram is not None else gs_histogram(rho, S)
        grid_alpha = moments_of_density(marginal_density(h, axis), K)
        discrepancy = grid_alpha - alpha
        n = min(K, cross_order) + 1
        worst = np.max(np.abs(discrepancy[:n]))
        if worst > cross_tol:
            raise NumericsInconsistent(
                f"operator and grid moments differ by {worst:.2e} (> {cross_tol})", module="phasespace"
            )
    return MomentSequence(alpha, f"alpha_{axis}", discrepancy=discrepancy)


def state_moments(rho, K, axis="q"):
    """Direct moments ``Tr[rho X^k]`` of the state itself."""
    axis = fock._axis(axis)
    rho = fock.as_density(rho)
    vals = [np.trace(rho.matrix @ fock.quadrature_power(rho.dim, k, axis)).real for k in range(K + 1)]
    return MomentSequence(vals, f"direct_{axis}")


@dataclass(frozen=True)
class ZeroSetReport:
    eps: float
    cells: np.ndarray
    centers: np.ndarray
    min_abs: float
    q_spec: GridSpec
    p_spec: GridSpec

    @property
    def empty(self):
        return len(self.cells) == 0

    def to_dict(self):
        return {
            "eps": self.eps,
            "n_cells": int(len(self.cells)),
            "min_abs": self.min_abs,
            "centers": self.centers.tolist(),
            "q_spec": self.q_spec.to_dict(),
            "p_spec": self.p_spec.to_dict(),
        }


def characteristic(S, q, p):
    """``Tr[W(q, p) S]`` at arrays of points."""
    S = fock.as_density(S)
    ns = S.support
    s = S.matrix[:ns, :ns]
    B = fock.displacement_block(q, p, ns, ns)
    return np.einsum("...mn,nm->...", B, s)


def info_completeness_scan(S, q_spec=GridSpec(-6.0, 6.0, 256), p_spec=GridSpec(-6.0, 6.0, 256), eps=1e-8):
    """Cells where ``Tr[W(q, p) S]`` may vanish.

    ``Tr[W S]`` is sampled at cell corners and centres. A cell's minimum
    modulus is estimated as zero when both the real and the imaginary part
    change sign over its corners, otherwise as the smallest sampled modulus.
    Cells whose estimate is strictly below ``eps`` are reported.
    """
    Qe, Pe = np.meshgrid(q_spec.edges, p_spec.edges, indexing="ij")
    corners = characteristic(S, Qe, Pe)
    Qc, Pc = np.meshgrid(q_spec.centers, p_spec.centers, indexing="ij")
    centers = characteristic(S, Qc, Pc)
    # rounding noise on an identically vanishing part must not fake sign changes
    re = np.where(np.abs(corners.real) < 1e-15, 0.0, corners.real)
    im = np.where(np.abs(corners.imag) < 1e-15, 0.0, corners.imag)

    def quad(a):
        return np.stack([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])

    qre, qim = quad(re), quad(im)
    brackets = (qre.min(0) <= 0) & (qre.max(0) >= 0) & (qim.min(0) <= 0) & (qim.max(0) >= 0)
    est = np.minimum(np.abs(quad(corners)).min(0), np.abs(centers))
    est = np.where(brackets, 0.0, est)
    cells = np.argwhere(est < eps)
    min_abs = float(min(np.abs(corners).min(), np.abs(centers).min()))
    pts = np.column_stack([q_spec.centers[cells[:, 0]], p_spec.centers[cells[:, 1]]]) if len(cells) else np.empty((0, 2))
    return ZeroSetReport(eps, cells, pts, min_abs, q_spec, p_spec)


def sample_outcomes(h, n_shots, seed):
    """Draw ``n_shots`` outcome pairs from a histogram.

    Cells are chosen by inverse-CDF lookup and the outcome is placed
    uniformly inside the cell. The Philox counter-based generator keeps the
    stream reproducible for a given seed. Returns an ``(n_shots, 2)`` array.
    """
    if n_shots < 1:
        raise InvalidInput("n_shots must be >= 1", module="phasespace")
    rng = np.random.Generator(np.random.Philox(seed))
    cdf = np.cumsum(h.values.ravel())
    u = rng.random(n_shots) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    iq, ip = np.unravel_index(idx, h.values.shape)
    jitter = rng.random((n_shots, 2))
    q = h.q_spec.lo + (iq + jitter[:, 0]) * h.q_spec.width
    p = h.p_spec.lo + (ip + jitter[:, 1]) * h.p_spec.width
    return np.column_stack([q, p])
