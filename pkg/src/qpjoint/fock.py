"""Truncated number-basis linear algebra for a single bosonic mode.

Conventions used throughout the package:

* units with hbar = 1, ``[Q, P] = i``, vacuum variance of ``Q`` equal to 1/2;
* ``Q = (a^dag + a)/sqrt(2)`` and ``P = i (a^dag - a)/sqrt(2)``;
* the Weyl operator ``W(q, p) = exp(i (p Q - q P))`` translates the state by
  ``(+q, +p)`` in phase space, ``W^dag Q W = Q + q`` and ``W^dag P W = P + p``.
  In terms of the complex amplitude ``alpha = (q + i p)/sqrt(2)`` it is the
  usual displacement ``D(alpha)``.

Operators are plain complex ``numpy`` arrays; states are small frozen
containers that check their invariants on construction.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, special, stats

from .errors import (
    InvalidDimension,
    InvalidMixture,
    InvalidState,
    TruncationTooSmall,
    UnstableEvaluation,
)

DEFAULT_DIM = 64
TAIL_EPS = 1e-10
MARGIN = 8
TOL_NORM = 1e-8
TOL_HERM = 1e-10
TOL_PSD = 1e-10
# amplitudes below this fraction of the largest one count as outside the support
SUPPORT_RTOL = 1e-15

# Largest Hermite-function order evaluated by the scaled recurrence.
HERMITE_NMAX = 4096

_PI_M14 = np.pi ** -0.25


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {dim!r}", module="fock")
    return int(dim)


def _guard_margin(dim, margin):
    return min(margin, dim // 2)


@dataclass(frozen=True)
class StateVector:
    """Pure state as number-basis amplitudes ``c_0 .. c_{N-1}``."""

    coeffs: np.ndarray
    tail_eps: float = field(default=TAIL_EPS, repr=False)
    margin: int = field(default=MARGIN, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        _check_dim(c.size)
        norm = np.vdot(c, c).real
        if abs(norm - 1.0) > TOL_NORM:
            raise InvalidState(f"state norm is {norm!r}, expected 1", module="fock")
        m = _guard_margin(c.size, self.margin)
        tail = float(np.sum(np.abs(c[c.size - m:]) ** 2)) if m else 0.0
        if tail > self.tail_eps:
            raise TruncationTooSmall(
                f"tail mass {tail:.3e} in the top {m} levels exceeds {self.tail_eps:.1e}",
                module="fock",
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self):
        return self.coeffs.size

    @property
    def support(self):
        """Number of leading basis states carrying non-negligible amplitude."""
        a = np.abs(self.coeffs)
        nz = np.flatnonzero(a > SUPPORT_RTOL * a.max())
        return int(nz[-1]) + 1 if nz.size else 1

    def resized(self, dim):
        """The same state embedded in (or cropped to) dimension ``dim``."""
        c = np.zeros(dim, dtype=complex)
        n = min(dim, self.dim)
        if self.support > dim:
            raise TruncationTooSmall(f"state has support beyond dimension {dim}", module="fock")
        c[:n] = self.coeffs[:n]
        return StateVector(c, self.tail_eps, self.margin)

    def projector(self):
        return DensityMatrix(np.outer(self.coeffs, self.coeffs.conj()))

    def expect(self, op):
        return np.vdot(self.coeffs, op @ self.coeffs)


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state (or generating operator) as an ``N x N`` matrix."""

    matrix: np.ndarray
    tail_eps: float = field(default=TAIL_EPS, repr=False)
    margin: int = field(default=MARGIN, repr=False)

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDimension(f"density matrix must be square, got {rho.shape}", module="fock")
        dim = _check_dim(rho.shape[0])
        if np.max(np.abs(rho - rho.conj().T)) > TOL_HERM:
            raise InvalidState("density matrix is not Hermitian", module="fock")
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TOL_NORM:
            raise InvalidState(f"trace is {tr!r}, expected 1", module="fock")
        w = linalg.eigvalsh(rho)
        if w[0] < -TOL_PSD:
            raise InvalidState(f"density matrix has eigenvalue {w[0]:.3e}", module="fock")
        m = _guard_margin(dim, self.margin)
        tail = float(np.sum(np.diag(rho).real[dim - m:])) if m else 0.0
        if tail > self.tail_eps:
            raise TruncationTooSmall(
                f"tail population {tail:.3e} in the top {m} levels exceeds {self.tail_eps:.1e}",
                module="fock",
            )
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def support(self):
        a = np.abs(self.matrix).max(axis=0)
        nz = np.flatnonzero(a > SUPPORT_RTOL * a.max())
        return int(nz[-1]) + 1 if nz.size else 1

    def resized(self, dim):
        out = np.zeros((dim, dim), dtype=complex)
        n = min(dim, self.dim)
        if self.support > dim:
            raise TruncationTooSmall(f"state has support beyond dimension {dim}", module="fock")
        out[:n, :n] = self.matrix[:n, :n]
        return DensityMatrix(out, self.tail_eps, self.margin)

    def components(self, max_rank=16, cutoff=1e-14):
        """Spectral decomposition ``[(weight, StateVector), ...]``.

        Eigenvalues below ``cutoff`` are dropped and the remaining weights
        renormalised.
        """
        w, v = linalg.eigh(self.matrix)
        order = np.argsort(w)[::-1]
        keep = [i for i in order if w[i] > cutoff]
        if len(keep) > max_rank:
            raise InvalidMixture(
                f"state has rank {len(keep)} > {max_rank}; decomposition refused", module="fock"
            )
        total = float(np.sum(w[keep]))
        out = []
        for i in keep:
            vec = v[:, i]
            # fix the global phase so the largest entry is real positive
            j = np.argmax(np.abs(vec))
            vec = vec * np.exp(-1j * np.angle(vec[j]))
            vec = vec / np.linalg.norm(vec)
            out.append((float(w[i]) / total, StateVector(vec, self.tail_eps, self.margin)))
        return out

    def expect(self, op):
        return np.trace(self.matrix @ op)


def as_density(state):
    """Promote a ``StateVector`` to its projector; pass density matrices through."""
    if isinstance(state, StateVector):
        return state.projector()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state).__name__}")


def ladder(dim):
    """Annihilation operator ``a`` with ``a[n-1, n] = sqrt(n)``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def quadratures(dim):
    """Return the truncated ``(Q, P)`` pair built from :func:`ladder`.

    The truncation breaks the canonical commutator in the last diagonal
    entry; use :func:`quadrature_power` for exact low-lying matrix elements
    of powers.
    """
    a = ladder(dim)
    ad = a.conj().T
    return (ad + a) / np.sqrt(2), 1j * (ad - a) / np.sqrt(2)


@functools.lru_cache(maxsize=256)
def _quadrature_power(dim, k, axis):
    big = dim + k + 1
    op = quadratures(big)[0 if axis == "q" else 1]
    out = np.linalg.matrix_power(op, k)[:dim, :dim].copy()
    out.setflags(write=False)
    return out


def quadrature_power(dim, k, axis="q"):
    """``Q^k`` (or ``P^k``) with exact matrix elements on the truncated space.

    The power is formed in a space enlarged by ``k + 1`` levels and then
    cropped, so every entry equals the entry of the untruncated operator.
    """
    axis = _axis(axis)
    if k < 0:
        raise ValueError("power must be non-negative")
    return _quadrature_power(_check_dim(dim), int(k), axis)


def _axis(axis):
    a = str(axis).lower()
    if a not in ("q", "p"):
        raise ValueError(f"axis must be 'q' or 'p', got {axis!r}")
    return a


def _alpha(q, p):
    return (np.asarray(q, dtype=float) + 1j * np.asarray(p, dtype=float)) / np.sqrt(2)


def _genlaguerre_table(nmax, dmax, x):
    """``L_n^{(d)}(x)`` for ``n <= nmax``, ``d <= dmax`` by forward recurrence.

    Shape ``(dmax + 1, nmax + 1, x.size)``.
    """
    d = np.arange(dmax + 1, dtype=float)[:, None]
    out = np.empty((dmax + 1, nmax + 1, x.size))
    out[:, 0] = 1.0
    if nmax >= 1:
        out[:, 1] = 1.0 + d - x[None, :]
    for n in range(1, nmax):
        out[:, n + 1] = ((2 * n + 1 + d - x) * out[:, n] - (n + d) * out[:, n - 1]) / (n + 1)
    return out


def _laguerre_elements(alpha, rows, cols):
    """Closed-form ``<m|D(alpha)|n>`` for ``m < rows``, ``n < cols``.

    ``alpha`` is a 1-d array; the result has shape ``(alpha.size, rows, cols)``.
    """
    m, n = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    lo = np.minimum(m, n)
    d = np.abs(m - n)
    r = np.abs(alpha)
    r2 = r**2
    table = _genlaguerre_table(min(rows, cols) - 1, max(rows, cols) - 1, r2)
    lag = np.moveaxis(table[d, lo], -1, 0)
    zero = (r == 0)[:, None, None]
    rs = np.where(r == 0, 1.0, r)[:, None, None]
    # from the angle, so subnormal |alpha| cannot overflow the division
    unit = np.exp(1j * np.angle(alpha))[:, None, None]
    logpref = 0.5 * (special.gammaln(lo + 1) - special.gammaln(lo + d + 1)) + d * np.log(rs) - r2[:, None, None] / 2
    phase = np.where(m >= n, unit**d, (-unit.conj()) ** d)
    out = phase * lag * np.exp(logpref)
    # at alpha = 0 only the diagonal survives
    out = np.where(zero & (d > 0), 0.0, out)
    if not np.all(np.isfinite(out)):
        raise UnstableEvaluation("non-finite displacement matrix element", module="fock")
    return out


def displacement(q, p, dim):
    r"""Weyl operator ``W(q, p)`` with closed-form matrix elements.

    Uses the associated-Laguerre expression

    .. math::

        \langle m|D(\alpha)|n\rangle = \sqrt{n!/m!}\,\alpha^{m-n}
        e^{-|\alpha|^2/2} L_n^{(m-n)}(|\alpha|^2), \quad m \ge n,

    and the conjugate-symmetric form for ``m < n``. Entries are those of the
    untruncated operator, so the matrix is unitary only up to leakage out of
    the truncated space.
    """
    dim = _check_dim(dim)
    if not (np.isfinite(q) and np.isfinite(p)):
        raise ValueError("displacement requires finite q and p")
    if q == 0 and p == 0:
        return np.eye(dim, dtype=complex)
    return _laguerre_elements(np.atleast_1d(_alpha(q, p)), dim, dim)[0]


def displacement_expm(q, p, dim):
    """Cross-check path: ``expm(i (p Q - q P))`` of the truncated generator."""
    Q, P = quadratures(_check_dim(dim))
    return linalg.expm(1j * (p * Q - q * P))


def displacement_block(q, p, rows, cols, chunk=4096):
    """Batched ``W(q, p)[:rows, :cols]`` for arrays of phase-space points.

    Returns shape ``broadcast(q, p).shape + (rows, cols)``.
    """
    alpha = _alpha(*np.broadcast_arrays(q, p))
    shape = alpha.shape
    flat = alpha.ravel()
    out = np.empty((flat.size, rows, cols), dtype=complex)
    for start in range(0, flat.size, chunk):
        out[start:start + chunk] = _laguerre_elements(flat[start:start + chunk], rows, cols)
    return out.reshape(shape + (rows, cols))


def hermite_functions(nmax, x):
    """Orthonormal Hermite functions ``h_0 .. h_nmax`` at points ``x``.

    Normalised three-term recurrence
    ``h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}``. The Gaussian
    factor is carried as a separate log-scale that is folded back at the end,
    so large ``|x|`` does not underflow the recurrence before it has grown.
    Returns an array of shape ``(nmax + 1,) + x.shape``.
    """
    if nmax < 0 or nmax > HERMITE_NMAX:
        raise UnstableEvaluation(f"Hermite order {nmax} outside [0, {HERMITE_NMAX}]", module="fock")
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    logscale = -flat ** 2 / 2
    out = np.empty((nmax + 1, flat.size))
    prev = np.zeros_like(flat)
    cur = np.full_like(flat, _PI_M14)
    out[0] = cur * np.exp(logscale)
    for n in range(nmax):
        nxt = np.sqrt(2.0 / (n + 1)) * flat * cur - np.sqrt(n / (n + 1.0)) * prev
        big = np.abs(nxt) > 1e150
        if np.any(big):
            f = np.where(big, np.abs(nxt), 1.0)
            nxt, cur = nxt / f, cur / f
            logscale = logscale + np.log(f)
        prev, cur = cur, nxt
        out[n + 1] = cur * np.exp(logscale)
    if not np.all(np.isfinite(out)):
        raise UnstableEvaluation("non-finite Hermite function value", module="fock")
    return out.reshape((nmax + 1,) + x.shape)


def hermite_point(n, x):
    """Value of the ``n``-th L2-normalised Hermite function at ``x``."""
    if int(n) != n or n < 0:
        raise ValueError("Hermite order must be a non-negative integer")
    return float(hermite_functions(int(n), np.array([x], dtype=float))[int(n), 0])


def number_state(n, dim=DEFAULT_DIM):
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimension(f"number state {n} outside dimension {dim}", module="fock")
    c = np.zeros(dim, dtype=complex)
    c[n] = 1.0
    return StateVector(c)


def superposition(amplitudes, dim=DEFAULT_DIM):
    """Normalised ``sum_n amplitudes[n] |n>`` from a mapping or sequence."""
    dim = _check_dim(dim)
    c = np.zeros(dim, dtype=complex)
    items = amplitudes.items() if hasattr(amplitudes, "items") else enumerate(amplitudes)
    for n, a in items:
        c[int(n)] += a
    norm = np.linalg.norm(c)
    if norm == 0:
        raise InvalidState("superposition has zero norm", module="fock")
    return StateVector(c / norm)


def coherent_state(alpha, dim=DEFAULT_DIM, tail_eps=TAIL_EPS, margin=MARGIN):
    """Coherent state ``|alpha>``; ``<Q> = sqrt(2) Re(alpha)``."""
    dim = _check_dim(dim)
    alpha = complex(alpha)
    mean = abs(alpha) ** 2
    m = _guard_margin(dim, margin)
    tail = float(stats.poisson.sf(dim - m - 1, mean)) if mean > 0 else 0.0
    if tail > tail_eps:
        raise TruncationTooSmall(
            f"coherent amplitude {alpha} needs more than {dim} levels (tail {tail:.2e})",
            module="fock",
        )
    n = np.arange(dim)
    if mean == 0:
        c = (n == 0).astype(complex)
    else:
        logmag = n * np.log(abs(alpha)) - 0.5 * special.gammaln(n + 1) - mean / 2
        c = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    return StateVector(c / np.linalg.norm(c), tail_eps, margin)


def random_state(support, dim=DEFAULT_DIM, seed=0):
    """Random pure state on the first ``support`` number states."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=support) + 1j * rng.normal(size=support)
    return superposition(z, dim)


def mix(states: Sequence, weights: Sequence[float]):
    """Convex combination of pure projectors (or density matrices)."""
    w = np.asarray(weights, dtype=float)
    if len(states) == 0 or len(states) != w.size:
        raise InvalidMixture("need one weight per state", module="fock")
    if np.any(w < 0) or abs(w.sum() - 1.0) > TOL_NORM:
        raise InvalidMixture(f"weights {w.tolist()} are not a convex combination", module="fock")
    mats = [as_density(s).matrix for s in states]
    return DensityMatrix(sum(wi * m for wi, m in zip(w, mats)))


def conjugate_state(S):
    """Image of ``S`` under complex conjugation in position representation.

    Hermite functions are real, so in the number basis this is entrywise
    complex conjugation.
    """
    S = as_density(S)
    return DensityMatrix(S.matrix.conj(), S.tail_eps, S.margin)
