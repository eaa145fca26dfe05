"""Eight-port homodyne detection on position grids, and a finite local
oscillator balanced-homodyne model in the two-mode number basis.

Beam-splitter convention (frozen): output modes ``c = (a - b)/sqrt(2)`` and
``d = (a + b)/sqrt(2)``, so in position representation

    psi_out(x_c, x_d) = psi_in((x_c + x_d)/sqrt(2), (x_d - x_c)/sqrt(2)),

a proper rotation by 45 degrees. Detector 1 reads ``x_c`` and detector 2
reads ``p_d``; after rescaling by ``sqrt(2)`` the outcome pair is
``(X_a - X_b, P_a + P_b)``. With the reference mode prepared in the
complex-conjugated generator ``C S C`` these statistics are exactly the
phase-space distribution generated by ``S``. The three other sign variants
give ``S`` reflected in ``q``, ``p`` or both, which is invisible for
parity-symmetric generators such as number states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import fock
from .containers import Density1D
from .errors import GridTooSmall, InvalidInput, TruncationTooSmall
from .grid import Grid1D, GridWavefunction, continuum_fft, fock_to_grid
from .phasespace import GridSpec, PhaseSpaceHistogram

TOL_NORM = 1e-8
# mass allowed outside the disk that stays on-grid through all shears
ROTATION_LEAK = 1e-12
DEFAULT_GRID = Grid1D(-12.0, 12.0, 256)
MAX_RANK = 16


@dataclass(frozen=True)
class TwoModeWavefunction:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise InvalidInput("two-mode wavefunction must be n x n on the common grid", module="homodyne")
        norm = np.sum(np.abs(v) ** 2) * self.grid.dx**2
        if abs(norm - 1.0) > TOL_NORM:
            raise InvalidInput(f"two-mode norm {norm!r} differs from 1", module="homodyne")
        object.__setattr__(self, "values", v)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx**2)

    def inner(self, other):
        return np.vdot(self.values, other.values) * self.grid.dx**2


def two_mode_input(signal: GridWavefunction, reference: GridWavefunction):
    """Product wavefunction ``psi(x_a, x_b) = phi_sig(x_a) phi_ref(x_b)``."""
    if signal.grid != reference.grid:
        raise InvalidInput("signal and reference must share a grid", module="homodyne")
    return TwoModeWavefunction(signal.grid, np.outer(signal.values, reference.values))


def _shear(f, x, dx, shift_of, axis):
    """Resample ``f`` so that along ``axis`` the value at ``u`` becomes that at
    ``u + shift_of(v)``, ``v`` being the coordinate of the other axis."""
    n = f.shape[axis]
    k = 2 * np.pi * np.fft.fftfreq(n, dx)
    shifts = shift_of(x)
    if axis == 0:
        phase = np.exp(1j * np.outer(k, shifts))
    else:
        phase = np.exp(1j * np.outer(shifts, k))
    return np.fft.ifft(np.fft.fft(f, axis=axis) * phase, axis=axis)


def beam_splitter_rotate(psi: TwoModeWavefunction):
    """Apply the 50:50 beam splitter as a 45 degree coordinate rotation.

    The rotation is factored into three shears, ``R = Sx(t) Sy(-s) Sx(t)``
    with ``t = tan(pi/8)`` and ``s = sin(pi/4)``, each applied as an exact
    Fourier shift of the band-limited periodic interpolant.
    """
    g = psi.grid
    x = g.x
    center = 0.5 * (g.x_min + g.x_max)
    half = 0.5 * (g.x_max - g.x_min)
    X, Y = np.meshgrid(x - center, x - center, indexing="ij")
    outside = X**2 + Y**2 > (half / 1.5) ** 2
    leak = np.sum(np.abs(psi.values[outside]) ** 2) * g.dx**2
    if leak > ROTATION_LEAK:
        raise GridTooSmall(f"rotation would wrap {leak:.2e} of the norm around the grid", module="homodyne")
    t = np.tan(np.pi / 8)
    s = np.sin(np.pi / 4)
    f = psi.values
    f = _shear(f, x, g.dx, lambda y: t * y, axis=0)
    f = _shear(f, x, g.dx, lambda u: -s * u, axis=1)
    f = _shear(f, x, g.dx, lambda y: t * y, axis=0)
    return TwoModeWavefunction(g, f)


def joint_quadrature_density(psi_out: TwoModeWavefunction):
    """Joint density of ``x_c`` (detector 1) and ``p_d`` (detector 2).

    Outcomes are rescaled to signal phase-space coordinates
    ``(q, p) = sqrt(2) (x_c, p_d)``; the density picks up the Jacobian 1/2.
    """
    g = psi_out.grid
    amp = continuum_fft(psi_out.values, g.x_min, g.dx, axis=1)
    dens = 0.5 * np.abs(amp) ** 2
    q_spec = GridSpec.from_centers(np.sqrt(2) * g.x)
    p_spec = GridSpec.from_centers(np.sqrt(2) * g.p)
    return PhaseSpaceHistogram(q_spec, p_spec, dens, "eight-port")


def _grid_spectrum(state, grid, max_rank):
    rho = fock.as_density(state)
    return [(w, fock_to_grid(v, grid)) for w, v in rho.components(max_rank=max_rank)]


def eight_port_observable(signal, S, grid=DEFAULT_GRID, max_rank=MAX_RANK):
    """Joint detector statistics for signal ``rho`` and generator ``S``.

    Both are decomposed spectrally; the reference mode is prepared in the
    components of ``conjugate_state(S)`` and the pure-state pipeline
    ``two_mode_input -> beam_splitter_rotate -> joint_quadrature_density`` is
    mixed with the product weights.
    """
    sig = _grid_spectrum(signal, grid, max_rank)
    ref = _grid_spectrum(fock.conjugate_state(S), grid, max_rank)
    total = None
    for ws, phi in sig:
        for wr, chi in ref:
            h = joint_quadrature_density(beam_splitter_rotate(two_mode_input(phi, chi)))
            total = ws * wr * h.values if total is None else total + ws * wr * h.values
    return PhaseSpaceHistogram(h.q_spec, h.p_spec, total, "eight-port")


def lo_dim_required(z):
    return int(np.ceil(z * z + 8 * z + 16))


def balanced_homodyne_density(signal, lo_amplitude, lo_dim=None):
    """Distribution of ``(n_d - n_c)/(sqrt(2) z)`` for a coherent LO ``|z>``.

    With the splitter convention of this module the photon-number difference
    ``n_d - n_c`` equals ``a^dag b + b^dag a`` on the input modes; for real
    ``z`` its mean is ``sqrt(2) z <Q>``. That operator conserves the
    total photon number, so it is diagonalised block by block (each block is
    a tridiagonal matrix that is kept whole, hence free of truncation
    artefacts) and the outcome weights are the squared projections of
    ``signal (x) |z>`` onto its eigenvectors. Returns a density on the
    lattice ``m / (sqrt(2) z)``, ``m`` integer.
    """
    z = float(lo_amplitude)
    if z <= 0:
        raise InvalidInput("LO amplitude must be positive", module="homodyne")
    need = lo_dim_required(z)
    lo_dim = need if lo_dim is None else int(lo_dim)
    if lo_dim < need:
        raise TruncationTooSmall(f"LO dimension {lo_dim} below required {need} for z = {z}", module="homodyne")
    if isinstance(signal, fock.DensityMatrix):
        raise InvalidInput("balanced homodyne model takes a pure signal", module="homodyne")
    c = signal.coeffs[: signal.support]
    lo = fock.coherent_state(z, lo_dim).coeffs
    ns, nl = c.size, lo.size
    n_max = (ns - 1) + (nl - 1)
    weights = np.zeros(2 * n_max + 1)
    for N in range(n_max + 1):
        na = np.arange(N + 1)
        nb = N - na
        amp = np.where(na < ns, c[np.minimum(na, ns - 1)], 0) * np.where(nb < nl, lo[np.minimum(nb, nl - 1)], 0)
        if not np.any(amp):
            continue
        if N == 0:
            weights[n_max] += abs(amp[0]) ** 2
            continue
        off = np.sqrt((na[:-1] + 1.0) * nb[:-1])
        ev, vec = linalg.eigh_tridiagonal(np.zeros(N + 1), off)
        proj = np.abs(vec.T @ amp) ** 2
        m = np.rint(ev).astype(int)
        np.add.at(weights, m + n_max, proj)
    m = np.arange(-n_max, n_max + 1)
    spacing = 1.0 / (np.sqrt(2) * z)
    return Density1D(m * spacing, weights / spacing, f"balanced-homodyne z={z:g}")


def quadrature_density(signal, x):
    """Exact position-quadrature density ``|sum_n c_n h_n(x)|^2`` of a pure state."""
    c = signal.coeffs[: signal.support]
    return np.abs(c @ fock.hermite_functions(c.size - 1, x)) ** 2


def lo_error(signal, z, lo_dim=None):
    """L1 distance between the finite-LO density and the exact ``Q`` density."""
    d = balanced_homodyne_density(signal, z, lo_dim)
    return float(np.sum(np.abs(d.values - quadrature_density(signal, d.x))) * d.dx)
