"""Independent reference computations for the pre-registered acceptance values.

None of this uses the package. Run as a script to regenerate
``fixtures/oracle_values.json``:

    python3 tests/oracles.py
"""

import json
from pathlib import Path

import mpmath
import numpy as np
import sympy as sp
from scipy import special

FIXTURES = Path(__file__).parent / "fixtures" / "oracle_values.json"

LO_Z = (2.0, 4.0, 6.0)
SLIT = {"c1": -2.0, "c2": 2.0, "w": 1.0}


# -- state moments by Gauss-Hermite quadrature ----------------------------------------


def direct_moments(coeffs, K, axis="q", nodes=160):
    """``<phi|X^k|phi>`` for ``k <= K`` from number-basis amplitudes.

    The position wavefunction is ``sum_n c_n H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))``
    and the momentum one carries an extra ``(-i)^n``; ``|psi|^2 x^k`` is a
    polynomial times ``e^{-x^2}``, which Gauss-Hermite quadrature integrates
    exactly once the node count exceeds half the degree.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = np.arange(c.size)
    if axis == "p":
        c = c * (-1j) ** n
    x, w = special.roots_hermite(nodes)
    log_norm = 0.5 * (n * np.log(2.0) + special.gammaln(n + 1) + 0.5 * np.log(np.pi))
    H = np.array([special.eval_hermite(int(k), x) for k in n])
    amp = (c * np.exp(-log_norm)) @ H
    dens = np.abs(amp) ** 2
    return np.array([np.sum(w * dens * x**k) for k in range(K + 1)])


# -- balanced homodyne by binomial expansion of the splitter ---------------------


def _lo_amplitudes(z, nmax):
    return [mpmath.exp(-z * z / 2) * mpmath.mpf(z) ** m / mpmath.sqrt(mpmath.factorial(m)) for m in range(nmax + 1)]


def splitter_counts(signal_n, z, lo_dim):
    """Distribution of ``n_d - n_c`` for ``|signal_n> (x) |z>`` behind a 50:50 splitter.

    With ``a^dag = (c^dag + d^dag)/sqrt(2)`` and ``b^dag = (d^dag - c^dag)/sqrt(2)``,
    ``|n, m>`` maps to ``(c^dag + d^dag)^n (d^dag - c^dag)^m / sqrt(2^(n+m) n! m!) |0, 0>``.
    Output amplitudes of different LO photon numbers ``m`` live in different
    total-number sectors, so their probabilities add.
    """
    mpmath.mp.dps = 40
    n = signal_n
    lo = _lo_amplitudes(z, lo_dim - 1)
    probs = {}
    for m in range(lo_dim):
        total = n + m
        amp = [mpmath.mpf(0)] * (total + 1)  # index = number of c photons
        for i in range(n + 1):
            for j in range(m + 1):
                k = i + j
                coef = mpmath.binomial(n, i) * mpmath.binomial(m, j) * (-1) ** j
                amp[k] += coef * mpmath.sqrt(mpmath.factorial(k) * mpmath.factorial(total - k))
        norm = mpmath.sqrt(mpmath.mpf(2) ** total * mpmath.factorial(n) * mpmath.factorial(m))
        for k in range(total + 1):
            diff = (total - k) - k
            probs[diff] = probs.get(diff, 0) + (lo[m] * amp[k] / norm) ** 2
    keys = sorted(probs)
    return np.array(keys), np.array([float(probs[k]) for k in keys])


def quadrature_density(signal_n, x):
    """Exact position density of ``|0>`` or ``|1>``."""
    g = np.exp(-x * x) / np.sqrt(np.pi)
    return g if signal_n == 0 else 2 * x * x * g


def lo_l1_error(signal_n, z):
    lo_dim = int(np.ceil(z * z + 8 * z + 16))
    diff, p = splitter_counts(signal_n, z, lo_dim)
    spacing = 1 / (np.sqrt(2) * z)
    x = diff * spacing
    return float(np.sum(np.abs(p / spacing - quadrature_density(signal_n, x))) * spacing)


# -- double slit by direct quadrature ----------------------------------------------


def _bump_expr():
    x = sp.symbols("x")
    w = sp.Integer(int(SLIT["w"]))
    return x, sp.exp(-(w**2) / (w**2 - x**2))


def slit_moments(K=8):
    """``<P^k>`` of the double-slit state for even ``k <= K``.

    The two bumps have disjoint supports, so cross terms vanish and
    ``<P^(2j)> = int (b^(j))^2 dx / int b^2 dx`` for the single profile ``b``.
    """
    mpmath.mp.dps = 30
    x, b = _bump_expr()
    norm = mpmath.quad(sp.lambdify(x, b**2, "mpmath"), [-1, 0, 1])
    out = {0: 1.0}
    for j in range(1, K // 2 + 1):
        f = sp.lambdify(x, sp.diff(b, x, j) ** 2, "mpmath")
        out[2 * j] = float(mpmath.quad(f, [-1, -0.5, 0, 0.5, 1]) / norm)
    return out


def _bump_transform(p, nodes=4000):
    """Normalised cosine transform ``(2 pi)^-1/2 int b(x) cos(p x) dx / ||b||``.

    Tanh-sinh nodes on ``(-1, 1)`` cluster where the profile flattens, which
    resolves its essential zeros at the end points.
    """
    t = np.linspace(-4.5, 4.5, nodes)
    dt = t[1] - t[0]
    u = np.tanh(0.5 * np.pi * np.sinh(t))
    du = 0.5 * np.pi * np.cosh(t) / np.cosh(0.5 * np.pi * np.sinh(t)) ** 2
    inside = np.abs(u) < 1
    u, du = u[inside], du[inside]
    b = np.exp(-1.0 / np.maximum(1 - u * u, 1e-300))
    norm = np.sqrt(np.sum(b * b * du) * dt)
    return (np.cos(np.outer(p, u)) @ (b * du)) * dt / (norm * np.sqrt(2 * np.pi))


def slit_l1(delta_a=0.0, delta_b=np.pi, p_max=400.0):
    """``int | |psi_a(p)|^2 - |psi_b(p)|^2 | dp`` for the two phases.

    ``|psi_delta(p)|^2 = B(p)^2 (1 + cos(delta - p (c2 - c1)))`` with ``B`` the
    transform of one normalised bump. The integrand has kinks where the
    difference changes sign; Gauss-Legendre panels are laid between them.
    """
    sep = SLIT["c2"] - SLIT["c1"]
    # sign changes of cos(da - p sep) - cos(db - p sep) = -2 sin((da+db)/2 - p sep) sin((da-db)/2)
    phase = 0.5 * (delta_a + delta_b)
    breaks = (phase - np.pi * np.arange(-2000, 2000)) / sep
    breaks = np.sort(breaks[np.abs(breaks) < p_max])
    edges = np.r_[-p_max, breaks, p_max]
    gx, gw = special.roots_legendre(24)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        p = 0.5 * (hi - lo) * gx + 0.5 * (hi + lo)
        B2 = _bump_transform(p) ** 2
        f = B2 * np.abs(np.cos(delta_a - p * sep) - np.cos(delta_b - p * sep))
        total += 0.5 * (hi - lo) * np.sum(gw * f)
    return float(total)


def generate():
    vals = {
        "lo_l1": {
            name: {f"{z:g}": lo_l1_error(n, z) for z in LO_Z} for name, n in (("vacuum", 0), ("one", 1))
        },
        "slit": {
            "geometry": SLIT,
            "l1_0_pi": slit_l1(0.0, np.pi),
            "l1_0_halfpi": slit_l1(0.0, np.pi / 2),
            "p_moments": {str(k): v for k, v in slit_moments(8).items()},
        },
    }
    return vals


if __name__ == "__main__":
    FIXTURES.parent.mkdir(exist_ok=True)
    vals = generate()
    FIXTURES.write_text(json.dumps(vals, indent=2, sort_keys=True) + "\n")
    print(json.dumps(vals, indent=2, sort_keys=True))
