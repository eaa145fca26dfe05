"""Acceptance criteria, one test per criterion.

Each test records a single ``PASS``/``FAIL`` line (see ``conftest.py``, which
prints them in the terminal summary); run this file directly to print the
lines without pytest.
"""

import functools
import json
import time
from pathlib import Path

import numpy as np
from scipy import special

from qpjoint import fock, grid, homodyne, moments, phasespace as ps
from qpjoint.containers import MomentSequence

import oracles
from conftest import generators, matrix_signals, state_family

ORACLE = json.loads((Path(__file__).parent / "fixtures" / "oracle_values.json").read_text())
LINES = []

K = 8
BASE_DIM = 64
BIG_DIM = 128
SHOTS = 10**6
SHOT_SEED = 20240611
HERMITE = ["e1", "e2", "e3", "e4", "e5", "e6", "e0+e2", "e0+ie3", "coh0", "random8"]


def record(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {detail}"
    LINES.append(line)
    return ok


def scale(phi, k_max, axis):
    """sqrt(<X^(2k)>): the natural size of the k-th moment; finite even when <X^k> = 0."""
    return np.sqrt(oracles.direct_moments(phi.coeffs[: phi.support], 2 * k_max, axis)[::2])


# -- shared evaluations -------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def recovery(dim):
    """Operator-path recovered moments vs the quadrature oracle, all states x generators."""
    fam, gens = state_family(dim), generators(dim)
    out = {}
    for name, phi in fam.items():
        for g, S in gens.items():
            for axis in ("q", "p"):
                alpha = ps.marginal_moments(phi, S, K, axis, cross_check=False)
                beta = moments.recover_moments(alpha, ps.s_coefficients(S, K, axis))
                direct = oracles.direct_moments(phi.coeffs[: phi.support], K, axis)
                out[name, g, axis] = (alpha.values, beta.values, direct, scale(phi, K, axis))
    return out


@functools.lru_cache(maxsize=None)
def histograms(dim):
    sig, gens = matrix_signals(dim), generators(dim)
    return {(s, g): ps.gs_histogram(sig[s], gens[g]) for s in sig for g in gens}


@functools.lru_cache(maxsize=None)
def cross_path(dim, half_width=None):
    """Operator minus grid moments for k <= 6.

    The default histogram grid is used unless ``half_width`` is given, in which
    case the grid is widened to ``[-half_width, half_width]^2`` at the
    default cell width.
    """
    sig, gens = matrix_signals(dim), generators(dim)
    if half_width is None:
        hists = histograms(dim)
    else:
        spec = ps.GridSpec(-half_width, half_width, int(round(256 * half_width / 8)))
        hists = {(s, g): ps.gs_histogram(sig[s], gens[g], spec, spec) for s in sig for g in gens}
    out = {}
    for (s, g), h in hists.items():
        worst = 0.0
        for axis in ("q", "p"):
            op = ps.marginal_moments(sig[s], gens[g], 6, axis, cross_check=False).values
            gr = ps.moments_of_density(ps.marginal_density(h, axis), 6)
            worst = max(worst, float(np.max(np.abs(gr - op))))
        out[s, g] = worst
    return out


def position_density(state, x):
    rho = fock.as_density(state)
    n = rho.support
    h = fock.hermite_functions(n - 1, x)
    return np.einsum("m...,mn,n...->...", h, rho.matrix[:n, :n], h).real


@functools.lru_cache(maxsize=None)
def convolution(dim):
    sig, gens = matrix_signals(dim), generators(dim)
    x = np.linspace(-12, 12, 4097)
    out = {}
    for (s, g), h in histograms(dim).items():
        md = ps.marginal_density(h, "q")
        pred = position_density(gens[g], x[None, :] - md.x[:, None]) @ position_density(sig[s], x) * (x[1] - x[0])
        out[s, g] = float(np.sum(np.abs(md.values - pred)) * md.dx)
    return out


@functools.lru_cache(maxsize=None)
def keystone(dim):
    sig, gens = matrix_signals(dim), generators(dim)
    out = {}
    t0 = time.perf_counter()
    for s in sig:
        for g in gens:
            h = homodyne.eight_port_observable(sig[s], gens[g])
            ref = ps.gs_histogram(sig[s], gens[g], h.q_spec, h.p_spec)
            out[s, g] = h.l1_distance(ref)
    return out, time.perf_counter() - t0


# -- criteria -----------------------------------------------------------------------


def test_criterion_01_moment_recovery_operator_path():
    rec = recovery(BASE_DIM)
    worst = max(float(np.max(np.abs(b - d) / sc)) for _, b, d, sc in rec.values())
    ok = worst <= 1e-6
    record(1, ok, f"operator path, {len(rec)} (state, S, axis) cases, worst |beta - direct| / sqrt(<X^2k>) = {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_01_moment_recovery_sampled_path():
    fam, gens = state_family(BASE_DIM), generators(BASE_DIM)
    seeds = iter(np.random.SeedSequence(SHOT_SEED).spawn(len(fam) * len(gens)))
    worst_z, worst_rel, n_cases = 0.0, 0.0, 0
    for name, phi in fam.items():
        for g, S in gens.items():
            h = ps.gs_histogram(phi, S)
            xy = ps.sample_outcomes(h, SHOTS, next(seeds))
            for i, axis in enumerate(("q", "p")):
                _, beta = moments.shot_moments(xy[:, i], ps.s_coefficients(S, K, axis))
                direct = oracles.direct_moments(phi.coeffs[: phi.support], K, axis)
                dev = np.abs(beta.values - direct)[1:]
                worst_z = max(worst_z, float(np.max(dev / beta.stderr[1:])))
                worst_rel = max(worst_rel, float(np.max(dev / scale(phi, K, axis)[1:])))
                n_cases += 1
    ok = worst_z <= 5.0
    record(
        1,
        ok,
        f"sampled path, {n_cases} cases at {SHOTS:.0e} shots, worst deviation {worst_z:.2f} standard errors "
        f"(band 5), worst scaled deviation {worst_rel:.1e}",
    )
    assert ok


def test_criterion_02_golden_values():
    vac, one = fock.number_state(0, BASE_DIM), fock.number_state(1, BASE_DIM)
    got = {}
    for name, phi in (("vacuum", vac), ("one", one)):
        a = ps.marginal_moments(phi, vac, 2, "q")
        got[name] = (a[2], moments.recover_moments(a, ps.s_coefficients(vac, 2, "q"))[2])
    want = {"vacuum": (1.0, 0.5), "one": (2.0, 1.5)}
    err = max(abs(got[n][i] - want[n][i]) for n in want for i in (0, 1))
    ok = err <= 1e-6
    record(
        2,
        ok,
        f"alpha_2/beta_2 vacuum {got['vacuum'][0]:.12f}/{got['vacuum'][1]:.12f}, "
        f"|1> {got['one'][0]:.12f}/{got['one'][1]:.12f}, max error {err:.1e} (tol 1e-6)",
    )
    assert ok


def test_criterion_03_cross_path_consistency():
    res = cross_path(BASE_DIM)
    bad = {k: v for k, v in res.items() if v > 1e-6}
    worst = max(res.values())
    detail = f"{len(res) - len(bad)}/{len(res)} pairs within 1e-6 (k <= 6, grid [-8,8]^2 x 256^2), worst {worst:.1e}"
    if bad:
        detail += "; over: " + ", ".join(f"{s}/{g} {v:.1e}" for (s, g), v in sorted(bad.items(), key=lambda t: -t[1]))
    if bad:
        # same cell width, larger domain: isolates truncation of the tails at |q|, |p| = 8
        wide = cross_path(BASE_DIM, 12.0)
        detail += f"; on [-12,12]^2 at the same cell width the worst is {max(wide[k] for k in bad):.1e}"
    ok = not bad
    record(3, ok, detail)
    assert ok


def test_criterion_04_convolution_identity():
    res = convolution(BASE_DIM)
    worst = max(res.values())
    ok = worst <= 1e-3
    record(4, ok, f"q-marginal vs rho * reflected S over {len(res)} pairs, worst L1 {worst:.1e} (tol 1e-3)")
    assert ok


def test_criterion_05_homodyne_keystone():
    res, seconds = keystone(BASE_DIM)
    worst = max(res.values())
    ok = worst <= 1e-3 and seconds < 120
    record(5, ok, f"eight-port vs gs_histogram over {len(res)} pairs, worst L1 {worst:.1e} (tol 1e-3), {seconds:.1f} s (limit 120 s)")
    assert ok


def test_criterion_06_high_amplitude_convergence():
    details, ok = [], True
    for name, n in (("vacuum", 0), ("one", 1)):
        fixed = ORACLE["lo_l1"][name]
        errs = [homodyne.lo_error(fock.number_state(n, BASE_DIM), z) for z in oracles.LO_Z]
        decreasing = all(b < a for a, b in zip(errs, errs[1:]))
        # pre-registered thresholds: the oracle values themselves, up to rounding
        below = all(e <= fixed[f"{z:g}"] * (1 + 1e-9) + 1e-12 for e, z in zip(errs, oracles.LO_Z))
        ok &= decreasing and below
        details.append(f"{name} " + " > ".join(f"{e:.4e}" for e in errs))
    record(6, ok, "L1 to exact quadrature density at z = 2, 4, 6: " + "; ".join(details) + " (strict decrease, <= oracle)")
    assert ok


def test_criterion_07_double_slit():
    g = grid.Grid1D(-64.0, 64.0, 65536)
    deltas = (0.0, np.pi / 2, np.pi)
    dens = [grid.momentum_density(grid.double_slit_state(-2, 2, 1, d, g)) for d in deltas]
    ms = [grid.grid_moments(d, K, edge_weight=1e-10, relative=True).values for d in dens]
    absm = (np.abs(dens[0].x)[None] ** np.arange(K + 1)[:, None]) @ dens[0].values * dens[0].dx
    spread = max(float(np.max(np.abs(m - ms[0]) / absm)) for m in ms)
    even = np.arange(0, K + 1, 2)
    ref = np.array([ORACLE["slit"]["p_moments"][str(k)] for k in even])
    vs_oracle = float(np.max(np.abs(ms[0][even] - ref) / ref))
    l1 = moments.compare_densities(dens[0], dens[2])["l1"]
    target = ORACLE["slit"]["l1_0_pi"]
    ok = spread <= 1e-6 and vs_oracle <= 1e-6 and l1 >= 0.1 and abs(l1 - target) <= 0.01 * target
    record(
        7,
        ok,
        f"<P^k> spread over delta {spread:.1e} (tol 1e-6), vs quadrature oracle {vs_oracle:.1e}; "
        f"L1(delta=0, pi) = {l1:.6f} vs oracle {target:.6f} (floor 0.1, 1% band)",
    )
    assert ok


def test_criterion_08_exponential_bound():
    rec = recovery(BASE_DIM)
    verdicts = [moments.exp_bound_fit(MomentSequence(b)) for (n, _, _), (_, b, _, _) in rec.items() if n in HERMITE]
    n_conf = sum(v.confirmed for v in verdicts)
    synth = moments.exp_bound_fit(MomentSequence(special.factorial(2 * np.arange(K + 1))))
    ok = n_conf == len(verdicts) and not synth.confirmed
    record(8, ok, f"{n_conf}/{len(verdicts)} Hermite-combination beta sequences confirmed; (2k)! -> {synth.verdict} (trend {synth.trend:.2f})")
    assert ok


def test_criterion_09_informational_completeness():
    vac = ps.info_completeness_scan(fock.number_state(0, BASE_DIM))
    one = ps.info_completeness_scan(fock.number_state(1, BASE_DIM))
    diag = np.hypot(one.q_spec.width, one.p_spec.width)
    r = np.hypot(one.centers[:, 0], one.centers[:, 1])
    off = float(np.max(np.abs(r - np.sqrt(2)))) if r.size else np.inf
    ok = vac.empty and not one.empty and off <= diag
    record(
        9,
        ok,
        f"vacuum: {len(vac.cells)} zero cells (min |Tr W S| {vac.min_abs:.1e}); |1><1|: {len(one.cells)} cells, "
        f"max distance to circle r^2 = 2 {off:.3f} (one cell diagonal {diag:.3f})",
    )
    assert ok


def test_criterion_10_truncation_stability():
    parts = {}
    r64, r128 = recovery(BASE_DIM), recovery(BIG_DIM)
    parts["beta/alpha"] = max(
        float(np.max(np.abs(np.r_[r64[k][0] - r128[k][0], r64[k][1] - r128[k][1]]))) for k in r64
    )
    h64, h128 = histograms(BASE_DIM), histograms(BIG_DIM)
    parts["histograms"] = max(float(np.max(np.abs(h64[k].values - h128[k].values))) for k in h64)
    c64, c128 = cross_path(BASE_DIM), cross_path(BIG_DIM)
    parts["cross-path"] = max(abs(c64[k] - c128[k]) for k in c64)
    v64, v128 = convolution(BASE_DIM), convolution(BIG_DIM)
    parts["convolution L1"] = max(abs(v64[k] - v128[k]) for k in v64)
    k64, k128 = keystone(BASE_DIM)[0], keystone(BIG_DIM)[0]
    parts["keystone L1"] = max(abs(k64[k] - k128[k]) for k in k64)
    vac, one = fock.number_state(0, BIG_DIM), fock.number_state(1, BIG_DIM)
    golden = [ps.marginal_moments(vac, vac, 2, "q")[2] - 1.0, ps.marginal_moments(one, vac, 2, "q")[2] - 2.0]
    parts["golden"] = max(abs(x) for x in golden)
    worst = max(parts.values())
    ok = worst <= 1e-6
    record(10, ok, f"N = 128 vs N = 64, largest change {worst:.1e} (tol 1e-6): " + ", ".join(f"{k} {v:.1e}" for k, v in parts.items()))
    assert ok


if __name__ == "__main__":
    import sys

    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(LINES))
    sys.exit(0 if all(line.startswith("[PASS]") for line in LINES) else 1)
