"""Batch experiment runner.

A run is described by one YAML file; ``--set key=value`` overrides any key
by dotted path. Every run writes CSV data files and a self-contained
``report.json`` into the output directory.

Usage::

    python -m qpjoint run config.yaml --set K=10 --set state.n=3 --out results/
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import fock, grid, homodyne, io, moments, phasespace
from .containers import MomentSequence
from .errors import ConfigError, QPJointError

KINDS = ("qmarginals", "doubleslit", "homodyne-joint", "homodyne-lo", "infocheck")
THREADS_ENV = "QPJOINT_THREADS"

DEFAULTS = {
    "experiment": "qmarginals",
    "dim": 64,
    "K": 8,
    "state": {"family": "number", "n": 0},
    "generator": {"family": "number", "n": 0},
    "grid": {"q": [-8.0, 8.0, 256], "p": [-8.0, 8.0, 256]},
    "shots": {"n": None, "seed": 0, "bootstrap": 200},
    "tolerances": {"cross_tol": 1e-6, "cross_order": 6, "mass_tol": 1e-4},
    "doubleslit": {
        "c1": -2.0,
        "c2": 2.0,
        "w": 1.0,
        "deltas": [0.0, "pi/2", "pi"],
        "x_min": -64.0,
        "x_max": 64.0,
        "n_points": 65536,
        "edge_rtol": 1e-10,
    },
    "homodyne": {"grid": [-12.0, 12.0, 256], "z": [2.0, 4.0, 6.0]},
    "infocheck": {"eps": 1e-8, "q": [-6.0, 6.0, 256], "p": [-6.0, 6.0, 256]},
}


def _merge(base, extra):
    out = copy.deepcopy(base)
    for k, v in (extra or {}).items():
        # a state spec naming its own family replaces the default wholesale
        replace = k in ("state", "generator") and isinstance(v, dict) and "family" in v
        if isinstance(v, dict) and isinstance(out.get(k), dict) and not replace:
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


_NUM = r"\d+(?:\.\d*)?(?:[eE][-+]?\d+)?"
_PI_EXPR = re.compile(rf"^\s*(-?{_NUM})?\s*\*?\s*pi\s*(?:/\s*({_NUM}))?\s*$")


def parse_real(v):
    """Float, or a string like ``"pi"``, ``"pi/2"``, ``"3*pi/4"``."""
    if isinstance(v, (int, float)):
        return float(v)
    s = str(v).strip()
    m = _PI_EXPR.match(s)
    if m:
        a = float(m.group(1)) if m.group(1) else 1.0
        b = float(m.group(2)) if m.group(2) else 1.0
        return a * np.pi / b
    if s.startswith("-") and _PI_EXPR.match(s[1:]):
        return -parse_real(s[1:])
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot read {v!r} as a real number", module="runner") from None


def _complex(v):
    if isinstance(v, (list, tuple)):
        return complex(parse_real(v[0]), parse_real(v[1]) if len(v) > 1 else 0.0)
    if isinstance(v, dict):
        return complex(parse_real(v.get("re", 0.0)), parse_real(v.get("im", 0.0)))
    return complex(parse_real(v))


@dataclass
class ExperimentConfig:
    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))
    out: Path = Path("qpjoint-out")

    @classmethod
    def from_dict(cls, d, out=None):
        data = _merge(DEFAULTS, d)
        cfg = cls(data, Path(out or data.pop("out", "qpjoint-out")))
        cfg.data.pop("out", None)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path, overrides=(), out=None):
        try:
            raw = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}", module="runner") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a mapping", module="runner")
        for item in overrides:
            set_dotted(raw, item)
        return cls.from_dict(raw, out)

    def __getitem__(self, key):
        return self.data[key]

    def validate(self):
        d = self.data
        if d["experiment"] not in KINDS:
            raise ConfigError(f"unknown experiment {d['experiment']!r}; choose from {KINDS}", module="runner")
        if not isinstance(d["K"], int) or not 0 <= d["K"] <= 12:
            raise ConfigError("K must be an integer in [0, 12]", module="runner")
        if not isinstance(d["dim"], int) or d["dim"] < 2:
            raise ConfigError("dim must be an integer >= 2", module="runner")
        shots = d["shots"]
        if shots.get("n") is not None and int(shots["n"]) < 1:
            raise ConfigError("shots.n must be >= 1", module="runner")
        build_state(d["state"], d["dim"])
        build_state(d["generator"], d["dim"])

    def echo(self):
        return copy.deepcopy(self.data)


def set_dotted(d, item):
    """Apply ``"a.b.c=value"`` to a nested dict; the value is parsed as YAML."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value", module="runner")
    key, raw = item.split("=", 1)
    parts = key.strip().split(".")
    cur = d
    for p in parts[:-1]:
        if not isinstance(cur.get(p), dict):
            cur[p] = {}
        cur = cur[p]
    cur[parts[-1]] = yaml.safe_load(raw)


def build_state(spec, dim):
    """Construct a state from a family spec such as ``{family: coherent, alpha: [1, 0]}``."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError(f"state spec needs a 'family' key: {spec!r}", module="runner")
    fam = spec["family"]
    try:
        if fam == "number":
            return fock.number_state(int(spec.get("n", 0)), dim)
        if fam == "coherent":
            return fock.coherent_state(_complex(spec.get("alpha", 0.0)), dim)
        if fam == "superposition":
            amps = spec["amplitudes"]
            items = amps.items() if isinstance(amps, dict) else enumerate(amps)
            return fock.superposition({int(n): _complex(a) for n, a in items}, dim)
        if fam == "random":
            return fock.random_state(int(spec.get("support", 8)), dim, int(spec.get("seed", 0)))
        if fam == "mixture":
            parts = [build_state(c, dim) for c in spec["components"]]
            return fock.mix(parts, [parse_real(w) for w in spec["weights"]])
    except QPJointError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {fam!r} state spec {spec!r}: {exc}", module="runner") from exc
    raise ConfigError(f"unknown state family {fam!r}", module="runner")


def _spec(v):
    return phasespace.GridSpec(parse_real(v[0]), parse_real(v[1]), int(v[2]))


def _direct_moments(state, K, axis):
    return phasespace.state_moments(state, K, axis)


def _verdict(m):
    if m.K < 6:
        return None
    return moments.exp_bound_fit(m).to_dict()


def _qmarginals(cfg, out, report, shots):
    d = cfg.data
    K, dim = d["K"], d["dim"]
    rho = build_state(d["state"], dim)
    S = build_state(d["generator"], dim)
    tol = {k: parse_real(v) for k, v in d["tolerances"].items()}
    tol["cross_order"] = int(tol["cross_order"])
    qs, pss = _spec(d["grid"]["q"]), _spec(d["grid"]["p"])
    t0 = time.perf_counter()
    h = phasespace.gs_histogram(rho, S, qs, pss, mass_tol=tol["mass_tol"], label="G^S")
    report["timings"]["histogram"] = time.perf_counter() - t0
    io.write_histogram(out / "phase_space.csv", h, generator=json.dumps(d["generator"], sort_keys=True))
    report["histogram"] = io.histogram_header(h)
    samples = None
    if shots:
        samples = phasespace.sample_outcomes(h, int(d["shots"]["n"]), _seeds(d)[0])
    for axis in ("q", "p"):
        io.write_density(out / f"marginal_{axis}.csv", phasespace.marginal_density(h, axis))
        table = phasespace.s_coefficients(S, K, axis)
        alpha = phasespace.marginal_moments(
            rho, S, K, axis, histogram=h, cross_tol=tol["cross_tol"], cross_order=tol["cross_order"]
        )
        entry = {"s": table.s, "alpha_operator": alpha.values, "discrepancy": alpha.discrepancy}
        if samples is not None:
            alpha, beta = _shot_moments(samples[:, 0 if axis == "q" else 1], table, K, d)
            entry["alpha_stderr"] = alpha.stderr
            entry["beta_stderr"] = beta.stderr
            _, linear = moments.shot_moments(samples[:, 0 if axis == "q" else 1], table)
            entry["beta_stderr_linear"] = linear.stderr
        else:
            beta = moments.recover_moments(alpha, table)
        direct = _direct_moments(rho, K, axis)
        io.write_moments(out / f"moments_alpha_{axis}.csv", alpha)
        io.write_moments(out / f"moments_beta_{axis}.csv", beta)
        entry.update(
            alpha=alpha.values,
            beta=beta.values,
            direct=direct.values,
            beta_minus_direct=beta.values - direct.values,
            verdict=_verdict(beta),
            hankel_valid=moments.hankel_validity(beta) if K >= 2 else None,
        )
        report[f"axis_{axis}"] = entry


def _seeds(d):
    ss = np.random.SeedSequence(int(d["shots"]["seed"]))
    return ss.spawn(2)


def _shot_moments(x, table, K, d):
    """Sample moments, recovered moments and bootstrap standard errors."""
    powers = x[None, :] ** np.arange(K + 1)[:, None]
    alpha = powers.mean(axis=1)
    alpha[0] = 1.0
    n_boot = int(d["shots"].get("bootstrap", 200))
    rng = np.random.Generator(np.random.Philox(_seeds(d)[1]))
    boots_a = np.empty((n_boot, K + 1))
    for b in range(n_boot):
        # resampling with replacement, expressed as per-shot multiplicities
        counts = np.bincount(rng.integers(0, x.size, x.size), minlength=x.size)
        boots_a[b] = powers @ counts / x.size
    boots_a[:, 0] = 1.0
    boots_b = np.array([moments.recover_moments(MomentSequence(a), table).values for a in boots_a])
    se_a = boots_a.std(axis=0, ddof=1) if n_boot > 1 else np.full(K + 1, np.nan)
    se_b = boots_b.std(axis=0, ddof=1) if n_boot > 1 else np.full(K + 1, np.nan)
    a = MomentSequence(alpha, f"alpha_{table.axis}_shots", stderr=se_a)
    beta = moments.recover_moments(a, table)
    return a, MomentSequence(beta.values, beta.label, stderr=se_b)


def _doubleslit(cfg, out, report):
    d = cfg.data
    ds = d["doubleslit"]
    K = d["K"]
    g = grid.Grid1D(parse_real(ds["x_min"]), parse_real(ds["x_max"]), int(ds["n_points"]))
    deltas = [parse_real(x) for x in ds["deltas"]]
    dens, moms = [], []
    for i, delta in enumerate(deltas):
        psi = grid.double_slit_state(parse_real(ds["c1"]), parse_real(ds["c2"]), parse_real(ds["w"]), delta, g)
        pd = grid.momentum_density(psi)
        m = grid.grid_moments(
            pd, K, label=f"momentum_delta_{i}", edge_weight=parse_real(ds["edge_rtol"]), relative=True
        )
        io.write_density(out / f"momentum_delta_{i}.csv", pd)
        io.write_density(out / f"position_delta_{i}.csv", grid.position_density(psi))
        io.write_moments(out / f"moments_p_delta_{i}.csv", m)
        dens.append(pd)
        moms.append(m)
    absm = (np.abs(dens[0].x)[None, :] ** np.arange(K + 1)[:, None]) @ dens[0].values * dens[0].dx
    report["deltas"] = deltas
    report["momentum_moments"] = [m.values for m in moms]
    report["moment_max_rel_spread"] = float(
        max(np.max(np.abs(m.values - moms[0].values) / absm) for m in moms)
    )
    report["l1_vs_first"] = [moments.compare_densities(dens[0], x) for x in dens]
    report["verdicts"] = [_verdict(m) for m in moms]


def _homodyne_joint(cfg, out, report):
    d = cfg.data
    dim, K = d["dim"], d["K"]
    rho = build_state(d["state"], dim)
    S = build_state(d["generator"], dim)
    gv = d["homodyne"]["grid"]
    g = grid.Grid1D(parse_real(gv[0]), parse_real(gv[1]), int(gv[2]))
    t0 = time.perf_counter()
    h = homodyne.eight_port_observable(rho, S, g)
    report["timings"]["eight_port"] = time.perf_counter() - t0
    ref = phasespace.gs_histogram(rho, S, h.q_spec, h.p_spec, mass_tol=parse_real(d["tolerances"]["mass_tol"]))
    io.write_histogram(out / "phase_space.csv", h, generator=json.dumps(d["generator"], sort_keys=True))
    report["histogram"] = io.histogram_header(h)
    report["l1_vs_gs_histogram"] = h.l1_distance(ref)
    for axis in ("q", "p"):
        md = phasespace.marginal_density(h, axis)
        io.write_density(out / f"marginal_{axis}.csv", md)
        table = phasespace.s_coefficients(S, K, axis)
        alpha = MomentSequence(phasespace.moments_of_density(md, K), f"alpha_{axis}")
        beta = moments.recover_moments(alpha, table)
        direct = _direct_moments(rho, K, axis)
        io.write_moments(out / f"moments_alpha_{axis}.csv", alpha)
        io.write_moments(out / f"moments_beta_{axis}.csv", beta)
        report[f"axis_{axis}"] = {
            "alpha": alpha.values,
            "beta": beta.values,
            "direct": direct.values,
            "beta_minus_direct": beta.values - direct.values,
            "marginal_l1_vs_gs": moments.compare_densities(md, phasespace.marginal_density(ref, axis))["l1"],
            "verdict": _verdict(beta),
        }


def _homodyne_lo(cfg, out, report):
    d = cfg.data
    rho = build_state(d["state"], d["dim"])
    if not isinstance(rho, fock.StateVector):
        raise ConfigError("homodyne-lo needs a pure signal state", module="runner")
    zs = [parse_real(z) for z in d["homodyne"]["z"]]
    errs = []
    for z in zs:
        dens = homodyne.balanced_homodyne_density(rho, z)
        io.write_density(out / f"lo_density_z{z:g}.csv", dens)
        errs.append(homodyne.lo_error(rho, z))
    report["z"] = zs
    report["l1_error"] = errs
    report["strictly_decreasing"] = bool(all(b < a for a, b in zip(errs, errs[1:])))


def _infocheck(cfg, out, report):
    d = cfg.data
    S = build_state(d["generator"], d["dim"])
    ic = d["infocheck"]
    rep = phasespace.info_completeness_scan(S, _spec(ic["q"]), _spec(ic["p"]), parse_real(ic["eps"]))
    with open(out / "zero_set.csv", "w") as fh:
        fh.write("q,p\n")
        for q, p in rep.centers:
            fh.write(f"{q:.17g},{p:.17g}\n")
    r = np.hypot(rep.centers[:, 0], rep.centers[:, 1]) if len(rep.centers) else np.empty(0)
    report["zero_set"] = rep.to_dict()
    report["zero_radius"] = {"min": float(r.min()), "max": float(r.max())} if r.size else None


def run(config: ExperimentConfig, shots=False):
    """Execute one experiment and write its files; returns the report dict."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = config["experiment"]
    report = {"config": config.echo(), "experiment": kind, "timings": {}}
    t0 = time.perf_counter()
    if shots and kind != "qmarginals":
        raise ConfigError("shot-based runs are available for qmarginals only", module="runner")
    if kind == "qmarginals":
        _qmarginals(config, out, report, shots)
    elif kind == "doubleslit":
        _doubleslit(config, out, report)
    elif kind == "homodyne-joint":
        _homodyne_joint(config, out, report)
    elif kind == "homodyne-lo":
        _homodyne_lo(config, out, report)
    else:
        _infocheck(config, out, report)
    report["timings"]["total"] = time.perf_counter() - t0
    io.write_json(out / "report.json", report)
    return report


def run_with_shots(config: ExperimentConfig):
    """Like :func:`run`, with moments estimated from sampled outcomes."""
    if config["shots"].get("n") is None:
        raise ConfigError("run_with_shots needs shots.n and shots.seed", module="runner")
    return run(config, shots=True)


def _limit_threads():
    n = os.environ.get(THREADS_ENV)
    if not n:
        return None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(int(n))


def main(argv=None):
    parser = argparse.ArgumentParser(prog="qpjoint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment from a YAML config")
    r.add_argument("config")
    r.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    r.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    _limit_threads()
    try:
        cfg = ExperimentConfig.from_file(args.config, args.overrides, args.out)
        if cfg["shots"].get("n") is not None:
            run_with_shots(cfg)
        else:
            run(cfg)
    except QPJointError as exc:
        err = exc.to_dict()
        if err["module"] is None:
            err["module"] = "runner"
        print(json.dumps({"error": err}, sort_keys=True), file=sys.stderr)
        return 2
    return 0
