"""CSV/JSON serialisation of densities, histograms and moment sequences.

Floats are written with 17 significant digits so that files produced by
different implementations can be compared exactly after parsing.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .containers import Density1D, MomentSequence
from .phasespace import GridSpec, PhaseSpaceHistogram

FMT = "{:.17g}"


def _f(v):
    return FMT.format(float(v))


def write_density(path, d: Density1D):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "density"])
        for x, v in zip(d.x, d.values):
            w.writerow([_f(x), _f(v)])


def read_density(path, label=""):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Density1D(data[:, 0], data[:, 1], label)


def write_wavefunction(path, psi):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "re", "im"])
        for x, v in zip(psi.grid.x, psi.values):
            w.writerow([_f(x), _f(v.real), _f(v.imag)])


def write_moments(path, m: MomentSequence):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "m_k"])
        for k, v in enumerate(m.values):
            w.writerow([k, _f(v)])


def read_moments(path, label=""):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return MomentSequence(data[:, 1], label)


def histogram_header(h: PhaseSpaceHistogram, generator=""):
    return {
        "q_spec": h.q_spec.to_dict(),
        "p_spec": h.p_spec.to_dict(),
        "mass": h.mass,
        "label": h.label,
        "generator": generator,
    }


def write_histogram(path, h: PhaseSpaceHistogram, generator=""):
    """Write ``q, p, density`` rows (q slowest) plus a ``.json`` header."""
    path = Path(path)
    q, p = h.q, h.p
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "p", "density"])
        for i, qi in enumerate(q):
            sq = _f(qi)
            for j, pj in enumerate(p):
                w.writerow([sq, _f(pj), _f(h.values[i, j])])
    write_json(path.with_suffix(".json"), histogram_header(h, generator))


def read_histogram(path):
    path = Path(path)
    header = json.loads(path.with_suffix(".json").read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    qs, ps_ = GridSpec(**header["q_spec"]), GridSpec(**header["p_spec"])
    vals = data[:, 2].reshape(qs.count, ps_.count)
    return PhaseSpaceHistogram(qs, ps_, vals, header.get("label", ""))


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_default)


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")
