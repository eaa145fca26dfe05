import numpy as np
import pytest

from qpjoint import fock

DIM = 64
S2 = np.sqrt(2.0)


def state_family(dim=DIM):
    """The twelve pure test states: Hermite combinations, coherent states, one random state."""
    fam = {f"e{n}": fock.number_state(n, dim) for n in range(1, 7)}
    fam["e0+e2"] = fock.superposition({0: 1, 2: 1}, dim)
    fam["e0+ie3"] = fock.superposition({0: 1, 3: 1j}, dim)
    fam["coh0"] = fock.coherent_state(0, dim)
    fam["coh1"] = fock.coherent_state(1, dim)
    fam["coh1+i"] = fock.coherent_state(1 + 1j, dim)
    fam["random8"] = fock.random_state(8, dim, seed=20240611)
    return fam


def generators(dim=DIM):
    return {
        "vac": fock.as_density(fock.number_state(0, dim)),
        "one": fock.as_density(fock.number_state(1, dim)),
        "mix": fock.mix([fock.number_state(0, dim), fock.number_state(1, dim)], [0.7, 0.3]),
    }


def matrix_signals(dim=DIM):
    """Signals of the phase-space / homodyne test matrix."""
    return {
        "vac": fock.number_state(0, dim),
        "one": fock.number_state(1, dim),
        "coh1": fock.coherent_state(1, dim),
        "e0+e2": fock.superposition({0: 1, 2: 1}, dim),
    }


@pytest.fixture(scope="session")
def family():
    return state_family()


@pytest.fixture(scope="session")
def gens():
    return generators()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
