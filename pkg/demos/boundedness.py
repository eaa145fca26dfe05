"""Moment sequences: positivity, growth, and Gauss quadrature.

For a state in a finite Hermite span the quadrature moments grow like k!/2^k
times a geometric factor, which the finite-order check confirms. A sequence
like (2k)! grows too fast for any such bound. Recovered moments can also be
turned into a discrete measure with the same low moments.

    python3 demos/boundedness.py
"""

import numpy as np
from scipy import special

from qpjoint import fock, moments, phasespace as ps
from qpjoint.containers import MomentSequence

psi = fock.superposition({0: 1, 3: 1j})
m = ps.state_moments(psi, 12, "q")
print("Hankel positive:", moments.hankel_validity(m))
v = moments.exp_bound_fit(m)
print(f"e0 + i e3: {v.verdict}, C = {v.C:.3g}, R = {v.R:.3g}, trend {v.trend:+.3f}")

fast = MomentSequence(special.factorial(2 * np.arange(13)))
print(f"(2k)!:      {moments.exp_bound_fit(fast).verdict}")

q = moments.quadrature_reconstruct(m, 4)
print("\nfour-atom measure matching moments 0..7:")
for x, w in zip(q.atoms, q.weights):
    print(f"  x = {x:+.5f}  w = {w:.5f}")
print("moments reproduced:", np.allclose(q.moments(7), m.values[:8]))
