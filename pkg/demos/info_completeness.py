"""When does a smeared observable determine the state?

The phase-space observable generated by S is informationally complete iff
Tr[W(q, p) S] never vanishes. For the vacuum it is a Gaussian, nowhere zero;
for |1><1| it is (1 - r^2/2) exp(-r^2/4), which vanishes on the circle r^2 = 2.

    python3 demos/info_completeness.py
"""

import numpy as np

from qpjoint import fock, phasespace as ps

for name, S in [("vacuum", fock.number_state(0)), ("|1>", fock.number_state(1)),
                ("0.7 vac + 0.3 |1>", fock.mix([fock.number_state(0), fock.number_state(1)], [0.7, 0.3]))]:
    rep = ps.info_completeness_scan(S)
    line = f"{name:<18} {len(rep.cells):4d} suspect cells"
    if not rep.empty:
        r = np.hypot(rep.centers[:, 0], rep.centers[:, 1])
        line += f", radius {r.min():.3f} .. {r.max():.3f}"
    print(line)

# For the mixture the zero set moves out to r^2 = 2 / 0.3: mixing in vacuum
# does not rescue informational completeness.
