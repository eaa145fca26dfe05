"""An eight-port homodyne setup realises the smeared phase-space observable.

The signal enters one port of a balanced splitter and a reference mode the
other; position is read on one output and momentum on the other. When the
reference is prepared in the complex conjugate of S, the joint statistics
equal Tr[rho W S W^dag] / (2 pi) cell by cell. Preparing S itself is a
different observable as soon as S is not real in the number basis.

    python3 demos/eight_port.py
"""

from qpjoint import fock, homodyne, phasespace as ps

signal = fock.number_state(1)
for name, S in [
    ("vacuum", fock.number_state(0)),
    ("|1>", fock.number_state(1)),
    ("coherent 0.6+0.4i", fock.coherent_state(0.6 + 0.4j)),
]:
    joint = homodyne.eight_port_observable(signal, S)
    ref = ps.gs_histogram(signal, S, joint.q_spec, joint.p_spec)
    print(f"S = {name:<18} L1(eight-port, phase-space) = {joint.l1_distance(ref):.2e}")

# Feeding S unconjugated: for a complex coherent reference that is the wrong observable.
S = fock.coherent_state(0.6 + 0.4j)
wrong = homodyne.eight_port_observable(signal, fock.conjugate_state(S))
ref = ps.gs_histogram(signal, S, wrong.q_spec, wrong.p_spec)
print(f"\nreference prepared in S instead of conj(S): L1 = {wrong.l1_distance(ref):.3f}")
