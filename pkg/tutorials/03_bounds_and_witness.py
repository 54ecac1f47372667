"""Upper bounds on the value and a quantum witness.

Run with ``python tutorials/03_bounds_and_witness.py``.
"""

import math

import bellexcess as bx

# Bounds chain for a few correlation cores: spectral norm, numerical radius
# and the row-sum quantity nu, all scaled by the order.
cores = {
    "H2": [[1, 1], [1, -1]],
    "circ(-1,1,1,1)": bx.circulant([-1, 1, 1, 1]).tolist(),
    "Sylvester 8": bx.sylvester(3).tolist(),
    "Paley 12": bx.paley_hadamard(11).tolist(),
}
for name, H in cores.items():
    core = bx.CorrelationCore.from_entries(H)
    rep = bx.bounds_report(core)
    C = bx.lhv_value(core).value
    print(f"{name:16s} C={int(C):3d}  n*sigma={rep.sigma_bound:7.3f}"
          f"  best bracket=[{rep.best_lower}, {rep.best_upper}]")

# For a regular Hadamard matrix of order n the value is n**1.5.
print("circ(-1,1,1,1) regular:", bx.detect_regular_equivalent(bx.circulant([-1, 1, 1, 1])))

# Qubit observables rotated in the x-z plane give a quantum violation of the
# circulant inequality.  Its classical value is 4.
game = bx.embed_core(bx.circulant([0, -1, 1]).tolist())
A = [bx.rotated_observable(t) for t in (0, 2 * math.pi / 3, math.pi / 3)]
B = [bx.rotated_observable(t) for t in (math.pi / 4, 7 * math.pi / 12, 11 * math.pi / 12)]
w = bx.quantum_witness(game, A, B)
print(f"witness {w:.6f}  3*sqrt(3) = {3 * math.sqrt(3):.6f}")

# CHSH with these angles reaches the Tsirelson value.
chsh = bx.embed_core([[1, 1], [1, -1]])
A = [bx.rotated_observable(t) for t in (0, math.pi / 4)]
B = [bx.rotated_observable(t) for t in (math.pi / 8, 7 * math.pi / 8)]
print(f"CHSH witness {bx.quantum_witness(chsh, A, B):.6f}  2*sqrt(2) = {2 * math.sqrt(2):.6f}")
