"""The Fourier-square family and its GYNI counterpart.

Run with ``python tutorials/02_fourier_square.py``.
"""

import bellexcess as bx

# For each q the game matrix is built from the q-point Fourier matrix with
# m = q settings.  Its value is q**3.  After normalization the rows have a
# constant sum, the nu bound is saturated and the value follows without any
# enumeration.
for q in range(2, 6):
    F = bx.fourier_square(q)
    N, best = bx.normalize(F)
    val = best.value
    rep = bx.bounds_report(N, normalized=True)
    print(f"q={q}  n={F.n}  value={float(val):8.3f}  q^3={q ** 3}"
          f"  nu bound={rep.nu_bound:8.3f}  saturated={rep.saturated}")

# The guess-your-neighbour's-input game has a tensor whose transform is a
# relabeled copy of the Fourier square scaled by 1/q**2.
for q in (2, 3):
    G = bx.game_matrix_from_tensor(bx.gyni_tensor(q))
    print(f"GYNI q={q}: value {float(bx.lhv_value(G).value):.4f}"
          f"  scaled Fourier value {q ** 3 / q ** 2:.4f}")
