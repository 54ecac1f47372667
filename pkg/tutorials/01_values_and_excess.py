"""Local hidden variable values, the excess and normalization.

Run with ``python tutorials/01_values_and_excess.py``.
"""

import numpy as np

import bellexcess as bx

# The CHSH game as a two-setting, two-outcome correlation core.
H2 = [[1, 1], [1, -1]]
chsh = bx.embed_core(H2)
res = bx.lhv_value(chsh, count=True)
print("CHSH value:", res.value, "optimal strategies:", res.optimizer_count)
print("one optimal strategy:", res.witness)

# The excess is just the sum of all entries.  For CHSH the all-plus strategy
# is already optimal, so value and excess coincide.
print("excess:", bx.excess(chsh))

# A three-setting core with zero excess still has a positive value.
C3 = bx.circulant([0, -1, 1])
print("circ(0,-1,1):")
print(C3)
print("value:", bx.lhv_value(bx.CorrelationCore.from_entries(C3.tolist())).value,
      "excess:", bx.excess(C3))

# Normalization rotates the outcomes so that all-plus becomes optimal.
# Afterwards the value equals the excess of the rotated matrix.
rng = np.random.default_rng(7)
S = rng.integers(-3, 4, size=(3, 3, 2, 2))
M = bx.game_matrix_from_tensor(bx.GameTensor.from_array(S))
N, best = bx.normalize(M)
print("random q=3 game: value", round(float(best.value), 6),
      "excess before", round(float(np.real(bx.excess(M))), 6),
      "excess after", round(float(np.real(bx.excess(N))), 6))

# Relabeling settings or outcomes never changes the value.
r = bx.Relabeling.build(2, 3, x_perm=[1, 0], y_perm=[0, 1],
                        a_perms={0: [2, 0, 1], 1: [0, 1, 2]}, b_perms=[[1, 2, 0], [0, 1, 2]])
M2 = bx.game_matrix_from_tensor(bx.apply_relabeling(bx.GameTensor.from_array(S), r))
print("value after relabeling:", round(float(bx.lhv_value(M2).value), 6))
