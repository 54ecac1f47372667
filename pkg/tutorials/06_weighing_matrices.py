"""Optimal strategies of the order-8 Hadamard game as weighing matrices.

Run with ``python tutorials/06_weighing_matrices.py``.
"""

import itertools

import numpy as np

import bellexcess as bx
from bellexcess.catalog import builtin, pairing_fixture, strategy_fixture

A = strategy_fixture(8, "A")
B = strategy_fixture(8, "B")
print(len(A), "Alice matrices,", len(B), "Bob matrices, weight", bx.weighing_weight(A[0]))

# Each pair of Alice's matrices has products with entries in {0, +-4}.
for W1, W2 in itertools.combinations(A, 2):
    print(np.unique(W1 @ W2.T), end=" ")
print()
res = bx.mquwm_check(A[0], A[1], a=16)
print(res)

# Every listed pairing of an Alice row with a Bob row is an optimal strategy.
H = builtin(8).matrix
vals = {int(A[j - 1][i - 1] @ H @ B[l - 1][k - 1]) for i, j, k, l in pairing_fixture()}
print("values over the 64 pairings:", vals, " C =", bx.lhv_value(bx.CorrelationCore.from_entries(H.tolist())).value)
