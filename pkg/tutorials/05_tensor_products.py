"""Tensor products of games.

Run with ``python tutorials/05_tensor_products.py``.

The excess of a tensor product is the product of excesses.  The value can
exceed the product of values, even when both factors are normalized, so the
value is not multiplicative in general.
"""

import bellexcess as bx

chsh = bx.embed_core([[1, 1], [1, -1]])
T = bx.tensor_game(chsh, chsh)
print("CHSH value:", bx.lhv_value(chsh).value)
print("CHSH x CHSH excess:", bx.excess(T), " value:", bx.lhv_value(T).value)

# Two normalized cores whose product value is strictly above the product.
N1, r1 = bx.normalize(bx.embed_core([[3, 1], [2, -1]]))
N2, r2 = bx.normalize(bx.embed_core([[1, 2], [2, -1]]))
T = bx.tensor_game(N1, N2)
print("factors:", r1.value, r2.value, " product value:", bx.lhv_value(T).value)
