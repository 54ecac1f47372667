"""Vertex counts and affine rank of Hadamard Bell inequalities.

Run with ``python tutorials/04_tightness.py``.  Orders up to 12 finish in a
second or two.  The full reproduction including orders 16 and 20 is
available through ``bellexcess table1``.
"""

import bellexcess as bx
from bellexcess.catalog import builtin

# An inequality is tight (a facet of the local polytope) when its optimal
# deterministic strategies span an affine space of dimension m**2 - 1.
for order in (2, 4, 8, 12):
    rep = bx.tightness_report(builtin(order).matrix)
    print(f"order {order:2d}: C={int(rep.lhv_value):3d}  vertices={rep.vertex_count:5d}"
          f"  affine rank={rep.affine_rank:3d}/{order ** 2 - 1}  tight={rep.tight}")

# Order 16 has five equivalence classes.  Only the Sylvester class is cheap to
# inspect here; it has 448 optimal vertices.
rep = bx.tightness_report(bx.sylvester(4))
print(f"Sylvester 16: C={int(rep.lhv_value)} vertices={rep.vertex_count}"
      f" affine rank={rep.affine_rank} tight={rep.tight}")
