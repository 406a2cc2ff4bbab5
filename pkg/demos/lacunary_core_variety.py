"""Core variety of L = l(-1) + l(1) + l(2) on span{1, x^2, x^4, x^5, x^6, x^7, x^8}.

The first face is spanned by (x^2 - 1)^2 (x^2 - 4)^2, which vanishes at
+-1 and +-2.  On those four points the odd monomials x^5 and x^7 give a
second nonnegative kernel element that removes -2.
"""
import numpy as np

from momentkit.corevar import (Line1D, core_variety, determinacy_via_core,
                               existence_via_core, facial_position, point_functional)

X = Line1D([0, 2, 4, 5, 6, 7, 8])
L = point_functional(X, [-1.0, 1.0, 2.0])
print("L =", L)

tr = core_variety(L, X)
for k, elem, V in tr.steps:
    print(f"V_{k} =", np.round(np.ravel(V), 8).tolist())
print("k(L) =", tr.k)

ex = existence_via_core(L, X)
print("moment functional:", ex.verdict, "measure:", ex.measure)
print("determinacy:", determinacy_via_core(L, X)["verdict"])
fp = facial_position(L, X)
print("position:", fp.position, "| in relative interior of its face:", fp.relative_interior)
