"""Motzkin's polynomial: nonnegative, not a sum of squares, yet the moment
hierarchy over the disc of radius sqrt(2) finds its minimum.
"""
import numpy as np

from momentkit.lasserre import solve_hierarchy
from momentkit.poly import ConstraintSet, motzkin, variables
from momentkit.sos import sos_decompose

p = motzkin()
print("p =", p)

res = sos_decompose(p, 3)
print("Gram SDP at degree 6:", res.status)

x1, x2 = variables(2)
ball = ConstraintSet(2, (2 - x1 ** 2 - x2 ** 2,))
for lev in solve_hierarchy(p, ball, 3, 5):
    atoms = None if lev.extracted is None else np.round(lev.extracted.points, 6).tolist()
    print(f"level {lev.n}: p_mom={lev.p_mom:+.2e} p_sos={lev.p_sos:+.2e} "
          f"flat={lev.flat} certified={lev.certified} atoms={atoms}")
