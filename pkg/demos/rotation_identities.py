"""
Quarter turns relabel extended words
====================================

Rotating a square field by 90 degrees maps every full-signature coordinate to
another coordinate of the original field, up to a sign. On the grid this is a
pure relabelling of cells, so the identities hold to rounding error.
"""

import numpy as np

from twodsig import combinatorics as cb
from twodsig.field import rotate90, trig_poly
from twodsig.identities import rotated_coordinate
from twodsig.signature import full_signature

X = trig_poly(seed=1, degree=3, d=2, n1=16)

# %%
# For every coordinate up to level 3, compare the rotated field against the
# relabelled coordinate of the original one.
coords = [c for c in cb.extended_words_up_to(2, 3) if c.n > 0]
for q in (1, 2, 3):
    Y = rotate90(X, q)
    lhs = full_signature(Y, coords)
    worst = 0.0
    for c in coords:
        sign, target = rotated_coordinate(c, q)
        rhs = sign * full_signature(X, [target])[target]
        worst = max(worst, abs(lhs[c] - rhs))
    print(f"q={q}: {len(coords)} coordinates, worst mismatch {worst:.1e}")

# %%
# A worked instance.
c = cb.ExtendedWord((1, 2, 2), (2, 3, 1))
for q in (1, 2, 3):
    sign, target = rotated_coordinate(c, q)
    print(f"rot^{q}: {c.key()} -> {'+' if sign > 0 else '-'}{target.key()}")
print(np.round(rotate90(X, 1).channel(1)[:3, :3], 3))
