"""
Shuffle products and Chen splits under grid refinement
======================================================

Products of two signature coordinates expand into sums of coordinates over
shuffled extended words. On a grid the shuffle identity holds up to diagonal terms of order 1/N, so
the checker refines the grid and looks at the error ratio. Chen's relation,
which splits a rectangle along one axis, holds exactly on grid-aligned
splits, so its errors sit at rounding level.
"""

from twodsig import combinatorics as cb
from twodsig.combinatorics import ExtendedWord
from twodsig.identities import CachedField, check_chen_id, check_chen_sym, check_shuffle_full
from twodsig.field import TrigPoly

# %%
# The expansion itself is pure combinatorics.
a = ExtendedWord((1, 2), (2, 1))
b = ExtendedWord((2,), (1,))
for e, c in cb.extended_shuffle(a, b).items():
    print(f"{c:+d}  {e.key()}")

# %%
# A smooth two-channel field, cached so that shared coordinates are computed
# once per grid.
field = CachedField(TrigPoly(0, 2, 2).sample)
for report in (
    check_shuffle_full(field, a, b),
    check_shuffle_full(field, ((1,), (1,)), ((1,), (1,))),
    check_chen_id(field, (1, 2, 1), 1, 0.5),
    check_chen_id(field, (2, 1), 2, 0.25),
    check_chen_sym(field, (1, 2, 2), 0.5),
):
    print(report.line())
    print("    errors", ", ".join(f"{e:.2e}" for e in report.errors))
