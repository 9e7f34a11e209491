"""Where is the model system Fredholm?

The symbol of [[I, K], [K, I]] between spaces of order r degenerates only at
p = 2 with r a non-negative integer.  The scan below reproduces that picture
on a coarse grid and prints it as a character map:

    .  Fredholm      u  uniquely solvable      X  not Fredholm
"""

import numpy as np

from mellinbvp.fredholm import index_report, scan_region
from mellinbvp.symbols import SpaceParams

p = np.round(np.arange(1.5, 3.0001, 0.1), 12)
r = np.round(np.arange(-1.0, 2.0001, 0.25), 12)
region = scan_region(p, r, n_xi=2049)
glyph = {"Fredholm": ".", "UniquelySolvable": "u", "NotFredholm": "X"}

print("r \\ p  " + " ".join(f"{x:.1f}"[-3:] for x in p))
for j in range(len(r) - 1, -1, -1):
    print(f"{r[j]:+5.2f}   " + "   ".join(glyph[region.verdicts[i, j]] for i in range(len(p))))
print("\ncounts:", region.counts())

# The winding number over the whole rectangle is a finer invariant.
for pr in [(3.0, 0.5), (2.5, -0.5), (2.0, -0.75)]:
    rep = index_report(SpaceParams(*pr), n_edge=1025)
    print(f"(p, r) = {pr}: winding {rep.winding_number:+d}, operator index {rep.operator_index:+d}")
