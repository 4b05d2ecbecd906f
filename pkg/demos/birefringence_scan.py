"""
Dispersion roots and birefringence
==================================

Along a spatial direction n the characteristic covectors p = (p0, n)
solve a quartic in p0.  Models without birefringence give two double
roots: both polarizations ride one cone.  Generic models split the
pairs, and the split is the observable difference between the two
polarization speeds.
"""

import numpy as np

from cewave.charsys import FieldBackground, fresnel_roots, fresnel_scan_rows, write_scan_csv
from cewave.lagrangians import builtin

bg = FieldBackground.vector([0.3, 0.0, 0.0], [0.0, 0.4, 0.0])
nhat = (1.0, 0.0, 0.0)

bi = builtin("born-infeld")
fr = fresnel_roots(bi, bg, nhat)
print("born-infeld roots:", np.round(fr.real_roots(), 12))
print("pairing:", fr.coincident_with, "birefringent:", fr.birefringent)

# Perturbing Maxwell by a quadratic term splits the pairs.
pm = builtin("perturbed-maxwell", [0.1])
fr = fresnel_roots(pm, bg, nhat)
r = np.sort(fr.real_roots())
print("perturbed roots:  ", np.round(r, 6))
print("pair splits:", round(r[1] - r[0], 6), round(r[3] - r[2], 6))

# A scan over random backgrounds, written in the same CSV layout the
# command line uses.
rng = np.random.default_rng(7)
pairs = []
while len(pairs) < 10:
    E, B = rng.uniform(-0.6, 0.6, 3), rng.uniform(-0.6, 0.6, 3)
    n = rng.normal(size=3)
    try:
        fresnel_roots(bi, FieldBackground.vector(E, B), n)
    except Exception:
        continue
    pairs.append((FieldBackground.vector(E, B), n / np.linalg.norm(n)))

header, rows = fresnel_scan_rows(bi, pairs)
write_scan_csv("bi_scan.csv", header, rows)
flagged = sum(1 for row in rows if row[-1] == "true")
print(f"wrote bi_scan.csv: {len(rows)} roots, {flagged} birefringent rows")
