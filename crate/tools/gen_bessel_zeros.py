#!/usr/bin/env python3
"""Regenerate the golden Bessel-zero fixture used by the specfun tests.

Writes crates/randwave/tests/fixtures/bessel_zeros.csv with rows m,k,j_mk at
15 significant digits, computed with mpmath at 30 decimal digits.
"""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 30

ORDERS = [0, 1, 2, 3, 4, 5, 8, 10, 15, 20, 30, 40, 60, 80, 100, 150, 200]
INDICES = [1, 2, 3, 5, 10, 20, 40]

out = Path(__file__).resolve().parent.parent / "crates/randwave/tests/fixtures/bessel_zeros.csv"
out.parent.mkdir(parents=True, exist_ok=True)

with out.open("w") as fh:
    fh.write("m,k,j_mk\n")
    for m in ORDERS:
        for k in INDICES:
            j = mp.besseljzero(m, k)
            fh.write(f"{m},{k},{mp.nstr(j, 15, strip_zeros=False)}\n")

print(f"wrote {out}")
