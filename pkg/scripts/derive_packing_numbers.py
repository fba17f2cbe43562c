"""Recompute the equal-ball packing numbers p_1..p_8 of CP^2 from exceptional classes.

A class (d; m_1, ..., m_k) with d^2 - sum m^2 = -1 and 3d - sum m = 1 is
exceptional when Cremona moves reduce it to (0; -1, 0, ..., 0). Each one
forces d > a sum m for balls of capacity a, and volume forces k a^2 <= 1, so
the largest equal capacity is min(1/sqrt(k), min d / sum m) and p_k = k a^2.

Exits with status 1 if the result disagrees with the stored table.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from itertools import combinations_with_replacement

from sympack.obstructions import PACKING_NUMBERS


def cremona_reduces(d: int, m: tuple[int, ...]) -> bool:
    """Reduce by quadratic Cremona moves; exceptional iff we reach (0; -1, 0, ...)."""
    m = list(m) + [0] * max(0, 3 - len(m))
    for _ in range(100):
        m.sort(reverse=True)
        excess = m[0] + m[1] + m[2] - d
        if excess <= 0:
            break
        d -= excess
        for i in range(3):
            m[i] -= excess
    m.sort()
    return d == 0 and m[0] == -1 and all(x == 0 for x in m[1:])


def exceptional_classes(k: int, d_max: int = 8):
    for d in range(0, d_max + 1):
        for ms in combinations_with_replacement(range(d, -1, -1), k):
            if d * d - sum(x * x for x in ms) == -1 and 3 * d - sum(ms) == 1 and sum(ms) > 0:
                if cremona_reduces(d, ms):
                    yield d, ms


def packing_number(k: int) -> tuple[Fraction, tuple | None]:
    best = None
    cls = None
    for d, ms in exceptional_classes(k):
        a = Fraction(d, sum(ms))
        if best is None or a < best:
            best, cls = a, (d, ms)
    vol = 1 / math.sqrt(k)
    if best is None or best >= vol:
        return Fraction(1), None
    return k * best * best, cls


def main() -> int:
    ok = True
    for k in range(1, 9):
        p, cls = packing_number(k)
        match = p == PACKING_NUMBERS[k]
        ok &= match
        print(f"k={k}  p_k={p}  binding={cls}  {'ok' if match else 'MISMATCH'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
