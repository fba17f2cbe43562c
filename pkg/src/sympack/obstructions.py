"""Packing numbers of CP^2 and elementary maximality tests.

With lines of area pi, a ball of radius r has capacity r^2 in line units and
fills the fraction r^4 of CP^2, so k equal balls fill k r^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

TOL = 1e-9

# p_k for k = 1..8; p_k = 1 for k >= 9. scripts/derive_packing_numbers.py
# recomputes these from exceptional classes and fails on any mismatch.
PACKING_NUMBERS = {
    1: Fraction(1), 2: Fraction(1, 2), 3: Fraction(3, 4), 4: Fraction(1),
    5: Fraction(4, 5), 6: Fraction(24, 25), 7: Fraction(63, 64), 8: Fraction(288, 289),
}


@dataclass(frozen=True)
class PackingTable:
    values: dict = field(default_factory=lambda: dict(PACKING_NUMBERS))

    def __post_init__(self):
        for k, p in self.values.items():
            if not 0 < p <= 1:
                raise ValueError(f"p_{k} = {p} is not a fill fraction")
        if self.values.get(4) != 1:
            raise ValueError("four equal balls fill CP^2")

    def __getitem__(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError("k must be a positive integer")
        return self.values.get(k, Fraction(1))


TABLE = PackingTable()


def _exact_sqrt(q: Fraction) -> Fraction | None:
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None


def max_equal_radius_sq(k: int) -> Fraction | float:
    """r^2 with k r^4 = p_k; exact when rational."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    q = TABLE[k] / k
    exact = _exact_sqrt(q)
    return exact if exact is not None else math.sqrt(q)


def max_equal_radius(k: int) -> float:
    return math.sqrt(float(max_equal_radius_sq(k)))


@dataclass(frozen=True)
class MaximalityVerdict:
    """``feasible``: no constraint is violated; ``maximal``: the binding one is tight.

    ``margin`` is the slack of the binding constraint (negative when violated).
    """

    feasible: bool
    maximal: bool | None
    binding: str
    margin: float

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "maximal": self.maximal,
                "binding": self.binding, "margin": self.margin}


def _verdict(margin: float, binding: str) -> MaximalityVerdict:
    return MaximalityVerdict(margin >= -TOL, abs(margin) <= TOL, binding, margin)


def maximality_check(radii) -> MaximalityVerdict:
    r = sorted((float(x) for x in radii), reverse=True)
    if not r or any(x <= 0 for x in r):
        raise ValueError("radii must be positive")
    s = [x * x for x in r]
    k = len(r)
    if k == 1:
        return _verdict(1 - s[0], "r1^2 = 1")
    if k == 2:
        return _verdict(1 - s[0] - s[1], "r1^2 + r2^2 = 1")
    if k == 3:
        return _verdict(min(1 - s[0] - s[1], 1 - s[0] - s[2]), "r1^2 + r2^2 = r1^2 + r3^2 = 1")
    if max(r) - min(r) <= TOL:
        return _verdict(float(max_equal_radius_sq(k)) - s[0], f"r^2 = {max_equal_radius_sq(k)} (k = {k})")
    margin = 1 - sum(x * x for x in s)
    return MaximalityVerdict(margin >= -TOL, None, "unsupported (volume only)", margin)


def pratique_test(r1: float, r2: float) -> bool:
    """Two balls can share a whole Hopf circle only if r1^2 + r2^2 is a positive integer."""
    s = float(r1) ** 2 + float(r2) ** 2
    n = round(s)
    return n >= 1 and abs(s - n) <= TOL


def volume_obstruction(radii) -> bool:
    """True when the balls fit by volume: sum r_i^4 <= 1."""
    return sum(float(x) ** 4 for x in radii) <= 1 + 1e-12
