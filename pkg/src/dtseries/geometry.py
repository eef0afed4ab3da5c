"""Divisor classes on the plane blown up at one point, and the two slope functions.

A class ``x*H0 + y*C`` is stored as ``NSVec(x, y)`` where ``H0`` is the pulled
back hyperplane and ``C`` the exceptional curve, so ``H0^2 = 1``, ``C^2 = -1``
and ``H0.C = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List


@dataclass(frozen=True, order=True)
class NSVec:
    x: int
    y: int

    def __add__(self, other: "NSVec") -> "NSVec":
        return NSVec(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "NSVec") -> "NSVec":
        return NSVec(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "NSVec":
        return NSVec(-self.x, -self.y)

    def scale(self, k: int) -> "NSVec":
        return NSVec(k * self.x, k * self.y)

    def mod(self, r: int) -> "NSVec":
        """Representative in the box ``0 <= x, y < r``."""
        return NSVec(self.x % r, self.y % r)

    def as_tuple(self):
        return (self.x, self.y)


H0 = NSVec(1, 0)
C = NSVec(0, 1)
F = NSVec(1, -1)  # fiber class H0 - C
K = NSVec(-3, 1)  # canonical class


@dataclass(frozen=True)
class SheafClass:
    r: int
    beta: NSVec

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"rank must be positive, got {self.r}")

    def __add__(self, other: "SheafClass") -> "SheafClass":
        return SheafClass(self.r + other.r, self.beta + other.beta)


@dataclass(frozen=True, order=True)
class LexSlope:
    """Slope against ``H0 - tC`` as ``t`` tends to 1 from below, ordered lexicographically."""
    f_part: Fraction
    c_part: Fraction


def intersect(a: NSVec, b: NSVec) -> int:
    return a.x * b.x - a.y * b.y


def k_dot(b: NSVec) -> int:
    return intersect(K, b)


def slope_h0(c: SheafClass) -> Fraction:
    return Fraction(c.beta.x, c.r)


def slope_fplus(c: SheafClass) -> LexSlope:
    # beta . (H0 - tC) = x + t*y = (x + y) - (1 - t)*y
    x, y = c.beta.x, c.beta.y
    return LexSlope(Fraction(x + y, c.r), Fraction(-y, c.r))


def slope_at(c: SheafClass, t) -> Fraction:
    """Slope against the real class ``H0 - tC`` for a rational ``t``."""
    t = Fraction(t)
    return (c.beta.x + t * c.beta.y) / c.r


def ns_box(r: int) -> List[NSVec]:
    if r < 1:
        raise ValueError("box size must be positive")
    return [NSVec(x, y) for x in range(r) for y in range(r)]
