"""Truncated formal series in fractional powers of q with exact rational coefficients.

A :class:`QSeries` stores finitely many terms ``c * q^(k/N)`` sharing a single
exponent denominator ``N``, together with a precision bound ``prec``: every
coefficient at an exponent below ``prec`` is known exactly, nothing is known at
or above it.  Arithmetic propagates the bound, so a product or inverse never
reports a coefficient that depends on unknown input terms.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Tuple

__all__ = ["QSeries", "eta_pow", "as_fraction", "format_fraction", "parse_fraction"]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_fraction(value)
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class QSeries:
    """Immutable truncated series ``sum_k c_k q^(k/denom) + O(q^prec)``."""

    __slots__ = ("_denom", "_terms", "_prec")

    def __init__(self, terms: Mapping[int, object], denom: int, prec):
        if denom <= 0:
            raise ValueError("exponent denominator must be positive")
        prec = as_fraction(prec)
        kept: Dict[int, Fraction] = {}
        for k, c in terms.items():
            c = as_fraction(c)
            if c and Fraction(k, denom) < prec:
                kept[int(k)] = c
        # reduce to the smallest common denominator so equal series compare equal
        g = denom
        for k in kept:
            g = gcd(g, k)
            if g == 1:
                break
        if g > 1:
            kept = {k // g: c for k, c in kept.items()}
            denom //= g
        if not kept:
            denom = 1
        self._denom = denom
        self._terms = dict(sorted(kept.items()))
        self._prec = prec

    # construction helpers -------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Mapping[object, object] | Iterable[Tuple[object, object]], prec) -> "QSeries":
        """Build from an association ``exponent -> coefficient`` with rational exponents."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Fraction, Fraction] = {}
        for e, c in items:
            e = as_fraction(e)
            acc[e] = acc.get(e, Fraction(0)) + as_fraction(c)
        denom = 1
        for e in acc:
            denom = lcm(denom, e.denominator)
        return cls({int(e * denom): c for e, c in acc.items()}, denom, prec)

    @classmethod
    def zero(cls, prec) -> "QSeries":
        return cls({}, 1, prec)

    @classmethod
    def one(cls, prec) -> "QSeries":
        return cls.monomial(0, 1, prec)

    @classmethod
    def monomial(cls, exponent, coeff, prec) -> "QSeries":
        return cls.from_terms({as_fraction(exponent): coeff}, prec)

    # accessors ------------------------------------------------------------

    @property
    def denom(self) -> int:
        return self._denom

    @property
    def prec(self) -> Fraction:
        return self._prec

    @property
    def raw_terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Fraction, Fraction]]:
        """Yield ``(exponent, coefficient)`` in ascending exponent order."""
        for k, c in self._terms.items():
            yield Fraction(k, self._denom), c

    def terms(self) -> Dict[Fraction, Fraction]:
        return dict(self.items())

    def coefficient(self, exponent) -> Fraction:
        e = as_fraction(exponent)
        if e >= self._prec:
            raise ValueError(f"coefficient of q^{e} is beyond the precision bound {self._prec}")
        k = e * self._denom
        if k.denominator != 1:
            return Fraction(0)
        return self._terms.get(int(k), Fraction(0))

    def lead(self) -> Fraction | None:
        """Lowest exponent with a nonzero coefficient, or None if no term is known."""
        for k in self._terms:
            return Fraction(k, self._denom)
        return None

    def valuation(self) -> Fraction:
        """A guaranteed lower bound for the exponents of the true series."""
        lead = self.lead()
        return self._prec if lead is None else lead

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    # ring operations ------------------------------------------------------

    def _aligned(self, other: "QSeries") -> Tuple[int, Dict[int, Fraction], Dict[int, Fraction]]:
        n = lcm(self._denom, other._denom)
        a, b = n // self._denom, n // other._denom
        return n, {k * a: c for k, c in self._terms.items()}, {k * b: c for k, c in other._terms.items()}

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.monomial(0, as_fraction(other), self._prec)
        n, left, right = self._aligned(other)
        for k, c in right.items():
            left[k] = left.get(k, Fraction(0)) + c
        return QSeries(left, n, min(self._prec, other._prec))

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries({k: -c for k, c in self._terms.items()}, self._denom, self._prec)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.monomial(0, as_fraction(other), self._prec)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "QSeries":
        factor = as_fraction(factor)
        return QSeries({k: c * factor for k, c in self._terms.items()}, self._denom, self._prec)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        prec = min(self._prec + other.valuation(), other._prec + self.valuation())
        n, left, right = self._aligned(other)
        bound = prec * n
        out: Dict[int, Fraction] = {}
        right_items = list(right.items())
        for ka, ca in left.items():
            for kb, cb in right_items:
                k = ka + kb
                if k >= bound:
                    break
                out[k] = out.get(k, Fraction(0)) + ca * cb
        return QSeries(out, n, prec)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, exponent: int) -> "QSeries":
        if exponent < 0:
            return self.invert() ** (-exponent)
        result = QSeries.one(self._prec + max(self._prec, 0) * exponent + 1)
        base = self
        first = True
        while exponent:
            if exponent & 1:
                result = base if first else result * base
                first = False
            exponent >>= 1
            if exponent:
                base = base * base
        if first:
            return QSeries.one(self._prec - self.valuation())
        return result

    def invert(self) -> "QSeries":
        """Multiplicative inverse; the result is exact below ``prec - 2*lead``."""
        if not self._terms:
            raise ZeroDivisionError("cannot invert a series with no known nonzero term")
        k0, c0 = next(iter(self._terms.items()))
        lead = Fraction(k0, self._denom)
        rel_prec = self._prec - lead
        steps = rel_prec * self._denom  # relative exponent numerators are < steps
        tail = [(k - k0, c / c0) for k, c in self._terms.items() if k != k0]
        inv: Dict[int, Fraction] = {0: Fraction(1)}
        n = 1
        while n < steps:
            acc = Fraction(0)
            for k, a in tail:
                if k > n:
                    break
                d = inv.get(n - k)
                if d:
                    acc -= a * d
            if acc:
                inv[n] = acc
            n += 1
        shift = -k0
        return QSeries({k + shift: d / c0 for k, d in inv.items()}, self._denom, rel_prec - lead)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.invert()
        return self.scale(Fraction(1) / as_fraction(other))

    # exponent manipulation -------------------------------------------------

    def shift(self, exponent) -> "QSeries":
        """Multiply by ``q^exponent``."""
        e = as_fraction(exponent)
        n = lcm(self._denom, e.denominator)
        a = n // self._denom
        s = int(e * n)
        return QSeries({k * a + s: c for k, c in self._terms.items()}, n, self._prec + e)

    def rescale_exponents(self, factor) -> "QSeries":
        """Substitute ``q -> q^factor`` for a positive rational factor."""
        f = as_fraction(factor)
        if f <= 0:
            raise ValueError("exponent scale factor must be positive")
        # k/N * p/s = k*p/(N*s)
        return QSeries({k * f.numerator: c for k, c in self._terms.items()},
                       self._denom * f.denominator, self._prec * f)

    def truncate(self, prec) -> "QSeries":
        prec = as_fraction(prec)
        return QSeries(self._terms, self._denom, min(prec, self._prec))

    # comparison / display ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self._denom, self._terms, self._prec) == (other._denom, other._terms, other._prec)

    def __hash__(self):
        return hash((self._denom, tuple(self._terms.items()), self._prec))

    def agrees_with(self, other: "QSeries") -> bool:
        """True iff both series carry the same coefficients below the smaller bound."""
        p = min(self._prec, other._prec)
        return self.truncate(p).terms() == other.truncate(p).terms()

    def __repr__(self) -> str:
        return f"QSeries({self})"

    def __str__(self) -> str:
        parts = []
        for e, c in self.items():
            parts.append(f"{format_fraction(c)}*q^{format_fraction(e)}")
        parts.append(f"O(q^{format_fraction(self._prec)})")
        return " + ".join(parts)

    # serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "denom": self._denom,
            "prec": format_fraction(self._prec),
            "terms": [[k, format_fraction(c)] for k, c in self._terms.items()],
        }

    @classmethod
    def from_json(cls, record: Mapping) -> "QSeries":
        denom = int(record["denom"])
        prec = parse_fraction(str(record["prec"]))
        terms: Dict[int, Fraction] = {}
        last = None
        for k, c in record["terms"]:
            k = int(k)
            c = parse_fraction(str(c))
            if c == 0:
                raise ValueError("serialized series stores a zero coefficient")
            if last is not None and k <= last:
                raise ValueError("serialized terms are not strictly ascending")
            last = k
            terms[k] = c
        series = cls(terms, denom, prec)
        if len(series) != len(terms):
            raise ValueError("serialized series stores terms beyond its precision")
        return series


def _euler_product(degree: int) -> list:
    """Integer coefficients of prod_{m>=1} (1 - q^m) up to q^degree, by direct expansion."""
    coeffs = [0] * (degree + 1)
    coeffs[0] = 1
    for m in range(1, degree + 1):
        for i in range(degree, m - 1, -1):
            coeffs[i] -= coeffs[i - m]
    return coeffs


def _int_series_power(coeffs: list, k: int, degree: int) -> list:
    out = [0] * (degree + 1)
    out[0] = 1
    for _ in range(k):
        nxt = [0] * (degree + 1)
        for i, a in enumerate(out):
            if a:
                for j in range(degree + 1 - i):
                    nxt[i + j] += a * coeffs[j]
        out = nxt
    return out


def _int_series_inverse(coeffs: list, degree: int) -> list:
    # coeffs[0] == 1 for the Euler product
    inv = [0] * (degree + 1)
    inv[0] = 1
    for n in range(1, degree + 1):
        inv[n] = -sum(coeffs[j] * inv[n - j] for j in range(1, n + 1))
    return inv


def eta_pow(k: int, prec) -> QSeries:
    """``eta(q)^k = q^(k/24) prod_{m>=1} (1 - q^m)^k`` expanded below ``prec``."""
    prec = as_fraction(prec)
    offset = Fraction(k, 24)
    rel = prec - offset
    if rel <= 0:
        return QSeries.zero(prec)
    degree = -(-rel.numerator // rel.denominator) - 1  # largest integer < rel
    base = _euler_product(degree)
    if k < 0:
        base = _int_series_inverse(base, degree)
    coeffs = _int_series_power(base, abs(k), degree)
    return QSeries({i: c for i, c in enumerate(coeffs)}, 1, rel).shift(offset)
