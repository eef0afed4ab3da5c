"""Classical and indefinite theta series.

An indefinite datum ``XiData`` describes the series

    sum over nu in nu_bar + Z^n of
        prod_i (sgn B(c_i, nu) - sgn B(c'_i, nu)) * prod_j B(alpha_j, nu) * q^(B(nu, nu)/2)

where ``B`` is the Gram matrix.  ``ThetaEnumerator`` evaluates it exactly by
splitting ``nu = mu + sum_i m_i c'_i`` so that each ``m_i`` runs over a half
line along which the exponent grows linearly, and ``mu`` runs over finitely
many translates of the positive definite lattice orthogonal to the ``c_i``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import lattice as la
from .qseries import QSeries, as_fraction, format_fraction

__all__ = [
    "XiData", "InvalidXiError", "EnumerationError", "RadiusTooSmall",
    "validate_xi", "restrict_xi", "ThetaEnumerator", "indefinite_theta",
    "indefinite_theta_bruteforce", "classical_theta", "classical_theta_lead",
]


class InvalidXiError(ValueError):
    def __init__(self, violations: List[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class EnumerationError(AssertionError):
    """An internal consistency check of the enumerator failed."""


class RadiusTooSmall(RuntimeError):
    pass


def _ftuple(v) -> Tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in v)


@dataclass(frozen=True)
class XiData:
    gram: Tuple[Tuple[int, ...], ...]
    nu_bar: Tuple[Fraction, ...]
    c: Tuple[Tuple[Fraction, ...], ...] = ()
    c_prime: Tuple[Tuple[Fraction, ...], ...] = ()
    alpha: Tuple[Tuple[Fraction, ...], ...] = ()

    @classmethod
    def make(cls, gram, nu_bar, c=(), c_prime=(), alpha=()) -> "XiData":
        g = []
        for row in gram:
            out = []
            for x in row:
                x = as_fraction(x)
                if x.denominator != 1:
                    raise ValueError("Gram matrix entries must be integers")
                out.append(int(x))
            g.append(tuple(out))
        return cls(tuple(g), _ftuple(nu_bar), tuple(_ftuple(v) for v in c),
                   tuple(_ftuple(v) for v in c_prime), tuple(_ftuple(v) for v in alpha))

    @property
    def n(self) -> int:
        return len(self.gram)

    @property
    def b(self) -> int:
        return len(self.c)

    @property
    def k(self) -> int:
        return len(self.alpha)

    def to_json(self) -> dict:
        def vec(v):
            return [format_fraction(x) for x in v]
        return {
            "gram": [list(row) for row in self.gram],
            "nu_bar": vec(self.nu_bar),
            "c": [vec(v) for v in self.c],
            "c_prime": [vec(v) for v in self.c_prime],
            "alpha": [vec(v) for v in self.alpha],
        }

    @classmethod
    def from_json(cls, record: dict) -> "XiData":
        return cls.make(record["gram"], record["nu_bar"], record.get("c", []),
                        record.get("c_prime", []), record.get("alpha", []))

    @classmethod
    def load(cls, path) -> "XiData":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _rational_gcd(values: Sequence[Fraction]) -> Fraction:
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    g = 0
    for v in values:
        g = gcd(g, int(v * den))
    return Fraction(g, den)


def validate_xi(xi: XiData) -> List[str]:
    """Return the list of violated conditions; an empty list means the datum is valid."""
    problems: List[str] = []
    n, b = xi.n, xi.b
    # (v) shapes first, since nothing else can be checked on malformed input
    if any(len(row) != n for row in xi.gram):
        problems.append("(v) Gram matrix is not square")
    elif any(xi.gram[i][j] != xi.gram[j][i] for i in range(n) for j in range(n)):
        problems.append("(v) Gram matrix is not symmetric")
    if len(xi.nu_bar) != n:
        problems.append("(v) nu_bar has the wrong length")
    if len(xi.c_prime) != b:
        problems.append("(v) c and c_prime have different lengths")
    for name, vecs in (("c", xi.c), ("c_prime", xi.c_prime), ("alpha", xi.alpha)):
        if any(len(v) != n for v in vecs):
            problems.append(f"(v) a vector in {name} has the wrong length")
    if problems:
        return problems

    G = la.fmat(xi.gram)
    # (i) nondegenerate, and the negative index matches the number of c vectors
    pos, neg, zero = la.signature(G)
    if zero:
        problems.append("(i) Gram matrix is degenerate")
    elif neg != b or pos < neg:
        problems.append(f"(i) signature ({pos}, {neg}) does not fit b = {b} with a >= b")

    # (ii) the c vectors span a negative definite b-dimensional space
    if b:
        cc = [[la.bilinear(G, u, v) for v in xi.c] for u in xi.c]
        cpos, cneg, czero = la.signature(cc)
        if cneg != b:
            problems.append("(ii) the c vectors do not span a negative definite subspace")

    # (iii) orthogonality relations
    for i in range(b):
        for j in range(b):
            if i != j and la.bilinear(G, xi.c[i], xi.c_prime[j]) != 0:
                problems.append(f"(iii) B(c_{i+1}, c'_{j+1}) != 0")
            if la.bilinear(G, xi.c_prime[i], xi.c_prime[j]) != 0:
                problems.append(f"(iii) B(c'_{i+1}, c'_{j+1}) != 0")
        if la.bilinear(G, xi.c[i], xi.c_prime[i]) >= 0:
            problems.append(f"(iii) B(c_{i+1}, c'_{i+1}) is not negative")

    # (iv) B(c'_i, nu) never vanishes on the coset
    for i in range(b):
        functional = la.mat_vec(G, xi.c_prime[i])
        g = _rational_gcd(functional)
        value = la.dot(functional, xi.nu_bar)
        if (g == 0 and value == 0) or (g != 0 and (value / g).denominator == 1):
            problems.append(f"(iv) B(c'_{i+1}, nu) vanishes somewhere on the coset")
    return problems


def require_valid(xi: XiData) -> None:
    problems = validate_xi(xi)
    if problems:
        raise InvalidXiError(problems)


def restrict_xi(xi: XiData, tied: Sequence[int]) -> Optional[XiData]:
    """Datum for the sub-sum over ``B(c_i, nu) = 0`` for ``i`` in ``tied``.

    The sign factors of the tied indices are dropped; the remaining vectors are
    replaced by their components in the sublattice.  Returns None when no point
    of the coset satisfies the constraints.
    """
    tied = sorted(set(tied))
    if not tied:
        return xi
    G = la.fmat(xi.gram)
    rows = [la.mat_vec(G, xi.c[i]) for i in tied]
    shift = la.solve_integer(rows, [-la.dot(r, xi.nu_bar) for r in rows])
    if shift is None:
        return None
    nu0 = [a + w for a, w in zip(xi.nu_bar, shift)]
    kb = la.integer_kernel(rows)
    gram_k = la.mat_mul(la.mat_mul(kb, G), la.transpose(kb))
    inv_k = la.inverse(gram_k) if kb else []
    kg = la.mat_mul(kb, G)

    def project(v):
        return la.mat_vec(inv_k, la.mat_vec(kg, v)) if kb else []

    # nu0 lies in the span of kb; express it in that basis
    if kb:
        kkt = la.mat_mul(kb, la.transpose(kb))
        coords = la.vec_mat(la.mat_vec(kb, nu0), la.inverse(kkt))
        if la.vec_mat(coords, kb) != nu0:
            raise EnumerationError("restricted base point is not in the sublattice span")
    else:
        coords = []
    keep = [i for i in range(xi.b) if i not in tied]
    return XiData.make(
        gram_k, coords,
        [project(xi.c[i]) for i in keep],
        [project(xi.c_prime[i]) for i in keep],
        [project(a) for a in xi.alpha],
    )


class ThetaEnumerator:
    """Exact finite enumeration of an indefinite theta series below a precision bound."""

    def __init__(self, xi: XiData, validate: bool = True):
        if validate:
            require_valid(xi)
        self.xi = xi
        n, b = xi.n, xi.b
        G = la.fmat(xi.gram)
        self.G = G
        c = [la.fvec(la.clear_denominators(v)) for v in xi.c]
        cp = [la.fvec(la.clear_denominators(v)) for v in xi.c_prime]
        self.c, self.cp = c, cp
        self.gc = [la.mat_vec(G, v) for v in c]
        self.gcp = [la.mat_vec(G, v) for v in cp]
        self.galpha = [la.mat_vec(G, v) for v in xi.alpha]
        self.bcc = [la.dot(self.gc[i], cp[i]) for i in range(b)]
        if n == 0:
            kb: List[List[int]] = []
            reps: List[List[int]] = [[]]
        else:
            kb = la.integer_kernel(self.gc) if b else [[int(i == j) for j in range(n)] for i in range(n)]
            reps = la.coset_representatives(kb + [[int(x) for x in v] for v in cp])
        self.kb = kb
        self.gram_k = la.mat_mul(la.mat_mul(kb, G), la.transpose(kb)) if kb else []
        kkt_inv = la.inverse(la.mat_mul(kb, la.transpose(kb))) if kb else []
        cc_inv = la.inverse([[la.dot(gu, v) for v in c] for gu in self.gc]) if b else []
        # alpha pairings with the c' directions, so weights are affine in the m_i
        self.alpha_cp = [[la.dot(ga, v) for v in cp] for ga in self.galpha]

        self.cosets = []
        for rho in reps:
            p = [a + x for a, x in zip(xi.nu_bar, rho)]
            shift = [floor(la.dot(self.gc[i], p) / self.bcc[i]) for i in range(b)]
            mu = list(p)
            for i in range(b):
                if shift[i]:
                    mu = [x - shift[i] * y for x, y in zip(mu, cp[i])]
            lam = la.mat_vec(cc_inv, [la.dot(g, mu) for g in self.gc]) if b else []
            perp = [Fraction(0)] * n
            for i in range(b):
                perp = [x + lam[i] * y for x, y in zip(perp, c[i])]
            q_perp = la.bilinear(G, perp, perp) / 2
            plus = [x - y for x, y in zip(mu, perp)]
            z = la.vec_mat(la.mat_vec(kb, plus), kkt_inv) if kb else []
            if kb and la.vec_mat(z, kb) != plus:
                raise EnumerationError("projected coset point left the orthogonal complement")
            self.cosets.append((mu, z, q_perp))
        self.lower_bound = min(q for _, _, q in self.cosets)

    def terms(self, prec) -> Dict[Fraction, Fraction]:
        prec = as_fraction(prec)
        xi = self.xi
        b = xi.b
        acc: Dict[Fraction, Fraction] = {}
        for mu_e, z_e, q_perp in self.cosets:
            if q_perp >= prec:
                continue
            for lam, q_plus in la.short_vectors(self.gram_k, z_e, prec - q_perp):
                mu = la.vec_mat(lam, self.kb) if self.kb else []
                mu = [a + x for a, x in zip(mu_e, mu)] if mu else list(mu_e)
                q_mu = q_plus + q_perp
                slopes, signs, offsets = [], [], []
                for i in range(b):
                    d = la.dot(self.gcp[i], mu)
                    t = la.dot(self.gc[i], mu) / self.bcc[i]
                    if d == 0:
                        raise EnumerationError("B(c'_i, mu) vanished on a validated coset")
                    if not (0 <= t < 1):
                        raise EnumerationError("coset normalisation failed")
                    slopes.append(d)
                    signs.append(1 if d > 0 else -1)
                    offsets.append(t)
                base_alpha = [la.dot(ga, mu) for ga in self.galpha]
                per_index = []
                budget = prec - q_mu
                for i in range(b):
                    options = self._half_line(signs[i], offsets[i], slopes[i], budget)
                    if not options:
                        break
                    per_index.append(options)
                else:
                    for combo in itertools.product(*per_index):
                        exponent = q_mu + sum((inc for _, inc, _ in combo), Fraction(0))
                        if exponent >= prec:
                            continue
                        weight = Fraction(1)
                        for _, _, f in combo:
                            weight *= f
                        for j, base in enumerate(base_alpha):
                            val = base + sum((m * self.alpha_cp[j][i] for i, (m, _, _) in enumerate(combo)), Fraction(0))
                            weight *= val
                            if not weight:
                                break
                        if weight:
                            acc[exponent] = acc.get(exponent, Fraction(0)) + weight
        return acc

    @staticmethod
    def _half_line(sign: int, t: Fraction, d: Fraction, budget: Fraction):
        """``(m, exponent increment, sign factor)`` along the half line with a nonzero factor."""
        out = []
        if sign > 0:
            m, step = 0, 1
            first = -1 if t == 0 else -2
        else:
            if t == 0:
                m, step, first = 0, -1, 1
            else:
                m, step, first = -1, -1, 2
        prev = None
        while True:
            inc = m * d
            if inc < 0 or (prev is not None and inc <= prev):
                raise EnumerationError("exponent is not increasing along the retained half line")
            if inc >= budget:
                break  # first discarded term lies at or beyond the bound
            factor = first if m == 0 else (-2 if sign > 0 else 2)
            out.append((m, inc, factor))
            prev = inc
            m += step
        return out

    def series(self, prec) -> QSeries:
        return QSeries.from_terms(self.terms(prec), prec)


def indefinite_theta(xi: XiData, prec) -> QSeries:
    return ThetaEnumerator(xi).series(prec)


def indefinite_theta_bruteforce(xi: XiData, prec, radius: int) -> QSeries:
    """Naive box summation with a boundary-shell certificate."""
    require_valid(xi)
    prec = as_fraction(prec)
    n = xi.n
    if radius < 1:
        raise ValueError("radius must be positive")
    if n == 0:
        return ThetaEnumerator(xi, validate=False).series(prec)
    den = 1
    for x in xi.nu_bar:
        den = lcm(den, x.denominator)
    base = np.array([int(x * den) for x in xi.nu_bar], dtype=np.int64)
    rng = np.arange(-radius, radius + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([rng] * n), indexing="ij"), axis=-1).reshape(-1, n)
    shell = np.abs(grid).max(axis=1) == radius
    V = base + den * grid  # den * nu
    G = np.array(xi.gram, dtype=np.int64)
    norm2 = np.einsum("ij,jk,ik->i", V, G, V)  # 2 den^2 Q(nu)
    weight = np.ones(len(V), dtype=np.int64)
    for cv, cpv in zip(xi.c, xi.c_prime):
        gc = G @ np.array(la.clear_denominators(cv), dtype=np.int64)
        gcp = G @ np.array(la.clear_denominators(cpv), dtype=np.int64)
        weight = weight * (np.sign(V @ gc) - np.sign(V @ gcp))
    scale = Fraction(1)
    for a in xi.alpha:
        ints = la.clear_denominators(a)
        nz = next((x for x, y in zip(ints, a) if y != 0), None)
        if nz is None:
            weight = weight * 0
            continue
        ratio = next(Fraction(y) / x for x, y in zip(ints, a) if x != 0)
        scale *= ratio / den
        weight = weight * (V @ (G @ np.array(ints, dtype=np.int64)))
    limit = prec * 2 * den * den
    live = weight != 0
    low = live & (norm2 < limit)
    if np.any(low & shell):
        raise RadiusTooSmall(f"radius {radius} too small: the boundary shell still contributes below q^{prec}")
    acc: Dict[Fraction, Fraction] = {}
    for e2, w in zip(norm2[low].tolist(), weight[low].tolist()):
        e = Fraction(int(e2), 2 * den * den)
        acc[e] = acc.get(e, Fraction(0)) + w * scale
    return QSeries.from_terms(acc, prec)


def _a_type_gram(k: int) -> List[List[int]]:
    return [[2 if i == j else 1 for j in range(k)] for i in range(k)]


def classical_theta(r: int, a: int, prec) -> QSeries:
    """``sum q^(sum_{i<=j} k_i k_j)`` over ``k in (a/r, ..., a/r) + Z^(r-1)``."""
    if r < 1:
        raise ValueError("r must be positive")
    prec = as_fraction(prec)
    if r == 1:
        return QSeries.one(prec)
    gram = _a_type_gram(r - 1)
    center = [Fraction(a, r)] * (r - 1)
    acc: Dict[Fraction, Fraction] = {}
    for _, value in la.short_vectors(gram, center, prec):
        acc[value] = acc.get(value, Fraction(0)) + 1
    return QSeries.from_terms(acc, prec)


def classical_theta_lead(r: int, a: int) -> Fraction:
    """Smallest exponent of ``classical_theta(r, a)``."""
    prec = Fraction(1)
    while True:
        s = classical_theta(r, a, prec)
        if not s.is_zero():
            return s.lead()
        prec *= 2
