"""Wall series, the blow-up factor and the rank reduction recursion for DT(r, l).

Throughout, a wall is a decomposition of the class ``(r, beta)`` with
``beta = (l, 1 - l)`` into ordered parts ``(r_i, beta_i)`` whose divisors are
fixed modulo ``r_i``.  The wall series sums Joyce's coefficient times edge
factors ``K.(r_j beta_i - r_i beta_j)`` over all such decompositions, weighted
by ``q^(beta^2/2r - sum beta_i^2/2r_i)``.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, factorial, prod
from typing import Dict, List, Optional, Sequence, Tuple

from . import lattice as la
from .geometry import NSVec, SheafClass, intersect, k_dot, ns_box
from .joyce import Tree, blocks, compositions, s_coeff, trees, u_coeff
from .qseries import QSeries, as_fraction, eta_pow
from .theta import (EnumerationError, RadiusTooSmall, ThetaEnumerator, XiData,
                    classical_theta, classical_theta_lead, restrict_xi)

log = logging.getLogger(__name__)

CACHE_VERSION = "1.0"
DEFAULT_MAX_RANK = 4


def total_class(l: int) -> NSVec:
    return NSVec(l, 1 - l)


@dataclass(frozen=True)
class WallData:
    l: int
    parts: Tuple[Tuple[int, NSVec], ...]
    graph: Tree

    def __post_init__(self):
        if len(self.parts) != self.graph.m:
            raise ValueError("graph size does not match the number of parts")
        if len(self.parts) < 2:
            raise ValueError("a wall needs at least two parts")
        for r_i, b in self.parts:
            if r_i < 1 or not (0 <= b.x < r_i and 0 <= b.y < r_i):
                raise ValueError(f"residue {b} is not in the box for rank {r_i}")

    @classmethod
    def make(cls, l, parts, edges) -> "WallData":
        parts = tuple((int(r), b if isinstance(b, NSVec) else NSVec(*b)) for r, b in parts)
        return cls(l, parts, Tree(len(parts), tuple(tuple(e) for e in edges)))

    @property
    def rank(self) -> int:
        return sum(r for r, _ in self.parts)

    @property
    def ranks(self) -> List[int]:
        return [r for r, _ in self.parts]

    @property
    def residues(self) -> List[NSVec]:
        return [b for _, b in self.parts]


@dataclass(frozen=True)
class GroupedWall:
    """Outer data of one grouping of a wall: merged parts and the edges between groups.

    ``edges`` are 1-based pairs between groups; each contributes the factor
    ``K.(B_a/R_a - B_b/R_b)`` without any rank prefactor.
    """
    l: int
    groups: Tuple[Tuple[int, NSVec], ...]
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        m = len(self.groups)
        for a, b in self.edges:
            if not (1 <= a < b <= m):
                raise ValueError(f"bad group edge {a}->{b}")


@dataclass
class DTRecord:
    r: int
    l: int
    order: int
    values: Dict[int, Fraction]
    series: Optional[QSeries] = None
    version: str = CACHE_VERSION


# --- S-series through indefinite theta data ---------------------------------


def _s_xi(l: int, ranks: Sequence[int], residues: Sequence[NSVec], edges: Sequence[Tuple[int, int]]):
    """Theta datum for the sum over a wall with the sign products of Joyce's S.

    Returns None when the congruence coset is empty.  Coordinates are
    ``nu = (x_1, y_1, ..., x_{m-1}, y_{m-1})`` with ``nu_i = beta_i/r_i - beta_{i+1}/r_{i+1}``.
    """
    m = len(ranks)
    r = sum(ranks)
    n = 2 * (m - 1)
    M = [[sum(ranks[k] * ranks[t] for k in range(min(i, j) + 1) for t in range(max(i, j) + 1, m))
          for j in range(m - 1)] for i in range(m - 1)]
    gram = [[0] * n for _ in range(n)]
    for i in range(m - 1):
        for j in range(m - 1):
            gram[2 * i][2 * j] = -M[i][j]
            gram[2 * i + 1][2 * j + 1] = M[i][j]
    nu_bar = []
    for i in range(m - 1):
        a, b = residues[i], residues[i + 1]
        nu_bar += [Fraction(a.x, ranks[i]) - Fraction(b.x, ranks[i + 1]),
                   Fraction(a.y, ranks[i]) - Fraction(b.y, ranks[i + 1])]
    beta = total_class(l)
    bbar = NSVec(sum(b.x for b in residues), sum(b.y for b in residues))
    tails = [sum(ranks[i + 1:]) for i in range(m - 1)]
    # sum_i tails_i w_i + r t = -(beta - bbar), w = nu - nu_bar integral
    rows = []
    for comp in range(2):
        row = [0] * (n + 2)
        for i in range(m - 1):
            row[2 * i + comp] = tails[i]
        row[n + comp] = r
        rows.append(row)
    rhs = [-(beta.x - bbar.x), -(beta.y - bbar.y)]
    sol = la.solve_integer(rows, rhs)
    if sol is None:
        return None
    w0 = sol[:n]
    W = [v[:n] for v in la.integer_kernel(rows)]
    gram_g = la.mat_mul(la.mat_mul(W, la.fmat(gram)), la.transpose(W))
    w_inv = la.inverse(W)
    g_inv = la.inverse(gram_g)
    base = la.vec_mat([a + b for a, b in zip(nu_bar, w0)], w_inv)

    def dual(functional):
        return la.mat_vec(g_inv, la.mat_vec(W, functional))

    c, cp = [], []
    for i in range(m - 1):
        h = [0] * n
        h[2 * i] = 1
        c.append(dual(h))
        f = [0] * n
        f[2 * i], f[2 * i + 1] = -1, 1
        cp.append(la.vec_mat(f, w_inv))
    alpha = []
    for a, b in edges:
        kf = [0] * n
        for k in range(a - 1, b - 1):
            kf[2 * k], kf[2 * k + 1] = -3, -1
        alpha.append(dual(kf))
    return XiData.make(gram_g, base, c, cp, alpha)


def _s_core(l: int, ranks: Sequence[int], residues: Sequence[NSVec],
            edges: Sequence[Tuple[int, int]], prec) -> QSeries:
    """Sum of S times ``prod K.(beta_a/r_a - beta_b/r_b)`` times the wall exponent."""
    prec = as_fraction(prec)
    m = len(ranks)
    r = sum(ranks)
    if m == 1:
        beta, b = total_class(l), residues[0]
        hit = (beta.x - b.x) % r == 0 and (beta.y - b.y) % r == 0 and not edges
        return QSeries.one(prec) if hit else QSeries.zero(prec)
    xi = _s_xi(l, ranks, residues, edges)
    if xi is None:
        return QSeries.zero(prec)
    theta_prec = prec * r
    acc = QSeries.zero(theta_prec)
    for size in range(m):
        for tied in itertools.combinations(range(m - 1), size):
            sub = restrict_xi(xi, tied)
            if sub is None:
                continue
            part = ThetaEnumerator(sub).series(theta_prec)
            acc = acc + (part if size % 2 == 0 else -part)
    return acc.rescale_exponents(Fraction(1, r)).scale(Fraction(1, 2 ** (m - 1)))


def s_series(wall, prec) -> QSeries:
    if isinstance(wall, GroupedWall):
        return _s_core(wall.l, [g for g, _ in wall.groups], [b for _, b in wall.groups], wall.edges, prec)
    factor = prod(wall.parts[i - 1][0] * wall.parts[j - 1][0] for i, j in wall.graph.edges)
    series = _s_core(wall.l, wall.ranks, wall.residues, wall.graph.edges, prec)
    return series.scale(factor)


# --- U-series through the grouping decomposition ----------------------------


def _inner_xi(ranks, residues, fibers, group_residues, inner_edges):
    """Positive definite datum for the offsets ``l_j`` inside each group.

    Returns None when the offsets admit no solution of the rank-weighted
    sum constraint.
    """
    m = len(ranks)
    offsets = [None] * m
    for g, fib in enumerate(fibers):
        R = sum(ranks[j] for j in fib)
        Y = group_residues[g].y
        for j in fib:
            offsets[j] = Fraction(residues[j].y, ranks[j]) - Fraction(Y, R)
    rows = []
    for fib in fibers:
        if len(fib) > 1:
            rows.append([ranks[j] if j in fib else 0 for j in range(m)])
    # singleton groups force l_j = 0
    for fib in fibers:
        if len(fib) == 1:
            rows.append([1 if j == fib[0] else 0 for j in range(m)])
    shift = la.solve_integer(rows, [-la.dot(row, offsets) for row in rows])
    if shift is None:
        return None
    point = [o + s for o, s in zip(offsets, shift)]
    kb = la.integer_kernel(rows)
    if not kb:
        # a single point: the edge weights are the functional values there
        values = [point[j - 1] - point[i - 1] for i, j in inner_edges]
        return XiData.make([], []), prod(values, start=Fraction(1))
    diag = [[ranks[i] if i == j else 0 for j in range(m)] for i in range(m)]
    gram = la.mat_mul(la.mat_mul(kb, la.fmat(diag)), la.transpose(kb))
    g_inv = la.inverse(gram)
    coords = la.vec_mat(la.mat_vec(kb, point), la.inverse(la.mat_mul(kb, la.transpose(kb))))
    if la.vec_mat(coords, kb) != point:
        raise EnumerationError("inner base point is not in the constraint lattice")
    alpha = []
    for i, j in inner_edges:
        f = [0] * m
        f[j - 1] += 1
        f[i - 1] -= 1
        alpha.append(la.mat_vec(g_inv, la.mat_vec(kb, f)))
    return XiData.make(gram, coords, [], [], alpha), Fraction(1)


def _groupings(wall: WallData):
    """Yield ``(fibers, coefficient)`` for non-decreasing surjections compatible with H0 slopes."""
    m = len(wall.parts)
    for sizes in compositions(m):
        fibers = blocks(sizes)
        coeff = Fraction(1)
        for fib in fibers:
            coeff /= factorial(len(fib))
        yield fibers, coeff


def u_series(wall: WallData, prec) -> QSeries:
    prec = as_fraction(prec)
    ranks, residues = wall.ranks, wall.residues
    m = len(ranks)
    edges = list(wall.graph.edges)
    prefactor = prod(ranks[i - 1] * ranks[j - 1] for i, j in edges)
    total = QSeries.zero(prec)
    for fibers, coeff in _groupings(wall):
        where = {j: g for g, fib in enumerate(fibers) for j in fib}
        group_ranks = [sum(ranks[j] for j in fib) for fib in fibers]
        candidates = []
        for g, fib in enumerate(fibers):
            R = group_ranks[g]
            ok = [B for B in ns_box(R)
                  if all((Fraction(B.x, R) - Fraction(residues[j].x, ranks[j])).denominator == 1 for j in fib)]
            candidates.append(ok)
        for split in itertools.product((0, 1), repeat=len(edges)):
            inner_edges = [e for e, s in zip(edges, split) if s == 0]
            outer = [e for e, s in zip(edges, split) if s == 1]
            if any(where[i - 1] == where[j - 1] for i, j in outer):
                continue  # K(0) = 0 for an edge inside one group
            outer_edges = tuple((where[i - 1] + 1, where[j - 1] + 1) for i, j in outer)
            for group_res in itertools.product(*candidates):
                inner = _inner_xi(ranks, residues, fibers, group_res, inner_edges)
                if inner is None:
                    continue
                outer_series = _s_core(wall.l, group_ranks, list(group_res), outer_edges, prec)
                if outer_series.is_zero():
                    continue
                inner_xi, scalar = inner
                inner_prec = prec - outer_series.valuation()
                if inner_xi.n == 0:
                    inner_series = QSeries.one(inner_prec).scale(scalar) if inner_prec > 0 else QSeries.zero(inner_prec)
                else:
                    inner_series = ThetaEnumerator(inner_xi).series(inner_prec)
                term = outer_series * inner_series
                if term.prec < prec:
                    raise EnumerationError("grouped term lost precision")
                total = total + term.truncate(prec).scale(coeff * prefactor)
    total = total.truncate(prec)
    if m == 2:
        for e, _ in total.items():
            if e <= 0:
                raise EnumerationError(f"two-part wall series has a term at exponent {e}")
    return total


def wall_exponent(l: int, ranks: Sequence[int], betas: Sequence[NSVec]) -> Fraction:
    r = sum(ranks)
    beta = total_class(l)
    value = Fraction(intersect(beta, beta), 2 * r)
    for r_i, b in zip(ranks, betas):
        value -= Fraction(intersect(b, b), 2 * r_i)
    return value


def _bruteforce(wall: WallData, prec, radius: int, coefficient) -> QSeries:
    prec = as_fraction(prec)
    if radius < 1:
        raise ValueError("radius must be positive")
    ranks, residues = wall.ranks, wall.residues
    m = len(ranks)
    beta = total_class(wall.l)
    span = range(-radius, radius + 1)
    acc: Dict[Fraction, Fraction] = {}
    for shifts in itertools.product(span, repeat=2 * (m - 1)):
        betas = []
        for i in range(m - 1):
            u = NSVec(shifts[2 * i], shifts[2 * i + 1])
            betas.append(residues[i] + u.scale(ranks[i]))
        rest = beta - NSVec(sum(b.x for b in betas), sum(b.y for b in betas))
        last = residues[-1]
        if (rest.x - last.x) % ranks[-1] or (rest.y - last.y) % ranks[-1]:
            continue
        betas.append(rest)
        e = wall_exponent(wall.l, ranks, betas)
        if e >= prec:
            continue
        weight = Fraction(1)
        for i, j in wall.graph.edges:
            weight *= k_dot(betas[i - 1].scale(ranks[j - 1]) - betas[j - 1].scale(ranks[i - 1]))
            if not weight:
                break
        if weight:
            weight *= coefficient([SheafClass(r_i, b) for r_i, b in zip(ranks, betas)])
        if not weight:
            continue
        if max(abs(s) for s in shifts) == radius:
            raise RadiusTooSmall(f"radius {radius} too small: the boundary shell contributes at q^{e}")
        acc[e] = acc.get(e, Fraction(0)) + weight
    return QSeries.from_terms(acc, prec)


def u_series_bruteforce(wall: WallData, prec, radius: int) -> QSeries:
    """Direct summation over decompositions in a coordinate box, using Joyce's U per term."""
    return _bruteforce(wall, prec, radius, u_coeff)


def s_series_bruteforce(wall: WallData, prec, radius: int) -> QSeries:
    """Direct summation of the S-weighted wall series in a coordinate box."""
    return _bruteforce(wall, prec, radius, s_coeff)


# --- blow-up factor and recursion --------------------------------------------


def blowup_factor(r: int, a: int, prec) -> QSeries:
    """``q^(r/24) eta^(-r) theta_{r,a}``."""
    prec = as_fraction(prec)
    shift = Fraction(r, 24)
    eta_part = eta_pow(-r, prec - shift).shift(shift)
    return (eta_part * classical_theta(r, a, prec)).truncate(prec)


def rank_one_series(prec) -> QSeries:
    """``q^(1/8) eta^(-3)``, the generating series of rank one."""
    prec = as_fraction(prec)
    return eta_pow(-3, prec - Fraction(1, 8)).shift(Fraction(1, 8))


@lru_cache(maxsize=None)
def _theta_lead(r: int, a: int) -> Fraction:
    return classical_theta_lead(r, a % r if r else a)


@lru_cache(maxsize=None)
def _theta_cached(r: int, a: int, prec: Fraction) -> QSeries:
    return classical_theta(r, a % r, prec)


def walls(r: int, l: int, max_vertices: int = 7):
    """All wall summands of the rank reduction formula for ``(r, l)``, deterministically ordered."""
    for m in range(2, r + 1):
        for ranks in compositions(r, m):
            boxes = [ns_box(r_i) for r_i in ranks]
            graphs = trees(m, max_vertices)
            for residues in itertools.product(*boxes):
                for g in graphs:
                    yield WallData(l, tuple(zip(ranks, residues)), g)


def _u_task(args):
    wall, prec = args
    return u_series(wall, prec)


def order_to_prec(r: int, order: int) -> Fraction:
    return Fraction(order + 1, 2 * r)


def prec_to_order(r: int, prec) -> int:
    """Largest order whose coefficients are all below ``prec``."""
    return ceil(as_fraction(prec) * 2 * r) - 1


class DTEngine:
    """Computes DT(r, l) recursively, memoising lower ranks by ``(r, l mod r)``."""

    def __init__(self, max_rank: int = DEFAULT_MAX_RANK, jobs: int = 1, cache_dir=None,
                 max_vertices: int = 7):
        if jobs < 1:
            raise ValueError("jobs must be at least 1")
        self.max_rank = max_rank
        self.jobs = jobs
        self.cache_dir = cache_dir
        self.max_vertices = max_vertices
        self._memo: Dict[Tuple[int, int], QSeries] = {}

    # series level ---------------------------------------------------------

    def series(self, r: int, l: int, prec) -> QSeries:
        prec = as_fraction(prec)
        if r < 1:
            raise ValueError("rank must be positive")
        if r > self.max_rank:
            raise ValueError(f"rank {r} exceeds the configured maximum {self.max_rank}")
        if prec <= 0:
            return QSeries.zero(prec)
        key = (r, l % r)
        known = self._memo.get(key)
        if known is None and self.cache_dir is not None:
            from .cache import cache_load
            rec = cache_load(self.cache_dir, r, l)
            if rec is not None and rec.series is not None:
                known = rec.series
                self._memo[key] = known
        if known is not None and known.prec >= prec:
            return known.truncate(prec)
        if r == 1:
            result = rank_one_series(prec)
        else:
            result = self._recursive(r, l, prec)
        if known is not None and not known.agrees_with(result):
            raise EnumerationError(f"recomputed DT({r},{l}) contradicts the stored coefficients")
        self._memo[key] = result
        if self.cache_dir is not None:
            from .cache import cache_store
            cache_store(self.cache_dir, self.record_from_series(r, l, result))
        return result

    def _recursive(self, r: int, l: int, prec: Fraction) -> QSeries:
        lam0 = _theta_lead(r, 1 - l)
        jobs = []
        for wall in walls(r, l, self.max_vertices):
            lam = sum((_theta_lead(r_i, b.y) for r_i, b in wall.parts), Fraction(0))
            jobs.append((wall, prec + lam0 - lam))
        if self.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                u_values = list(pool.map(_u_task, jobs, chunksize=1))
        else:
            u_values = [_u_task(job) for job in jobs]

        total = QSeries.zero(prec)
        for (wall, _), U in zip(jobs, u_values):
            if U.is_zero():
                continue
            m = len(wall.parts)
            lam = [_theta_lead(r_i, b.y) for r_i, b in wall.parts]
            spread = -lam0 + sum(lam, Fraction(0))
            need = prec - U.valuation()
            # each factor f must be known to need - (spread - v(f))
            inv_prec = need - spread - lam0 + 2 * lam0
            factor = _theta_cached(r, 1 - l, max(inv_prec, lam0 + 1)).invert()
            for (r_i, b), lam_i in zip(wall.parts, lam):
                factor = factor * _theta_cached(r_i, b.y, need - spread + lam_i)
            for r_i, b in wall.parts:
                factor = factor * self.series(r_i, b.x, need - spread)
            term = (U * factor).scale(Fraction((-1) ** m, 2 ** (m - 1)))
            if term.prec < prec:
                raise EnumerationError(f"wall term for {wall} lost precision: {term.prec} < {prec}")
            total = total + term.truncate(prec)
        return total

    # record level ---------------------------------------------------------

    @staticmethod
    def record_from_series(r: int, l: int, series: QSeries) -> DTRecord:
        order = prec_to_order(r, series.prec)
        values: Dict[int, Fraction] = {}
        for e, c in series.items():
            delta = e * 2 * r
            if delta < 0 or delta.denominator != 1:
                raise EnumerationError(f"DT({r},{l}) has a term at q^{e}, off the discriminant grid")
        for delta in range(order + 1):
            values[delta] = series.coefficient(Fraction(delta, 2 * r)) * (-1) ** delta
        return DTRecord(r, l % r, order, values, series)

    def dt_series(self, r: int, l: int, order: int) -> DTRecord:
        if order < 0:
            raise ValueError("order must be nonnegative")
        if r < 1:
            raise ValueError("rank must be positive")
        s = self.series(r, l, order_to_prec(r, order)).truncate(order_to_prec(r, order))
        rec = self.record_from_series(r, l, s)
        rec.l = l
        return rec


def dt_series(r: int, l: int, order: int, **engine_options) -> DTRecord:
    return DTEngine(**engine_options).dt_series(r, l, order)
