"""Exact integer and rational linear algebra used by the theta enumerators.

Matrices are lists of rows.  Vectors are plain lists.  Everything is exact:
integers stay integers, everything else becomes :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Iterator, List, Optional, Sequence, Tuple

Vector = List[Fraction]
Matrix = List[List[Fraction]]


def fmat(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def fvec(v) -> Vector:
    return [Fraction(x) for x in v]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return [dot(row, v) for row in m]


def vec_mat(v: Sequence, m: Sequence[Sequence]) -> Vector:
    cols = len(m[0]) if m else 0
    out = [Fraction(0)] * cols
    for a, row in zip(v, m):
        if a:
            for j, x in enumerate(row):
                out[j] += a * x
    return out


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [vec_mat(row, b) for row in a]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)]


def bilinear(gram: Sequence[Sequence], u: Sequence, v: Sequence) -> Fraction:
    return dot(u, mat_vec(gram, v))


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def inverse(m: Sequence[Sequence]) -> Matrix:
    """Gauss-Jordan inverse over the rationals; raises on a singular matrix."""
    n = len(m)
    aug = [fvec(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def determinant(m: Sequence[Sequence]) -> Fraction:
    a = fmat(m)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def solve_rational(m: Sequence[Sequence], b: Sequence) -> Vector:
    """Solve ``x m = b`` for a square nonsingular ``m`` (row-vector convention)."""
    return vec_mat(b, inverse(m))


def symmetric_diagonal(gram: Sequence[Sequence]) -> Vector:
    """Diagonal entries of a congruence diagonalization ``P G P^T = D``.

    Works for indefinite and singular forms; the signs of the returned entries
    give the signature by Sylvester's law of inertia.
    """
    a = fmat(gram)
    n = len(a)
    diag: Vector = []
    for k in range(n):
        if a[k][k] == 0:
            # find a pivot: a nonzero diagonal entry, else combine with an off-diagonal one
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is not None:
                    # e_k <- e_k + e_j makes the diagonal entry 2 a_kj
                    a[k] = [x + y for x, y in zip(a[k], a[j])]
                    for row in a:
                        row[k] += row[j]
        p = a[k][k]
        diag.append(p)
        if p == 0:
            continue
        for r in range(k + 1, n):
            f = a[r][k] / p
            if f:
                # matching row and column operations keep the matrix symmetric
                for i in range(n):
                    a[r][i] -= f * a[k][i]
                for i in range(n):
                    a[i][r] -= f * a[i][k]
    return diag


def signature(gram: Sequence[Sequence]) -> Tuple[int, int, int]:
    """(positive, negative, zero) index of a rational symmetric matrix."""
    d = symmetric_diagonal(gram)
    return (sum(1 for x in d if x > 0), sum(1 for x in d if x < 0), sum(1 for x in d if x == 0))


def is_positive_definite(gram: Sequence[Sequence]) -> bool:
    pos, _, _ = signature(gram)
    return pos == len(gram)


def ldl(gram: Sequence[Sequence]) -> Tuple[Matrix, Vector]:
    """``gram = L D L^T`` for a positive definite matrix; ``L`` unit lower triangular."""
    n = len(gram)
    L = identity(n)
    D: Vector = [Fraction(0)] * n
    g = fmat(gram)
    for j in range(n):
        D[j] = g[j][j] - sum((L[j][k] ** 2 * D[k] for k in range(j)), Fraction(0))
        if D[j] <= 0:
            raise ValueError("matrix is not positive definite")
        for i in range(j + 1, n):
            L[i][j] = (g[i][j] - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), Fraction(0))) / D[j]
    return L, D


def clear_denominators(v: Sequence) -> List[int]:
    """Smallest positive rational multiple of ``v`` that is a primitive integer vector."""
    v = fvec(v)
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def _int_matrix(rows: Sequence[Sequence]) -> List[List[int]]:
    out = []
    for row in rows:
        row = fvec(row)
        den = 1
        for x in row:
            den = lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def column_echelon(a: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[List[int]], List[int]]:
    """Integer column echelon form ``a U = H`` with ``U`` unimodular.

    Returns ``(H, U, pivots)`` where ``pivots[k]`` is the row of the k-th pivot;
    columns of ``U`` beyond ``len(pivots)`` span the integer kernel of ``a``.
    """
    rows = len(a)
    n = len(a[0]) if rows else 0
    h = [list(map(int, row)) for row in a]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(i, j, p, q, r, s):
        # (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j)
        for mat in (h, u):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, r * x + s * y

    pivots: List[int] = []
    k = 0
    for row in range(rows):
        if k >= n:
            break
        for j in range(k + 1, n):
            x, y = h[row][k], h[row][j]
            if y == 0:
                continue
            if x == 0:
                col_op(k, j, 0, 1, 1, 0)
                continue
            g, s, t = _xgcd(x, y)
            col_op(k, j, s, t, -y // g, x // g)
        if h[row][k] != 0:
            if h[row][k] < 0:
                for mat in (h, u):
                    for r_ in mat:
                        r_[k] = -r_[k]
            pivots.append(row)
            k += 1
    return h, u, pivots


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_kernel(rows: Sequence[Sequence]) -> List[List[int]]:
    """A basis (as rows) of ``{v in Z^n : rows . v = 0}`` for rational ``rows``."""
    a = _int_matrix(rows)
    if not a:
        raise ValueError("integer_kernel needs the ambient dimension; pass at least one row")
    n = len(a[0])
    _, u, pivots = column_echelon(a)
    rank = len(pivots)
    return [[u[i][j] for i in range(n)] for j in range(rank, n)]


def solve_integer(rows: Sequence[Sequence], rhs: Sequence) -> Optional[List[int]]:
    """An integer vector ``v`` with ``rows . v = rhs``, or None when none exists."""
    a_rows = [fvec(r) for r in rows]
    rhs = fvec(rhs)
    # scale each equation to integer coefficients
    a: List[List[int]] = []
    b: List[Fraction] = []
    for row, val in zip(a_rows, rhs):
        den = 1
        for x in row:
            den = lcm(den, x.denominator)
        a.append([int(x * den) for x in row])
        b.append(val * den)
    n = len(a[0])
    h, u, pivots = column_echelon(a)
    y: List[Fraction] = []
    for k, prow in enumerate(pivots):
        acc = b[prow] - sum((h[prow][j] * y[j] for j in range(k)), Fraction(0))
        val = acc / h[prow][k]
        if val.denominator != 1:
            return None
        y.append(val)
    # every equation must now be satisfied (non-pivot rows are dependent ones)
    v = [sum((u[i][j] * y[j] for j in range(len(y))), Fraction(0)) for i in range(n)]
    for row, val in zip(a, b):
        if dot(row, v) != val:
            return None
    return [int(x) for x in v]


def row_hnf(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    """Upper triangular row Hermite form of a full-rank square integer lattice basis."""
    h, _, _ = column_echelon(transpose([[int(x) for x in r] for r in rows]))
    n = len(rows)
    t = transpose(h)
    basis = [[int(x) for x in t[j]] for j in range(n)]
    # column echelon of the transpose is lower triangular; its transpose is upper triangular
    return basis


def coset_representatives(basis: Sequence[Sequence[int]]) -> List[List[int]]:
    """Representatives of ``Z^n / L`` for a full-rank sublattice ``L`` given by row basis."""
    hb = row_hnf(basis)
    n = len(hb)
    diag = []
    for i in range(n):
        d = hb[i][i]
        if d == 0 or any(hb[i][j] != 0 for j in range(i)):
            raise ValueError("sublattice is not of full rank")
        diag.append(abs(d))
    reps: List[List[int]] = [[]]
    for d in diag:
        reps = [r + [k] for r in reps for k in range(d)]
    return reps


def short_vectors(gram: Sequence[Sequence], center: Sequence, bound) -> Iterator[Tuple[List[int], Fraction]]:
    """All ``z`` in ``Z^n`` with ``Q(center + z) < bound`` where ``Q(v) = v G v^T / 2``.

    ``gram`` must be positive definite.  Yields ``(z, Q(center + z))``.
    Fincke-Pohst enumeration with exact rational bounds.
    """
    n = len(gram)
    bound = Fraction(bound)
    center = fvec(center)
    if n == 0:
        if bound > 0:
            yield [], Fraction(0)
        return
    L, D = ldl(gram)
    # Q(v) = 1/2 sum_i D_i (v_i + sum_{j>i} L_ji v_j)^2
    z = [0] * n
    v = [Fraction(0)] * n

    def rec(i: int, remaining: Fraction):
        s = sum((L[j][i] * v[j] for j in range(i + 1, n)), Fraction(0))
        # need D_i/2 (v_i + s)^2 < remaining with v_i = center_i + k
        limit = 2 * remaining / D[i]
        w = center[i] + s
        root = isqrt(limit.numerator // limit.denominator) + 1
        lo = -(w.numerator // w.denominator) - root - 1
        hi = -(w.numerator // w.denominator) + root + 1
        for k in range(lo, hi + 1):
            t = w + k
            part = D[i] * t * t / 2
            if part < remaining:
                z[i] = k
                v[i] = center[i] + k
                if i == 0:
                    yield list(z), bound - (remaining - part)
                else:
                    yield from rec(i - 1, remaining - part)

    yield from rec(n - 1, bound)
