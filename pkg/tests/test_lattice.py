import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dtseries.lattice import (bilinear, clear_denominators, column_echelon, coset_representatives,
                              determinant, identity, integer_kernel, inverse, is_positive_definite,
                              ldl, mat_mul, row_hnf, short_vectors, signature, solve_integer,
                              transpose)


@pytest.mark.parametrize("gram, expected", [
    ([[0, 1], [1, 0]], (1, 1, 0)),
    ([[2, 0], [0, -2]], (1, 1, 0)),
    ([[2, 1], [1, 2]], (2, 0, 0)),
    ([[1, 1], [1, 1]], (1, 0, 1)),
    ([[0, 0], [0, 0]], (0, 0, 2)),
    ([[0, 1, 0], [1, 0, 0], [0, 0, -3]], (1, 2, 0)),
])
def test_signature(gram, expected):
    assert signature(gram) == expected


small_int = st.integers(min_value=-4, max_value=4)


@settings(max_examples=80, deadline=None)
@given(st.lists(small_int, min_size=6, max_size=6))
def test_signature_counts_match_determinant_sign(entries):
    a, b, c, d, e, f = entries
    gram = [[a, b, c], [b, d, e], [c, e, f]]
    pos, neg, zero = signature(gram)
    det = determinant(gram)
    assert pos + neg + zero == 3
    assert (zero > 0) == (det == 0)
    if det:
        assert (neg % 2 == 1) == (det < 0)


def test_ldl_reconstructs_positive_definite_matrix():
    gram = [[2, 1, 0], [1, 2, 1], [0, 1, 2]]
    assert is_positive_definite(gram)
    lower, diag = ldl(gram)
    d = [[diag[i] if i == j else 0 for j in range(3)] for i in range(3)]
    assert mat_mul(mat_mul(lower, d), transpose(lower)) == [[F(x) for x in row] for row in gram]


def test_inverse_and_identity():
    m = [[2, 1], [7, 4]]
    assert mat_mul(m, inverse(m)) == identity(2)


def test_clear_denominators_primitive_positive_multiple():
    assert clear_denominators([F(1, 2), F(-1, 3)]) == [3, -2]
    assert clear_denominators([0, 4, 6]) == [0, 2, 3]


def test_column_echelon_is_unimodular():
    a = [[2, 4, 6], [1, 3, 5]]
    h, u, _ = column_echelon(a)
    assert mat_mul(a, u) == h
    assert h[0][1:] == [0, 0] and h[1][2] == 0
    assert abs(determinant(u)) == 1


def test_integer_kernel():
    basis = integer_kernel([[1, 1, 1]])
    assert len(basis) == 2
    for v in basis:
        assert sum(v) == 0
    # the span is all of the kernel: (1,-1,0) and (0,1,-1) must be integer combinations
    for target in ([1, -1, 0], [0, 1, -1]):
        coeffs = solve_integer(transpose(basis), target)
        assert coeffs is not None


def test_solve_integer_detects_unsolvable_systems():
    assert solve_integer([[2, 4]], [3]) is None
    v = solve_integer([[2, 4], [1, 1]], [6, 2])
    assert v is not None and 2 * v[0] + 4 * v[1] == 6 and v[0] + v[1] == 2


def test_coset_representatives_index():
    basis = [[2, 1], [0, 3]]
    reps = coset_representatives(basis)
    assert len(reps) == 6
    hnf = row_hnf(basis)
    # distinct representatives lie in distinct cosets
    for a, b in itertools.combinations(reps, 2):
        diff = [x - y for x, y in zip(a, b)]
        assert solve_integer(transpose(hnf), diff) is None


def test_short_vectors_against_box():
    gram = [[2, 1], [1, 2]]
    center = [F(1, 3), F(1, 3)]
    bound = F(7)
    found = {tuple(z): q for z, q in short_vectors(gram, center, bound)}
    expected = {}
    for z in itertools.product(range(-6, 7), repeat=2):
        v = [center[0] + z[0], center[1] + z[1]]
        q = bilinear(gram, v, v) / 2
        if q < bound:
            expected[z] = q
    assert found == expected
