from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from arithring.coeff import L
from arithring.linalg import det, echelon, left_kernel, rank, signed_permutations

entries = st.fractions(min_value=-6, max_value=6, max_denominator=4)


def square(n):
    return st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)


@settings(max_examples=200, derandomize=True, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_det_matches_sympy(m):
    assert det(m) == Fraction(str(sympy.Matrix(m).det()))


def test_det_symbolic_leibniz():
    m = [[L(2), 1, 0], [3, L(3), 1], [0, 2, L(5)]]
    leibniz = 0
    for sign, perm in signed_permutations(3):
        term = sign
        for i, j in enumerate(perm):
            term = term * m[i][j]
        leibniz = leibniz + term
    assert det(m) == leibniz


def test_det_edge_cases():
    assert det([]) == 1
    assert det([[0, 1], [1, 0]]) == -1
    with pytest.raises(ValueError):
        det([[1, 2]])


@settings(max_examples=200, derandomize=True, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_kernel_and_rank(m, n, data):
    rows = data.draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m))
    pivots, kernel = left_kernel(rows)
    assert rank(rows) == len(pivots) == sympy.Matrix(rows).rank()
    assert len(kernel) == m - len(pivots)
    for c in kernel:
        assert any(c)
        assert all(sum(ci * r[j] for ci, r in zip(c, rows)) == 0 for j in range(n))


def test_echelon_transforms():
    rows = [[0, 2, 4], [1, 1, 1], [2, 4, 6]]
    pivots, reduced, transforms = echelon(rows)
    assert pivots == [0, 1]
    for red, t in zip(reduced, transforms):
        assert red == [sum(t[i] * rows[i][j] for i in range(3)) for j in range(3)]
    assert reduced[2] == [0, 0, 0]
