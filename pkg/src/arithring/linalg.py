"""Fraction-free (Bareiss) elimination over the integral domain Q[L_p].

Entries are canonical scalars from :mod:`arithring.coeff`; the only division
ever performed is the exact Bareiss division by the previous pivot.
"""

from __future__ import annotations

from itertools import permutations

from .coeff import exact_div


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def signed_permutations(n):
    """(sign, permutation) pairs of range(n) in lexicographic order."""
    for perm in permutations(range(n)):
        yield _perm_sign(perm), perm


def det(matrix):
    """Exact determinant of a square matrix of scalars (Bareiss)."""
    a = [list(row) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = exact_div(piv * row_i[j] - aik * row_k[j], prev)
        prev = piv
    return a[n - 1][n - 1] if sign == 1 else -a[n - 1][n - 1]


def echelon(rows, augment=True):
    """Fraction-free row echelon form with an identity block tracking combinations.

    Columns are processed left to right; the pivot for a column is the first
    remaining row with a nonzero entry there (the row of smallest order, ties
    to the lowest index).  Returns ``(pivot_columns, reduced_rows, transforms)``
    where row ``i`` of ``reduced_rows`` equals ``transforms[i]`` applied to the
    input rows.  Rows past ``len(pivot_columns)`` are zero.
    """
    m = len(rows)
    width = len(rows[0]) if rows else 0
    work = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError("ragged matrix")
        ident = [0] * m
        ident[i] = 1
        work.append(list(row) + (ident if augment else []))
    total = len(work[0]) if work else 0
    pivots = []
    prev = 1
    r = 0
    for col in range(width):
        if r == m:
            break
        for i in range(r, m):
            if work[i][col]:
                break
        else:
            continue
        if i != r:
            work[r], work[i] = work[i], work[r]
        piv_row = work[r]
        piv = piv_row[col]
        for i in range(r + 1, m):
            row = work[i]
            a = row[col]
            for j in range(col + 1, total):
                x = row[j]
                y = piv_row[j]
                if a and y:
                    row[j] = exact_div(piv * x - a * y, prev)
                elif x:
                    row[j] = exact_div(piv * x, prev)
            row[col] = 0
        prev = piv
        pivots.append(col)
        r += 1
    reduced = [row[:width] for row in work]
    transforms = [row[width:] for row in work] if augment else None
    return pivots, reduced, transforms


def left_kernel(rows):
    """Pivot columns and a basis of {c : sum_i c_i rows[i] = 0} (exact)."""
    if not rows:
        return [], []
    pivots, _, transforms = echelon(rows)
    return pivots, [transforms[i] for i in range(len(pivots), len(rows))]


def rank(rows):
    if not rows:
        return 0
    pivots, _, _ = echelon(rows, augment=False)
    return len(pivots)
