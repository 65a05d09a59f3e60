"""Gauss-Jordan elimination over the rationals."""

from fractions import Fraction


def solve_rational(matrix, rhs):
    """Solve ``matrix @ x = rhs`` exactly.

    ``matrix`` is a square list of rows of ``Fraction`` (or ints); it is not
    modified.  Raises ``ZeroDivisionError`` if the system is singular.
    """
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError(f"singular system: no pivot in column {col}")
        a[col], a[pivot] = a[pivot], a[col]
        prow = a[col]
        inv = 1 / prow[col]
        if inv != 1:
            for j in range(col, n + 1):
                prow[j] *= inv
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if factor == 0:
                continue
            row = a[r]
            for j in range(col, n + 1):
                if prow[j]:
                    row[j] -= factor * prow[j]
    return [a[i][n] for i in range(n)]
