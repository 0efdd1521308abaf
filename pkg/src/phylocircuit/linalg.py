"""Dense linear solves: exact fraction-free elimination and a float path.

The exact route clears denominators and runs Bareiss elimination (all
intermediate divisions are exact over the integers), then back-substitutes
in rationals.  The float route defers to numpy's LAPACK solver.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .errors import SingularSystemError


def solve_exact(
    matrix: list[list[Fraction]], rhs: list[list[Fraction]]
) -> list[list[Fraction]]:
    """Solve A X = B exactly; ``rhs`` holds the columns of B.

    Returns the solution columns.  Raises SingularSystemError if A is
    singular.
    """
    m = len(matrix)
    r = len(rhs)
    denoms = [x.denominator for row in matrix for x in row]
    denoms += [x.denominator for col in rhs for x in col]
    scale = lcm(*denoms) if denoms else 1
    a = [
        [int(matrix[i][j] * scale) for j in range(m)]
        + [int(rhs[c][i] * scale) for c in range(r)]
        for i in range(m)
    ]
    width = m + r
    prev = 1
    for k in range(m):
        piv = next((i for i in range(k, m) if a[i][k] != 0), None)
        if piv is None:
            raise SingularSystemError("zero pivot column")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, m):
            aik = a[i][k]
            akk = a[k][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, width):
                row_i[j] = (akk * row_i[j] - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = a[k][k]
    columns = []
    for c in range(r):
        x = [Fraction(0)] * m
        for i in range(m - 1, -1, -1):
            s = Fraction(a[i][m + c])
            for j in range(i + 1, m):
                s -= a[i][j] * x[j]
            x[i] = s / a[i][i]
        columns.append(x)
    return columns


def solve_float(matrix: list[list[float]], rhs: list[list[float]]) -> list[list[float]]:
    """Solve A X = B in floats; ``rhs`` holds the columns of B."""
    a = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float).T
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    return [list(map(float, x[:, c])) for c in range(x.shape[1])]
