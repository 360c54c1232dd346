"""Exact rational linear algebra on tuples of :class:`fractions.Fraction`."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularMatrixError(ArithmeticError):
    def __init__(self, rank: int, size: int):
        super().__init__(f"singular {size}x{size} matrix (rank {rank}, deficiency {size - rank})")
        self.rank = rank
        self.deficiency = size - rank


def identity(n: int) -> tuple:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def mat_vec(m: Sequence, v: Sequence) -> tuple:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in m)


def mat_mul(a: Sequence, b: Sequence) -> tuple:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols)
                 for row in a)


def transpose(m: Sequence) -> tuple:
    return tuple(zip(*m))


def _size(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def _eliminate(m: Sequence, rhs: list) -> list:
    """Gauss-Jordan on ``[m | rhs]``; ``rhs`` is a list of column lists.

    The pivot in each column is the nonzero entry of smallest bit size, which
    keeps intermediate fractions short.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    width = len(rhs)
    a = [[Fraction(x) for x in row] + [Fraction(col[i]) for col in rhs] for i, row in enumerate(m)]
    rank = 0
    for c in range(n):
        best = None
        for r in range(c, n):
            if a[r][c] and (best is None or _size(a[r][c]) < _size(a[best][c])):
                best = r
        if best is None:
            continue
        a[c], a[best] = a[best], a[c]
        rank += 1
        piv = a[c][c]
        prow = a[c]
        if piv != 1:
            inv = 1 / piv
            prow = a[c] = [x * inv for x in prow]
        for r in range(n):
            if r != c:
                f = a[r][c]
                if f:
                    row = a[r]
                    a[r] = [x - f * y if y else x for x, y in zip(row, prow)]
    if rank < n:
        raise SingularMatrixError(rank, n)
    return [[a[i][n + k] for i in range(n)] for k in range(width)]


def solve_linear(m: Sequence, b: Sequence) -> tuple:
    """Exact solution of ``m z = b``."""
    if len(b) != len(m):
        raise ValueError("right-hand side does not match matrix size")
    if not m:
        return ()
    (z,) = _eliminate(m, [list(b)])
    return tuple(z)


def invert(m: Sequence) -> tuple:
    n = len(m)
    if n == 0:
        return ()
    cols = _eliminate(m, [list(col) for col in identity(n)])
    return tuple(zip(*cols))


def spectral_radius_leq_one(a: Sequence) -> bool:
    """Decide ``rho(a) <= 1`` for an irreducible nonnegative matrix.

    By Perron-Frobenius this holds iff some ``v >= 1`` has ``a v <= v``.  The
    check is an exact LP feasibility problem.  Irreducibility is the caller's
    responsibility and is not verified.
    """
    from .lp import LinearProgram, solve_lp

    n = len(a)
    if any(x < 0 for row in a for x in row):
        raise ValueError("spectral_radius_leq_one needs a nonnegative matrix")
    if n == 0:
        return True
    rows = []
    for i in range(n):
        row = [Fraction(x) for x in a[i]]
        row[i] -= 1
        rows.append((tuple(row), "<=", Fraction(0)))
    lp = LinearProgram("minimize", tuple(Fraction(0) for _ in range(n)), tuple(rows),
                       bounds=tuple((Fraction(1), None) for _ in range(n)))
    return solve_lp(lp).status == "optimal"
