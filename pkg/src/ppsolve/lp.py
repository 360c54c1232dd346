"""Exact two-phase simplex with Bland's rule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True)
class LinearProgram:
    """``direction c.x`` subject to ``row . x  rel  rhs`` for every constraint.

    ``bounds`` holds a ``(lower, upper)`` pair per variable, ``None`` meaning
    unbounded on that side.  Omitted bounds make every variable free.
    """

    direction: str
    objective: tuple
    constraints: tuple = ()
    bounds: tuple | None = None

    def __post_init__(self):
        if self.direction not in ("minimize", "maximize"):
            raise ValueError(f"direction must be minimize or maximize, not {self.direction!r}")
        n = len(self.objective)
        for row, rel, _ in self.constraints:
            if len(row) != n:
                raise ValueError("constraint row does not match objective dimension")
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
        if self.bounds is not None and len(self.bounds) != n:
            raise ValueError("one (lower, upper) pair per variable is required")

    @property
    def n(self) -> int:
        return len(self.objective)

    def var_bounds(self):
        return self.bounds if self.bounds is not None else ((None, None),) * self.n

    def is_feasible(self, x: Sequence) -> bool:
        for row, rel, rhs in self.constraints:
            lhs = sum((Fraction(a) * v for a, v in zip(row, x)), Fraction(0))
            if (rel == "<=" and lhs > rhs) or (rel == ">=" and lhs < rhs) or (rel == "=" and lhs != rhs):
                return False
        for v, (lo, hi) in zip(x, self.var_bounds()):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
        return True


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple | None = None
    value: Fraction | None = None
    pivots: int = 0


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            prow = [x / piv for x in prow]
            self.rows[r] = prow
            self.rhs[r] /= piv
        nz = [j for j, x in enumerate(prow) if x]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
                    self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c
        self.pivots += 1

    def reduced_costs(self, cost):
        d = list(cost)
        z = Fraction(0)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[r]
                for j, x in enumerate(row):
                    if x:
                        d[j] -= cb * x
                z += cb * self.rhs[r]
        return d, z

    def run(self, cost, allowed: int) -> str:
        """Minimize ``cost`` over the first ``allowed`` columns with Bland's rule."""
        limit = math.comb(self.ncols, len(self.rows))
        start = self.pivots
        while True:
            d, _ = self.reduced_costs(cost)
            enter = next((j for j in range(allowed) if d[j] < 0), None)
            if enter is None:
                return "optimal"
            leave = None
            best = None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leave]):
                        best, leave = ratio, r
            if leave is None:
                return "unbounded"
            self.pivot(leave, enter)
            assert self.pivots - start <= limit, "simplex exceeded the basis-count ceiling"


def _standard_form(lp: LinearProgram):
    """Rewrite with nonnegative columns; returns rows, rels, rhs, column map."""
    cols = 0
    recover = []  # per original var: (shift, [(col, sign)])
    extra_rows = []
    for lo, hi in lp.var_bounds():
        lo = None if lo is None else Fraction(lo)
        hi = None if hi is None else Fraction(hi)
        if lo is not None:
            recover.append((lo, [(cols, 1)]))
            if hi is not None:
                extra_rows.append((cols, hi - lo))
            cols += 1
        elif hi is not None:
            recover.append((hi, [(cols, -1)]))
            cols += 1
        else:
            recover.append((Fraction(0), [(cols, 1), (cols + 1, -1)]))
            cols += 2
    rows, rels, rhs = [], [], []
    for row, rel, b in lp.constraints:
        out = [Fraction(0)] * cols
        b = Fraction(b)
        for a, (shift, parts) in zip(row, recover):
            a = Fraction(a)
            if not a:
                continue
            b -= a * shift
            for c, s in parts:
                out[c] += s * a
        rows.append(out)
        rels.append(rel)
        rhs.append(b)
    for c, width in extra_rows:
        out = [Fraction(0)] * cols
        out[c] = Fraction(1)
        rows.append(out)
        rels.append("<=")
        rhs.append(width)
    cost = [Fraction(0)] * cols
    sign = 1 if lp.direction == "minimize" else -1
    const = Fraction(0)
    for ci, (shift, parts) in zip(lp.objective, recover):
        ci = Fraction(ci)
        const += ci * shift
        for c, s in parts:
            cost[c] += sign * s * ci
    return rows, rels, rhs, cost, recover, cols


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly; the optimum returned is a vertex."""
    rows, rels, rhs, cost, recover, nstruct = _standard_form(lp)
    m = len(rows)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
            rels[i] = {"<=": ">=", ">=": "<=", "=": "="}[rels[i]]
    nslack = sum(1 for r in rels if r != "=")
    nart = sum(1 for r in rels if r != "<=")
    ncols = nstruct + nslack + nart
    table = []
    basis = []
    s_col = nstruct
    a_col = nstruct + nslack
    for i in range(m):
        row = rows[i] + [Fraction(0)] * (nslack + nart)
        if rels[i] == "<=":
            row[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if rels[i] == ">=":
                row[s_col] = Fraction(-1)
                s_col += 1
            row[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        table.append(row)
    tab = _Tableau(table, list(rhs), basis, ncols)
    first_art = nstruct + nslack

    if nart:
        phase1 = [Fraction(0)] * first_art + [Fraction(1)] * nart
        tab.run(phase1, ncols)
        _, infeas = tab.reduced_costs(phase1)
        if infeas > 0:
            return LPResult("infeasible", pivots=tab.pivots)
        # drive zero-valued artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= first_art:
                c = next((j for j in range(first_art) if tab.rows[r][j]), None)
                if c is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
                tab.pivot(r, c)
            r += 1
    cost2 = cost + [Fraction(0)] * (nslack + nart)
    status = tab.run(cost2, first_art)
    if status == "unbounded":
        return LPResult("unbounded", pivots=tab.pivots)
    col_val = [Fraction(0)] * ncols
    for r, b in enumerate(tab.basis):
        col_val[b] = tab.rhs[r]
    x = tuple(shift + sum((s * col_val[c] for c, s in parts), Fraction(0))
              for shift, parts in recover)
    value = sum((Fraction(c) * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LPResult("optimal", x, value, tab.pivots)
