"""Generalized Newton's Method for max/min probabilistic polynomial systems.

Each iteration linearizes the product rows at the current point ``y`` and
solves an LP whose unique optimum ``I(y)`` is the next iterate.  Iterates are
rounded down to multiples of ``2**-h`` so their size stays bounded.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .linalg import SingularMatrixError, solve_linear, transpose
from .lp import LinearProgram, solve_lp
from .qualitative import QualitativeReport, reduce
from .snf import SnfResult, to_snf
from .system import EquationSystem, Kind, ModelError, encoding_size, evaluate, jacobian

log = logging.getLogger(__name__)


class GnmInvariantError(RuntimeError):
    """Something the theory rules out happened; indicates a bug or a bad precondition."""


@dataclass(frozen=True)
class Affine:
    constant: Fraction
    coeffs: tuple  # ((var, coeff), ...)

    def __call__(self, x: Sequence) -> Fraction:
        total = self.constant
        for v, c in self.coeffs:
            total += c * x[v]
        return total


@dataclass(frozen=True)
class Choice:
    op: str
    args: tuple

    def __call__(self, x: Sequence) -> Fraction:
        a, b = x[self.args[0]], x[self.args[1]]
        return max(a, b) if self.op == "max" else min(a, b)


@dataclass(frozen=True)
class LinearizedSystem:
    anchor: tuple
    rows: tuple  # Affine | Choice per variable
    flavor: str

    @property
    def n(self) -> int:
        return len(self.rows)

    def __call__(self, x: Sequence) -> tuple:
        return tuple(row(x) for row in self.rows)

    def fixed(self, policy: Mapping) -> tuple:
        """Affine rows after resolving every choice row by ``policy``."""
        out = []
        for i, row in enumerate(self.rows):
            if isinstance(row, Choice):
                out.append(Affine(Fraction(0), ((policy[i], Fraction(1)),)))
            else:
                out.append(row)
        return tuple(out)


def linearize(sys: EquationSystem, y: Sequence) -> LinearizedSystem:
    """Replace each ``x_j x_k`` row by its tangent ``y_j x_k + x_j y_k - y_j y_k``."""
    if len(y) != sys.n:
        raise ModelError(f"anchor has dimension {len(y)}, system has {sys.n} variables")
    y = tuple(Fraction(v) for v in y)
    rows = []
    for eq in sys.equations:
        if eq.kind is Kind.LINEAR:
            rows.append(Affine(eq.constant, eq.coeffs))
        elif eq.kind is Kind.PRODUCT:
            j, k = eq.args
            coeffs: dict = {}
            coeffs[k] = coeffs.get(k, Fraction(0)) + y[j]
            coeffs[j] = coeffs.get(j, Fraction(0)) + y[k]
            rows.append(Affine(-y[j] * y[k], tuple(sorted(coeffs.items()))))
        elif eq.kind is Kind.CHOICE:
            rows.append(Choice(eq.op, eq.args))
        else:
            raise ModelError("linearize needs an SNF system")
    return LinearizedSystem(y, tuple(rows), sys.flavor)


def affine_fixed_point(rows: Sequence[Affine]) -> tuple:
    """The unique ``a`` with ``rows(a) = a``; raises if ``I - A`` is singular."""
    n = len(rows)
    mat = []
    rhs = []
    for i, row in enumerate(rows):
        r = [Fraction(0)] * n
        r[i] += 1
        for v, c in row.coeffs:
            r[v] -= c
        mat.append(r)
        rhs.append(row.constant)
    return solve_linear(mat, rhs)


def _sense(flavor: str) -> str:
    return "min" if flavor == "min" else "max"


def gnm_lp(lin: LinearizedSystem) -> LinearProgram:
    """LP whose optimum is ``I(y)``.

    max flavor: minimize sum(a) s.t. P^y(a) <= a; min flavor: maximize sum(a)
    s.t. P^y(a) >= a.  Choice rows split into two linear inequalities.
    """
    n = lin.n
    rel = ">=" if _sense(lin.flavor) == "max" else "<="
    cons = []
    for i, row in enumerate(lin.rows):
        if isinstance(row, Affine):
            r = [Fraction(0)] * n
            r[i] += 1
            for v, c in row.coeffs:
                r[v] -= c
            cons.append((tuple(r), rel, row.constant))
        else:
            for a in row.args:
                r = [Fraction(0)] * n
                r[i] += 1
                r[a] -= 1
                cons.append((tuple(r), rel, Fraction(0)))
    direction = "minimize" if rel == ">=" else "maximize"
    return LinearProgram(direction, (Fraction(1),) * n, tuple(cons))


def tight_choices(lin: LinearizedSystem, a: Sequence) -> dict:
    """For each choice row, an argument attaining it at ``a`` (lower index on ties)."""
    out = {}
    for i, row in enumerate(lin.rows):
        if isinstance(row, Choice):
            j, k = row.args
            if a[j] == a[k]:
                out[i] = min(j, k)
            else:
                out[i] = j if a[i] == a[j] else k
    return out


def _verify_basis(lin: LinearizedSystem, policy: Mapping):
    """LP optimum from the basis ``policy`` if primal and dual feasible, else None."""
    rows = lin.fixed(policy)
    try:
        a = affine_fixed_point(rows)
    except SingularMatrixError:
        return None
    sense = _sense(lin.flavor)
    for i, row in enumerate(lin.rows):
        if isinstance(row, Choice):
            other = row.args[1] if policy[i] == row.args[0] else row.args[0]
            if (sense == "max" and a[i] < a[other]) or (sense == "min" and a[i] > a[other]):
                return None
    # dual multipliers of the tight rows: (I - A)^T lam = 1, lam >= 0
    n = lin.n
    mat = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i, row in enumerate(rows):
        for v, c in row.coeffs:
            mat[i][v] -= c
    try:
        lam = solve_linear(transpose(mat), (Fraction(1),) * n)
    except SingularMatrixError:
        return None
    if any(x < 0 for x in lam):
        return None
    return a


def gnm_step(sys: EquationSystem, y: Sequence, hint: Mapping | None = None,
             *, return_hint: bool = False):
    """The GNM operator ``I(y)``, computed exactly.

    ``hint`` is a guessed optimal basis (one argument per choice row, usually
    the previous iterate's).  It is accepted only after an exact primal/dual
    optimality check; otherwise the LP is solved from scratch.
    """
    if sys.flavor == "maxmin":
        raise ModelError("GNM is defined for max or min systems, not mixed ones")
    lin = linearize(sys, y)
    a = None
    if hint is not None:
        a = _verify_basis(lin, hint)
    if a is None:
        res = solve_lp(gnm_lp(lin))
        if res.status != "optimal":
            raise GnmInvariantError(f"GNM linear program is {res.status} at y={list(map(str, y))}")
        a = res.x
    return (a, tight_choices(lin, a)) if return_hint else a


def newton_step(sys: EquationSystem, y: Sequence) -> tuple:
    """``y + (I - P'(y))^{-1} (P(y) - y)`` for a pure PPS."""
    y = tuple(Fraction(v) for v in y)
    jac = jacobian(sys, y)
    n = sys.n
    mat = [[Fraction(int(i == j)) - jac[i][j] for j in range(n)] for i in range(n)]
    py = evaluate(sys, y)
    d = solve_linear(mat, [p - v for p, v in zip(py, y)])
    return tuple(v + dv for v, dv in zip(y, d))


def newton_step_policy(sys: EquationSystem, policy: Mapping, y: Sequence) -> tuple:
    """Newton iterate of the system with choices fixed by ``policy``."""
    return affine_fixed_point(linearize(sys, y).fixed(policy))


def round_down(v: Sequence, h: int) -> tuple:
    """Componentwise ``max(0, floor(v * 2^h) / 2^h)``."""
    if h < 1:
        raise ValueError("rounding parameter must be >= 1")
    scale = 1 << h
    out = []
    for x in v:
        x = Fraction(x)
        k = (x.numerator * scale) // x.denominator
        out.append(Fraction(max(k, 0), scale))
    return tuple(out)


def policy_improvement_min(sys: EquationSystem, y: Sequence, start: Mapping | None = None):
    """Policy-improvement computation of ``I(y)`` for a min system.

    Starting from ``start`` (default: first argument everywhere), switch the
    lowest-index row where ``P^y(z) < z`` until ``P^y(z) = z`` for
    ``z = N_sigma(y)``.  Returns ``(policy, z, switches)``.
    """
    if sys.flavor not in ("min", "pps"):
        raise ModelError("policy improvement applies to min systems")
    lin = linearize(sys, y)
    policy = dict(start) if start is not None else {
        i: row.args[0] for i, row in enumerate(lin.rows) if isinstance(row, Choice)}
    switches = 0
    seen = set()
    while True:
        key = tuple(sorted(policy.items()))
        if key in seen:
            raise GnmInvariantError("policy improvement revisited a policy")
        seen.add(key)
        z = affine_fixed_point(lin.fixed(policy))
        pz = lin(z)
        bad = next((i for i in range(lin.n) if pz[i] < z[i]), None)
        if bad is None:
            if pz != z:
                raise GnmInvariantError("policy improvement stopped away from a fixed point")
            return policy, z, switches
        row = lin.rows[bad]
        if not isinstance(row, Choice):
            raise GnmInvariantError("improvement step landed on a non-choice row")
        j, k = row.args
        policy[bad] = k if policy[bad] == j else j
        switches += 1


@dataclass(frozen=True)
class Iterate:
    anchor: tuple
    step: tuple  # I(anchor), before rounding
    rounded: tuple


@dataclass(frozen=True)
class SolveReport:
    approximation: tuple  # over the input system's variables
    j: int
    h: int
    size: int  # |P| of the reduced system
    iterates: tuple
    qualitative: QualitativeReport
    snf: SnfResult
    duration: float
    method: str  # "newton" | "lp"
    iterations_run: int = 0
    names: tuple = field(default=())

    @property
    def reduced_approximation(self) -> tuple:
        return self.iterates[-1].rounded if self.iterates else ()


def iteration_count(size: int, j: int) -> int:
    return j + 2 + 4 * size


def solve(sys: EquationSystem, j: int, *, use_lp: bool = False, stop_on_repeat: bool = True,
          h: int | None = None) -> SolveReport:
    """Approximate the least fixed point within ``2**-j`` in sup norm.

    Runs ``h = j + 2 + 4|P|`` rounded GNM iterations on the qualitatively
    reduced system.  Pure systems use Newton steps unless ``use_lp``.  With
    ``stop_on_repeat`` the loop ends once an iterate repeats, since every later
    iterate would be identical.
    """
    if j < 1:
        raise ValueError("precision exponent j must be >= 1")
    if sys.flavor == "maxmin":
        raise ModelError("solve handles max or min systems; use the bssg module for mixed ones")
    started = time.perf_counter()
    snf = to_snf(sys)
    report = reduce(snf.system)
    red = report.reduced
    size = encoding_size(red)
    if h is None:
        h = iteration_count(size, j)
    pure = red.is_pure()
    method = "newton" if pure and not use_lp else "lp"
    x = tuple(Fraction(0) for _ in range(red.n))
    iterates = []
    hint = None
    run = 0
    for _ in range(h if red.n else 0):
        if method == "newton":
            z = newton_step(red, x)
        else:
            z, hint = gnm_step(red, x, hint, return_hint=True)
        if any(v > 1 for v in z):
            raise GnmInvariantError(f"iterate left [0,1]: {[float(v) for v in z]}")
        nxt = round_down(z, h)
        iterates.append(Iterate(x, z, nxt))
        run += 1
        if stop_on_repeat and nxt == x:
            break
        x = nxt
    full = report.splice(x)
    approx = tuple(full[snf.mapping[i]] for i in range(sys.n))
    log.debug("solve: n=%d reduced=%d |P|=%d h=%d iterations=%d", sys.n, red.n, size, h, run)
    return SolveReport(approx, j, h, size, tuple(iterates), report, snf,
                       time.perf_counter() - started, method, run, sys.names)
