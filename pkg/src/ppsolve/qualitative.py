"""Exact detection of coordinates with value 0 or 1, and their elimination."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .linalg import SingularMatrixError, solve_linear, spectral_radius_leq_one
from .system import Equation, EquationSystem, Kind, ModelError, apply_policy, dependency_graph

DEFAULT_ENUM_CAP = 2 ** 20


class PolicyEnumerationError(RuntimeError):
    """Too many policies to enumerate."""


def enumeration_cap() -> int:
    return int(os.environ.get("GNM_POLICY_ENUM_CAP", DEFAULT_ENUM_CAP))


def all_policies(sys: EquationSystem, indices=None):
    """Every pure policy over ``indices`` (default: all choice equations), lexicographically."""
    idx = sys.choice_indices() if indices is None else list(indices)
    if 2 ** len(idx) > enumeration_cap():
        raise PolicyEnumerationError(
            f"{2 ** len(idx)} policies exceed the enumeration cap {enumeration_cap()}")
    options = [sys.equations[i].args for i in idx]
    for combo in itertools.product(*options):
        yield dict(zip(idx, combo))


def _positive(eq: Equation, pos: set) -> bool:
    if eq.kind is Kind.LINEAR:
        return eq.constant > 0 or any(v in pos for v, _ in eq.coeffs)
    if eq.kind is Kind.PRODUCT:
        return eq.args[0] in pos and eq.args[1] in pos
    if eq.kind is Kind.CHOICE:
        hits = [a in pos for a in eq.args]
        return any(hits) if eq.op == "max" else all(hits)
    polys = [p.constant > 0 or any(all(v in pos for v, _ in m) for _, m in p.terms)
             for p in eq.polys]
    return all(polys) if eq.op == "min" else any(polys)


def positive_rounds(sys: EquationSystem) -> list:
    """Successive positivity sets of ``P^k(0)`` until they stabilise."""
    pos: set = set()
    history = [frozenset()]
    for _ in range(sys.n + 1):
        nxt = {i for i, eq in enumerate(sys.equations) if _positive(eq, pos)}
        if nxt == pos:
            break
        pos = nxt
        history.append(frozenset(pos))
    return history


def zero_set(sys: EquationSystem) -> frozenset:
    """Indices with LFP value exactly 0."""
    pos = positive_rounds(sys)[-1]
    return frozenset(range(sys.n)) - pos


def _pps_one_set(sys: EquationSystem, zeros) -> frozenset:
    zeros = set(zeros)
    live = [i for i in range(sys.n) if i not in zeros]
    g = dependency_graph(sys).subgraph(live)
    cond = nx.condensation(g)
    order = list(nx.topological_sort(cond))
    ones: set = set()
    for c in reversed(order):  # dependencies first
        scc = sorted(cond.nodes[c]["members"])
        members = set(scc)
        if _scc_is_one(sys, scc, members, zeros, ones):
            ones |= members
    return frozenset(ones)


def _scc_is_one(sys, scc, members, zeros, ones) -> bool:
    linear = True
    for i in scc:
        eq = sys.equations[i]
        for v in eq.variables():
            if v not in members and v not in ones and v not in zeros:
                return False
        if eq.kind is Kind.LINEAR:
            mass = eq.constant + sum((c for v, c in eq.coeffs if v not in zeros), Fraction(0))
            if mass != 1:
                return False
        elif eq.kind is Kind.PRODUCT:
            linear = False
            if any(a in zeros for a in eq.args):
                return False
        else:
            raise ModelError("one-set analysis of a policy-fixed system needs L/Q rows only")
    pos = {v: k for k, v in enumerate(scc)}
    n = len(scc)
    if linear:
        mat, rhs = [], []
        for i in scc:
            eq = sys.equations[i]
            row = [Fraction(0)] * n
            row[pos[i]] += 1
            b = eq.constant
            for v, c in eq.coeffs:
                if v in pos:
                    row[pos[v]] -= c
                elif v in ones:
                    b += c
            mat.append(row)
            rhs.append(b)
        try:
            return all(x == 1 for x in solve_linear(mat, rhs))
        except SingularMatrixError:
            pass
    jac = [[Fraction(0)] * n for _ in range(n)]
    for i in scc:
        eq = sys.equations[i]
        if eq.kind is Kind.LINEAR:
            for v, c in eq.coeffs:
                if v in pos:
                    jac[pos[i]][pos[v]] += c
        else:
            for a in eq.args:
                if a in pos:
                    jac[pos[i]][pos[a]] += 1
    return spectral_radius_leq_one(jac)


def one_set(sys: EquationSystem, zeros=None) -> frozenset:
    """Indices with LFP value exactly 1.

    Pure systems are decided SCC by SCC; max/min systems by enumerating
    policies (some policy reaching 1 for max, every policy for min).
    """
    if not sys.is_snf():
        raise ModelError("one_set needs an SNF system")
    if zeros is None:
        zeros = zero_set(sys)
    if not sys.choice_indices():
        return _pps_one_set(sys, zeros)
    if sys.flavor not in ("max", "min"):
        raise ModelError("one_set supports pure, max and min systems")
    result = None
    for policy in all_policies(sys):
        fixed = apply_policy(sys, policy)
        ones = _pps_one_set(fixed, zero_set(fixed))
        if result is None:
            result = set(ones)
        elif sys.flavor == "max":
            result |= ones
        else:
            result &= ones
    return frozenset(result)


@dataclass(frozen=True)
class QualitativeReport:
    original: EquationSystem
    zero_set: frozenset
    one_set: frozenset
    reduced: EquationSystem
    back_map: tuple  # reduced index -> original index
    # choice equations that survive as x_i = x_j: original i -> original j
    degraded: dict = field(default_factory=dict)

    def splice(self, reduced_values) -> tuple:
        """Full-length vector from values of the reduced system."""
        out = [Fraction(0)] * self.original.n
        for i in self.one_set:
            out[i] = Fraction(1)
        for r, i in enumerate(self.back_map):
            out[i] = reduced_values[r]
        return tuple(out)

    def forward_map(self) -> dict:
        return {i: r for r, i in enumerate(self.back_map)}


def reduce(sys: EquationSystem) -> QualitativeReport:
    """Remove value-0 and value-1 variables by substitution."""
    if not sys.is_snf():
        raise ModelError("reduce needs an SNF system")
    zeros = zero_set(sys)
    ones = one_set(sys, zeros)
    keep = [i for i in range(sys.n) if i not in zeros and i not in ones]
    fwd = {i: r for r, i in enumerate(keep)}
    eqs = []
    degraded = {}
    for i in keep:
        eq = sys.equations[i]
        if eq.kind is Kind.LINEAR:
            const = eq.constant + sum((c for v, c in eq.coeffs if v in ones), Fraction(0))
            coeffs = {fwd[v]: c for v, c in eq.coeffs if v in fwd}
            eqs.append(Equation.linear(const, coeffs))
            continue
        j, k = eq.args
        if j in fwd and k in fwd:
            if eq.kind is Kind.PRODUCT:
                eqs.append(Equation.product(fwd[j], fwd[k]))
            else:
                eqs.append(Equation.choice(eq.op, fwd[j], fwd[k]))
            continue
        # one argument eliminated; the other must survive or i itself would be eliminated
        survivor = j if j in fwd else k
        if survivor not in fwd:
            raise AssertionError(f"equation {sys.names[i]} should have been eliminated")
        eqs.append(Equation.linear(0, {fwd[survivor]: 1}))
        if eq.kind is Kind.CHOICE:
            degraded[i] = survivor
    reduced = EquationSystem(tuple(eqs), tuple(sys.names[i] for i in keep), sys.flavor)
    return QualitativeReport(sys, zeros, ones, reduced, tuple(keep), degraded)
