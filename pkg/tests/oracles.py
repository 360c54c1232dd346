"""Brute-force reference computations used only by the tests."""

import itertools
from fractions import Fraction as F

import networkx as nx
import numpy as np

from ppsolve.linalg import SingularMatrixError, solve_linear
from ppsolve.lp import LinearProgram
from ppsolve.qualitative import all_policies, zero_set
from ppsolve.system import Kind, _float_eq, apply_policy, dependency_graph, kleene_float


def kleene_until_stable(sys, steps=10_000, tol=1e-15):
    """Float Kleene iteration from 0, stopping early once an update is below ``tol``."""
    fs = [_float_eq(eq) for eq in sys.equations]
    x = [0.0] * sys.n
    for _ in range(steps):
        nxt = [f(x) for f in fs]
        if max((abs(a - b) for a, b in zip(nxt, x)), default=0.0) < tol:
            return nxt
        x = nxt
    return x


def policy_values(sys, steps=10_000):
    """``{policy key: Kleene estimate of q*_sigma}`` over every pure policy."""
    out = {}
    for policy in all_policies(sys):
        key = tuple(sorted(policy.items()))
        out[key] = kleene_until_stable(apply_policy(sys, policy), steps)
    return out


def best_over_policies(sys, steps=10_000):
    vals = list(policy_values(sys, steps).values())
    pick = max if sys.flavor != "min" else min
    return [pick(v[i] for v in vals) for i in range(sys.n)]


def scc_radii(pps):
    """Spectral radius of ``P'(1)`` on every SCC of the non-zero part of a pure SNF system."""
    zeros = zero_set(pps)
    live = [i for i in range(pps.n) if i not in zeros]
    g = dependency_graph(pps).subgraph(live)
    radii = []
    for comp in nx.strongly_connected_components(g):
        comp = sorted(comp)
        pos = {v: k for k, v in enumerate(comp)}
        m = np.zeros((len(comp), len(comp)))
        for i in comp:
            eq = pps.equations[i]
            if eq.kind is Kind.LINEAR:
                for v, c in eq.coeffs:
                    if v in pos:
                        m[pos[i], pos[v]] += float(c)
            else:
                for a in eq.args:
                    if a in pos:
                        m[pos[i], pos[a]] += 1.0
        radii.append(float(max(abs(np.linalg.eigvals(m)))))
    return radii


def near_critical(sys, margin=1e-2):
    """True when some policy has an SCC whose radius lies within ``margin`` of 1."""
    for policy in all_policies(sys):
        if any(abs(r - 1) < margin for r in scc_radii(apply_policy(sys, policy))):
            return True
    return False


def kleene_max_min(sys, steps=10_000):
    """Kleene iteration of the system itself, resolving both operators."""
    return kleene_float(sys, steps)


def _all_rows(lp):
    rows = [(tuple(F(a) for a in r), rel, F(b)) for r, rel, b in lp.constraints]
    n = lp.n
    for i, (lo, hi) in enumerate(lp.var_bounds()):
        e = tuple(F(int(i == j)) for j in range(n))
        if lo is not None:
            rows.append((e, ">=", F(lo)))
        if hi is not None:
            rows.append((e, "<=", F(hi)))
    return rows


def vertex_oracle(lp):
    """Best basic feasible point by brute force; the region must be pointed and bounded."""
    rows = _all_rows(lp)
    n = lp.n
    best = None
    vertices = set()
    for subset in itertools.combinations(rows, n):
        try:
            x = solve_linear([r for r, _, _ in subset], [b for _, _, b in subset])
        except SingularMatrixError:
            continue
        if lp.is_feasible(x):
            vertices.add(x)
            val = sum((F(c) * v for c, v in zip(lp.objective, x)), F(0))
            if best is None or (val < best if lp.direction == "minimize" else val > best):
                best = val
    return best, vertices


def random_lp(rng):
    """Small LP with rational data whose region is bounded by its variable bounds."""
    n = rng.randint(1, 4)
    m = rng.randint(1, 6)
    frac = lambda lo, hi: F(rng.randint(lo * 4, hi * 4), rng.choice([1, 2, 4]))
    rows = tuple((tuple(frac(-3, 3) for _ in range(n)), rng.choice(["<=", ">=", "<=", "="]), frac(-2, 4))
                 for _ in range(m))
    if rng.random() < 0.5:
        bounds = tuple((frac(-2, 0), frac(1, 3)) for _ in range(n))
    else:
        bounds = tuple((F(0), F(rng.randint(1, 5))) for _ in range(n))
    return LinearProgram(rng.choice(["minimize", "maximize"]),
                         tuple(frac(-2, 2) for _ in range(n)), rows, bounds)
