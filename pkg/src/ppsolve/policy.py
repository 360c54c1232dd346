"""Extraction of epsilon-optimal pure policies for max and min systems."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .gnm import GnmInvariantError, solve
from .qualitative import QualitativeReport, one_set, reduce, zero_set
from .snf import to_snf
from .system import EquationSystem, Kind, ModelError, apply_policy, check_policy, encoding_size

log = logging.getLogger(__name__)


def greedy_policy(sys: EquationSystem, y: Sequence) -> dict:
    """Per choice equation, the argument attaining the max/min of ``y``; ties go to the lower index."""
    out = {}
    for i in sys.choice_indices():
        eq = sys.equations[i]
        if eq.kind is not Kind.CHOICE:
            raise ModelError("greedy_policy needs an SNF system")
        j, k = sorted(eq.args)
        if y[j] == y[k]:
            out[i] = j
        elif eq.op == "max":
            out[i] = j if y[j] > y[k] else k
        else:
            out[i] = j if y[j] < y[k] else k
    return out


def log2_ceil_inverse(eps: Fraction) -> int:
    """Smallest ``t >= 0`` with ``2**-t <= eps``."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    t = 0
    while Fraction(1, 1 << t) > eps:
        t += 1
    return t


def policy_exponent(sys: EquationSystem, eps: Fraction) -> int:
    """Precision exponent giving a sound epsilon-policy for ``sys`` (already reduced)."""
    extra = 3 if sys.flavor == "min" else 2
    return 14 * encoding_size(sys) + extra + log2_ceil_inverse(eps)


@dataclass(frozen=True)
class ReducedPolicy:
    policy: dict
    y: tuple
    j: int
    switches: int = 0


def epsilon_policy_min(sys: EquationSystem, eps, *, j: int | None = None) -> ReducedPolicy:
    """Greedy policy at a sufficiently precise approximation of the LFP (reduced min system)."""
    if j is None:
        j = policy_exponent(sys.with_flavor("min") if sys.flavor == "pps" else sys, eps)
    y = solve(sys, j).approximation
    return ReducedPolicy(greedy_policy(sys, y), y, j)


def epsilon_policy_max(sys: EquationSystem, eps, *, j: int | None = None) -> ReducedPolicy:
    """Greedy policy followed by repairs that remove spurious zeros (reduced max system)."""
    eps = Fraction(eps)
    if j is None:
        j = policy_exponent(sys, eps)
    y = solve(sys, j).approximation
    policy = greedy_policy(sys, y)
    # 2^(-14|P|-1) eps at the default exponent; tracks j when it is overridden
    tol = eps / (1 << max(j - log2_ceil_inverse(eps) - 1, 0))
    switches = 0
    while True:
        zeros = zero_set(apply_policy(sys, policy))
        if not zeros:
            return ReducedPolicy(policy, y, j, switches)
        pick = None
        for i in sorted(zeros):
            eq = sys.equations[i]
            if eq.kind is not Kind.CHOICE:
                continue
            for a in sorted(eq.args):
                if a not in zeros and abs(y[i] - y[a]) <= tol:
                    pick = (i, a)
                    break
            if pick:
                break
        if pick is None:
            raise GnmInvariantError(
                f"repair found no eligible switch; zero set {sorted(zeros)} under policy {policy}")
        policy[pick[0]] = pick[1]
        switches += 1
        log.debug("repair switch %d: equation %d -> %d", switches, *pick)
        if switches > len(policy):
            raise GnmInvariantError("repair loop exceeded the number of choice equations")


def extend_policy(full: EquationSystem, reduced_policy: Mapping, report: QualitativeReport) -> dict:
    """Lift a policy of the reduced system to every choice equation of ``full``.

    Eliminated choice equations get a choice that keeps the eliminated value:
    an argument from the zero set (min, value 0), or an argument found by
    sequential fixing that keeps the one set intact (max, value 1).
    """
    out = {report.back_map[r]: report.back_map[c] for r, c in reduced_policy.items()}
    out.update(report.degraded)
    pending = [i for i in full.choice_indices() if i not in out]
    zeros, ones = report.zero_set, report.one_set
    to_fix = []
    for i in pending:
        eq = full.equations[i]
        lo = min(eq.args)
        if full.flavor == "min" and i in zeros:
            out[i] = min(a for a in eq.args if a in zeros)
        elif full.flavor == "max" and i in ones:
            to_fix.append(i)
        else:
            out[i] = lo
    for i in to_fix:
        first, second = sorted(full.equations[i].args)
        out[i] = first
        partial = apply_policy(full, out, partial=True)
        if not ones <= one_set(partial):
            out[i] = second
    return out


def evaluate_policy(sys: EquationSystem, policy: Mapping, j: int) -> tuple:
    """``2**-j`` approximation of the LFP of the system with choices fixed by ``policy``."""
    check_policy(sys, policy)
    return solve(apply_policy(sys, policy), j).approximation


@dataclass(frozen=True)
class EpsilonPolicyReport:
    policy: dict  # over the input system's choice equations
    epsilon: Fraction
    value: tuple  # q*_sigma approximation
    y: tuple  # approximation of q* used for the choice (reduced system)
    j: int
    certificate: str  # "sound" or "heuristic"
    switches: int = 0
    value_j: int = 0


def epsilon_policy(sys: EquationSystem, eps, *, j: int | None = None,
                   value_j: int | None = None) -> EpsilonPolicyReport:
    """Epsilon-optimal policy for a max or min system.

    ``j`` overrides the conservative precision exponent; the certificate is then
    marked heuristic.  ``value_j`` sets the precision of the reported value.
    """
    eps = Fraction(eps)
    if sys.flavor not in ("max", "min", "pps"):
        raise ModelError("epsilon policies are defined for max or min systems")
    snf = to_snf(sys)
    report = reduce(snf.system)
    red = report.reduced
    if sys.flavor == "max":
        rp = epsilon_policy_max(red, eps, j=j) if red.n else ReducedPolicy({}, (), 0)
    else:
        rp = epsilon_policy_min(red, eps, j=j) if red.n else ReducedPolicy({}, (), 0)
    full = extend_policy(snf.system, rp.policy, report)
    policy = snf.lift_policy(full)
    if value_j is None:
        value_j = log2_ceil_inverse(eps) + 4
    value = evaluate_policy(sys, policy, value_j)
    return EpsilonPolicyReport(policy, eps, value, rp.y, rp.j,
                               "heuristic" if j is not None else "sound", rp.switches, value_j)
