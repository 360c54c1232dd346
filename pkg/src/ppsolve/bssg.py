"""Guess-and-check values for systems mixing max and min equations.

A candidate pair of pure policies is accepted when fixing either side alone
yields nearly the same value; the accepted vector is then within epsilon of
the game value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .gnm import GnmInvariantError, solve
from .policy import log2_ceil_inverse
from .system import EquationSystem, Kind, ModelError, apply_policy

MAX_CHOICES = 20


def split_choices(sys: EquationSystem) -> tuple:
    """Indices of max-choice and min-choice equations."""
    maxes = [i for i in sys.choice_indices() if sys.equations[i].op == "max"]
    mins = [i for i in sys.choice_indices() if sys.equations[i].op == "min"]
    return maxes, mins


def _options(sys: EquationSystem, i: int) -> tuple:
    eq = sys.equations[i]
    return tuple(eq.args) if eq.kind is Kind.CHOICE else tuple(range(len(eq.polys)))


@dataclass(frozen=True)
class CandidateCertificate:
    sigma: dict  # max player's choices
    tau: dict  # min player's choices
    epsilon: Fraction
    accepted: bool
    gap: Fraction  # sup-norm distance between the two one-sided values
    value: tuple | None  # v_sigma when accepted
    v_sigma: tuple
    v_tau: tuple
    j: int

    @property
    def reason(self) -> str:
        if self.accepted:
            return "accepted"
        return f"gap {float(self.gap):.6g} exceeds epsilon/4 = {float(self.epsilon / 4):.6g}"


def solve_precision(eps) -> int:
    """Exponent ``j`` with ``2**-j <= eps/4``."""
    return log2_ceil_inverse(Fraction(eps) / 4)


def check_candidate(sys: EquationSystem, sigma: Mapping, tau: Mapping, eps) -> CandidateCertificate:
    """Accept ``(sigma, tau)`` iff the one-sided values agree to within ``eps/4``."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    maxes, mins = split_choices(sys)
    if set(sigma) != set(maxes):
        raise ModelError(f"sigma must cover exactly the max equations {maxes}, got {sorted(sigma)}")
    if set(tau) != set(mins):
        raise ModelError(f"tau must cover exactly the min equations {mins}, got {sorted(tau)}")
    j = solve_precision(eps)
    v_sigma = solve(apply_policy(sys, sigma, partial=True), j).approximation
    v_tau = solve(apply_policy(sys, tau, partial=True), j).approximation
    gap = max((abs(a - b) for a, b in zip(v_sigma, v_tau)), default=Fraction(0))
    ok = gap <= eps / 4
    return CandidateCertificate(dict(sigma), dict(tau), eps, ok, gap,
                                v_sigma if ok else None, v_sigma, v_tau, j)


def candidate_pairs(sys: EquationSystem):
    """All (sigma, tau) pairs, lexicographic over the combined choice vector."""
    maxes, mins = split_choices(sys)
    if len(maxes) + len(mins) > MAX_CHOICES:
        raise ModelError(
            f"{len(maxes) + len(mins)} choice equations exceed the exhaustive-search cap {MAX_CHOICES}")
    order = sorted(maxes + mins)
    for combo in itertools.product(*(_options(sys, i) for i in order)):
        chosen = dict(zip(order, combo))
        yield ({i: chosen[i] for i in maxes}, {i: chosen[i] for i in mins})


def solve_exhaustive(sys: EquationSystem, eps) -> CandidateCertificate:
    """First accepted certificate in lexicographic order."""
    for sigma, tau in candidate_pairs(sys):
        cert = check_candidate(sys, sigma, tau, eps)
        if cert.accepted:
            return cert
    raise GnmInvariantError("no candidate pair was accepted; optimal pure policies must exist")
