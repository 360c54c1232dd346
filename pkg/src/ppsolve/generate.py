"""Seeded random SNF instances for tests and experiments."""

from __future__ import annotations

import random
from fractions import Fraction

from .system import Equation, EquationSystem

DENOMINATORS = (2, 3, 4, 5, 8)


def random_linear(rng: random.Random, n: int, max_den: int = 8, max_terms: int = 2) -> Equation:
    """Linear row with at most ``max_terms`` variables and total mass in (0, 1]."""
    dens = [d for d in DENOMINATORS if d <= max_den] or [2]
    budget = Fraction(1)
    coeffs = {}
    for v in rng.sample(range(n), min(n, rng.randint(1, max_terms))):
        d = rng.choice(dens)
        c = Fraction(rng.randint(1, d), d)
        c = min(c, budget)
        if c <= 0:
            break
        coeffs[v] = coeffs.get(v, 0) + c
        budget -= c
    constant = Fraction(0)
    if budget > 0 and rng.random() < 0.6:
        d = rng.choice(dens)
        constant = min(Fraction(rng.randint(1, d), d), budget)
    return Equation.linear(constant, coeffs)


def random_system(rng: random.Random, n: int, *, choices: int = 0, flavor: str = "pps",
                  product_rate: float = 0.3, max_den: int = 8) -> EquationSystem:
    """Random SNF system with ``n`` variables and exactly ``choices`` M rows (capped at n)."""
    if flavor == "pps" and choices:
        raise ValueError("a pure system has no choice rows")
    ops = {"max": ("max",), "min": ("min",), "maxmin": ("max", "min"), "pps": ()}[flavor]
    choice_rows = set(rng.sample(range(n), min(choices, n))) if n > 1 else set()
    eqs = []
    for i in range(n):
        if i in choice_rows:
            j, k = rng.sample([v for v in range(n) if v != i], 2) if n > 2 else (i, i)
            eqs.append(Equation.choice(rng.choice(ops), j, k))
        elif rng.random() < product_rate:
            eqs.append(Equation.product(rng.randrange(n), rng.randrange(n)))
        else:
            eqs.append(random_linear(rng, n, max_den))
    return EquationSystem(tuple(eqs), flavor=flavor if choice_rows or flavor == "pps" else "pps")


def random_nontrivial(rng: random.Random, n: int, *, choices: int = 0, flavor: str = "pps",
                      min_reduced: int = 1, min_choices: int = 0, tries: int = 1000) -> EquationSystem:
    """Rejection-sample a system whose reduced part keeps enough variables and choice rows."""
    from .qualitative import reduce

    for _ in range(tries):
        sys = random_system(rng, n, choices=choices, flavor=flavor)
        red = reduce(sys).reduced
        if red.n >= min_reduced and len(red.choice_indices()) >= min_choices:
            return sys
    raise RuntimeError("no instance met the requested shape")
