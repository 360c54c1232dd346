"""Conversion of arbitrary max/min polynomial systems to simple normal form.

Every equation of the result is linear, a product of two variables, or a
binary max/min.  Original variables keep their indices; helper variables are
appended after them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .system import Equation, EquationSystem, Kind, Poly


@dataclass(frozen=True)
class SnfResult:
    system: EquationSystem
    mapping: tuple  # original index -> index in ``system``
    # original choice index -> (chain of SNF choice indices, SNF var per alternative)
    choices: dict
    # binary choices already in SNF; their policy entries are variable indices
    native: frozenset = frozenset()

    def __iter__(self):
        return iter((self.system, self.mapping))

    def lift_policy(self, snf_policy) -> dict:
        """Translate an SNF policy into a policy of the original system."""
        out = {}
        for i, (chain, alt_vars) in self.choices.items():
            if i in self.native:
                out[i] = snf_policy[i]
                continue
            for pos, link in enumerate(chain):
                j, k = self.system.equations[link].args
                chosen = snf_policy[link]
                if pos < len(chain) - 1 and chosen == k:
                    continue
                out[i] = pos if chosen == j else pos + 1
                break
        return out

    def lower_policy(self, original_policy) -> dict:
        """SNF policy realising the given policy of the original system."""
        out = {}
        for i, (chain, alt_vars) in self.choices.items():
            if i in self.native:
                out[i] = original_policy[i]
                continue
            a = original_policy[i]
            for pos, link in enumerate(chain):
                j, k = self.system.equations[link].args
                out[link] = k if pos < a else j
        return out


class _Builder:
    def __init__(self, sys: EquationSystem):
        self.eqs: list = list(sys.equations)
        self.names: list = list(sys.names)
        self.taken = set(self.names)
        self.squares: dict = {}  # var -> [x^2, x^4, ...]
        self.mono_cache: dict = {}
        self.const_cache: dict = {}

    def fresh(self, eq: Equation | None = None) -> int:
        k = len(self.eqs) + 1
        name = f"x{k}"
        while name in self.taken:
            name = f"{name}_"
        self.taken.add(name)
        self.names.append(name)
        self.eqs.append(eq)
        return len(self.eqs) - 1

    def square(self, v: int, level: int) -> int:
        """Variable standing for ``x_v^(2^level)``, level >= 1."""
        chain = self.squares.setdefault(v, [])
        while len(chain) < level:
            base = chain[-1] if chain else v
            chain.append(self.fresh(Equation.product(base, base)))
        return chain[level - 1]

    def factors(self, mono) -> list:
        """Replace powers by square-chain variables; returns a list of factors."""
        out = []
        for v, e in mono:
            if e == 1:
                out.append(v)
                continue
            if e & 1:
                out.append(v)
            bit = 1
            e >>= 1
            while e:
                if e & 1:
                    out.append(self.square(v, bit))
                e >>= 1
                bit += 1
        return out

    def product_chain(self, target: int | None, factors: list) -> int:
        """Write ``prod(factors)`` into ``target`` (or a fresh var) as Q rows."""
        if len(factors) == 1 and target is None:
            return factors[0]
        if len(factors) == 1:
            self.eqs[target] = Equation.linear(0, {factors[0]: 1})
            return target
        if len(factors) == 2:
            eq = Equation.product(*factors)
            if target is None:
                return self.fresh(eq)
            self.eqs[target] = eq
            return target
        cur = self.fresh() if target is None else target
        head = cur
        for f in factors[:-2]:
            nxt = self.fresh()
            self.eqs[cur] = Equation.product(f, nxt)
            cur = nxt
        self.eqs[cur] = Equation.product(factors[-2], factors[-1])
        return head

    def monomial_var(self, mono) -> int:
        if mono not in self.mono_cache:
            if len(mono) == 1 and mono[0][1] > 1 and mono[0][1] & (mono[0][1] - 1) == 0:
                self.mono_cache[mono] = self.square(mono[0][0], mono[0][1].bit_length() - 1)
            else:
                self.mono_cache[mono] = self.product_chain(None, self.factors(mono))
        return self.mono_cache[mono]

    def poly_into(self, target: int, p: Poly) -> None:
        """Write the polynomial ``p`` as the equation of ``target``."""
        if p.constant == 0 and len(p.terms) == 1 and p.terms[0][0] == 1:
            mono = p.terms[0][1]
            degree = sum(e for _, e in mono)
            if degree == 2:
                fs = [v for v, e in mono for _ in range(e)]
                self.eqs[target] = Equation.product(*fs)
                return
            if degree > 2:
                self.product_chain(target, self.factors(mono))
                return
        coeffs = {}
        for c, mono in p.terms:
            if len(mono) == 1 and mono[0][1] == 1:
                v = mono[0][0]
            else:
                v = self.monomial_var(mono)
            coeffs[v] = coeffs.get(v, Fraction(0)) + c
        self.eqs[target] = Equation.linear(p.constant, coeffs)

    def alternative_var(self, p: Poly) -> int:
        if p.constant == 0 and len(p.terms) == 1 and p.terms[0][0] == 1:
            mono = p.terms[0][1]
            if len(mono) == 1 and mono[0][1] == 1:
                return mono[0][0]
        if not p.terms:
            if p.constant not in self.const_cache:
                self.const_cache[p.constant] = self.fresh(Equation.linear(p.constant))
            return self.const_cache[p.constant]
        v = self.fresh()
        self.poly_into(v, p)
        return v

    def choice_into(self, target: int, op: str, alt_vars: list) -> list:
        """Binary chain for ``op(alt_vars)``; returns the chain's equation indices."""
        chain = [target]
        prev = target
        for idx in range(len(alt_vars) - 2):
            nxt = self.fresh()
            self.eqs[prev] = Equation.choice(op, alt_vars[idx], nxt)
            chain.append(nxt)
            prev = nxt
        self.eqs[prev] = Equation.choice(op, alt_vars[-2], alt_vars[-1])
        return chain


def to_snf(sys: EquationSystem) -> SnfResult:
    """Equivalent SNF system; already-SNF input is returned unchanged."""
    n = sys.n
    if sys.is_snf():
        choices = {i: ([i], list(sys.equations[i].args)) for i in sys.choice_indices()}
        return SnfResult(sys, tuple(range(n)), choices, frozenset(choices))
    b = _Builder(sys)
    choices = {}
    for i in range(n):
        eq = sys.equations[i]
        if eq.kind is not Kind.GENERAL:
            continue
        if eq.op is None:
            b.poly_into(i, eq.polys[0])
        else:
            alt_vars = [b.alternative_var(p) for p in eq.polys]
            choices[i] = (b.choice_into(i, eq.op, alt_vars), alt_vars)
    native = frozenset(i for i in sys.choice_indices() if sys.equations[i].kind is Kind.CHOICE)
    for i in native:
        choices[i] = ([i], list(sys.equations[i].args))
    out = EquationSystem(tuple(b.eqs), tuple(b.names), sys.flavor)
    return SnfResult(out, tuple(range(n)), dict(sorted(choices.items())), native)
