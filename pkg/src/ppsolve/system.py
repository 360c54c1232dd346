"""Data model for probabilistic polynomial systems and their max/min variants.

A system holds one equation per variable. Equations come in four shapes:

* ``LINEAR``  -- ``x_i = a0 + sum_j a_j x_j``
* ``PRODUCT`` -- ``x_i = x_j * x_k``
* ``CHOICE``  -- ``x_i = max(x_j, x_k)`` or ``min(x_j, x_k)``
* ``GENERAL`` -- one or more probabilistic polynomials, combined by max/min
  when there is more than one.  Only appears before normalization.

All numbers are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import networkx as nx

Vector = tuple  # tuple[Fraction, ...]

FLAVORS = ("pps", "max", "min", "maxmin")


class ModelError(ValueError):
    """Raised when a system violates a structural invariant."""


class Kind(enum.Enum):
    LINEAR = "L"
    PRODUCT = "Q"
    CHOICE = "M"
    GENERAL = "G"


Monomial = tuple  # tuple[tuple[int, int], ...], sorted (var, exponent>0)


@dataclass(frozen=True)
class Poly:
    """Probabilistic polynomial ``constant + sum coeff * monomial``."""

    constant: Fraction = Fraction(0)
    terms: tuple = ()  # tuple[(Fraction, Monomial)]

    def __post_init__(self):
        if self.constant < 0 or any(c < 0 for c, _ in self.terms):
            raise ModelError("negative coefficient in polynomial")
        total = self.constant + sum((c for c, _ in self.terms), Fraction(0))
        if total > 1:
            raise ModelError(f"coefficient sum {total} exceeds 1")

    @classmethod
    def build(cls, constant, terms: Iterable) -> "Poly":
        """Collect like monomials and drop zero coefficients."""
        acc: dict = {}
        for coeff, mono in terms:
            coeff = Fraction(coeff)
            if not mono:
                constant = Fraction(constant) + coeff
                continue
            key = _canon_monomial(mono)
            acc[key] = acc.get(key, Fraction(0)) + coeff
        items = tuple(sorted(((c, m) for m, c in acc.items() if c != 0),
                             key=lambda t: t[1]))
        return cls(Fraction(constant), items)

    def variables(self) -> set:
        return {v for _, mono in self.terms for v, _ in mono}

    def degree(self) -> int:
        return max((sum(e for _, e in mono) for _, mono in self.terms), default=0)

    def is_linear(self) -> bool:
        return self.degree() <= 1

    def __call__(self, x: Sequence) -> Fraction:
        total = self.constant
        for coeff, mono in self.terms:
            val = coeff
            for v, e in mono:
                val *= x[v] ** e
            total += val
        return total


def _canon_monomial(mono) -> Monomial:
    if isinstance(mono, Mapping):
        items = mono.items()
    else:
        items = mono
    acc: dict = {}
    for v, e in items:
        if e <= 0:
            raise ModelError("monomial exponents must be positive")
        acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


@dataclass(frozen=True)
class Equation:
    kind: Kind
    constant: Fraction = Fraction(0)
    coeffs: tuple = ()  # LINEAR: sorted ((var, Fraction), ...)
    args: tuple = ()  # PRODUCT / CHOICE: (j, k)
    op: str | None = None  # CHOICE / GENERAL: "max" | "min"
    polys: tuple = ()  # GENERAL: tuple[Poly]

    @classmethod
    def linear(cls, constant=0, coeffs: Mapping | Iterable = ()) -> "Equation":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict = {}
        for v, c in items:
            acc[v] = acc.get(v, Fraction(0)) + Fraction(c)
        constant = Fraction(constant)
        cleaned = tuple(sorted((v, c) for v, c in acc.items() if c != 0))
        if constant < 0 or any(c < 0 for _, c in cleaned):
            raise ModelError("negative coefficient in linear equation")
        total = constant + sum((c for _, c in cleaned), Fraction(0))
        if total > 1:
            raise ModelError(f"coefficient sum {total} exceeds 1")
        return cls(Kind.LINEAR, constant=constant, coeffs=cleaned)

    @classmethod
    def product(cls, j: int, k: int) -> "Equation":
        return cls(Kind.PRODUCT, args=tuple(sorted((j, k))))

    @classmethod
    def choice(cls, op: str, j: int, k: int) -> "Equation":
        if op not in ("max", "min"):
            raise ModelError(f"unknown choice operator {op!r}")
        return cls(Kind.CHOICE, args=(j, k), op=op)

    @classmethod
    def general(cls, polys: Sequence[Poly], op: str | None = None) -> "Equation":
        polys = tuple(polys)
        if not polys:
            raise ModelError("general equation needs at least one polynomial")
        if len(polys) > 1 and op not in ("max", "min"):
            raise ModelError("several alternatives need a max/min operator")
        return cls(Kind.GENERAL, polys=polys, op=op if len(polys) > 1 else None)

    def variables(self) -> set:
        """Variables occurring with nonzero coefficient."""
        if self.kind is Kind.LINEAR:
            return {v for v, _ in self.coeffs}
        if self.kind is Kind.GENERAL:
            return set().union(*(p.variables() for p in self.polys))
        return set(self.args)

    @property
    def is_choice(self) -> bool:
        return self.kind is Kind.CHOICE or (self.kind is Kind.GENERAL and self.op is not None)

    def mass(self) -> Fraction:
        """Value at the all-ones vector."""
        if self.kind is Kind.LINEAR:
            return self.constant + sum((c for _, c in self.coeffs), Fraction(0))
        if self.kind is Kind.GENERAL:
            masses = [p.constant + sum((c for c, _ in p.terms), Fraction(0)) for p in self.polys]
            return min(masses) if self.op == "min" else max(masses)
        return Fraction(1)

    def __call__(self, x: Sequence) -> Fraction:
        if self.kind is Kind.LINEAR:
            total = self.constant
            for v, c in self.coeffs:
                total += c * x[v]
            return total
        if self.kind is Kind.PRODUCT:
            return x[self.args[0]] * x[self.args[1]]
        if self.kind is Kind.CHOICE:
            a, b = x[self.args[0]], x[self.args[1]]
            return max(a, b) if self.op == "max" else min(a, b)
        vals = [p(x) for p in self.polys]
        if self.op == "min":
            return min(vals)
        return max(vals)


@dataclass(frozen=True)
class EquationSystem:
    equations: tuple
    names: tuple = ()
    flavor: str = "pps"

    def __post_init__(self):
        eqs = tuple(self.equations)
        object.__setattr__(self, "equations", eqs)
        n = len(eqs)
        names = tuple(self.names) if self.names else tuple(f"x{i + 1}" for i in range(n))
        object.__setattr__(self, "names", names)
        if len(names) != n or len(set(names)) != n:
            raise ModelError("need exactly one distinct name per equation")
        if self.flavor not in FLAVORS:
            raise ModelError(f"unknown flavor {self.flavor!r}")
        ops = set()
        for i, eq in enumerate(eqs):
            for v in eq.variables():
                if not 0 <= v < n:
                    raise ModelError(f"equation {names[i]} references variable index {v}")
            if eq.is_choice:
                ops.add(eq.op)
        if self.flavor == "pps" and ops:
            raise ModelError("pure PPS cannot contain max/min equations")
        if self.flavor in ("max", "min") and ops - {self.flavor}:
            raise ModelError(f"{self.flavor} system contains {sorted(ops)} equations")

    @property
    def n(self) -> int:
        return len(self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def choice_indices(self) -> list:
        return [i for i, eq in enumerate(self.equations) if eq.is_choice]

    def is_snf(self) -> bool:
        return all(eq.kind is not Kind.GENERAL for eq in self.equations)

    def is_pure(self) -> bool:
        return not self.choice_indices()

    def with_flavor(self, flavor: str) -> "EquationSystem":
        return EquationSystem(self.equations, self.names, flavor)

    def replace(self, updates: Mapping) -> "EquationSystem":
        eqs = list(self.equations)
        for i, eq in updates.items():
            eqs[i] = eq
        return EquationSystem(tuple(eqs), self.names, self.flavor)


def infer_flavor(equations: Iterable[Equation]) -> str:
    ops = {eq.op for eq in equations if eq.is_choice}
    if not ops:
        return "pps"
    if len(ops) == 2:
        return "maxmin"
    return ops.pop()


# --- policies -------------------------------------------------------------

def check_policy(sys: EquationSystem, policy: Mapping, indices: Iterable | None = None) -> None:
    """Validate that ``policy`` covers exactly ``indices`` (default: all M equations)."""
    expected = set(sys.choice_indices() if indices is None else indices)
    if set(policy) != expected:
        raise ModelError(
            f"policy domain {sorted(policy)} does not match choice equations {sorted(expected)}")
    for i, choice in policy.items():
        eq = sys.equations[i]
        if eq.kind is Kind.CHOICE:
            if choice not in eq.args:
                raise ModelError(f"policy picks x{choice} which is not an argument of equation {i}")
        elif not 0 <= choice < len(eq.polys):
            raise ModelError(f"policy picks alternative {choice} of equation {i}")


def apply_policy(sys: EquationSystem, policy: Mapping, *, partial: bool = False) -> EquationSystem:
    """Fix the choice at every M equation named in ``policy``.

    SNF choice equations become ``x_i = x_chosen``; general choices keep the
    chosen polynomial.  With ``partial`` the policy may cover a subset of the
    choice equations and the flavor of the result is re-inferred.
    """
    if partial:
        check_policy(sys, policy, indices=policy.keys())
    else:
        check_policy(sys, policy)
    updates = {}
    for i, choice in policy.items():
        eq = sys.equations[i]
        if eq.kind is Kind.CHOICE:
            updates[i] = Equation.linear(0, {choice: 1})
        else:
            updates[i] = Equation.general([eq.polys[choice]])
    eqs = list(sys.equations)
    for i, eq in updates.items():
        eqs[i] = eq
    return EquationSystem(tuple(eqs), sys.names, infer_flavor(eqs))


# --- evaluation -----------------------------------------------------------

def _check_dim(sys: EquationSystem, x: Sequence) -> None:
    if len(x) != sys.n:
        raise ModelError(f"point has dimension {len(x)}, system has {sys.n} variables")


def evaluate(sys: EquationSystem, x: Sequence) -> Vector:
    _check_dim(sys, x)
    return tuple(eq(x) for eq in sys.equations)


def jacobian(sys: EquationSystem, x: Sequence) -> tuple:
    """Exact Jacobian of a pure PPS in SNF at ``x``."""
    _check_dim(sys, x)
    n = sys.n
    rows = []
    for i, eq in enumerate(sys.equations):
        row = [Fraction(0)] * n
        if eq.kind is Kind.LINEAR:
            for v, c in eq.coeffs:
                row[v] += c
        elif eq.kind is Kind.PRODUCT:
            j, k = eq.args
            row[j] += Fraction(x[k])
            row[k] += Fraction(x[j])
        else:
            raise ModelError(f"jacobian needs a pure PPS in SNF; equation {sys.names[i]} is {eq.kind.name}")
        rows.append(tuple(row))
    return tuple(rows)


def kleene_iterate(sys: EquationSystem, k: int) -> Vector:
    """``P^k(0)`` in exact arithmetic."""
    x = tuple(Fraction(0) for _ in range(sys.n))
    for _ in range(k):
        x = evaluate(sys, x)
    return x


def kleene_float(sys: EquationSystem, k: int) -> list:
    """Floating-point Kleene iteration, used as a numeric oracle."""
    fsys = [_float_eq(eq) for eq in sys.equations]
    x = [0.0] * sys.n
    for _ in range(k):
        x = [f(x) for f in fsys]
    return x


def _float_eq(eq: Equation):
    if eq.kind is Kind.LINEAR:
        c0 = float(eq.constant)
        cs = [(v, float(c)) for v, c in eq.coeffs]
        return lambda x: c0 + sum(c * x[v] for v, c in cs)
    if eq.kind is Kind.PRODUCT:
        j, k = eq.args
        return lambda x: x[j] * x[k]
    if eq.kind is Kind.CHOICE:
        j, k = eq.args
        pick = max if eq.op == "max" else min
        return lambda x: pick(x[j], x[k])
    fpolys = [(float(p.constant), [(float(c), m) for c, m in p.terms]) for p in eq.polys]

    def f(x):
        vals = []
        for c0, terms in fpolys:
            total = c0
            for c, mono in terms:
                t = c
                for v, e in mono:
                    t *= x[v] ** e
                total += t
            vals.append(total)
        return min(vals) if eq.op == "min" else max(vals)
    return f


# --- structure ------------------------------------------------------------

def dependency_graph(sys: EquationSystem) -> nx.DiGraph:
    """Edge ``i -> j`` when ``x_j`` occurs in ``P_i``."""
    g = nx.DiGraph()
    g.add_nodes_from(range(sys.n))
    for i, eq in enumerate(sys.equations):
        g.add_edges_from((i, j) for j in eq.variables())
    return g


def scc_decomposition(sys: EquationSystem) -> list:
    """SCCs in topological order of the condensation, dependents first."""
    g = dependency_graph(sys)
    cond = nx.condensation(g)
    order = nx.lexicographical_topological_sort(
        cond, key=lambda c: min(cond.nodes[c]["members"]))
    return [sorted(cond.nodes[c]["members"]) for c in order]


def encoding_size(sys: EquationSystem) -> int:
    """Bit size ``|P|`` of an SNF system.

    L rows pay ``bits(a)+bits(b)`` per nonzero coefficient ``a/b`` plus index
    bits per variable occurrence; Q and M rows pay two indices; every row pays
    a 2-bit kind tag.  ``bits(m) = ceil(log2(m+1))``.
    """
    idx = sys.n.bit_length()
    total = 0
    for eq in sys.equations:
        if eq.kind is Kind.LINEAR:
            for c in [eq.constant] + [c for _, c in eq.coeffs]:
                if c:
                    total += c.numerator.bit_length() + c.denominator.bit_length()
            total += idx * len(eq.coeffs)
        elif eq.kind in (Kind.PRODUCT, Kind.CHOICE):
            total += 2 * idx
        else:
            raise ModelError("encoding_size is defined on SNF systems")
        total += 2
    return total
