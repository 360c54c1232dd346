"""Branching MDPs and their Bellman equation systems.

File format::

    type T1
    action a
    1/2 -> T1 T1
    1/2 -> ()
    action b
    1 -> ()
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .system import Equation, EquationSystem, ModelError, Poly
from .textio import ParseError, classify, _to_fraction


@dataclass(frozen=True)
class Bmdp:
    types: tuple  # type names
    actions: tuple  # per type: tuple of action names
    rules: tuple  # per type, per action: tuple of (prob, offspring Counter as sorted tuple)

    def __post_init__(self):
        if not (len(self.types) == len(self.actions) == len(self.rules)):
            raise ModelError("types, actions and rules must align")
        for t, acts, rules in zip(self.types, self.actions, self.rules):
            if not acts:
                raise ModelError(f"type {t} has no actions")
            if len(acts) != len(rules):
                raise ModelError(f"type {t}: actions and rule lists differ in length")
            for a, rs in zip(acts, rules):
                if any(p <= 0 for p, _ in rs):
                    raise ModelError(f"type {t}, action {a}: rule probabilities must be positive")
                total = sum((p for p, _ in rs), Fraction(0))
                if total != 1:
                    raise ModelError(f"type {t}, action {a}: probabilities sum to {total}, not 1")


def parse_bmdp(text: str) -> Bmdp:
    types: list = []
    actions: list = []
    rules: list = []
    pending: list = []  # (lineno, type index, action index, prob, [names])
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "type":
            name = rest.strip()
            if not name or name in types:
                raise ParseError(f"bad or duplicate type name {name!r}", lineno, 1)
            types.append(name)
            actions.append([])
            rules.append([])
        elif head == "action":
            if not types:
                raise ParseError("action before any type", lineno, 1)
            actions[-1].append(rest.strip())
            rules[-1].append([])
        elif "->" in line:
            if not types or not actions[-1]:
                raise ParseError("rule outside an action section", lineno, 1)
            lhs, rhs = (s.strip() for s in line.split("->", 1))
            try:
                prob = _to_fraction(lhs)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad probability {lhs!r}", lineno, 1) from None
            names = [] if rhs in ("()", "") else rhs.split()
            pending.append((lineno, len(types) - 1, len(actions[-1]) - 1, prob, names))
        else:
            raise ParseError(f"cannot parse line {line!r}", lineno, 1)
    index = {t: i for i, t in enumerate(types)}
    for lineno, ti, ai, prob, names in pending:
        unknown = [n for n in names if n not in index]
        if unknown:
            raise ParseError(f"unknown type {unknown[0]!r}", lineno, 1)
        offspring = tuple(sorted(Counter(index[n] for n in names).items()))
        rules[ti][ai].append((prob, offspring))
    try:
        return Bmdp(tuple(types), tuple(tuple(a) for a in actions),
                    tuple(tuple(tuple(r) for r in rs) for rs in rules))
    except ModelError as exc:
        raise ParseError(str(exc), 0, 0) from None


def bmdp_to_system(b: Bmdp, objective: str = "maximize") -> EquationSystem:
    """Extinction-probability equations; one variable per type."""
    if objective not in ("maximize", "minimize"):
        raise ValueError(f"objective must be maximize or minimize, not {objective!r}")
    op = "max" if objective == "maximize" else "min"
    eqs = []
    for t, acts, rules in zip(b.types, b.actions, b.rules):
        if not acts:
            raise ModelError(f"type {t} has no actions")
        polys = [Poly.build(0, [(p, mono) for p, mono in rs]) for rs in rules]
        eqs.append(classify(polys, op if len(polys) > 1 else None))
    return EquationSystem(tuple(eqs), b.types, op)
