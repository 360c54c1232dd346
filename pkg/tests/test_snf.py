import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from ppsolve.gnm import solve
from ppsolve.snf import to_snf
from ppsolve.system import Equation, Kind, Poly, EquationSystem, kleene_iterate
from ppsolve.textio import parse_system

from instances import system_a


def test_quadratic_becomes_linear_plus_product():
    snf = to_snf(parse_system("x1 = 0.75*x1*x1 + 0.25\n"))
    assert snf.system.equations == (Equation.linear(Fraction(1, 4), {1: Fraction(3, 4)}),
                                     Equation.product(0, 0))
    assert snf.mapping == (0,)


def test_three_way_max_becomes_chain():
    snf = to_snf(parse_system("x1 = max(x2, x3, x4)\nx2 = 1/2\nx3 = 1/3\nx4 = 1/4\n"))
    eqs = snf.system.equations
    assert eqs[0] == Equation.choice("max", 1, 4)
    assert eqs[4] == Equation.choice("max", 2, 3)


def test_snf_input_is_unchanged():
    a = system_a()
    snf = to_snf(a)
    assert snf.system is a and snf.mapping == (0, 1)


def test_constant_alternative_is_lifted():
    snf = to_snf(parse_system("x1 = max(1/2*x1*x1 + 1/4, 0.3)\n"))
    sys = snf.system
    assert sys.is_snf()
    kinds = {e.kind for e in sys.equations}
    assert Kind.CHOICE in kinds
    lifted = sys.equations[sys.equations[0].args[1]]
    assert lifted == Equation.linear(Fraction(3, 10))


def test_policy_translation_round_trips():
    text = "x1 = max(x2, x3, x4, 1/2*x2*x3)\nx2 = 1/2\nx3 = 1/3\nx4 = 1/4\n"
    s = parse_system(text)
    snf = to_snf(s)
    for alt in range(4):
        assert snf.lift_policy(snf.lower_policy({0: alt})) == {0: alt}


def _random_general(rng, n):
    eqs = []
    for _ in range(n):
        polys = []
        for _ in range(rng.randint(1, 3)):
            budget = Fraction(1)
            terms = []
            for _ in range(rng.randint(0, 2)):
                c = Fraction(rng.randint(1, 4), 8)
                if c > budget:
                    break
                budget -= c
                mono = tuple((rng.randrange(n), rng.randint(1, 3)) for _ in range(rng.randint(1, 2)))
                terms.append((c, mono))
            const = Fraction(rng.randint(0, 4), 8)
            polys.append(Poly.build(min(const, budget), terms))
        eqs.append(Equation.general(polys, "max" if len(polys) > 1 else None))
    return EquationSystem(tuple(eqs), flavor="max")


def test_helper_variables_delay_kleene():
    s = parse_system("x1 = 0.75*x1*x1 + 0.25\n")
    snf = to_snf(s)
    assert kleene_iterate(s, 2)[0] == Fraction(1, 4) * Fraction(1, 4) * Fraction(3, 4) + Fraction(1, 4)
    assert kleene_iterate(snf.system, 2)[0] == Fraction(1, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4))
def test_snf_preserves_least_fixed_point(seed, n):
    s = _random_general(random.Random(seed), n)
    snf = to_snf(s)
    for k in (1, 3, 6):
        lagging = kleene_iterate(snf.system, k)
        direct = kleene_iterate(s, k)
        assert all(lagging[snf.mapping[i]] <= direct[i] for i in range(n))
    a = solve(s, 12).approximation
    b = solve(snf.system, 12).approximation
    assert all(abs(a[i] - b[snf.mapping[i]]) <= Fraction(1, 2 ** 11) for i in range(n))
