import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ppsolve.generate import random_nontrivial, random_system
from ppsolve.gnm import solve
from ppsolve.policy import (epsilon_policy, epsilon_policy_max, epsilon_policy_min, evaluate_policy,
                            extend_policy, greedy_policy, log2_ceil_inverse, policy_exponent)
from ppsolve.qualitative import all_policies, one_set, reduce, zero_set
from ppsolve.system import apply_policy, encoding_size
from ppsolve.textio import parse_system

from instances import IRRATIONAL_LFP, system_b, system_d, within

F = Fraction
EPS = F(1, 1024)


def test_greedy_examples():
    y = (0, F(1, 3), F(36, 100), 0, 0)
    assert greedy_policy(system_b("min"), y) == {0: 1}
    assert greedy_policy(system_b("max"), y) == {0: 2}
    tie = (0, F(1, 3), F(1, 3), 0, 0)
    assert greedy_policy(system_b("max"), tie) == {0: 1}
    assert greedy_policy(system_b("min"), tie) == {0: 1}


def test_log2_ceil_inverse():
    assert log2_ceil_inverse(F(1, 1024)) == 10
    assert log2_ceil_inverse(F(1, 1000)) == 10
    assert log2_ceil_inverse(F(1)) == 0
    with pytest.raises(ValueError):
        log2_ceil_inverse(F(0))


def test_min_b_is_exactly_optimal():
    b = system_b("min")
    rp = epsilon_policy_min(b, EPS)
    assert rp.j == 14 * encoding_size(b) + 3 + 10
    assert rp.policy == {0: 1}
    assert abs(evaluate_policy(b, rp.policy, 20)[0] - F(1, 3)) <= F(1, 2 ** 20)


def test_max_b_needs_no_repair():
    b = system_b("max")
    rp = epsilon_policy_max(b, EPS)
    assert rp.j == policy_exponent(b, EPS) == 14 * encoding_size(b) + 2 + 10
    assert rp.policy == {0: 2} and rp.switches == 0


def test_max_d_repairs_in_one_switch():
    d = system_d()
    rp = epsilon_policy_max(d, EPS)
    assert rp.y[1] == rp.y[2]  # the tie that misleads the greedy choice
    assert greedy_policy(d, rp.y) == {0: 1}
    assert evaluate_policy(d, {0: 1}, 12) == (0, 0, F(1, 2))
    assert rp.switches == 1
    assert rp.policy == {0: 2}
    assert evaluate_policy(d, rp.policy, 12) == (F(1, 2),) * 3


def test_evaluate_policy_examples():
    b = system_b("max")
    assert abs(evaluate_policy(b, {0: 1}, 20)[0] - F(1, 3)) <= F(1, 2 ** 20)
    assert within(evaluate_policy(b, {0: 2}, 20)[0], IRRATIONAL_LFP, F(1, 2 ** 20))


def test_extend_policy_max_keeps_value_one():
    s = parse_system("x1 = max(x2, x3)\nx2 = 0.4*x2\nx3 = 1/2*x3 + 1/2\n")
    rep = reduce(s)
    assert rep.one_set == {0, 2}
    assert extend_policy(s, {}, rep) == {0: 2}


def test_extend_policy_min_picks_zero_argument():
    s = parse_system("x1 = min(x2, x3)\nx2 = 0.4*x2\nx3 = 1/2*x3 + 1/2\n")
    rep = reduce(s)
    assert rep.zero_set == {0, 1}
    assert extend_policy(s, {}, rep) == {0: 1}


def test_extend_policy_without_eliminations():
    b = system_b("max")
    assert extend_policy(b, {0: 2}, reduce(b)) == {0: 2}


def test_heuristic_override_is_labelled():
    rep = epsilon_policy(system_b("max"), EPS, j=30)
    assert rep.certificate == "heuristic" and rep.j == 30
    assert rep.policy == {0: 2}
    assert epsilon_policy(system_b("max"), EPS).certificate == "sound"


def test_general_choice_policy_uses_alternative_index():
    s = parse_system("x = max(1/2*x*x + 1/4, 3/4*x*x*x + 1/5, 0.3)\n")
    rep = epsilon_policy(s, F(1, 64))
    assert rep.policy == {0: 2}
    assert 0 <= F(3, 10) - rep.value[0] <= F(1, 2 ** rep.value_j)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(3, 6), st.sampled_from(["max", "min"]), st.fractions(0, 1))
def test_greedy_is_shift_invariant(seed, n, flavor, shift):
    rng = random.Random(seed)
    s = random_system(rng, n, choices=rng.randint(1, n - 2), flavor=flavor)
    y = [F(rng.randint(0, 20), 20) for _ in range(n)]
    assert greedy_policy(s, y) == greedy_policy(s, [v + shift for v in y])


def _instance(seed, n, flavor):
    rng = random.Random(seed)
    return random_nontrivial(rng, n, choices=rng.randint(1, min(3, n - 2)), flavor=flavor, min_choices=1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(3, 6), st.sampled_from(["max", "min"]))
def test_policy_is_epsilon_optimal(seed, n, flavor):
    s = _instance(seed, n, flavor)
    j = log2_ceil_inverse(EPS) + 4
    rep = epsilon_policy(s, EPS)
    values = [evaluate_policy(s, p, j) for p in all_policies(s)]
    pick = max if flavor == "max" else min
    best = [pick(v[i] for v in values) for i in range(s.n)]
    chosen = evaluate_policy(s, rep.policy, j)
    assert all(abs(b - c) <= EPS for b, c in zip(best, chosen))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(3, 6))
def test_repair_switches_grow_the_positive_set(seed, n):
    rng = random.Random(seed)
    s = random_nontrivial(rng, n, choices=rng.randint(1, n - 2), flavor="max", min_choices=1)
    red = reduce(s).reduced
    rp = epsilon_policy_max(red, EPS)
    assert rp.switches <= len(red.choice_indices())
    assert not zero_set(apply_policy(red, rp.policy))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(3, 6), st.sampled_from(["max", "min"]))
def test_extension_preserves_eliminated_values(seed, n, flavor):
    rng = random.Random(seed)
    s = random_system(rng, n, choices=rng.randint(1, n - 2), flavor=flavor)
    rep = reduce(s)
    red_policy = greedy_policy(rep.reduced, solve(rep.reduced, 8).approximation) if rep.reduced.n else {}
    full = extend_policy(s, red_policy, rep)
    fixed = apply_policy(s, full)
    if flavor == "min":
        assert rep.zero_set <= zero_set(fixed)
    else:
        assert rep.one_set <= one_set(fixed)
