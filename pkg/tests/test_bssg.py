import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ppsolve.bssg import candidate_pairs, check_candidate, solve_exhaustive, split_choices
from ppsolve.generate import random_system
from ppsolve.gnm import solve
from ppsolve.policy import epsilon_policy
from ppsolve.system import ModelError

from instances import HALF_LFP, system_a, system_b, system_e

from oracles import kleene_max_min

F = Fraction
EPS = F(1, 1024)


def test_split_choices():
    assert split_choices(system_e()) == ([0], [1])


def test_accepts_optimal_pair():
    cert = check_candidate(system_e(), {0: 1}, {1: 3}, EPS)
    assert cert.accepted
    assert abs(cert.value[0] - F(1, 3)) <= EPS


def test_rejects_suboptimal_max_choice():
    cert = check_candidate(system_e(), {0: 2}, {1: 3}, EPS)
    assert not cert.accepted
    expected_gap = F(1, 3) - (HALF_LFP[0] + HALF_LFP[1]) / 2
    assert abs(cert.gap - expected_gap) < F(1, 1000)
    assert cert.value is None and "gap" in cert.reason


def test_policy_domain_checks():
    with pytest.raises(ModelError):
        check_candidate(system_e(), {}, {1: 3}, EPS)
    with pytest.raises(ModelError):
        check_candidate(system_e(), {0: 1}, {0: 1}, EPS)


def test_exhaustive_finds_optimal_pair():
    cert = solve_exhaustive(system_e(), EPS)
    assert cert.sigma == {0: 1} and cert.tau == {1: 3}
    assert abs(cert.value[0] - F(1, 3)) <= EPS


def test_pure_system_has_empty_policies():
    a = system_a().with_flavor("maxmin")
    cert = solve_exhaustive(a, EPS)
    assert cert.sigma == {} and cert.tau == {}
    assert cert.value == solve(system_a(), cert.j).approximation


def test_pure_max_matches_epsilon_policy():
    b = system_b("max")
    cert = solve_exhaustive(b.with_flavor("maxmin"), EPS)
    rep = epsilon_policy(b, EPS)
    assert cert.tau == {}
    assert all(abs(a - c) <= 2 * EPS for a, c in zip(cert.value, rep.value))


def test_pair_enumeration_is_lexicographic():
    pairs = list(candidate_pairs(system_e()))
    assert pairs[0] == ({0: 1}, {1: 3})
    assert len(pairs) == 4


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(4, 6))
def test_accepted_certificates_bracket_kleene(seed, n):
    rng = random.Random(seed)
    s = random_system(rng, n, choices=rng.randint(2, min(4, n - 2)), flavor="maxmin")
    cert = solve_exhaustive(s, EPS)
    q = kleene_max_min(s)
    for vs, vt, qi in zip(cert.v_sigma, cert.v_tau, q):
        assert abs(float(vs) - qi) <= float(EPS) + 1e-6
        assert abs(float(vt) - qi) <= float(EPS) + 1e-6
