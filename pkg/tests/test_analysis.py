import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chromopt import DomainError
from chromopt import analysis as an
from chromopt.opt_core import FeasibleVector, obj_value, sample_feasible

from oracles import two_block_value

ODD_Q = st.sampled_from([5, 7, 9, 11, 13])


@given(ODD_Q, st.floats(0.0001, 0.25))
def test_closed_form_matches_two_block_oracle(q, gamma):
    c, f = (q + 1) // 2, q // 2
    assert an.closed_form_value(q, gamma) == pytest.approx(two_block_value(c, f, gamma), abs=1e-14)


def test_closed_form_at_quarter():
    # both halves weighted 1/2
    assert an.closed_form_value(5, 0.25) == pytest.approx(0.5 * math.log(6), abs=1e-15)


@given(ODD_Q, st.floats(0.0, 1.0))
def test_f_splits_into_h_plus_g(q, frac):
    m = 2.0 + frac * (2.0 * q - 2.0)
    for gamma in (0.2, 0.24, 0.25):
        assert an.f_func(m, q, gamma) == pytest.approx(an.h_func(q, m) + an.g_func(q, gamma), abs=1e-12)


@given(ODD_Q, st.floats(0.1, 1.0))
def test_h_is_larger_above_q_than_below(q, frac):
    k = frac * (q - 2.0)
    assert an.h_func(q, q + k) > an.h_func(q, q - k)


@given(st.floats(0.001, 0.25))
def test_m_roots_solve_quadratic(gamma):
    lo, hi = an.m_roots(gamma)
    assert lo <= hi
    for x in (lo, hi):
        assert x * (1 - x) == pytest.approx(gamma, abs=1e-12)


def test_m_roots_rejects_large_gamma():
    with pytest.raises(DomainError):
        an.m_roots(0.3)


@given(st.floats(1e-3, 0.99))
def test_l_positive_and_increasing(t):
    assert an.l_func(t + 0.005) > an.l_func(t) >= 0.0


def test_lambda_tau_rho_basics():
    assert an.lambda_func(0.0, 5, 0.25) == pytest.approx(math.log(4) * math.sqrt(0.5))
    with pytest.raises(DomainError):
        an.tau_func(3, 0.25)
    assert an.rho_func(0.0, 5, 0.25) == pytest.approx(math.log(2) + math.log(1.5) / 2)


def test_psi_values():
    assert an.psi(5) == 0.76 and an.psi(7) == 0.80
    with pytest.raises(DomainError):
        an.psi(6)


@pytest.mark.parametrize("q", [5, 7, 9])
def test_mu_decreasing_threshold_is_a_sign_change(q):
    g0 = an.mu_decreasing_threshold(q)
    h = 1e-6
    below = an.mu_func(q, g0 - 2 * h) - an.mu_func(q, g0 - 3 * h)
    above = an.mu_func(q, g0 + 3 * h) - an.mu_func(q, g0 + 2 * h)
    assert below > 0 > above


def test_lemma_checks_on_closed_form_optimizer():
    alpha = FeasibleVector.from_sets(5, {(1, 2, 3): 0.6, (4, 5): 0.4})
    assert an.check_lemma_tech1(alpha, 0.24)
    assert an.check_ratio_bound(alpha)
    assert an.check_amgm(alpha, 0.24)
    res = an.check_claim2_mass(alpha, 0.24)
    assert res and not res.vacuous and res.rhs == pytest.approx(1.0)


def test_claim2_mass_vacuous_for_suboptimal_vector():
    alpha = FeasibleVector.from_sets(5, {(1,): 0.5, (2, 3, 4, 5): 0.5})
    assert obj_value(alpha) < an.closed_form_value(5, 0.25)
    res = an.check_claim2_mass(alpha, 0.25)
    assert res.vacuous and res.satisfied


def test_infeasible_vector_rejected():
    alpha = FeasibleVector.from_sets(5, {(1, 2, 3, 4, 5): 1.0})
    with pytest.raises(DomainError):
        an.check_lemma_tech1(alpha, 0.2)


@given(st.sampled_from([5, 7, 9]), st.sampled_from([0.1, 0.2, 0.24, 0.25]), st.integers(0, 2 ** 32 - 1))
def test_sample_inequalities_hold(q, gamma, seed):
    beta = sample_feasible(q, gamma, np.random.default_rng(seed))
    assert an.check_lemma_tech1(beta, gamma)
    assert an.check_ratio_bound(beta)
    assert an.check_amgm(beta, gamma)
