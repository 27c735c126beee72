"""Trajectory functions, parameter selection and error-term recurrences."""

import math

import numpy as np
import pytest

from rainbow_nibble import (AB_CLAUSES, ScheduleParams, check_ab_constraints,
                            choose_alpha, choose_epsilon, error_term_table,
                            final_stage_guard, g, r, schedule_table,
                            theoretical_error_terms)


def test_r_g_closed_forms():
    assert r(0.0, 0.5) == 1.0
    assert g(0.0, 0.5) == 1.0
    assert r(0.5, 0.5, k=2) == pytest.approx(0.75 ** 2)
    assert g(0.5, 0.5, k=2) == pytest.approx(0.75)
    assert r(0.25, 0.8, k=3) == pytest.approx(0.8 ** 3)
    assert g(0.25, 0.8, k=3) == pytest.approx(0.8 ** 2)


def test_power_identity_randomized():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        x = rng.uniform(0, 1)
        gamma = rng.uniform(0.05, 0.95)
        k = int(rng.integers(2, 6))
        assert abs(r(x, gamma, k) - g(x, gamma, k) ** (k / (k - 1))) < 1e-12


def test_derivatives_match_odes():
    rng = np.random.default_rng(8)
    h = 1e-6
    for _ in range(500)[:500]:
        x = rng.uniform(0.05, 0.9)
        gamma = rng.uniform(0.1, 0.9)
        k = int(rng.integers(2, 5))
        rp = (r(x + h, gamma, k) - r(x - h, gamma, k)) / (2 * h)
        gp = (g(x + h, gamma, k) - g(x - h, gamma, k)) / (2 * h)
        assert abs(rp + k * gamma * g(x, gamma, k)) < 10 * h
        assert abs(gp + (k - 1) * gamma * g(x, gamma, k) ** 2 / r(x, gamma, k)) < 10 * h


def test_choose_alpha_midpoint():
    # for c=0.05, delta=0 the feasible interval is (0.1, 4/15)
    alpha = choose_alpha(0.05, 0.0)
    assert alpha == pytest.approx((0.1 + (1 - 0.2) / 3) / 2)
    assert choose_alpha(1 / 3, 0.0) is None
    assert choose_alpha(0.05, 0.3) is None  # interval empty
    assert choose_alpha(0.2, 0.0) is None   # lo = 0.4 > hi = 1/15


def test_choose_epsilon_integral_chunks():
    eps = choose_epsilon(n=1000, m=800, alpha=0.18)
    s = eps * 800
    assert abs(s - round(s)) < 1e-9 and s >= 1
    assert choose_epsilon(n=10, m=1, alpha=0.3) == 1.0  # s floors at 1
    with pytest.raises(ValueError):
        choose_epsilon(n=10, m=0, alpha=0.3)


def test_final_stage_guard():
    assert final_stage_guard(2, 5, 10)
    assert not final_stage_guard(2, 6, 11)
    assert final_stage_guard(3, 4, 12)
    assert not final_stage_guard(3, 4, 11)


def test_params_validation():
    with pytest.raises(ValueError):
        ScheduleParams(k=2, n=10, m=4, gamma=1.5, epsilon=0.5)
    with pytest.raises(ValueError):
        ScheduleParams(k=2, n=10, m=4, gamma=0.5, epsilon=0.3)  # eps*m = 1.2
    with pytest.raises(ValueError):
        ScheduleParams(k=2, n=10, m=4, gamma=0.5, epsilon=0.5, mode="other")
    p = ScheduleParams(k=2, n=10, m=4, gamma=0.5, epsilon=0.5)
    assert p.chunk_size == 2
    assert p.tau == 2
    assert p.xi == pytest.approx(1 / math.log(10))


def test_theoretical_factory():
    p = ScheduleParams.theoretical(n=10 ** 6)
    assert p.gamma == pytest.approx(1 - 10 ** (-6 * 0.05))
    assert p.m == math.floor(p.gamma * 10 ** 6)
    assert p.mode == "theoretical"
    assert abs(p.epsilon * p.m - round(p.epsilon * p.m)) < 1e-9


def test_adaptive_factory():
    p = ScheduleParams.adaptive(n=100, m=80, k=2, max_degree=90)
    assert p.gamma == pytest.approx(0.9)   # Delta/n dominates m/n
    p2 = ScheduleParams.adaptive(n=100, m=80, k=2, max_degree=10)
    assert p2.gamma == pytest.approx(0.8)  # m/n dominates
    p3 = ScheduleParams.adaptive(n=10, m=20, k=2, max_degree=30)
    assert p3.gamma < 1                    # clamped below 1


def test_condemnation_base_k_independent_form():
    for k in (2, 3, 4):
        p = ScheduleParams(k=k, n=100, m=50, gamma=0.5, epsilon=0.1)
        i = 3
        expected = 0.1 * 0.5 * p.g_at(i) / p.r_at(i)
        assert p.condemnation_base(i) == pytest.approx(expected)


def test_error_term_recurrence_first_steps():
    """Recompute the first two rows of the recurrences independently."""
    p = ScheduleParams(k=2, n=1000, m=800, gamma=0.8, epsilon=0.05,
                       mode="theoretical")
    eps, gam, n, m, xi, c0 = 0.05, 0.8, 1000, 800, p.xi, p.c0
    ln = math.log(n)
    terms = error_term_table(p, upto=1)
    a0, b0 = 0.0, math.sqrt(eps * gam * n) * ln
    r0 = g0 = 1.0
    c_0 = eps * gam * a0 * g0 * (1 + 2 * xi) / (r0 ** 2 * n) + b0 * (1 + 2 * xi) / (r0 * n)
    f0 = eps * gam * g0 / r0 + c_0
    assert terms[0].a == pytest.approx(a0)
    assert terms[0].b == pytest.approx(b0)
    assert terms[0].c == pytest.approx(c_0)
    assert terms[0].f == pytest.approx(f0)
    a1 = (c0 * (eps ** 2 * g0 * m / r0 + math.sqrt(eps * m) * ln)
          + 2 * c_0 * r0 * n + a0 * (1 - 2 * eps * gam * g0 / r0))
    b1 = (1 - f0) * b0 + c0 * (eps ** 2 * g0 ** 2 / r0 ** 2 + math.sqrt(eps * m) * ln)
    assert terms[1].a == pytest.approx(a1)
    assert terms[1].b == pytest.approx(b1)
    assert theoretical_error_terms(p, 1) == terms[1]
    with pytest.raises(ValueError):
        theoretical_error_terms(p, p.tau)


def test_check_ab_constraints_clauses():
    p = ScheduleParams(k=2, n=1000, m=800, gamma=0.8, epsilon=0.05)
    i = 0
    assert check_ab_constraints(p, i, a=0.0, b=0.0, c=0.0) == []
    ri, gi = p.r_at(i), p.g_at(i)
    assert "a_half" in check_ab_constraints(p, i, a=ri * 1000 / 2, b=0, c=0)
    assert "b_cap" in check_ab_constraints(p, i, a=0, b=0.05 * 0.8 * gi * 1000 + 1, c=0)
    assert "c_cap" in check_ab_constraints(p, i, a=0, b=0, c=0.05 * 0.8 * gi / ri + 1e-9)
    assert "a_small" in check_ab_constraints(p, i, a=p.xi * ri * 1000 + 1, b=0, c=0)
    assert "b_small" in check_ab_constraints(p, i, a=0, b=p.xi * 0.05 * gi * 1000 + 1, c=0)
    assert set(AB_CLAUSES) >= set(check_ab_constraints(p, i, a=1e9, b=1e9, c=1e9))


def test_schedule_table_shapes():
    p = ScheduleParams(k=2, n=1000, m=800, gamma=0.8, epsilon=0.05)
    rows = schedule_table(p)
    assert len(rows) == p.tau
    assert rows[0][:2] == (0, 0.0)
    assert rows[0][2] == 1.0 and rows[0][3] == 1.0
    assert all(len(row) == 8 for row in rows)
    pt = ScheduleParams(k=2, n=1000, m=800, gamma=0.8, epsilon=0.05,
                        mode="theoretical")
    rows_t = schedule_table(pt)
    assert rows_t[0][5] == 0.0                  # a_0 = 0
    assert rows_t[1][5] > 0 and rows_t[1][6] > 0
