"""Randomized solver: reference probabilities, determinism, engine behavior."""

from dataclasses import replace

import numpy as np
import pytest

from rainbow_nibble import (MatchingFamily, ScheduleParams, compute_stats,
                            final_stage_guard, gen_latin, gen_random_simple,
                            greedy_complete, marking_probability, run,
                            verify_rainbow)


def adaptive_params(fam, **kw):
    return ScheduleParams.adaptive(n=fam.equal_size(), m=fam.m, k=fam.k,
                                   max_degree=compute_stats(fam).max_degree, **kw)


def test_marking_probability_hand_value():
    # [DERIVED] v is on 1 of 4 edges in one class and 1 of 5 in the other:
    # Q = 1 - (3/4)(4/5) = 0.4
    fam = MatchingFamily.build(2, 18, [
        [(0, 1), (2, 3), (4, 5), (6, 7)],
        [(0, 9), (10, 11), (12, 13), (14, 15), (16, 17)],
    ])
    assert marking_probability(fam, [0, 1], 0) == pytest.approx(0.4)
    # vertex not on any edge is never marked
    assert marking_probability(fam, [0, 1], 8) == 0.0
    # dead vertices shrink the class before drawing
    assert marking_probability(fam, [0], 0, dead_vertices={2}) == pytest.approx(1 / 3)


def test_marking_probability_improper_class():
    fam = MatchingFamily.build(2, 5, [[(0, 1), (0, 2), (3, 4)]])
    assert marking_probability(fam, [0], 0) == pytest.approx(2 / 3)


def test_marking_probability_empty_class_raises():
    fam = MatchingFamily.build(2, 2, [[(0, 1)]])
    with pytest.raises(ValueError):
        marking_probability(fam, [0], 0, dead_vertices={0})


def test_greedy_complete_reference():
    fam = MatchingFamily.build(2, 6, [[(0, 1), (2, 3)], [(0, 2), (4, 5)]])
    sel = greedy_complete(fam, [0, 1])
    assert sel == {0: (0, 1), 1: (4, 5)}  # lowest edge first, then repair
    assert greedy_complete(fam, [0], dead_vertices={0, 2}) is None
    assert greedy_complete(fam, []) == {}


def test_guard_implies_greedy_success_randomized():
    """Whenever the sufficient guard holds, greedy completion cannot fail."""
    rng = np.random.default_rng(0)
    checked = 0
    for trial in range(400):
        k = int(rng.integers(2, 4))
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, 5))
        fam = gen_random_simple(n=n, m=m, k=k, seed=trial)
        dead = set(int(v) for v in
                   rng.choice(fam.num_vertices, size=int(rng.integers(0, 4)),
                              replace=False))
        min_alive = min(sum(1 for e in cls if not any(v in dead for v in e))
                        for cls in fam.matchings)
        if final_stage_guard(k, m, min_alive):
            checked += 1
            assert greedy_complete(fam, range(m), dead) is not None
    assert checked > 50  # the property was actually exercised


def test_run_success_and_verification():
    fam = gen_random_simple(n=60, m=40, k=2, seed=0)
    params = adaptive_params(fam, epsilon=8 / 40)
    out = run(fam, params, seed=1)
    assert out.status == "success"
    assert verify_rainbow(fam, out.rainbow, require_full=True) == []
    assert out.trajectory[0].i == 0
    assert out.trajectory[0].min_size == 60
    assert out.trajectory[0].mean_size == 60.0
    assert out.trajectory[0].predicted_size == 60.0
    assert len(out.trajectory) <= params.tau


def test_run_determinism():
    fam = gen_random_simple(n=40, m=30, k=2, seed=2)
    params = adaptive_params(fam, epsilon=3 / 30)
    a = run(fam, params, seed=5)
    b = run(fam, params, seed=5)
    assert a.status == b.status

    def stable(out):  # drop the only nondeterministic observable
        return [replace(rec, wallclock=0.0) for rec in out.trajectory]

    assert stable(a) == stable(b)
    if a.status == "success":
        assert a.rainbow.selection == b.rainbow.selection
    c = run(fam, params, seed=6)
    assert stable(a) != stable(c)


def test_zap_equation_exact_within_tolerance():
    for seed in range(3):
        fam = gen_random_simple(n=50, m=40, k=2, seed=seed)
        out = run(fam, adaptive_params(fam, epsilon=4 / 40), seed=seed)
        for rec in out.trajectory:
            assert rec.zap_residual < 1e-12


def test_adaptive_f_dominates_max_q():
    fam = gen_random_simple(n=50, m=40, k=2, seed=9)
    out = run(fam, adaptive_params(fam, epsilon=4 / 40), seed=0)
    for rec in out.trajectory[:-1]:
        assert rec.c_slack >= 1e-6
        assert 0 < rec.f <= 1


def test_single_matching_goes_straight_to_greedy():
    fam = MatchingFamily.build(2, 2, [[(0, 1)]])
    params = ScheduleParams.adaptive(n=1, m=1, k=2, max_degree=1, epsilon=1.0)
    out = run(fam, params, seed=0)
    assert out.status == "success"
    assert out.rainbow.selection == {0: (0, 1)}
    assert out.guard_held is False  # 2*1 > 1, yet greedy trivially succeeds


def test_restart_exhausted_on_singleton_chunks():
    # chunks of one single-edge class force Q = 1, an unsolvable zap equation
    fam = MatchingFamily.build(2, 4, [[(0, 1)], [(2, 3)]])
    params = ScheduleParams.adaptive(n=1, m=2, k=2, max_degree=1, epsilon=0.5)
    out = run(fam, params, seed=0, max_restarts=3)
    assert out.status == "restart_exhausted"
    assert out.restarts == 3


def test_run_input_validation():
    fam = gen_random_simple(n=10, m=5, k=2, seed=0)
    good = adaptive_params(fam, epsilon=1 / 5)
    with pytest.raises(ValueError):
        run(fam, ScheduleParams.adaptive(n=10, m=6, k=2, max_degree=5,
                                         epsilon=1 / 6), seed=0)
    uneven = MatchingFamily.build(2, 8, [[(0, 1)], [(2, 3), (4, 5)]])
    with pytest.raises(ValueError):
        run(uneven, good, seed=0)
    malformed = MatchingFamily(k=2, num_vertices=2, matchings=(((0, 7),),))
    with pytest.raises(ValueError):
        run(malformed, good, seed=0)


def test_theoretical_mode_runs_and_checks_degree():
    fam = gen_random_simple(n=50, m=10, k=2, seed=0, max_degree_cap=8)
    p = ScheduleParams.theoretical(n=50, m=10)
    out = run(fam, p, seed=0)
    assert out.status in ("success", "greedy_failed", "restart_exhausted")
    for rec in out.trajectory:
        assert rec.a1_breach in (True, False)
        assert rec.a2_breach in (True, False)
    dense = gen_latin(50)
    with pytest.raises(ValueError):
        run(dense, ScheduleParams.theoretical(n=50, m=50), seed=0)


def test_condemnation_uniformity():
    """Each surviving vertex is condemned in iteration 0 with probability f_0.

    Symmetric instance: both classes give every vertex exactly one edge out
    of two, so Q(v) = 1/2 whatever the permutation, and f_0 = 1/2 + eta.
    """
    fam = MatchingFamily.build(2, 4, [[(0, 1), (2, 3)], [(0, 2), (1, 3)]])
    params = ScheduleParams.adaptive(n=2, m=2, k=2, max_degree=2, epsilon=0.5)
    trials = 10_000
    hits = 0
    for seed in range(trials):
        out = run(fam, params, seed=seed, max_restarts=0,
                  collect_condemned=True)
        rec = out.trajectory[0]
        assert rec.f == pytest.approx(0.5, abs=1e-5)
        hits += 0 in rec.condemned
    p_hat = hits / trials
    se = (0.25 / trials) ** 0.5
    assert abs(p_hat - 0.5) <= 3 * se
