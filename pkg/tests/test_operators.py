import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from imogwo.encoding import ObjectiveVector, Solution, evaluate_many, random_solution
from imogwo.operators import (DiffusionSchedule, GwoCoefficients, block_mask, diffusion_alpha,
                              diffusion_sigma, diffusion_step, diffusion_update, discrete_update,
                              gwo_step, gwo_update, keep_better, keep_better_mask, qbl_step,
                              qbl_update)
from imogwo.pareto import Archive

G = 200


# -- GWO ----------------------------------------------------------------------

def test_control_parameter_schedule():
    assert GwoCoefficients.control(0, G) == 2.0
    assert GwoCoefficients.control(G, G) == 0.0
    c = GwoCoefficients.draw(50, G, (4, 3, 7), np.random.default_rng(0))
    assert np.all(np.abs(c.U) <= c.u) and np.all((c.O >= 0) & (c.O <= 2))


def test_gwo_collapses_to_leader_at_last_iteration(small, rng):
    sol = random_solution(small, rng)
    lead = random_solution(small, rng)
    new = gwo_update(sol, [lead, lead, lead], G, G, rng, small)
    assert np.allclose(new.continuous(), lead.continuous(), rtol=1e-15, atol=0)
    assert np.array_equal(new.assign, sol.assign)


def test_gwo_fixed_point():
    x = np.random.default_rng(1).random((2, 5))
    coef = GwoCoefficients(0.0, np.zeros((2, 3, 5)), np.random.default_rng(2).random((2, 3, 5)) * 2)
    assert np.allclose(gwo_step(x, np.repeat(x[:, None], 3, axis=1), coef), x, rtol=1e-15, atol=0)


def test_gwo_output_in_bounds(small):
    rng = np.random.default_rng(3)
    lo, hi = small.continuous_bounds
    bad = 0
    for _ in range(10_000 // 20):
        wolves = [random_solution(small, rng) for _ in range(4)]
        it = int(rng.integers(1, G + 1))
        x = gwo_update(wolves[0], wolves[1:], it, G, rng, small).continuous()
        bad += int(np.any((x < lo) | (x > hi)))
    assert bad == 0


# -- QBL ----------------------------------------------------------------------

def test_qbl_worked_example():
    lo, hi, x = np.array([0.1]), np.array([1.0]), np.array([[0.3]])
    outs = np.array([qbl_step(x, lo, hi, np.array([True]), np.random.default_rng(s))[0, 0]
                     for s in range(200)])
    assert np.all((outs >= 0.55) & (outs <= 0.8))
    assert outs.min() < 0.6 and outs.max() > 0.75


def test_qbl_midpoint_fixed():
    lo, hi = np.array([0.1]), np.array([1.0])
    assert qbl_step(np.array([[0.55]]), lo, hi, np.array([True]), np.random.default_rng(0))[0, 0] == pytest.approx(0.55)


@settings(max_examples=300, deadline=None)
@given(st.floats(-50, 50), st.floats(0.01, 100), st.floats(0, 1), st.integers(0, 2**31))
def test_qbl_interval_containment(lo, width, frac, seed):
    hi = lo + width
    x = lo + frac * width
    mid, opp = lo + width / 2, lo + hi - x
    out = qbl_step(np.array([[x]]), np.array([lo]), np.array([hi]), np.array([True]),
                   np.random.default_rng(seed))[0, 0]
    tol = 1e-9 * max(1.0, abs(lo) + width)
    assert min(mid, opp) - tol <= out <= max(mid, opp) + tol


def test_qbl_scope(small, rng):
    sol = random_solution(small, rng)
    new = qbl_update(sol, small, rng)
    assert np.array_equal(new.f_alloc, sol.f_alloc) and np.array_equal(new.assign, sol.assign)
    assert not np.array_equal(new.q, sol.q)
    with_f = qbl_update(sol, small, rng, include_f=True)
    assert not np.array_equal(with_f.f_alloc, sol.f_alloc)


# -- diffusion schedule -------------------------------------------------------

def test_alpha_limits():
    assert diffusion_alpha(G, G) == 0.0
    assert diffusion_alpha(0, G) == diffusion_alpha(1, G)
    a = diffusion_alpha(np.arange(1, G + 1), G)
    assert np.all(np.diff(a) < 0)
    assert np.all((a >= 0) & (a <= 1 - 1e-12))


def test_sigma_nonnegative_and_finite():
    s = diffusion_sigma(np.arange(0, G + 2), G)
    assert np.all(np.isfinite(s)) and np.all(s >= 0)


def test_schedule_at_iteration():
    first = DiffusionSchedule.at_iteration(1, G)
    assert first.t == G and first.alpha == 0.0
    last = DiffusionSchedule.at_iteration(G, G)
    assert last.t == 1 and last.alpha_prev == last.alpha


def test_first_iteration_is_max_noise():
    # alpha = 0: kernels sit at the origin with unit variance, so the
    # estimate is the density-weighted mean of all members
    z = np.random.default_rng(5).random((4, 3))
    f = np.random.default_rng(6).random((4, 3))
    sched = DiffusionSchedule.at_iteration(1, G)
    rng = np.random.default_rng(7)
    out = diffusion_step(z, f, sched, rng)
    assert np.all(np.isfinite(out))


def test_single_member_is_a_plain_ddim_step():
    z = np.array([[0.2, 0.7, 0.4]])
    f = np.array([[1.0, 2.0, 3.0]])
    sched = DiffusionSchedule.at_iteration(120, G)
    got = diffusion_step(z, f, sched, np.random.default_rng(8))
    a, ap, sig = sched.alpha, sched.alpha_prev, sched.sigma
    w = np.random.default_rng(8).standard_normal(z.shape)
    eps = (z - np.sqrt(a) * z) / np.sqrt(1 - a)
    want = np.sqrt(ap) * z + np.sqrt(max(0.0, 1 - ap - sig**2)) * eps + sig * w
    assert np.allclose(got, want, rtol=1e-12, atol=1e-12)


def test_diffusion_total_over_whole_run(small):
    rng = np.random.default_rng(9)
    sols = [random_solution(small, rng) for _ in range(6)]
    members = list(zip(sols, evaluate_many(sols, small)))
    lo, hi = small.continuous_bounds
    for it in range(1, G + 1):
        out = diffusion_update(members, it, G, rng, small)
        for new, (old, _) in zip(out, members):
            x = new.continuous()
            assert np.all(np.isfinite(x)) and np.all((x >= lo) & (x <= hi))
            assert np.array_equal(new.f_alloc, old.f_alloc)
            assert np.array_equal(new.assign, old.assign)
    assert diffusion_update([], 1, G, rng, small) == []


# -- discrete ----------------------------------------------------------------

def test_branch_frequencies():
    # K = 30 makes a regenerated vector equal to "keep" or "copy" vanishingly rare
    rng = np.random.default_rng(10)
    keep = np.ones(30, dtype=np.int64)
    pool = [np.full(30, 2)]
    n = 100_000
    counts = np.zeros(3)
    for _ in range(n):
        out = discrete_update(keep, pool, 0.1, 0.5, rng, m=3)
        counts[0 if np.array_equal(out, keep) else 1 if np.array_equal(out, pool[0]) else 2] += 1
    assert np.all(np.abs(counts / n - [0.1, 0.4, 0.5]) <= 0.01)


def test_branch_outcomes():
    keep = np.array([1, 1, 1])
    pool = [np.array([2, 3, 2])]
    found = set()
    rng = np.random.default_rng(11)
    for _ in range(500):
        out = discrete_update(keep, pool, 0.1, 0.5, rng, m=3)
        assert np.all((out >= 1) & (out <= 3)) and out.shape == keep.shape
        found.add(tuple(out))
    assert (1, 1, 1) in found and (2, 3, 2) in found and len(found) > 2


def test_empty_archive_falls_through_to_regeneration():
    rng = np.random.default_rng(12)
    outs = [tuple(discrete_update(np.array([1, 1]), Archive(), 0.1, 0.5, rng, m=4)) for _ in range(500)]
    assert len(set(outs)) > 4


def test_discrete_rejects_bad_thresholds():
    with pytest.raises(ValueError):
        discrete_update(np.array([1]), [], 0.6, 0.5, np.random.default_rng(0), m=2)


# -- acceptance ---------------------------------------------------------------

def _pair(v):
    return Solution(np.zeros((1, 3)), [0.5], [0.6e9], [0.0], [1]), ObjectiveVector(*v)


def test_keep_better_dominance():
    rng = np.random.default_rng(13)
    old, new = _pair((2, 2, 2)), _pair((1, 1, 1))
    assert keep_better(old, new, rng) is new
    assert keep_better(new, old, rng) is new


def test_keep_better_tie_is_fair():
    rng = np.random.default_rng(14)
    old, new = _pair((1, 1, 1)), _pair((1, 1, 1))
    picks = sum(keep_better(old, new, rng) is new for _ in range(20_000))
    assert abs(picks / 20_000 - 0.5) < 0.015


def test_keep_better_mask_matches_scalar_rule():
    rng = np.random.default_rng(15)
    old = rng.integers(0, 3, (5000, 3)).astype(float)
    new = rng.integers(0, 3, (5000, 3)).astype(float)
    take = keep_better_mask(old, new, rng)
    new_dom = np.all(new <= old, 1) & np.any(new < old, 1)
    old_dom = np.all(old <= new, 1) & np.any(old < new, 1)
    assert np.all(take[new_dom]) and not np.any(take[old_dom])
    tie = ~new_dom & ~old_dom
    assert abs(take[tie].mean() - 0.5) < 0.03


def test_block_mask_layout(small):
    mask = block_mask(small, f=False)
    assert mask.size == 3 * small.m + 3 * small.k
    assert not mask[3 * small.m + small.k:3 * small.m + 2 * small.k].any()
    assert mask[:3 * small.m].all()
