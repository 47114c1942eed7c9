"""Tests for the radial profile, core radius, and profile evaluation."""

import math

import numpy as np
import pytest

from lakevortex.errors import ExponentOutOfRange, NoRoot, OutOfBall
from lakevortex.profile import (
    CoreRadius,
    eval_V,
    eval_W,
    profile_to_csv,
    solve_core_radius,
    solve_profile,
)

# Frozen values from an independent shooting oracle: fixed-step classical RK4
# with bisection refinement of the first zero, Richardson-extrapolated over
# step halvings (see oracle_rk4_shoot below, run offline at h = 5e-4).
ORACLE_SLOPE_AT_ONE = {
    1.5: -52.15402553821563,
    2.0: -7.897071013110588,
    3.0: -2.6451231733489533,
}
ORACLE_PHI0 = {
    1.5: 49.15022020967508,
    2.0: 8.534114771198086,
    3.0: 3.573900981928071,
}


def oracle_rk4_shoot(p, h):
    """Independent oracle: classical RK4 shoot, bisection on the first zero."""
    t = 1e-6
    y = np.array([1.0 - t * t / 4 + p * t**4 / 64, -t / 2 + p * t**3 / 16])

    def f(t, y):
        return np.array([y[1], -y[1] / t - max(y[0], 0.0) ** p])

    def step(t, y, h):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    while y[0] > 0:
        t_prev, y_prev = t, y.copy()
        y = step(t, y, h)
        t += h
        if t > 100:
            raise RuntimeError("no zero found")
    a_t, ya = t_prev, y_prev
    b_t = t
    for _ in range(200):
        m = 0.5 * (a_t + b_t)
        ym = step(a_t, ya, m - a_t)
        if ym[0] > 0:
            a_t, ya = m, ym
        else:
            b_t = m
        if b_t - a_t < 1e-15 * a_t:
            break
    return a_t, ya[1]


@pytest.fixture(scope="module")
def profiles(profile_p15, profile_p2, profile_p3):
    return {1.5: profile_p15, 2.0: profile_p2, 3.0: profile_p3}


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_pohozaev_pair(profiles, p):
    prof = profiles[p]
    slope = abs(prof.slope_at_one)
    assert abs(prof.int_phi_p - 2 * math.pi * slope) <= 1e-6 * 2 * math.pi * slope
    target = math.pi * (p + 1) / 2 * slope**2
    assert abs(prof.int_phi_p1 - target) <= 1e-6 * target


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_slope_matches_independent_oracle(profiles, p):
    prof = profiles[p]
    ref = ORACLE_SLOPE_AT_ONE[p]
    assert abs(prof.slope_at_one - ref) <= 1e-8 * abs(ref)
    assert abs(prof.phi0 - ORACLE_PHI0[p]) <= 1e-8 * ORACLE_PHI0[p]


def test_oracle_reproducible_at_coarse_step():
    # the frozen constants come from this oracle; spot-check it still agrees
    r0, dpsi = oracle_rk4_shoot(2.0, 2e-3)
    slope = r0**2 * r0 * dpsi
    assert abs(slope - ORACLE_SLOPE_AT_ONE[2.0]) < 1e-6


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_profile_invariants(profiles, p):
    prof = profiles[p]
    assert prof.values[0] > 0
    assert prof.values[-1] == 0.0
    assert np.all(np.diff(prof.values) < 0)
    assert prof.slope_at_one < 0
    assert np.all(np.diff(prof.radii) > 0)


def test_exponent_out_of_range():
    with pytest.raises(ExponentOutOfRange):
        solve_profile(1.0)
    with pytest.raises(ExponentOutOfRange):
        solve_profile(0.5)


def test_phi_boundary_zero_any_grid(profiles):
    for n in (64, 257, 1000):
        prof = solve_profile(2.0, grid_size=n)
        assert prof.values[-1] == 0.0


def test_core_radius_basic(profile_p2):
    core = solve_core_radius(1e-3, 1.0, 4.0, profile_p2)
    assert 0 < core.s_delta < 4.0
    assert core.residual(profile_p2) <= 1e-12


def test_core_radius_random_inputs(profile_p2, profile_p3):
    rng = np.random.default_rng(7)
    for prof in (profile_p2, profile_p3):
        for _ in range(25):
            delta = 10.0 ** rng.uniform(-6, -1)
            a = 10.0 ** rng.uniform(-1, 1)
            R = 10.0 ** rng.uniform(0, 1)
            core = solve_core_radius(delta, a, R, prof)
            assert 0 < core.s_delta < R
            assert core.residual(prof) <= 1e-12


def test_core_radius_constructed_root(profile_p2):
    # choose s, read off the a that balances the equation, then invert
    R = 4.0
    s = R / math.e
    delta = 1e-3
    beta = 2.0 / (profile_p2.p - 1.0)
    a = delta**beta * s ** (-beta) * profile_p2.slope_at_one * math.log(s / R)
    core = solve_core_radius(delta, a, R, profile_p2)
    assert abs(core.s_delta - s) <= 1e-10 * s


def test_core_radius_asymptote_ladder(profile_p2):
    # s_delta / (delta |ln delta|^((p-1)/2)) -> (|phi'(1)|/a)^((p-1)/2)
    a, R = 1.0, 4.0
    target = (abs(profile_p2.slope_at_one) / a) ** 0.5
    gaps = []
    for k in range(4, 13):
        delta = math.exp(-k)
        core = solve_core_radius(delta, a, R, profile_p2)
        ratio = core.s_delta / (delta * k**0.5)
        gaps.append(abs(ratio - target) / target)
    assert gaps[-1] <= 0.05
    assert gaps[-1] < gaps[0]


def test_eval_W_branch_values(profile_p2):
    delta, a, R = 1e-3, 1.0, 4.0
    core = solve_core_radius(delta, a, R, profile_p2)
    s = core.s_delta
    # matching point: both branches give a
    assert abs(eval_W(delta, a, R, s, profile_p2, core=core) - a) < 1e-12
    # outer edge
    assert abs(eval_W(delta, a, R, R, profile_p2, core=core)) < 1e-14
    # center value against the frozen oracle phi(0)
    expected = a + (delta / s) ** 2 * ORACLE_PHI0[2.0]
    assert abs(eval_W(delta, a, R, 0.0, profile_p2, core=core) - expected) < 1e-7


def test_eval_W_c1_matching(profile_p2):
    # value and radial-derivative jumps across |x| = s within grid tolerance
    delta, a, R = 1e-3, 1.0, 4.0
    core = solve_core_radius(delta, a, R, profile_p2)
    s = core.s_delta
    eps = 1e-7 * s
    w_in = eval_W(delta, a, R, s - eps, profile_p2, core=core)
    w_out = eval_W(delta, a, R, s + eps, profile_p2, core=core)
    assert abs(w_in - w_out) < 1e-9 * a
    d_in = (w_in - eval_W(delta, a, R, s - 2 * eps, profile_p2, core=core)) / eps
    d_out = (eval_W(delta, a, R, s + 2 * eps, profile_p2, core=core) - w_out) / eps
    assert abs(d_in - d_out) <= 1e-4 * abs(d_out)


def test_eval_W_out_of_ball(profile_p2):
    with pytest.raises(OutOfBall):
        eval_W(1e-3, 1.0, 4.0, 4.5, profile_p2)


def test_scaled_profile_consistency(profile_p2, profile_p3):
    # V equals the explicit two-branch form built from the same core radius
    rng = np.random.default_rng(3)
    for prof in (profile_p2, profile_p3):
        beta = 2.0 / (prof.p - 1.0)
        for _ in range(5):
            delta = 10.0 ** rng.uniform(-5, -2)
            b_hat = rng.uniform(0.5, 2.0)
            q_hat = rng.uniform(0.5, 2.0)
            R = 4.0
            a = b_hat**beta * q_hat
            core = solve_core_radius(delta, a, R, prof)
            s = core.s_delta
            rs = np.concatenate(
                [np.linspace(0, s, 13), np.linspace(s, R, 13)]
            )
            got = eval_V(delta, b_hat, q_hat, R, rs, prof, core=core)
            inner = q_hat + b_hat ** (-beta) * (delta / s) ** beta * prof.phi(
                np.minimum(rs / s, 1.0)
            )
            outer = q_hat * np.log(np.maximum(rs, 1e-300) / R) / math.log(s / R)
            expected = np.where(rs <= s, inner, outer)
            assert np.max(np.abs(got - expected)) <= 1e-12 * q_hat
            # and against the unscaled profile directly
            w = eval_W(delta, a, R, rs, prof, core=core)
            assert np.max(np.abs(got - b_hat ** (-beta) * w)) == 0.0


def test_no_root_when_infeasible(profile_p2):
    # delta >= R with huge a pushes the root out of (0, R)
    with pytest.raises(NoRoot):
        solve_core_radius(10.0, 1e12, 1.0, profile_p2)


def test_profile_csv_export(tmp_path, profile_p2):
    path = tmp_path / "profile.csv"
    profile_to_csv(profile_p2, path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (profile_p2.radii.size, 2)
    assert data[0, 1] == pytest.approx(profile_p2.phi0)
