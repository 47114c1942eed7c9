"""Radial free-boundary profile on the unit ball and derived core data.

The building block of every vortex is the unique positive radial solution
phi of

    -(phi'' + phi'/r) = phi^p,   phi > 0 on [0, 1),  phi(1) = 0,  phi'(0) = 0,

together with its boundary slope phi'(1) and the weighted integrals of
phi^p and phi^(p+1) over the unit ball.  From that single table the
cap-and-log profile W and its scaled variant V are evaluated, and the core
radius s solving the slope-matching equation is found per vortex.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import solve_ivp, simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import ExponentOutOfRange, NoConvergence, NoRoot, OutOfBall

__all__ = [
    "ProfileTable",
    "CoreRadius",
    "solve_profile",
    "solve_core_radius",
    "eval_W",
    "eval_V",
    "profile_to_csv",
]


@dataclass(frozen=True)
class ProfileTable:
    """Tabulated radial profile for a fixed exponent p.

    Attributes
    ----------
    p : float
        Nonlinearity exponent, > 1.
    radii : ndarray
        Increasing radial grid on [0, 1].
    values : ndarray
        phi at each radius; strictly decreasing, values[-1] == 0.
    slope_at_one : float
        phi'(1), negative.
    int_phi_p : float
        Integral of phi^p over the unit ball.
    int_phi_p1 : float
        Integral of phi^(p+1) over the unit ball.
    """

    p: float
    radii: np.ndarray
    values: np.ndarray
    slope_at_one: float
    int_phi_p: float
    int_phi_p1: float
    _spline: CubicSpline = field(repr=False, compare=False, default=None)

    @property
    def phi0(self):
        """Center value phi(0)."""
        return float(self.values[0])

    def phi(self, r):
        """Evaluate phi at radii in [0, 1] (scalar or array)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < -1e-12) or np.any(r > 1.0 + 1e-12):
            raise OutOfBall("profile radius outside [0, 1]")
        out = self._spline(np.clip(r, 0.0, 1.0))
        # spline is clamped at both ends, but clip tiny negatives near r = 1
        return np.maximum(out, 0.0) if out.ndim else float(max(out, 0.0))


def _series_start(p, t0):
    """Series values of the normalized shoot psi near the regular origin."""
    psi = 1.0 - t0 * t0 / 4.0 + p * t0**4 / 64.0
    dpsi = -t0 / 2.0 + p * t0**3 / 16.0
    return psi, dpsi


def solve_profile(p, grid_size=2048):
    """Compute the radial profile table by a normalized shoot.

    Integrates psi'' + psi'/t + psi^p = 0 with psi(0) = 1 until the first
    zero t = r0, then rescales phi(r) = r0^(2/(p-1)) psi(r0 r) so the zero
    lands at radius 1.  The ball integrals are composite-Simpson sums of the
    stored grid with the 2*pi*r weight.

    Parameters
    ----------
    p : float
        Exponent, must be > 1.
    grid_size : int
        Number of radial intervals for the stored table (>= 64).

    Returns
    -------
    ProfileTable
    """
    if p <= 1.0:
        raise ExponentOutOfRange(f"exponent p must exceed 1, got {p}")
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")

    t0 = 1e-8
    y0 = _series_start(p, t0)

    def rhs(t, y):
        return (y[1], -y[1] / t - max(y[0], 0.0) ** p)

    def first_zero(t, y):
        return y[0]

    first_zero.terminal = True
    first_zero.direction = -1

    sol = solve_ivp(
        rhs,
        (t0, 100.0),
        y0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        events=first_zero,
        dense_output=True,
    )
    if sol.t_events[0].size == 0:
        raise NoConvergence(f"shooting found no first zero for p={p}")

    r0 = float(sol.t_events[0][0])
    dpsi_r0 = float(sol.y_events[0][0][1])

    scale = r0 ** (2.0 / (p - 1.0))
    radii = np.linspace(0.0, 1.0, grid_size + 1)
    ts = radii * r0
    psi = sol.sol(np.clip(ts, t0, r0))[0]
    psi[0] = 1.0
    values = scale * np.maximum(psi, 0.0)
    values[-1] = 0.0
    slope = scale * r0 * dpsi_r0

    int_phi_p = 2.0 * math.pi * simpson(values**p * radii, x=radii)
    int_phi_p1 = 2.0 * math.pi * simpson(values ** (p + 1.0) * radii, x=radii)

    spline = CubicSpline(radii, values, bc_type=((1, 0.0), (1, slope)))
    return ProfileTable(
        p=float(p),
        radii=radii,
        values=values,
        slope_at_one=slope,
        int_phi_p=float(int_phi_p),
        int_phi_p1=float(int_phi_p1),
        _spline=spline,
    )


@dataclass(frozen=True)
class CoreRadius:
    """Core radius s solving the slope-matching equation.

    The defining equation is

        delta^(2/(p-1)) s^(-2/(p-1)) phi'(1) = a / ln(s / R),

    equivalently (both sides negative)

        delta^(2/(p-1)) s^(-2/(p-1)) |phi'(1)| ln(R / s) = a.
    """

    s_delta: float
    delta: float
    a: float
    R: float

    def residual(self, profile):
        """Relative residual of the defining equation at the stored root."""
        beta = 2.0 / (profile.p - 1.0)
        lhs = self.delta**beta * self.s_delta ** (-beta) * profile.slope_at_one
        rhs = self.a / math.log(self.s_delta / self.R)
        return abs(lhs - rhs) / abs(rhs)


def solve_core_radius(delta, a, R, profile):
    """Find the unique core radius in (0, R) for given (delta, a, R).

    The rearranged left side delta^beta s^(-beta) |phi'(1)| ln(R/s) is
    strictly decreasing on (0, R) from +inf to 0, so a bracketed solve in
    log(s) is monotone and safe.
    """
    if delta <= 0 or a <= 0 or R <= 0:
        raise ValueError("delta, a, R must be positive")
    beta = 2.0 / (profile.p - 1.0)
    slope = abs(profile.slope_at_one)

    def logres(t):
        # log of G(s)/a at s = exp(t); strictly decreasing in t
        return (
            beta * (math.log(delta) - t)
            + math.log(slope)
            + math.log(math.log(R) - t)
            - math.log(a)
        )

    # asymptotic guess s ~ delta (|phi'(1)| |ln delta| / a)^((p-1)/2)
    if delta < 1.0:
        guess = delta * (slope * abs(math.log(delta)) / a) ** ((profile.p - 1.0) / 2.0)
    else:
        guess = R / 2.0
    guess = min(max(guess, 1e-300), R * (1.0 - 1e-9))

    lo, hi = math.log(guess), math.log(guess)
    for _ in range(200):
        if logres(lo) > 0:
            break
        lo -= 1.0
    else:
        raise NoRoot("could not bracket core radius from below")
    hi_cap = math.log(R * (1.0 - 1e-9))
    for _ in range(200):
        if logres(hi) < 0 or hi >= hi_cap:
            break
        hi = min(hi + 1.0, hi_cap)
    if logres(hi) >= 0:
        raise NoRoot(f"no core radius in (0, R) for delta={delta}, a={a}, R={R}")

    t_root = brentq(logres, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    s = math.exp(t_root)
    core = CoreRadius(s_delta=s, delta=float(delta), a=float(a), R=float(R))
    if core.residual(profile) > 1e-12:
        raise NoRoot(f"core radius residual too large: {core.residual(profile):.3e}")
    return core


def eval_W(delta, a, R, x_radius, profile, core=None):
    """Evaluate the cap-and-log profile W at radii |x| in [0, R].

    Inner branch a + delta^beta s^(-beta) phi(|x|/s) for |x| <= s, outer
    branch a ln(|x|/R)/ln(s/R) for s <= |x| <= R; the two agree at |x| = s
    with matching radial derivative by construction of s.
    """
    r = np.asarray(x_radius, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r < 0) or np.any(r > R * (1.0 + 1e-12)):
        raise OutOfBall("eval_W radius outside [0, R]")
    if core is None:
        core = solve_core_radius(delta, a, R, profile)
    s = core.s_delta
    beta = 2.0 / (profile.p - 1.0)
    amp = (delta / s) ** beta

    out = np.empty_like(r)
    inner = r <= s
    out[inner] = a + amp * profile.phi(r[inner] / s)
    router = np.minimum(r[~inner], R)
    out[~inner] = a * np.log(router / R) / math.log(s / R)
    return float(out[0]) if scalar else out


def eval_V(delta, b_hat, q_hat, R, x_radius, profile, core=None):
    """Evaluate the scaled profile V for cell data (b_hat, q_hat).

    V is b_hat^(-beta) times W with threshold a = b_hat^beta q_hat; the core
    radius is the one belonging to that a.
    """
    beta = 2.0 / (profile.p - 1.0)
    a = b_hat**beta * q_hat
    w = eval_W(delta, a, R, x_radius, profile, core=core)
    return b_hat ** (-beta) * w


def profile_to_csv(profile, path):
    """Write the profile table as CSV with columns radius, phi."""
    data = np.column_stack([profile.radii, profile.values])
    np.savetxt(path, data, delimiter=",", header="radius,phi", comments="")
