"""Background depth b and rescaled stream q on a grid, plus the built-in
compatible families.

The fluid interpretation needs div(grad q / b) = 0; the shipped families
satisfy it by construction (harmonic q with constant depth, arbitrary
positive depth at rest, and a radial pair with r q'(r)/b(r) constant about
a center outside the domain).  check_background measures the discrete
residual so scenarios can be validated or merely warned about.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ScenarioValidationError

__all__ = ["BackgroundFields", "make_family", "check_background"]


@dataclass
class BackgroundFields:
    """Nodal b, q, psi0 = -q and q^2/b fields with optional callables."""

    b: np.ndarray
    q: np.ndarray
    psi0: np.ndarray
    ratio: np.ndarray
    b_func: object = field(default=None, repr=False)
    q_func: object = field(default=None, repr=False)

    @classmethod
    def from_functions(cls, grid, b_func, q_func):
        b = np.asarray(b_func(grid.X, grid.Y), dtype=float)
        q = np.asarray(q_func(grid.X, grid.Y), dtype=float)
        b = np.broadcast_to(b, grid.X.shape).copy()
        q = np.broadcast_to(q, grid.X.shape).copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = q * q / b
        return cls(b=b, q=q, psi0=-q, ratio=ratio, b_func=b_func, q_func=q_func)

    @classmethod
    def from_arrays(cls, grid, b, q):
        b = np.asarray(b, dtype=float)
        q = np.asarray(q, dtype=float)
        if b.shape != grid.X.shape or q.shape != grid.X.shape:
            raise ValueError("field arrays must match the grid shape")
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = q * q / b
        return cls(b=b.copy(), q=q.copy(), psi0=-q, ratio=ratio)

    def validate(self, grid):
        mask = grid.active_mask
        if not np.all(np.isfinite(self.b[mask])) or not np.all(
            np.isfinite(self.q[mask])
        ):
            raise ScenarioValidationError("b or q not finite on active nodes")
        if self.b[mask].min() <= 0:
            raise ScenarioValidationError("inf b must be positive")
        if self.q[mask].min() <= 0:
            raise ScenarioValidationError("inf q must be positive")
        if not np.array_equal(
            self.ratio[mask], self.q[mask] ** 2 / self.b[mask]
        ):
            raise ScenarioValidationError("stored ratio field is stale")

    def b_at(self, grid, pts):
        """Depth sampled by bilinear interpolation (keeps Z-dependence continuous)."""
        return grid.interp(self.b, pts)

    def q_at(self, grid, pts):
        return grid.interp(self.q, pts)

    def ratio_at(self, grid, pts):
        return grid.interp(self.ratio, pts)


def make_family(name, **params):
    """Return (b_func, q_func) for a named background family.

    Families
    --------
    uniform:           b = b0, q = q0
    harmonic-q:        b = b0, q = q0 + gx x + gy y
    depth-bump:        b = b0 + amp exp(-|x - x0|^2 / sigma^2), q = q0
    radial-pair:       about (xc, yc): b = b0 + b1 r,
                       q = q0 + c (b0 ln(r/r0) + b1 (r - r0)); the flux
                       r q'(r)/b(r) = c is constant, so div(grad q / b) = 0
                       away from the center (keep the center outside the
                       domain).
    """
    if name == "uniform":
        b0 = params.get("b0", 1.0)
        q0 = params.get("q0", 1.0)
        return (lambda x, y: b0 + 0.0 * x, lambda x, y: q0 + 0.0 * x)
    if name == "harmonic-q":
        b0 = params.get("b0", 1.0)
        q0 = params.get("q0", 1.0)
        gx = params.get("gx", 0.0)
        gy = params.get("gy", 0.0)
        return (lambda x, y: b0 + 0.0 * x, lambda x, y: q0 + gx * x + gy * y)
    if name == "depth-bump":
        b0 = params.get("b0", 1.0)
        amp = params.get("amp", 0.5)
        sigma = params.get("sigma", 0.25)
        x0 = params.get("x0", 0.0)
        y0 = params.get("y0", 0.0)
        q0 = params.get("q0", 1.0)
        return (
            lambda x, y: b0
            + amp * np.exp(-(((x - x0) ** 2 + (y - y0) ** 2) / sigma**2)),
            lambda x, y: q0 + 0.0 * x,
        )
    if name == "radial-pair":
        xc = params.get("xc", 0.0)
        yc = params.get("yc", 0.0)
        b0 = params.get("b0", 1.0)
        b1 = params.get("b1", 0.0)
        c = params.get("c", 0.5)
        q0 = params.get("q0", 1.0)
        r0 = params.get("r0", 1.0)

        def b_func(x, y):
            r = np.hypot(x - xc, y - yc)
            return b0 + b1 * r

        def q_func(x, y):
            r = np.hypot(x - xc, y - yc)
            return q0 + c * (b0 * np.log(r / r0) + b1 * (r - r0))

        return (b_func, q_func)
    raise ScenarioValidationError(f"unknown background family '{name}'")


def check_background(fields, grid):
    """Sup-norm residual of div(grad q / b) at regular interior nodes.

    Uses the same face-harmonic divergence stencil as the PDE operator, so
    affine q with constant b and constant q are exact zeros of the check.
    """
    h = grid.spacing
    q = fields.q
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = 1.0 / fields.b
        kE = 2.0 * kappa[1:-1, 1:-1] * kappa[2:, 1:-1] / (
            kappa[1:-1, 1:-1] + kappa[2:, 1:-1]
        )
        kW = 2.0 * kappa[1:-1, 1:-1] * kappa[:-2, 1:-1] / (
            kappa[1:-1, 1:-1] + kappa[:-2, 1:-1]
        )
        kN = 2.0 * kappa[1:-1, 1:-1] * kappa[1:-1, 2:] / (
            kappa[1:-1, 1:-1] + kappa[1:-1, 2:]
        )
        kS = 2.0 * kappa[1:-1, 1:-1] * kappa[1:-1, :-2] / (
            kappa[1:-1, 1:-1] + kappa[1:-1, :-2]
        )
        div = (
            kE * (q[2:, 1:-1] - q[1:-1, 1:-1])
            - kW * (q[1:-1, 1:-1] - q[:-2, 1:-1])
            + kN * (q[1:-1, 2:] - q[1:-1, 1:-1])
            - kS * (q[1:-1, 1:-1] - q[1:-1, :-2])
        ) / (h * h)

    full = np.zeros_like(q)
    full[1:-1, 1:-1] = div
    mask = grid.regular_interior_mask()
    if not np.any(mask):
        return math.inf
    return float(np.max(np.abs(full[mask])))
