"""Bounded 2D domains on Cartesian grids with cut-cell boundary treatment.

Two shapes are supported: disks and axis-aligned rectangles.  Nodes are
classified interior / boundary / exterior; interior nodes next to a curved
boundary carry shortened stencil arms that end on the circle (Shortley-Weller
style, first order at the boundary, second order inside).  Quadrature weights
are exact cell-clip areas, with the clipped area of non-interior cells folded
into the nearest interior node so the weights sum to the exact domain area.

Field arrays are indexed [i, j] with x = xs[i], y = ys[j].
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import TooCoarse

__all__ = ["Disk", "Rectangle", "DomainGrid", "build_grid"]

EXTERIOR, INTERIOR, BOUNDARY = 0, 1, 2

# direction order used everywhere: east, west, north, south
_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def diam(self):
        return 2.0 * self.radius

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        d2 = (pts[:, 0] - self.center[0]) ** 2 + (pts[:, 1] - self.center[1]) ** 2
        return d2 < self.radius**2

    def dist_to_boundary(self, pts):
        pts = np.atleast_2d(pts)
        r = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return self.radius - r

    def boundary_points(self, n):
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return np.column_stack(
            [
                self.center[0] + self.radius * np.cos(t),
                self.center[1] + self.radius * np.sin(t),
            ]
        )

    def project_to_boundary(self, pt):
        dx, dy = pt[0] - self.center[0], pt[1] - self.center[1]
        r = math.hypot(dx, dy)
        if r == 0.0:
            return (self.center[0] + self.radius, self.center[1])
        f = self.radius / r
        return (self.center[0] + dx * f, self.center[1] + dy * f)


@dataclass(frozen=True)
class Rectangle:
    x0: float
    y0: float
    x1: float
    y1: float

    def diam(self):
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        return (
            (pts[:, 0] > self.x0)
            & (pts[:, 0] < self.x1)
            & (pts[:, 1] > self.y0)
            & (pts[:, 1] < self.y1)
        )

    def dist_to_boundary(self, pts):
        pts = np.atleast_2d(pts)
        return np.min(
            np.column_stack(
                [
                    pts[:, 0] - self.x0,
                    self.x1 - pts[:, 0],
                    pts[:, 1] - self.y0,
                    self.y1 - pts[:, 1],
                ]
            ),
            axis=1,
        )

    def boundary_points(self, n):
        lx, ly = self.x1 - self.x0, self.y1 - self.y0
        per = 2 * (lx + ly)
        ts = np.linspace(0.0, per, n, endpoint=False)
        pts = np.empty((n, 2))
        for k, t in enumerate(ts):
            if t < lx:
                pts[k] = (self.x0 + t, self.y0)
            elif t < lx + ly:
                pts[k] = (self.x1, self.y0 + (t - lx))
            elif t < 2 * lx + ly:
                pts[k] = (self.x1 - (t - lx - ly), self.y1)
            else:
                pts[k] = (self.x0, self.y1 - (t - 2 * lx - ly))
        return pts

    def project_to_boundary(self, pt):
        x = min(max(pt[0], self.x0), self.x1)
        y = min(max(pt[1], self.y0), self.y1)
        dists = [x - self.x0, self.x1 - x, y - self.y0, self.y1 - y]
        side = int(np.argmin(dists))
        if side == 0:
            return (self.x0, y)
        if side == 1:
            return (self.x1, y)
        if side == 2:
            return (x, self.y0)
        return (x, self.y1)


def _phi_circle(x, a):
    """Antiderivative of sqrt(a^2 - x^2)."""
    x = min(max(x, -a), a)
    return 0.5 * (x * math.sqrt(max(a * a - x * x, 0.0)) + a * a * math.asin(x / a))


def circle_cell_area(cx, cy, a, x0, x1, y0, y1):
    """Exact area of the disk ((cx,cy), a) intersected with a cell."""
    x0, x1 = x0 - cx, x1 - cx
    y0, y1 = y0 - cy, y1 - cy
    x0 = max(x0, -a)
    x1 = min(x1, a)
    if x1 <= x0:
        return 0.0
    bps = {x0, x1}
    for y in (y0, y1):
        if abs(y) < a:
            xb = math.sqrt(a * a - y * y)
            for s in (-xb, xb):
                if x0 < s < x1:
                    bps.add(s)
    bps = sorted(bps)
    area = 0.0
    for xa, xb in zip(bps[:-1], bps[1:]):
        xm = 0.5 * (xa + xb)
        wm = math.sqrt(max(a * a - xm * xm, 0.0))
        top_const = y1 <= wm
        bot_const = y0 >= -wm
        top_m = y1 if top_const else wm
        bot_m = y0 if bot_const else -wm
        if top_m <= bot_m:
            continue
        dx = xb - xa
        dphi = _phi_circle(xb, a) - _phi_circle(xa, a)
        i_top = y1 * dx if top_const else dphi
        i_bot = y0 * dx if bot_const else -dphi
        area += i_top - i_bot
    return area


class DomainGrid:
    """Discretized bounded domain with node classification and quadrature.

    Attributes
    ----------
    shape : Disk or Rectangle
    spacing : float
        Effective grid step (identical in x and y).
    xs, ys : ndarray
        Node coordinates along each axis.
    status : ndarray (nx, ny) int8
        0 exterior, 1 interior (unknown), 2 boundary (Dirichlet node).
    quad_weights : ndarray (nx, ny)
        Quadrature weights; nonzero only at interior nodes, summing to the
        exact domain area.
    R_enclosing : float
        2 * diam(shape); every translate ball condition holds strictly.
    """

    def __init__(self, shape, spacing):
        self.shape = shape
        self.R_enclosing = 2.0 * shape.diam()
        self._build_nodes(shape, spacing)
        self._classify(shape)
        self._index()
        self._arms(shape)
        self._quadrature(shape)
        for arr in (
            self.xs,
            self.ys,
            self.status,
            self.index_map,
            self.quad_weights,
            self.arm_len,
            self.nbr_kind,
            self.nbr_idx,
            self.dirichlet_xy,
        ):
            arr.setflags(write=False)

    # -- construction -------------------------------------------------

    def _build_nodes(self, shape, h):
        if isinstance(shape, Rectangle):
            lx, ly = shape.x1 - shape.x0, shape.y1 - shape.y0
            nxf, nyf = lx / h, ly / h
            nx, ny = int(round(nxf)), int(round(nyf))
            if abs(nxf - nx) > 1e-8 * max(1.0, nxf) or abs(nyf - ny) > 1e-8 * max(
                1.0, nyf
            ):
                raise ValueError("spacing does not divide rectangle extents")
            if min(nx, ny) < 15:
                raise TooCoarse("fewer than 16 nodes across a rectangle side")
            self.xs = shape.x0 + np.arange(nx + 1) * (lx / nx)
            self.ys = shape.y0 + np.arange(ny + 1) * (ly / ny)
            self.spacing = lx / nx
        elif isinstance(shape, Disk):
            a = shape.radius
            n = int(round(2.0 * a / h))
            if n < 15:
                raise TooCoarse("fewer than 16 nodes across the disk diameter")
            heff = 2.0 * a / n
            offs = (np.arange(n + 1) - n / 2.0) * heff
            self.xs = shape.center[0] + offs
            self.ys = shape.center[1] + offs
            self.spacing = heff
        else:
            raise TypeError(f"unsupported shape {type(shape).__name__}")
        self.nx, self.ny = len(self.xs), len(self.ys)
        self.X, self.Y = np.meshgrid(self.xs, self.ys, indexing="ij")

    def _classify(self, shape):
        st = np.full((self.nx, self.ny), EXTERIOR, dtype=np.int8)
        if isinstance(shape, Rectangle):
            st[1:-1, 1:-1] = INTERIOR
            st[0, :] = st[-1, :] = BOUNDARY
            st[:, 0] = st[:, -1] = BOUNDARY
        else:
            a = shape.radius
            snap = 1e-6 * a
            rr = np.hypot(self.X - shape.center[0], self.Y - shape.center[1])
            st[rr < a - snap] = INTERIOR
            st[np.abs(rr - a) <= snap] = BOUNDARY
        self.status = st

    def _index(self):
        self.index_map = np.full((self.nx, self.ny), -1, dtype=np.int64)
        ii, jj = np.nonzero(self.status == INTERIOR)
        self.n_interior = len(ii)
        self.index_map[ii, jj] = np.arange(self.n_interior)
        self.interior_i = ii
        self.interior_j = jj
        bi, bj = np.nonzero(self.status == BOUNDARY)
        self.boundary_i = bi
        self.boundary_j = bj

    def _arms(self, shape):
        """Stencil arms and Dirichlet couplings for every interior node."""
        n = self.n_interior
        arm = np.ones((n, 4))
        kind = np.zeros((n, 4), dtype=np.int8)
        nidx = np.full((n, 4), -1, dtype=np.int64)

        d_points = []
        d_index = {}

        def dirichlet_id(key, xy):
            if key not in d_index:
                d_index[key] = len(d_points)
                d_points.append(xy)
            return d_index[key]

        is_disk = isinstance(shape, Disk)
        if is_disk:
            cx, cy = shape.center
            a = shape.radius
        h = self.spacing

        # boundary nodes first so their ids are stable per node
        for bi, bj in zip(self.boundary_i, self.boundary_j):
            xy = (self.xs[bi], self.ys[bj])
            if is_disk:
                xy = shape.project_to_boundary(xy)
            dirichlet_id(("n", bi, bj), xy)

        for k in range(n):
            i, j = self.interior_i[k], self.interior_j[k]
            for d, (di, dj) in enumerate(_DIRS):
                ii, jj = i + di, j + dj
                stn = (
                    self.status[ii, jj]
                    if 0 <= ii < self.nx and 0 <= jj < self.ny
                    else EXTERIOR
                )
                if stn == INTERIOR:
                    nidx[k, d] = self.index_map[ii, jj]
                elif stn == BOUNDARY:
                    kind[k, d] = 1
                    nidx[k, d] = d_index[("n", ii, jj)]
                else:
                    if not is_disk:
                        raise AssertionError("rectangle interior node at edge")
                    # shorten the arm to the circle crossing
                    px, py = self.xs[i] - cx, self.ys[j] - cy
                    e = px * di + py * dj
                    disc = e * e - (px * px + py * py - a * a)
                    theta = (-e + math.sqrt(max(disc, 0.0))) / h
                    theta = min(max(theta, 1e-6), 1.0)
                    arm[k, d] = theta
                    xy = (
                        self.xs[i] + theta * h * di,
                        self.ys[j] + theta * h * dj,
                    )
                    kind[k, d] = 1
                    nidx[k, d] = dirichlet_id(("c", k, d), xy)

        self.arm_len = arm
        self.nbr_kind = kind
        self.nbr_idx = nidx
        self.dirichlet_xy = np.array(d_points) if d_points else np.zeros((0, 2))
        self._boundary_node_dirichlet = {
            ("n", bi, bj): d_index[("n", bi, bj)]
            for bi, bj in zip(self.boundary_i, self.boundary_j)
        }

    def _quadrature(self, shape):
        h = self.spacing
        w = np.zeros((self.nx, self.ny))
        if isinstance(shape, Rectangle):
            wx = np.minimum(self.xs + h / 2, shape.x1) - np.maximum(
                self.xs - h / 2, shape.x0
            )
            wy = np.minimum(self.ys + h / 2, shape.y1) - np.maximum(
                self.ys - h / 2, shape.y0
            )
            w = np.outer(np.clip(wx, 0, None), np.clip(wy, 0, None))
            area = (shape.x1 - shape.x0) * (shape.y1 - shape.y0)
        else:
            cx, cy = shape.center
            a = shape.radius
            rr = np.hypot(self.X - cx, self.Y - cy)
            half_diag = h * math.sqrt(0.5)
            inside = rr <= a - half_diag - 1e-12
            outside = rr >= a + half_diag + 1e-12
            w[inside] = h * h
            ii, jj = np.nonzero(~inside & ~outside)
            for i, j in zip(ii, jj):
                w[i, j] = circle_cell_area(
                    cx,
                    cy,
                    a,
                    self.xs[i] - h / 2,
                    self.xs[i] + h / 2,
                    self.ys[j] - h / 2,
                    self.ys[j] + h / 2,
                )
            area = math.pi * a * a

        # fold non-interior cell mass into the nearest interior node
        interior = self.status == INTERIOR
        dropped = 0.0
        ii, jj = np.nonzero((~interior) & (w > 0))
        for i, j in zip(ii, jj):
            best = None
            for ring in (1, 2, 3):
                for di in range(-ring, ring + 1):
                    for dj in range(-ring, ring + 1):
                        if max(abs(di), abs(dj)) != ring:
                            continue
                        a_, b_ = i + di, j + dj
                        if 0 <= a_ < self.nx and 0 <= b_ < self.ny and interior[a_, b_]:
                            d2 = di * di + dj * dj
                            cand = (d2, a_, b_)
                            if best is None or cand < best:
                                best = cand
                if best is not None:
                    break
            if best is None:
                dropped += w[i, j]
            else:
                w[best[1], best[2]] += w[i, j]
            w[i, j] = 0.0
        self.quad_weight_dropped = dropped
        self.quad_weights = w
        self.area_exact = area

    # -- field helpers ------------------------------------------------

    @property
    def active_mask(self):
        return self.status != EXTERIOR

    @property
    def interior_mask(self):
        return self.status == INTERIOR

    def regular_interior_mask(self):
        """Interior nodes with four full-length arms (centered stencils valid)."""
        mask = np.zeros((self.nx, self.ny), dtype=bool)
        full = np.all(self.arm_len == 1.0, axis=1)
        mask[self.interior_i[full], self.interior_j[full]] = True
        return mask

    def field_to_vector(self, field):
        return np.ascontiguousarray(field[self.interior_i, self.interior_j])

    def vector_to_field(self, vec, fill=0.0, boundary_values=None):
        out = np.full((self.nx, self.ny), fill, dtype=float)
        out[self.interior_i, self.interior_j] = vec
        if boundary_values is not None:
            out[self.boundary_i, self.boundary_j] = boundary_values
        return out

    def boundary_dirichlet_ids(self):
        """Dirichlet-point ids of the boundary nodes, in (boundary_i, boundary_j) order."""
        return np.array(
            [
                self._boundary_node_dirichlet[("n", bi, bj)]
                for bi, bj in zip(self.boundary_i, self.boundary_j)
            ],
            dtype=np.int64,
        )

    def interp(self, field, pts):
        """Bilinear interpolation of a full-grid field at points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        h = self.spacing
        ix = np.clip(((pts[:, 0] - self.xs[0]) / h).astype(int), 0, self.nx - 2)
        iy = np.clip(((pts[:, 1] - self.ys[0]) / h).astype(int), 0, self.ny - 2)
        fx = (pts[:, 0] - self.xs[ix]) / h
        fy = (pts[:, 1] - self.ys[iy]) / h
        f00 = field[ix, iy]
        f10 = field[ix + 1, iy]
        f01 = field[ix, iy + 1]
        f11 = field[ix + 1, iy + 1]
        vals = (
            (1 - fx) * (1 - fy) * f00
            + fx * (1 - fy) * f10
            + (1 - fx) * fy * f01
            + fx * fy * f11
        )
        return vals if vals.size > 1 else float(vals[0])

    def interior_points(self):
        return np.column_stack(
            [self.xs[self.interior_i], self.ys[self.interior_j]]
        )

    def dist_to_boundary(self, pts):
        return self.shape.dist_to_boundary(pts)

    def contains(self, pts):
        return self.shape.contains(pts)

    def diam(self):
        return self.shape.diam()


def build_grid(shape, spacing):
    """Discretize a shape; R_enclosing is fixed to 2 * diam for reproducibility."""
    return DomainGrid(shape, spacing)
