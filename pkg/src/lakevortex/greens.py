"""Dirichlet Green data: harmonic fields h(x,z), g(x,z), Robin values, and
pair interactions Gbar on a DomainGrid.

For each source z strictly inside the domain, h(., z) solves the discrete
Laplace problem with boundary values ln(1/|x-z|)/(2 pi); then

    g(x, z)    = ln(R) + 2 pi h(x, z),
    Gbar(x, z) = ln(R / |x - z|) - g(x, z),

with R the grid's enclosing-ball constant.  One Laplace factorization is
shared by all sources; per-source solves are independent and may run on a
thread pool.  Computed entries are immutable; new sources can be added
lazily under a lock.
"""

from concurrent.futures import ThreadPoolExecutor
import math
import threading

import numpy as np

from .errors import SourceNearBoundary
from .operators import assemble_divform

__all__ = ["GreenCache", "compute_green"]

_KEY_DECIMALS = 12


def _key(z):
    return (round(float(z[0]), _KEY_DECIMALS), round(float(z[1]), _KEY_DECIMALS))


class GreenEntry:
    """Fields attached to one source point."""

    __slots__ = ("z", "h_field", "g_field", "robin", "grad_g")

    def __init__(self, z, h_field, g_field, robin, grad_g):
        self.z = z
        self.h_field = h_field
        self.g_field = g_field
        self.robin = robin
        self.grad_g = grad_g


class GreenCache:
    """Per-source Green data with lazy extension."""

    def __init__(self, grid, max_workers=None):
        self.grid = grid
        self.R = grid.R_enclosing
        self._op = assemble_divform(grid, np.ones((grid.nx, grid.ny)))
        self._op.kernel(assume_spd=True)
        self._entries = {}
        self._lock = threading.Lock()
        self._max_workers = max_workers

    @property
    def sources(self):
        return [e.z for e in self._entries.values()]

    def _check_source(self, z):
        d = float(self.grid.dist_to_boundary(np.array([z]))[0])
        if d < 2.0 * self.grid.spacing:
            raise SourceNearBoundary(
                f"source {z} at distance {d:.3g} from the boundary; "
                f"need at least 2h = {2 * self.grid.spacing:.3g}"
            )

    def _solve_one(self, z):
        grid = self.grid
        zx, zy = z

        def bdata(x, y):
            return np.log(1.0 / np.hypot(x - zx, y - zy)) / (2.0 * math.pi)

        g_vec = self._op.dirichlet_values(bdata)
        h_int = self._op.solve(np.zeros(grid.n_interior), g_vec)
        b_ids = grid.boundary_dirichlet_ids()
        b_vals = g_vec[b_ids] if b_ids.size else None
        h_field = grid.vector_to_field(h_int, fill=np.nan, boundary_values=b_vals)
        g_field = math.log(self.R) + 2.0 * math.pi * h_field
        robin = float(grid.interp(np.nan_to_num(g_field), np.array([z])))
        gx = np.full_like(g_field, np.nan)
        gy = np.full_like(g_field, np.nan)
        h = grid.spacing
        gx[1:-1, :] = (g_field[2:, :] - g_field[:-2, :]) / (2 * h)
        gy[:, 1:-1] = (g_field[:, 2:] - g_field[:, :-2]) / (2 * h)
        for arr in (h_field, g_field, gx, gy):
            arr.setflags(write=False)
        return GreenEntry((zx, zy), h_field, g_field, robin, (gx, gy))

    def ensure(self, sources):
        """Compute entries for any sources not yet cached."""
        todo = []
        with self._lock:
            for z in sources:
                k = _key(z)
                if k not in self._entries:
                    self._check_source(z)
                    todo.append((k, (float(z[0]), float(z[1]))))
        if not todo:
            return self
        if self._max_workers and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self._max_workers) as pool:
                results = list(pool.map(lambda kz: self._solve_one(kz[1]), todo))
        else:
            results = [self._solve_one(z) for _, z in todo]
        with self._lock:
            for (k, _), entry in zip(todo, results):
                self._entries.setdefault(k, entry)
        return self

    def entry(self, z):
        k = _key(z)
        if k not in self._entries:
            self.ensure([z])
        return self._entries[k]

    # -- accessors ------------------------------------------------------

    def g_field(self, z):
        return self.entry(z).g_field

    def h_field(self, z):
        return self.entry(z).h_field

    def robin(self, z):
        return self.entry(z).robin

    def g_at(self, x, z):
        """g(x, z) interpolated at a point x for source z."""
        field = np.nan_to_num(self.entry(z).g_field)
        return float(self.grid.interp(field, np.array([x])))

    def gbar(self, x, z):
        """Gbar(x, z) = ln(R/|x-z|) - g(x, z)."""
        r = math.hypot(x[0] - z[0], x[1] - z[1])
        if r == 0.0:
            raise ValueError("Gbar requires x != z")
        return math.log(self.R / r) - self.g_at(x, z)

    def interaction_matrix(self, sources):
        """Gbar(z_i, z_j) for all pairs (diagonal zero)."""
        self.ensure(sources)
        m = len(sources)
        out = np.zeros((m, m))
        for i in range(m):
            for j in range(m):
                if i != j:
                    out[i, j] = self.gbar(sources[i], sources[j])
        return out


def compute_green(grid, sources, max_workers=None):
    """Build a GreenCache holding the given sources."""
    cache = GreenCache(grid, max_workers=max_workers)
    cache.ensure(sources)
    return cache
