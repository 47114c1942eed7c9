"""Divergence-form elliptic operators on a DomainGrid and linear solves.

Assembles -div(kappa grad u) as a sparse matrix over interior unknowns with
harmonic face averaging of kappa, Shortley-Weller shortened arms at curved
boundaries, and a separate coupling matrix carrying Dirichlet data into the
right-hand side.  The same kernel backs the Green-function solves and the
nonlinear PDE solves; linear systems go to a cached direct factorization
below a size threshold and to a preconditioned Krylov solver above it.
"""

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu, spilu, cg, bicgstab, LinearOperator

from .errors import NoConvergence

__all__ = ["DivFormOperator", "assemble_divform", "LinearKernel", "centered_gradient"]

DIRECT_THRESHOLD = 100_000


class LinearKernel:
    """Solves A x = b; direct sparse LU below the threshold, ILU-BiCGStab above.

    The iterative branch falls back to CG when the matrix is flagged
    symmetric positive definite and to a direct factorization if the Krylov
    iteration stalls.  All paths are deterministic.
    """

    def __init__(self, A, direct_threshold=DIRECT_THRESHOLD, assume_spd=False):
        self.A = A.tocsc()
        self.n = A.shape[0]
        self.assume_spd = assume_spd
        self.direct = self.n <= direct_threshold
        self._lu = None
        self._ilu = None
        if self.direct:
            self._lu = splu(self.A)

    def _precond(self):
        if self._ilu is None:
            self._ilu = spilu(self.A, drop_tol=1e-5, fill_factor=12)
        return LinearOperator(self.A.shape, self._ilu.solve)

    def solve(self, rhs, tol=1e-12):
        if self.direct:
            return self._lu.solve(rhs)
        M = self._precond()
        method = cg if self.assume_spd else bicgstab
        x, info = method(self.A, rhs, rtol=tol, atol=0.0, M=M, maxiter=2000)
        if info != 0:
            # shifted/indefinite or stalled: fall back to a direct factorization
            if self._lu is None:
                self._lu = splu(self.A)
            x = self._lu.solve(rhs)
        res = np.linalg.norm(self.A @ x - rhs)
        scale = np.linalg.norm(rhs)
        if scale > 0 and res > 1e-8 * scale:
            raise NoConvergence(f"linear solve residual {res / scale:.2e}")
        return x


class DivFormOperator:
    """Sparse form of -div(kappa grad .) plus the Dirichlet-data coupling.

    For interior unknowns u and Dirichlet values g at the grid's Dirichlet
    points, the discrete equation -div(kappa grad u) = f reads

        A u = f + B g.
    """

    def __init__(self, grid, A, B, kappa_node):
        self.grid = grid
        self.A = A
        self.B = B
        self.kappa_node = kappa_node
        self._kernel = None

    def kernel(self, assume_spd=True, direct_threshold=DIRECT_THRESHOLD):
        if self._kernel is None:
            self._kernel = LinearKernel(
                self.A, direct_threshold=direct_threshold, assume_spd=assume_spd
            )
        return self._kernel

    def dirichlet_values(self, func):
        """Evaluate boundary data at every Dirichlet point."""
        xy = self.grid.dirichlet_xy
        if xy.shape[0] == 0:
            return np.zeros(0)
        return np.asarray(func(xy[:, 0], xy[:, 1]), dtype=float)

    def apply(self, u_vec, g_vec=None):
        out = self.A @ u_vec
        if g_vec is not None and self.B.shape[1]:
            out = out - self.B @ g_vec
        return out

    def solve(self, f_vec, g_vec=None, tol=1e-12):
        rhs = np.asarray(f_vec, dtype=float).copy()
        if g_vec is not None and self.B.shape[1]:
            rhs = rhs + self.B @ g_vec
        return self.kernel().solve(rhs, tol=tol)


def assemble_divform(grid, kappa, kappa_func=None):
    """Assemble -div(kappa grad .) over interior unknowns.

    Parameters
    ----------
    grid : DomainGrid
    kappa : ndarray (nx, ny)
        Nodal coefficient values (only active nodes need be valid).
    kappa_func : callable, optional
        kappa(x, y) used at cut-arm crossing points; defaults to the value
        at the owning node (first order at the boundary).
    """
    h = grid.spacing
    n = grid.n_interior
    kin = kappa[grid.interior_i, grid.interior_j]

    rows, cols, vals = [], [], []
    brows, bcols, bvals = [], [], []
    diag = np.zeros(n)

    arm = grid.arm_len
    kind = grid.nbr_kind
    nidx = grid.nbr_idx
    d_xy = grid.dirichlet_xy

    # kappa at the far end of each arm
    kfar = np.empty((n, 4))
    for d in range(4):
        interior_nb = kind[:, d] == 0
        kfar[interior_nb, d] = kin[nidx[interior_nb, d]]
        dir_nb = ~interior_nb
        if np.any(dir_nb):
            ids = nidx[dir_nb, d]
            if kappa_func is not None:
                kfar[dir_nb, d] = kappa_func(d_xy[ids, 0], d_xy[ids, 1])
            else:
                # boundary nodes carry nodal kappa; crossings fall back to
                # the owning node's value
                xb, yb = d_xy[ids, 0], d_xy[ids, 1]
                ib = np.clip(
                    np.round((xb - grid.xs[0]) / h).astype(int), 0, grid.nx - 1
                )
                jb = np.clip(
                    np.round((yb - grid.ys[0]) / h).astype(int), 0, grid.ny - 1
                )
                knode = np.asarray(kappa[ib, jb], dtype=float)
                bad = ~np.isfinite(knode)
                if np.any(bad):
                    knode[bad] = kin[np.nonzero(dir_nb)[0][bad]]
                kfar[dir_nb, d] = knode

    kface = 2.0 * kin[:, None] * kfar / (kin[:, None] + kfar)

    # x pair (E, W) shares the transverse cell width, same for y pair (N, S)
    for pair in ((0, 1), (2, 3)):
        havg = 0.5 * (arm[:, pair[0]] + arm[:, pair[1]]) * h
        for d in pair:
            c = kface[:, d] / (arm[:, d] * h * havg)
            diag += c
            interior_nb = kind[:, d] == 0
            rows.append(np.nonzero(interior_nb)[0])
            cols.append(nidx[interior_nb, d])
            vals.append(-c[interior_nb])
            dir_nb = np.nonzero(~interior_nb)[0]
            brows.append(dir_nb)
            bcols.append(nidx[dir_nb, d])
            bvals.append(c[dir_nb])

    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)

    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    n_d = d_xy.shape[0]
    B = sp.coo_matrix(
        (np.concatenate(bvals), (np.concatenate(brows), np.concatenate(bcols))),
        shape=(n, max(n_d, 0)),
    ).tocsr()
    return DivFormOperator(grid, A, B, kappa)


def centered_gradient(grid, field):
    """Centered-difference gradient on regular interior nodes (NaN elsewhere)."""
    h = grid.spacing
    gx = np.full_like(field, np.nan)
    gy = np.full_like(field, np.nan)
    gx[1:-1, :] = (field[2:, :] - field[:-2, :]) / (2 * h)
    gy[:, 1:-1] = (field[:, 2:] - field[:, :-2]) / (2 * h)
    mask = grid.regular_interior_mask()
    gx[~mask] = np.nan
    gy[~mask] = np.nan
    return gx, gy
