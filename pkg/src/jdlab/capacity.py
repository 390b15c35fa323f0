"""Equilibrium potentials, capacities, and truncated Green functions.

cap(K, B) is the minimum of the energy form over functions that are 1 on K
and 0 outside the open ball B; its decay along an exhausting sequence of
balls is the computable recurrence certificate. Systems are graph-Laplacian
like: solved directly below DIRECT_LIMIT unknowns, otherwise by
Jacobi-preconditioned conjugate gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .forms import JumpKernel, LocalPart, energy as form_energy, form_matrix
from .space import DiscreteMMSpace

DIRECT_LIMIT = 2000
CG_TOL = 1e-10
DEFAULT_DECAY_RATIO = 0.05


class SolverFailure(RuntimeError):
    """Iterative solve did not reach the requested residual."""


@dataclass
class PotentialSolve:
    """Equilibrium potential u for (K, B) with its energy and solve residual."""

    inner: np.ndarray  # K point indices
    ball: np.ndarray  # boolean mask of the open ball B
    u: np.ndarray
    energy: float
    residual: float
    warnings: list[str] = field(default_factory=list)


def _solve_spd(a: sp.csr_matrix, b: np.ndarray) -> tuple[np.ndarray, float]:
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), 0.0
    if n < DIRECT_LIMIT:
        dense_frac = a.nnz / max(n * n, 1)
        if dense_frac > 0.25:
            x = np.linalg.solve(a.toarray(), b)
        else:
            x = spla.spsolve(a.tocsc(), b)
    else:
        diag = a.diagonal()
        inv = np.where(diag > 0, 1.0 / diag, 1.0)
        precond = spla.LinearOperator(a.shape, matvec=lambda v: inv * v)
        maxiter = int(50 * np.sqrt(n) + 1000)
        x, info = spla.cg(a, b, rtol=CG_TOL, atol=0.0, maxiter=maxiter, M=precond)
        if info != 0:
            raise SolverFailure(f"conjugate gradients stopped with info={info} at size {n}")
    res = float(np.linalg.norm(a @ x - b) / (np.linalg.norm(b) + 1e-300))
    return x, res


def _dead_components(a_ff: sp.csr_matrix, coupled: np.ndarray) -> np.ndarray:
    """Flag free nodes in components with no coupling to clamped data."""
    n = a_ff.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    off = a_ff.copy()
    off.setdiag(0.0)
    off.eliminate_zeros()
    n_comp, labels = connected_components(abs(off) > 0, directed=False)
    dead = np.zeros(n, dtype=bool)
    for c in range(n_comp):
        members = labels == c
        if not coupled[members].any():
            dead[members] = True
    return dead


def equilibrium_potential(
    space: DiscreteMMSpace,
    kernel: Optional[JumpKernel],
    local: Optional[LocalPart],
    inner: Sequence[int],
    ball_mask: np.ndarray,
) -> PotentialSolve:
    """Minimize E[v] over {v : v = 1 on K, v = 0 outside the open ball B}.

    Equivalent to the discrete Dirichlet problem on B \\ K; the minimum is
    cap(K, B), evaluated independently through the energy form.
    """
    inner = np.asarray(inner, dtype=np.int64)
    ball_mask = np.asarray(ball_mask, dtype=bool)
    if inner.size == 0:
        raise ValueError("inner set K must be nonempty")
    if not ball_mask[inner].all():
        raise ValueError("K must be contained in B")
    free = ball_mask.copy()
    free[inner] = False
    warnings: list[str] = []
    n = space.n_points
    u = np.zeros(n)
    u[inner] = 1.0
    free_idx = np.flatnonzero(free)
    if free_idx.size == 0:
        warnings.append("B \\ K is empty: potential is the indicator of K")
        e = form_energy(space, kernel, local, u)
        return PotentialSolve(inner, ball_mask, u, e, 0.0, warnings)

    g = form_matrix(space, kernel, local)
    a_ff = g[free_idx][:, free_idx].tocsr()
    b = -np.asarray(g[free_idx][:, inner].sum(axis=1)).reshape(-1)

    # nodes whose row couples to any clamped value (K or the grounded exterior)
    clamped = ~free
    coupled = np.zeros(free_idx.size, dtype=bool)
    g_free_rows = g[free_idx].tocsr()
    for k in range(free_idx.size):
        lo, hi = g_free_rows.indptr[k], g_free_rows.indptr[k + 1]
        cols = g_free_rows.indices[lo:hi]
        vals = g_free_rows.data[lo:hi]
        coupled[k] = bool(np.any(clamped[cols] & (vals != 0)))
    dead = _dead_components(a_ff, coupled)
    if dead.any():
        warnings.append(
            f"{int(dead.sum())} free points lie in components touching neither K nor the "
            "ball boundary; their potential is set to 0"
        )
        live = ~dead
        a_live = a_ff[live][:, live].tocsr()
        x_live, res = _solve_spd(a_live, b[live])
        x = np.zeros(free_idx.size)
        x[live] = x_live
    else:
        x, res = _solve_spd(a_ff, b)
    u[free_idx] = x
    e = form_energy(space, kernel, local, u)
    return PotentialSolve(inner, ball_mask, u, e, res, warnings)


@dataclass
class CapacityReport:
    radii: list[float]
    capacities: list[float]
    certificate: bool
    decay_ratio: float
    residuals: list[float]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "radii": self.radii,
            "capacities": self.capacities,
            "certificate": self.certificate,
            "decay_ratio": self.decay_ratio,
            "residuals": self.residuals,
            "warnings": self.warnings,
        }


def capacity_scan(
    space: DiscreteMMSpace,
    kernel: Optional[JumpKernel],
    local: Optional[LocalPart],
    inner: Sequence[int],
    radii: Sequence[float],
    center: Optional[int] = None,
    decay_ratio: float = DEFAULT_DECAY_RATIO,
) -> CapacityReport:
    """cap(K, B(center, R)) over increasing R; raises the recurrence
    certificate when the tail has decayed below ``decay_ratio`` times the
    first value and is still decreasing.
    """
    inner = np.asarray(inner, dtype=np.int64)
    radii = sorted(float(r) for r in radii)
    if center is None:
        center = int(inner[0])
    dist = space.distances_from(center)
    caps, residuals, warnings = [], [], []
    for r in radii:
        mask = dist < r
        if not mask[inner].all():
            raise ValueError(f"K is not inside the open ball of radius {r}")
        solve = equilibrium_potential(space, kernel, local, inner, mask)
        caps.append(solve.energy)
        residuals.append(solve.residual)
        warnings.extend(solve.warnings)
    certificate = False
    if len(caps) >= 2 and caps[0] > 0:
        decayed = caps[-1] <= decay_ratio * caps[0]
        decreasing = caps[-1] < caps[-2] * (1 - 1e-9) or caps[-1] == 0.0
        certificate = bool(decayed and decreasing)
    return CapacityReport([float(r) for r in radii], caps, certificate, decay_ratio, residuals, warnings)


def green_growth(
    space: DiscreteMMSpace,
    kernel: Optional[JumpKernel],
    local: Optional[LocalPart],
    f: np.ndarray,
    x0: int,
    radii: Sequence[float],
    center: Optional[int] = None,
) -> np.ndarray:
    """Truncated Green potentials u_R(x0) with L u = -f on B(center, R), u = 0 outside.

    Divergence of the sequence is evidence of recurrence, boundedness of
    transience.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f < 0) or not np.any(f > 0):
        raise ValueError("f must be nonnegative and not identically zero")
    if center is None:
        center = int(x0)
    g = form_matrix(space, kernel, local)
    dist = space.distances_from(center)
    rhs_full = f * space.measure
    out = []
    for r in sorted(float(r) for r in radii):
        free_idx = np.flatnonzero(dist < r)
        if free_idx.size == 0:
            out.append(0.0)
            continue
        a_ff = g[free_idx][:, free_idx].tocsr()
        zero_rows = np.asarray(abs(a_ff).sum(axis=1)).reshape(-1) == 0
        u = np.zeros(space.n_points)
        if zero_rows.any():
            live = ~zero_rows
            x, _ = _solve_spd(a_ff[live][:, live].tocsr(), rhs_full[free_idx][live])
            vals = np.zeros(free_idx.size)
            vals[live] = x
        else:
            vals, _ = _solve_spd(a_ff, rhs_full[free_idx])
        u[free_idx] = vals
        out.append(float(u[x0]))
    return np.asarray(out)
