"""Periodic finite-difference operators on cell-centered fields.

Scalars are ``(ny, nx)`` arrays and vectors ``(dim, ny, nx)``; axis 1 is x and
axis 0 is y. On 1D grids (``ny == 1``) every y-derivative is zero.

Several stencils have a ``verbatim`` switch. The default is the consistent
discretization; ``verbatim=True`` reproduces the literal published stencil,
which is kept for fidelity comparisons only.
"""

from __future__ import annotations

import numpy as np

from .eos import DomainError
from .grid import Grid


def shift(f: np.ndarray, di: int = 0, dj: int = 0) -> np.ndarray:
    """Field whose value at (i, j) is ``f[j + dj, i + di]`` (periodic)."""
    if di:
        f = np.roll(f, -di, axis=-1)
    if dj:
        f = np.roll(f, -dj, axis=-2)
    return f


def _is_1d(f: np.ndarray) -> bool:
    return f.shape[-2] == 1


def _positive(name, f):
    if np.any(f <= 0.0):
        raise DomainError(f"{name} must be positive everywhere")


def ddx(f: np.ndarray, grid: Grid) -> np.ndarray:
    return (shift(f, 1) - shift(f, -1)) / (2.0 * grid.dx)


def ddy(f: np.ndarray, grid: Grid) -> np.ndarray:
    if grid.dim == 1 or _is_1d(f):
        return np.zeros_like(f)
    return (shift(f, 0, 1) - shift(f, 0, -1)) / (2.0 * grid.dy)


def velocity_gradient(u: np.ndarray, grid: Grid):
    """Centered (D_x u^x, D_y u^x, D_x u^y, D_y u^y); y-velocity terms are 0 in 1D."""
    uxx = ddx(u[0], grid)
    if grid.dim == 1:
        z = np.zeros_like(uxx)
        return uxx, z, z, z
    return uxx, ddy(u[0], grid), ddx(u[1], grid), ddy(u[1], grid)


def div_sq(u: np.ndarray, grid: Grid) -> np.ndarray:
    uxx, _, _, uyy = velocity_gradient(u, grid)
    return (uxx + uyy) ** 2


def tr_grad_u_sq(u: np.ndarray, grid: Grid) -> np.ndarray:
    uxx, uxy, uyx, uyy = velocity_gradient(u, grid)
    return uxx**2 + 2.0 * uyx * uxy + uyy**2


def div_pi(u: np.ndarray, pi: np.ndarray, grid: Grid, verbatim: bool = False) -> np.ndarray:
    """Entropy-weighted divergence pi^-1 div(pi u).

    Default: conservative face form with face-averaged pi and u,
    ``(pibar_{i+1/2} ubar_{i+1/2} - pibar_{i-1/2} ubar_{i-1/2}) / dx``.
    ``verbatim`` uses neighbour velocities ``u_{i+-1}`` with a 1/dx prefactor,
    which tends to ``2 div u + u . grad log pi`` rather than the target.
    """
    _positive("entropy density", pi)
    out = np.zeros_like(pi)
    axes = [(0, grid.dx, 1, 0)]
    if grid.dim == 2:
        axes.append((1, grid.dy, 0, 1))
    for comp, h, di, dj in axes:
        uc = u[comp]
        pi_p = 0.5 * (pi + shift(pi, di, dj))
        pi_m = 0.5 * (pi + shift(pi, -di, -dj))
        if verbatim:
            out += (pi_p * shift(uc, di, dj) - pi_m * shift(uc, -di, -dj)) / h
        else:
            u_p = 0.5 * (uc + shift(uc, di, dj))
            u_m = 0.5 * (uc + shift(uc, -di, -dj))
            out += (pi_p * u_p - pi_m * u_m) / h
    return out / pi


def hessian_log_pi_uu(pi: np.ndarray, u: np.ndarray, grid: Grid) -> np.ndarray:
    """u . Hess(log pi) . u with 3-point second differences.

    The mixed term is ``u^x u^y (4-point cross difference) / (2 dx dy)``, which
    equals ``2 u^x u^y d_xy log pi`` to second order.
    """
    _positive("entropy density", pi)
    lp = np.log(pi)
    ux = u[0]
    dxx = (shift(lp, 1) - 2.0 * lp + shift(lp, -1)) / grid.dx**2
    out = ux * ux * dxx
    if grid.dim == 2:
        uy = u[1]
        dyy = (shift(lp, 0, 1) - 2.0 * lp + shift(lp, 0, -1)) / grid.dy**2
        cross = (shift(lp, 1, 1) - shift(lp, -1, 1) - shift(lp, 1, -1) + shift(lp, -1, -1)) / (
            2.0 * grid.dx * grid.dy
        )
        out = out + ux * uy * cross + uy * uy * dyy
    return out


class FaceWeights:
    """Face-averaged coefficients ``g_{i+-1/2,j}``, ``g_{i,j+-1/2}`` for one weight field."""

    def __init__(self, g: np.ndarray, grid: Grid):
        _positive("weight", g)
        self.grid = grid
        self.east = 0.5 * (g + shift(g, 1))
        self.west = shift(self.east, -1)
        if grid.dim == 2:
            self.north = 0.5 * (g + shift(g, 0, 1))
            self.south = shift(self.north, 0, -1)

    def coefficients(self) -> np.ndarray:
        """Per-neighbour couplings ``(nnb, ny, nx)`` in E, W, N, S order."""
        c = [self.east / self.grid.dx**2, self.west / self.grid.dx**2]
        if self.grid.dim == 2:
            c += [self.north / self.grid.dy**2, self.south / self.grid.dy**2]
        return np.stack(c)

    def diagonal(self) -> np.ndarray:
        """Magnitude of the centre coefficient of ``div(g grad .)``."""
        d = (self.east + self.west) / self.grid.dx**2
        if self.grid.dim == 2:
            d = d + (self.north + self.south) / self.grid.dy**2
        return d

    def neighbours(self, f: np.ndarray) -> np.ndarray:
        """Off-centre part of ``div(g grad f)``."""
        out = (self.east * shift(f, 1) + self.west * shift(f, -1)) / self.grid.dx**2
        if self.grid.dim == 2:
            out = out + (self.north * shift(f, 0, 1) + self.south * shift(f, 0, -1)) / self.grid.dy**2
        return out

    def apply(self, f: np.ndarray) -> np.ndarray:
        # flux-difference form: constants map to exactly zero
        fe = self.east * (shift(f, 1) - f)
        out = (fe - shift(fe, -1)) / self.grid.dx**2
        if self.grid.dim == 2:
            fn = self.north * (shift(f, 0, 1) - f)
            out = out + (fn - shift(fn, 0, -1)) / self.grid.dy**2
        return out


def weighted_div(g: np.ndarray, f: np.ndarray, grid: Grid, verbatim: bool = False) -> np.ndarray:
    """Discrete div(g grad f) with face-averaged coefficients.

    Default is the conservative flux difference
    ``[gbar_{i+1/2}(f_{i+1}-f_i) - gbar_{i-1/2}(f_i-f_{i-1})] / dx^2`` (+ y).
    ``verbatim`` sums the two face terms with a ``1/(2 dx^2)`` prefactor instead.
    """
    w = FaceWeights(g, grid)
    if not verbatim:
        return w.apply(f)
    out = (w.east * (shift(f, 1) - f) + w.west * (f - shift(f, -1))) / (2.0 * grid.dx**2)
    if grid.dim == 2:
        out = out + (w.north * (shift(f, 0, 1) - f) + w.south * (f - shift(f, 0, -1))) / (
            2.0 * grid.dy**2
        )
    return out
