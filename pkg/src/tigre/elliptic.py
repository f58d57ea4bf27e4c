"""Per-step elliptic systems for the entropic potentials.

IGR solves the scalar equation

    rho^-1 Sigma - alpha div(rho^-1 grad Sigma) = f1

and TIGRE the coupled pair

    rho^-1 Sigma - alpha div(rho^-1 (grad Sigma + pi grad chi))      = f1
    chi - beta pi^-1 div(pi rho^-1 (grad Sigma + pi grad chi))       = f2

Both are solved by red-black block Gauss-Seidel: each cell solves its own 2x2
diagonal block exactly while its neighbours are frozen.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import operators as ops
from .grid import Grid

log = logging.getLogger(__name__)

SINGULAR_DET = 1e-300


class SolverError(RuntimeError):
    pass


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class RegParams:
    alpha: float
    beta: float = 0.0
    tol: float = 1e-10
    max_sweeps: int = 200
    floor: float = 1e-14
    strict: bool = False
    verbatim: bool = False

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


@dataclass
class Potentials:
    sigma: np.ndarray
    chi: np.ndarray
    prev_sigma: np.ndarray | None = None
    prev_chi: np.ndarray | None = None
    sweeps: int = 0
    residual: float = 0.0
    converged: bool = True
    history: list[float] = field(default_factory=list)

    @classmethod
    def zeros(cls, grid: Grid) -> "Potentials":
        return cls(grid.zeros(), grid.zeros())

    def initial_guess(self, mode: str = "extrapolate") -> tuple[np.ndarray, np.ndarray]:
        if mode == "cold":
            return np.zeros_like(self.sigma), np.zeros_like(self.chi)
        if mode == "previous" or self.prev_sigma is None:
            return self.sigma.copy(), self.chi.copy()
        if mode != "extrapolate":
            raise ValueError(f"unknown warm-start mode {mode!r}")
        return 2.0 * self.sigma - self.prev_sigma, 2.0 * self.chi - self.prev_chi


@dataclass
class EllipticRhs:
    f1: np.ndarray
    f2: np.ndarray


def build_rhs_igr(u: np.ndarray, reg: RegParams, grid: Grid) -> np.ndarray:
    return reg.alpha * (ops.div_sq(u, grid) + ops.tr_grad_u_sq(u, grid))


def build_rhs_tigre(u: np.ndarray, pi: np.ndarray, reg: RegParams, grid: Grid) -> EllipticRhs:
    tr = ops.tr_grad_u_sq(u, grid)
    f1 = reg.alpha * (ops.div_sq(u, grid) + tr)
    if reg.beta == 0.0:
        return EllipticRhs(f1, np.zeros_like(f1))
    dpi = ops.div_pi(u, pi, grid, verbatim=reg.verbatim)
    f2 = reg.beta * (dpi**2 - tr + ops.hessian_log_pi_uu(pi, u, grid))
    return EllipticRhs(f1, f2)


class BlockSystem:
    """Stencil form of the (Sigma, chi) operator: per-cell 2x2 diagonal blocks
    ``a11 a12 / a21 a22`` plus neighbour couplings ``k1s, k1c, k2s, k2c`` (row,
    unknown). ``pi=None`` or ``beta=0`` gives the scalar IGR system.
    """

    def __init__(self, rho: np.ndarray, pi: np.ndarray | None, reg: RegParams, grid: Grid):
        self.grid = grid
        self.reg = reg
        rho_inv = 1.0 / rho
        w11 = ops.FaceWeights(rho_inv, grid)
        self.a11 = rho_inv + reg.alpha * w11.diagonal()
        self.k1s = -reg.alpha * w11.coefficients()
        self.coupled = pi is not None and reg.beta > 0.0
        if not self.coupled:
            return
        if np.any(pi <= 0.0):
            raise ops.DomainError("entropy density must be positive everywhere")
        pi_inv = 1.0 / pi
        w12 = ops.FaceWeights(pi * rho_inv, grid)
        w22 = ops.FaceWeights(pi * pi * rho_inv, grid)
        d12 = w12.diagonal()
        c12 = w12.coefficients()
        c22 = w22.coefficients()
        self.a12 = reg.alpha * d12
        self.a21 = reg.beta * pi_inv * d12
        self.a22 = 1.0 + reg.beta * pi_inv * w22.diagonal()
        self.k1c = -reg.alpha * c12
        if reg.verbatim:
            # verbatim layout: beta L21 D_pi, beta L22 D_pi puts pi^-1 on the neighbour
            pi_nb = np.stack([ops.shift(pi_inv, di, dj) for di, dj in _kernels.NEIGHBOURS[: c12.shape[0]]])
            self.k2s = -reg.beta * c12 * pi_nb
            self.k2c = -reg.beta * c22 * pi_nb
        else:
            self.k2s = -reg.beta * pi_inv * c12
            self.k2c = -reg.beta * pi_inv * c22
        self.det = self.a11 * self.a22 - self.a12 * self.a21
        if np.any(np.abs(self.det) < SINGULAR_DET):
            j, i = np.unravel_index(np.argmin(np.abs(self.det)), self.det.shape)
            raise SolverError(f"singular 2x2 block at cell ({i}, {j})")

    def apply(self, sigma, chi):
        nb = _kernels.neighbour_sum
        r1 = self.a11 * sigma + nb(self.k1s, sigma)
        if not self.coupled:
            return r1, chi.copy()
        r1 += self.a12 * chi + nb(self.k1c, chi)
        r2 = self.a21 * sigma + self.a22 * chi + nb(self.k2s, sigma) + nb(self.k2c, chi)
        return r1, r2

    def sweep(self, sigma, chi, f1, f2, color: int):
        """Exact block solves on one colour ((i + j) % 2 == color), other colour frozen."""
        if self.coupled:
            _kernels.sweep_block(
                sigma, chi, f1, f2, self.a11, self.a12, self.a21, self.a22, self.det,
                self.k1s, self.k1c, self.k2s, self.k2c, color,
            )
        else:
            _kernels.sweep_scalar(sigma, f1, self.a11, self.k1s, color)

    def solve(self, sigma, chi, f1, f2, target: float, max_sweeps: int) -> np.ndarray:
        """In-place sweeps until the absolute residual reaches ``target``; returns the history."""
        history = np.full(max_sweeps + 1, np.nan)
        if self.coupled:
            n = _kernels.solve_block(
                sigma, chi, f1, f2, self.a11, self.a12, self.a21, self.a22, self.det,
                self.k1s, self.k1c, self.k2s, self.k2c, target, max_sweeps, history,
            )
        else:
            n = _kernels.solve_scalar(sigma, f1, self.a11, self.k1s, target, max_sweeps, history)
        return history[: n + 1]

    def residual_sq(self, sigma, chi, f1, f2) -> float:
        if self.coupled:
            return _kernels.residual_block(
                sigma, chi, f1, f2, self.a11, self.a12, self.a21, self.a22,
                self.k1s, self.k1c, self.k2s, self.k2c,
            )
        return _kernels.residual_scalar(sigma, f1, self.a11, self.k1s)


def apply_tigre_operator(sigma, chi, rho, pi, reg: RegParams, grid: Grid):
    """Rows of the TIGRE potential operator applied to (sigma, chi)."""
    return BlockSystem(rho, pi, reg, grid).apply(sigma, chi)


def relative_residual(system: BlockSystem, sigma, chi, f1, f2, floor):
    den = np.sum(f1**2)
    if system.coupled:
        den += np.sum(f2**2)
    return np.sqrt(system.residual_sq(sigma, chi, f1, f2)) / max(np.sqrt(den), floor)


def solve_potentials(
    rho: np.ndarray,
    pi: np.ndarray | None,
    rhs: EllipticRhs | np.ndarray,
    reg: RegParams,
    grid: Grid,
    warm: Potentials | None = None,
    warm_mode: str = "extrapolate",
) -> Potentials:
    """Red-black block Gauss-Seidel solve; returns the new Potentials.

    ``pi=None`` (or ``reg.beta == 0``) runs the scalar Sigma iteration and pins
    chi to zero. The returned object keeps ``warm``'s current fields as its
    ``prev_*`` copies for the next extrapolated start.
    """
    if isinstance(rhs, EllipticRhs):
        f1, f2 = rhs.f1, rhs.f2
    else:
        f1, f2 = rhs, np.zeros_like(rhs)
    if warm is None:
        warm = Potentials.zeros(grid)

    system = BlockSystem(rho, pi, reg, grid)
    sigma, chi = warm.initial_guess(warm_mode)
    sigma = np.ascontiguousarray(sigma, dtype=float)
    chi = np.ascontiguousarray(chi, dtype=float)
    if not system.coupled:
        chi = np.zeros_like(sigma)
    f1 = np.ascontiguousarray(f1, dtype=float)
    f2 = np.ascontiguousarray(f2, dtype=float)

    den = np.sum(f1**2) + (np.sum(f2**2) if system.coupled else 0.0)
    scale = max(np.sqrt(den), reg.floor)
    history = system.solve(sigma, chi, f1, f2, reg.tol * scale, reg.max_sweeps) / scale
    sweeps = len(history) - 1
    res = float(history[-1])
    if not np.isfinite(res):
        raise SolverError(f"non-finite residual after {sweeps} sweeps")
    converged = res <= reg.tol
    if not converged:
        msg = f"potential solve stopped at {sweeps} sweeps, residual {res:.3e} > tol {reg.tol:.1e}"
        if reg.strict:
            raise SolverError(msg)
        warnings.warn(msg, ConvergenceWarning, stacklevel=2)
    return Potentials(
        sigma,
        chi,
        prev_sigma=warm.sigma,
        prev_chi=warm.chi,
        sweeps=sweeps,
        residual=float(res),
        converged=converged,
        history=history.tolist(),
    )
