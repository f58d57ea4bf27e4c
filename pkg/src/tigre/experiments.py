"""Initial conditions for the three benchmark problems plus small test problems."""

from __future__ import annotations

import numpy as np

from .eos import EosParams
from .grid import Grid
from .models import ConservedState, state_from_entropy_density, state_from_primitives

SOD = dict(x_left=0.25, x_right=0.75, rho_left=1.0, rho_right=0.125, p_left=1.0, p_right=0.1, eps=0.03)
ACOUSTIC = dict(eps1=0.01, center1=(0.3, 0.4), center2=(0.7, 0.6), rho0=1.0, pi0=0.2, amp=0.1)
KH = dict(y0=0.5, w=0.1, h=0.01, amp=0.01, rho0=1.0, pi0=0.2)


def _require_dim(grid: Grid, dim: int, name: str):
    if grid.dim != dim:
        raise ValueError(f"{name} needs a {dim}D grid, got {grid.dim}D")


def sod_profile(x: np.ndarray, eps: float = SOD["eps"]):
    """Smoothed periodic Sod density and pressure."""
    psi = 0.5 * (np.tanh((x - SOD["x_left"]) / eps) - np.tanh((x - SOD["x_right"]) / eps))
    rho = SOD["rho_left"] - (SOD["rho_left"] - SOD["rho_right"]) * psi
    p = SOD["p_left"] - (SOD["p_left"] - SOD["p_right"]) * psi
    return rho, p


def init_sod(grid: Grid, eos: EosParams, form: str, eps: float = SOD["eps"]) -> ConservedState:
    _require_dim(grid, 1, "Sod")
    x, _ = grid.coords()
    rho, p = sod_profile(x, eps)
    return state_from_primitives(grid, form, eos, rho, 0.0, p)


def bump(r2: np.ndarray) -> np.ndarray:
    """exp(-1/(1 - r^2)) on r < 1, zero outside."""
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def acoustic_bumps(grid: Grid, eps1: float = ACOUSTIC["eps1"]) -> np.ndarray:
    x, y = grid.coords()
    cx1, cy1 = ACOUSTIC["center1"]
    cx2, cy2 = ACOUSTIC["center2"]
    b1 = bump(((x - cx1) ** 2 + (y - cy1) ** 2) / eps1**2)
    theta = np.arctan2(y - cy2, x - cx2)
    eps2 = 0.1 * (1.0 + 0.18 * np.cos(4.0 * theta))
    b2 = bump(((x - cx2) ** 2 + (y - cy2) ** 2) / eps2**2)
    return b1 + b2


def init_acoustic(grid: Grid, eos: EosParams, form: str, eps1: float = ACOUSTIC["eps1"]) -> ConservedState:
    _require_dim(grid, 2, "acoustic")
    b = acoustic_bumps(grid, eps1)
    rho = ACOUSTIC["rho0"] + ACOUSTIC["amp"] * b
    pi = ACOUSTIC["pi0"] + ACOUSTIC["amp"] * b
    return state_from_entropy_density(grid, form, eos, rho, 0.0, pi)


def kh_velocity(grid: Grid) -> np.ndarray:
    x, y = grid.coords()
    w, h, amp = KH["w"], KH["h"], KH["amp"]
    dy = np.mod(y - KH["y0"] + 0.5, 1.0) - 0.5
    u = np.empty((2,) + grid.shape)
    u[0] = 0.25 * np.tanh((dy + w) / h) - 0.25 * np.tanh((dy - w) / h)
    u[1] = amp * np.sin(2.0 * np.pi * x) * np.exp(-dy * dy / h)
    return u


def init_kh(grid: Grid, eos: EosParams, form: str) -> ConservedState:
    _require_dim(grid, 2, "Kelvin-Helmholtz")
    return state_from_entropy_density(grid, form, eos, KH["rho0"], kh_velocity(grid), KH["pi0"])


def init_uniform(grid: Grid, eos: EosParams, form: str, rho=1.0, u=(0.0, 0.0), p=1.0) -> ConservedState:
    vel = np.asarray(u, dtype=float)[: grid.dim].reshape(grid.dim, 1, 1)
    return state_from_primitives(grid, form, eos, rho, vel, p)


def init_plane_wave(
    grid: Grid,
    eos: EosParams,
    form: str,
    k: int,
    amplitude: float = 1e-4,
    rho0: float = 1.0,
    p0: float = 1.0,
) -> ConservedState:
    """Standing isentropic acoustic wave along x: p = p0 (1 + a cos 2 pi k x), u = 0."""
    x, _ = grid.coords()
    pert = amplitude * np.cos(2.0 * np.pi * k * x)
    p = p0 * (1.0 + pert)
    rho = rho0 * (1.0 + pert) ** (1.0 / eos.gamma)
    return state_from_primitives(grid, form, eos, rho, 0.0, p)
