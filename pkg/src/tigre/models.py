"""Euler, IGR and TIGRE closures on a stacked conserved-variable array.

The state array ``q`` has shape ``(dim + 2, ny, nx)``: density, the ``dim``
momentum components, then either total energy E (Euler, IGR) or entropy
density pi = rho s (TIGRE).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import eos as eos_mod
from . import operators as ops
from .elliptic import RegParams
from .eos import EosParams
from .grid import Grid

MODEL_KINDS = ("euler", "igr", "tigre")


class SimulationAbort(RuntimeError):
    """Raised when the state leaves the admissible set; carries step context."""

    def __init__(self, message: str, step: int | None = None, cell: tuple | None = None):
        super().__init__(message)
        self.step = step
        self.cell = cell


class PositivityError(SimulationAbort):
    pass


@dataclass(frozen=True)
class Model:
    kind: str
    eos: EosParams = field(default_factory=EosParams)
    reg: RegParams | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model {self.kind!r}")
        if self.kind != "euler" and self.reg is None:
            raise ValueError(f"{self.kind} requires RegParams")

    @property
    def form(self) -> str:
        return "entropy" if self.kind == "tigre" else "energy"

    @property
    def has_potentials(self) -> bool:
        return self.kind != "euler"

    @property
    def has_chi(self) -> bool:
        return self.kind == "tigre" and self.reg.beta > 0.0

    def with_reg(self, **changes) -> "Model":
        return replace(self, reg=replace(self.reg, **changes))


@dataclass
class ConservedState:
    grid: Grid
    form: str
    q: np.ndarray
    t: float = 0.0

    @property
    def rho(self) -> np.ndarray:
        return self.q[0]

    @property
    def momentum(self) -> np.ndarray:
        return self.q[1 : 1 + self.grid.dim]

    @property
    def third(self) -> np.ndarray:
        """E in energy form, pi in entropy form."""
        return self.q[-1]

    @property
    def velocity(self) -> np.ndarray:
        return self.momentum / self.rho

    def copy(self) -> "ConservedState":
        return ConservedState(self.grid, self.form, self.q.copy(), self.t)


def state_from_primitives(grid: Grid, form: str, eos: EosParams, rho, u, p, t=0.0) -> ConservedState:
    """Build a state from (rho, u, p); E via the energy relation, pi = rho s(rho, p)."""
    rho = np.broadcast_to(np.asarray(rho, dtype=float), grid.shape)
    p = np.broadcast_to(np.asarray(p, dtype=float), grid.shape)
    u = np.broadcast_to(np.asarray(u, dtype=float), (grid.dim,) + grid.shape)
    q = np.empty((grid.dim + 2,) + grid.shape)
    q[0] = rho
    q[1 : 1 + grid.dim] = rho * u
    if form == "energy":
        q[-1] = eos_mod.energy_from_pressure(eos, rho, q[1 : 1 + grid.dim], p)
    elif form == "entropy":
        q[-1] = rho * eos_mod.entropy_from_pressure(eos, rho, p)
    else:
        raise ValueError(f"unknown form {form!r}")
    return ConservedState(grid, form, q, t)


def state_from_entropy_density(grid: Grid, form: str, eos: EosParams, rho, u, pi, t=0.0):
    """Build a state from (rho, u, pi); energy form uses p = p(rho, pi / rho)."""
    rho = np.broadcast_to(np.asarray(rho, dtype=float), grid.shape)
    pi = np.broadcast_to(np.asarray(pi, dtype=float), grid.shape)
    if form == "entropy":
        u = np.broadcast_to(np.asarray(u, dtype=float), (grid.dim,) + grid.shape)
        q = np.empty((grid.dim + 2,) + grid.shape)
        q[0] = rho
        q[1 : 1 + grid.dim] = rho * u
        q[-1] = pi
        return ConservedState(grid, form, q, t)
    p = eos_mod.pressure_from_entropy(eos, rho, pi / rho)
    return state_from_primitives(grid, form, eos, rho, u, p, t)


def specific_entropy(state: ConservedState) -> np.ndarray:
    if state.form != "entropy":
        raise ValueError("specific_entropy needs an entropy-form state")
    return state.third / state.rho


def pressure(model: Model, q: np.ndarray) -> np.ndarray:
    """Mechanical pressure from a stacked state array (no positivity check)."""
    rho = q[0]
    if model.form == "energy":
        return eos_mod.pressure_from_energy(model.eos, rho, q[1:-1], q[-1])
    return eos_mod.pressure_from_entropy(model.eos, rho, q[-1] / rho)


def check_admissible(model: Model, q: np.ndarray, step: int | None = None, where: str = "") -> None:
    if not np.all(np.isfinite(q)):
        bad = np.argwhere(~np.isfinite(q))[0]
        raise SimulationAbort(f"non-finite value {where} at {tuple(bad)}", step, tuple(bad[1:]))
    checks = [("density", q[0])]
    if model.form == "entropy":
        checks.append(("entropy density", q[-1]))
    for name, f in checks:
        if np.any(f <= 0.0):
            j, i = np.unravel_index(np.argmin(f), f.shape)
            raise PositivityError(f"non-positive {name} {where} at cell ({i}, {j})", step, (i, j))
    if model.form == "energy":
        p = pressure(model, q)
        if np.any(p <= 0.0):
            j, i = np.unravel_index(np.argmin(p), p.shape)
            raise PositivityError(f"non-positive pressure {where} at cell ({i}, {j})", step, (i, j))


def flux(model: Model, q: np.ndarray, sigma: np.ndarray | None, axis: int) -> np.ndarray:
    """Flux component along ``axis`` (0 = x, 1 = y) for every conserved variable."""
    rho = q[0]
    m = q[1:-1]
    ud = m[axis] / rho
    p = pressure(model, q)
    ptot = p if sigma is None or model.kind == "euler" else p + sigma
    out = np.empty_like(q)
    out[0] = m[axis]
    out[1:-1] = m * ud
    out[1 + axis] += ptot
    if model.form == "energy":
        out[-1] = (q[-1] + ptot) * ud
    else:
        out[-1] = q[-1] * ud
    return out


def chi_gradient(model: Model, chi: np.ndarray | None, grid: Grid) -> np.ndarray | None:
    """Centered grad(chi) on cells, or None when the model has no chi force."""
    if model.kind != "tigre" or chi is None:
        return None
    g = np.empty((grid.dim,) + grid.shape)
    g[0] = ops.ddx(chi, grid)
    if grid.dim == 2:
        g[1] = ops.ddy(chi, grid)
    return g


def source(model: Model, q: np.ndarray, grad_chi: np.ndarray | None) -> np.ndarray:
    """Source vector (0, -pi grad chi, 0); zero for Euler and IGR."""
    out = np.zeros_like(q)
    if grad_chi is not None:
        out[1:-1] = -q[-1] * grad_chi
    return out


def max_signal_speed(model: Model, state: ConservedState) -> float:
    q = state.q
    check_admissible(model, q, where="in signal-speed scan")
    p = pressure(model, q)
    u = q[1:-1] / q[0]
    speed = np.sqrt(np.sum(u * u, axis=0))
    return float(np.max(speed + eos_mod.sound_speed(model.eos, q[0], p)))
