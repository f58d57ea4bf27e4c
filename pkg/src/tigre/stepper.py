"""Time integration: two-stage Richtmyer Lax-Wendroff, Lax-Friedrichs baseline,
CFL control and the per-step pipeline (potentials -> predictor -> corrector).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics
from . import elliptic
from .elliptic import Potentials
from .models import (
    ConservedState,
    Model,
    SimulationAbort,
    check_admissible,
    chi_gradient,
    flux,
    max_signal_speed,
    source,
)
from .operators import shift

log = logging.getLogger(__name__)


@dataclass
class StepControl:
    cfl: float = 0.4
    t_end: float = 0.0
    snapshot_times: tuple[float, ...] = ()
    scheme: str = "lw"
    warm_mode: str = "extrapolate"
    # verbatim half-step source weight (dt/2)(S_i + S_{i+1}) instead of (dt/4)(...)
    verbatim_source: bool = False

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"CFL number must be in (0, 1], got {self.cfl}")
        if self.t_end < 0.0:
            raise ValueError("t_end must be non-negative")
        if self.scheme not in ("lw", "lf"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class StepRecord:
    step: int
    t: float
    dt: float
    sweeps: int
    residual: float
    min_rho: float
    min_third: float
    totals: diagnostics.DiagnosticsRecord
    source_integral: np.ndarray


@dataclass
class RunResult:
    state: ConservedState
    potentials: Potentials
    initial: diagnostics.DiagnosticsRecord
    records: list[StepRecord] = field(default_factory=list)
    snapshots: list[tuple[ConservedState, Potentials]] = field(default_factory=list)

    @property
    def accumulated_source(self) -> np.ndarray:
        total = np.zeros(self.state.grid.dim)
        for r in self.records:
            total += r.source_integral
        return total


def _face_average(f: np.ndarray | None, di: int, dj: int):
    if f is None:
        return None
    return 0.5 * (f + shift(f, di, dj))


def lw_step(
    model: Model,
    state: ConservedState,
    potentials: Potentials | None,
    dt: float,
    verbatim_source: bool = False,
    step: int | None = None,
    info: dict | None = None,
) -> ConservedState:
    """One Richtmyer step with potentials frozen at their start-of-step values.

    The face predictor carries the face-averaged transverse flux difference so
    the 2D scheme is a full second-order LW update (it reduces to the plain 1D
    predictor when ny == 1). The corrector source is evaluated at the average of
    the adjacent face half states.
    """
    grid = state.grid
    q = state.q
    sigma = potentials.sigma if potentials is not None and model.has_potentials else None
    grad_chi = chi_gradient(model, potentials.chi if potentials is not None else None, grid)
    src = source(model, q, grad_chi)
    src_weight = 0.5 if verbatim_source else 0.25

    spacing = [grid.dx, grid.dy]
    offsets = [(1, 0), (0, 1)]
    cell_flux = [flux(model, q, sigma, a) for a in range(grid.dim)]
    # centered flux divergence along each axis, for the transverse predictor terms
    cell_div = [
        (shift(cell_flux[a], *offsets[a]) - shift(cell_flux[a], *[-o for o in offsets[a]]))
        / (2.0 * spacing[a])
        for a in range(grid.dim)
    ]

    face_states = []
    for a in range(grid.dim):
        di, dj = offsets[a]
        h = spacing[a]
        qh = 0.5 * (q + shift(q, di, dj))
        qh -= dt / (2.0 * h) * (shift(cell_flux[a], di, dj) - cell_flux[a])
        for b in range(grid.dim):
            if b != a:
                qh -= 0.5 * dt * _face_average(cell_div[b], di, dj)
        if grad_chi is not None:
            qh += src_weight * dt * (src + shift(src, di, dj))
        face_states.append(qh)
    for qh in face_states:
        check_admissible(model, qh, step, where="in predictor")

    new = q.copy()
    centre = np.zeros_like(q)
    for a in range(grid.dim):
        di, dj = offsets[a]
        fh = flux(model, face_states[a], _face_average(sigma, di, dj), a)
        new -= dt / spacing[a] * (fh - shift(fh, -di, -dj))
        centre += face_states[a] + shift(face_states[a], -di, -dj)
    if grad_chi is not None:
        centre /= 2 * grid.dim
        s_full = source(model, centre, grad_chi)
        new += dt * s_full
        if info is not None:
            info["source_integral"] = dt * s_full[1:-1].sum(axis=(1, 2)) * grid.cell_volume
    check_admissible(model, new, step, where="after corrector")
    return ConservedState(grid, state.form, new, state.t + dt)


def lf_step(model: Model, state: ConservedState, dt: float, step: int | None = None) -> ConservedState:
    """Lax-Friedrichs baseline (Euler only): neighbour average minus centered flux difference."""
    if model.kind != "euler":
        raise ValueError("the Lax-Friedrichs baseline is defined for the Euler model only")
    grid = state.grid
    q = state.q
    if grid.dim == 1:
        new = 0.5 * (shift(q, 1) + shift(q, -1))
    else:
        new = 0.25 * (shift(q, 1) + shift(q, -1) + shift(q, 0, 1) + shift(q, 0, -1))
    fx = flux(model, q, None, 0)
    new -= dt / (2.0 * grid.dx) * (shift(fx, 1) - shift(fx, -1))
    if grid.dim == 2:
        fy = flux(model, q, None, 1)
        new -= dt / (2.0 * grid.dy) * (shift(fy, 0, 1) - shift(fy, 0, -1))
    check_admissible(model, new, step, where="after LF step")
    return ConservedState(grid, state.form, new, state.t + dt)


def compute_dt(model: Model, state: ConservedState, control: StepControl) -> float:
    h = state.grid.min_spacing
    smax = max_signal_speed(model, state)
    dt = control.cfl * h / smax if smax > 0.0 else h
    targets = [t for t in (*control.snapshot_times, control.t_end) if t > state.t * (1 + 1e-14)]
    if targets:
        nxt = min(targets)
        if state.t + dt >= nxt:
            dt = nxt - state.t
    return dt


def solve_step_potentials(model: Model, state: ConservedState, potentials: Potentials, warm_mode: str):
    if not model.has_potentials:
        return potentials
    grid = state.grid
    u = state.velocity
    if model.kind == "igr":
        rhs = elliptic.build_rhs_igr(u, model.reg, grid)
        return elliptic.solve_potentials(state.rho, None, rhs, model.reg, grid, potentials, warm_mode)
    pi = state.third
    rhs = elliptic.build_rhs_tigre(u, pi, model.reg, grid)
    return elliptic.solve_potentials(state.rho, pi, rhs, model.reg, grid, potentials, warm_mode)


def run(
    model: Model,
    init: ConservedState,
    control: StepControl,
    max_steps: int | None = None,
    on_snapshot=None,
    on_step=None,
) -> RunResult:
    """Integrate ``init`` to ``control.t_end``.

    ``on_snapshot(state, potentials)`` is called at t = 0 and at each snapshot
    time; snapshots are also collected on the result. ``on_step(record)`` sees
    every StepRecord as soon as it is made.
    """
    if init.form != model.form:
        raise ValueError(f"{model.kind} needs a {model.form}-form state, got {init.form}")
    state = init.copy()
    potentials = Potentials.zeros(state.grid)
    result = RunResult(state, potentials, diagnostics.totals(state, model.eos))
    snap_times = sorted(t for t in control.snapshot_times if 0.0 < t <= control.t_end)

    def snapshot():
        result.snapshots.append((state.copy(), potentials))
        if on_snapshot is not None:
            on_snapshot(state, potentials)

    if 0.0 in control.snapshot_times:
        snapshot()
    step = 0
    eps = 1e-12 * max(control.t_end, 1.0)
    while state.t < control.t_end - eps:
        if max_steps is not None and step >= max_steps:
            break
        step += 1
        try:
            dt = compute_dt(model, state, control)
            info: dict = {}
            if control.scheme == "lf":
                state = lf_step(model, state, dt, step)
            else:
                potentials = solve_step_potentials(model, state, potentials, control.warm_mode)
                state = lw_step(model, state, potentials, dt, control.verbatim_source, step, info)
        except SimulationAbort as exc:
            if exc.step is None:
                exc.step = step
            result.state = state
            result.potentials = potentials
            raise
        # pin the last step onto the target time exactly
        if abs(state.t - control.t_end) <= eps:
            state.t = control.t_end
        for ts in snap_times:
            if abs(state.t - ts) <= eps:
                state.t = ts
        rec = StepRecord(
            step=step,
            t=state.t,
            dt=dt,
            sweeps=potentials.sweeps if model.has_potentials else 0,
            residual=potentials.residual if model.has_potentials else 0.0,
            min_rho=float(state.rho.min()),
            min_third=float(state.third.min()),
            totals=diagnostics.totals(state, model.eos),
            source_integral=info.get("source_integral", np.zeros(state.grid.dim)),
        )
        result.records.append(rec)
        if on_step is not None:
            on_step(rec)
        if any(abs(state.t - ts) <= eps for ts in snap_times):
            snapshot()
        if step % 500 == 0:
            log.info("step %d t=%.5f dt=%.3e sweeps=%d", step, state.t, dt, rec.sweeps)
    result.state = state
    result.potentials = potentials
    return result
