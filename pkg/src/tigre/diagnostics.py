"""Conserved totals, density total variation and shell-averaged power spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import eos as eos_mod
from . import operators as ops
from .eos import EosParams
from .grid import Grid


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    momentum: tuple[float, ...]
    energy: float
    entropy: float
    tv_rho: float


@dataclass(frozen=True)
class SpectrumRecord:
    t: float
    shells: np.ndarray
    pressure_power: np.ndarray | None
    kinetic_power: np.ndarray | None
    counts: np.ndarray

    @property
    def k_rms(self) -> float:
        return k_rms(self.shells, self.pressure_power)


def _primitives(state, eos: EosParams):
    rho = state.rho
    m = state.momentum
    if state.form == "energy":
        p = eos_mod.pressure_from_energy(eos, rho, m, state.third)
        pi = None
    else:
        pi = state.third
        p = eos_mod.pressure_from_entropy(eos, rho, pi / rho)
    return rho, m, p, pi


def totals(state, eos: EosParams) -> DiagnosticsRecord:
    """Grid sums of mass, momentum, energy, entropy and TV of rho.

    Energy is ``sum(rho |u|^2 / 2 + p / (gamma - 1)) dV``; energy-form states
    report entropy as ``sum(rho s(rho, p)) dV`` (NaN if p <= 0 somewhere).
    """
    grid = state.grid
    vol = grid.cell_volume
    rho, m, p, pi = _primitives(state, eos)
    kinetic = 0.5 * np.sum(m * m, axis=0) / rho
    energy = float(np.sum(kinetic + p / (eos.gamma - 1.0)) * vol)
    if pi is None:
        if np.all(p > 0.0):
            pi = rho * eos_mod.entropy_from_pressure(eos, rho, p)
            entropy = float(np.sum(pi) * vol)
        else:
            entropy = float("nan")
    else:
        entropy = float(np.sum(pi) * vol)
    return DiagnosticsRecord(
        t=state.t,
        mass=float(np.sum(rho) * vol),
        momentum=tuple(float(v) for v in m.sum(axis=(1, 2)) * vol),
        energy=energy,
        entropy=entropy,
        tv_rho=total_variation(rho, grid),
    )


def total_variation(rho: np.ndarray, grid: Grid) -> float:
    gx = ops.ddx(rho, grid)
    if grid.dim == 1:
        return float(np.sum(np.abs(gx)) * grid.dx)
    gy = ops.ddy(rho, grid)
    return float(np.sum(np.sqrt(gx * gx + gy * gy)) * grid.dx * grid.dy)


def dft(f: np.ndarray) -> np.ndarray:
    """Forward DFT normalised by 1/N per transformed axis (a constant c maps to c at k=0)."""
    if f.shape[-2] == 1:
        return np.fft.fft(f, axis=-1, norm="forward")
    return np.fft.fft2(f, axes=(-2, -1), norm="forward")


def wavenumber_radius(shape: tuple[int, int]) -> np.ndarray:
    ny, nx = shape
    kx = np.fft.fftfreq(nx, d=1.0 / nx)
    if ny == 1:
        return np.abs(kx)[None, :]
    ky = np.fft.fftfreq(ny, d=1.0 / ny)
    return np.sqrt(kx[None, :] ** 2 + ky[:, None] ** 2)


def shell_sums(power: np.ndarray, all_shells: bool = False):
    """Per-shell (sum, count) over half-open annuli b <= |k| < b + 1.

    By default only shells b = 0 .. nx/2 - 1 are returned; ``all_shells``
    extends to the corner modes so the shell sums cover every mode.
    """
    kr = wavenumber_radius(power.shape)
    b = np.floor(kr).astype(int).ravel()
    nb = int(b.max()) + 1 if all_shells else power.shape[-1] // 2
    keep = b < nb
    sums = np.bincount(b[keep], weights=power.ravel()[keep], minlength=nb)
    counts = np.bincount(b[keep], minlength=nb)
    return np.arange(nb), sums, counts


def shell_spectrum(f: np.ndarray, all_shells: bool = False, kinetic: bool | None = None):
    """Shell-averaged power of a scalar ``(ny, nx)`` or vector ``(dim, ny, nx)`` field.

    Returns ``(shells, power, counts)``. Vector fields get the kinetic-energy
    weighting: component powers are summed and halved.
    """
    f = np.asarray(f, dtype=float)
    if kinetic is None:
        kinetic = f.ndim == 3
    if kinetic:
        power = sum(np.abs(dft(c)) ** 2 for c in f) * 0.5
    else:
        power = np.abs(dft(f)) ** 2
    shells, sums, counts = shell_sums(power, all_shells)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    return shells, avg, counts


def spectrum_record(state, eos: EosParams, all_shells: bool = False) -> SpectrumRecord:
    _, _, p, _ = _primitives(state, eos)
    shells, pp, counts = shell_spectrum(p, all_shells)
    _, ek, _ = shell_spectrum(state.velocity, all_shells, kinetic=True)
    return SpectrumRecord(state.t, shells, pp, ek, counts)


def k_rms(shells: np.ndarray, power: np.ndarray) -> float:
    """Variance-weighted mean wavenumber, excluding the mean mode b = 0."""
    k = np.asarray(shells, dtype=float)[1:]
    pw = np.asarray(power, dtype=float)[1:]
    total = pw.sum()
    if not total > 0.0:
        raise ValueError("spectrum carries no power outside the mean mode")
    return float(np.sqrt(np.sum(k * k * pw) / total))
