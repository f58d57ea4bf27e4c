"""Ideal-gas closures between (rho, s), (rho, p) and (rho, m, E).

All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Thermodynamic input outside the domain of the closure."""


@dataclass(frozen=True)
class EosParams:
    gamma: float = 1.4
    c_v: float = 2.5
    kappa: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.c_v > 0.0:
            raise ValueError(f"c_v must be positive, got {self.c_v}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")


def _require_positive(name, x):
    if np.any(np.asarray(x) <= 0.0):
        raise DomainError(f"{name} must be positive")


def _kinetic(rho, momentum):
    m = np.asarray(momentum, dtype=float)
    # vector momentum carries its components along axis 0
    m2 = np.sum(m * m, axis=0) if m.ndim > np.ndim(rho) else m * m
    return 0.5 * m2 / rho


def pressure_from_entropy(eos: EosParams, rho, s):
    _require_positive("density", rho)
    return eos.kappa * np.power(rho, eos.gamma) * np.exp(np.asarray(s) / eos.c_v)


def entropy_from_pressure(eos: EosParams, rho, p):
    _require_positive("density", rho)
    _require_positive("pressure", p)
    return eos.c_v * (np.log(p) - np.log(eos.kappa) - eos.gamma * np.log(rho))


def pressure_from_energy(eos: EosParams, rho, momentum, E):
    """``(gamma - 1) (E - |m|^2 / 2 rho)``; negative results are returned as-is."""
    _require_positive("density", rho)
    return (eos.gamma - 1.0) * (np.asarray(E) - _kinetic(rho, momentum))


def energy_from_pressure(eos: EosParams, rho, momentum, p):
    _require_positive("density", rho)
    return np.asarray(p) / (eos.gamma - 1.0) + _kinetic(rho, momentum)


def sound_speed(eos: EosParams, rho, p):
    _require_positive("density", rho)
    _require_positive("pressure", p)
    return np.sqrt(eos.gamma * np.asarray(p) / rho)
