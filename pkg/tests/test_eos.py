import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tigre.eos import (
    DomainError,
    EosParams,
    energy_from_pressure,
    entropy_from_pressure,
    pressure_from_energy,
    pressure_from_entropy,
    sound_speed,
)

EOS = EosParams()
pos = st.floats(1e-3, 1e3)


def test_reference_values():
    assert pressure_from_entropy(EOS, 1.0, 0.0) == 1.0
    assert pressure_from_entropy(EOS, 1.0, EOS.c_v * np.log(2.0)) == pytest.approx(2.0, rel=1e-15)
    assert entropy_from_pressure(EOS, 1.0, 1.0) == 0.0
    assert entropy_from_pressure(EosParams(c_v=1.0), 1.0, np.exp(1.4)) == pytest.approx(1.4)
    assert pressure_from_energy(EOS, 1.0, 0.0, 2.5) == pytest.approx(1.0)
    assert pressure_from_energy(EOS, 1.0, 1.0, 3.0) == pytest.approx(1.0)
    assert pressure_from_energy(EOS, 0.125, 0.0, 0.25) == pytest.approx(0.1)
    assert energy_from_pressure(EOS, 1.0, 0.0, 1.0) == pytest.approx(2.5)
    assert energy_from_pressure(EOS, 0.125, 0.0, 0.1) == pytest.approx(0.25)
    assert sound_speed(EOS, 1.0, 1.0) == pytest.approx(1.18322, abs=1e-5)
    assert sound_speed(EOS, 0.125, 0.1) == pytest.approx(np.sqrt(1.12))


def test_sod_right_state_roundtrip():
    s = entropy_from_pressure(EOS, 0.125, 0.1)
    assert pressure_from_entropy(EOS, 0.125, s) == pytest.approx(0.1, rel=1e-14)


@given(pos, pos)
def test_entropy_roundtrip(rho, p):
    s = entropy_from_pressure(EOS, rho, p)
    assert pressure_from_entropy(EOS, rho, s) == pytest.approx(p, rel=1e-12)


@given(pos, st.floats(-10, 10), pos)
def test_energy_roundtrip(rho, m, p):
    E = energy_from_pressure(EOS, rho, m, p)
    assert pressure_from_energy(EOS, rho, m, E) == pytest.approx(p, rel=1e-9, abs=1e-14 * abs(E))


def test_vector_momentum():
    m = np.array([[3.0], [4.0]])
    E = energy_from_pressure(EOS, np.array([2.0]), m, np.array([0.4]))
    assert E[0] == pytest.approx(0.4 / 0.4 + 25.0 / 4.0)


@given(pos, pos, st.floats(1e-2, 1e2))
def test_sound_speed_homogeneous(rho, p, lam):
    assert sound_speed(EOS, lam * rho, lam * p) == pytest.approx(sound_speed(EOS, rho, p), rel=1e-12)


@pytest.mark.parametrize(
    "call",
    [
        lambda: pressure_from_entropy(EOS, 0.0, 1.0),
        lambda: entropy_from_pressure(EOS, 1.0, -1.0),
        lambda: sound_speed(EOS, 1.0, 0.0),
        lambda: pressure_from_energy(EOS, np.array([1.0, -1.0]), 0.0, 1.0),
    ],
)
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


def test_negative_internal_energy_is_reported_not_raised():
    assert pressure_from_energy(EOS, 1.0, 2.0, 1.0) < 0


@pytest.mark.parametrize("kw", [dict(gamma=1.0), dict(c_v=0.0), dict(kappa=-1.0)])
def test_bad_params(kw):
    with pytest.raises(ValueError):
        EosParams(**kw)
