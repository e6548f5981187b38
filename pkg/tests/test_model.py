import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from softgrasp import (ConfigError, ContactForces, GraspConfig, contact_forces, coulomb_margin,
                       inertia_of, potential_energy, preload_force, torque)
from softgrasp.stability import rest_angle

configs = st.builds(
    GraspConfig,
    k_n=st.floats(100, 5000),
    k_t=st.floats(0, 5000),
    delta_n=st.floats(0, 0.05),
    r=st.floats(0.005, 0.08),
    inertia=st.floats(1e-6, 1e-2),
    mu=st.floats(0, 2),
)
angles = st.floats(-10, 10, allow_nan=False)


def test_potential_energy_at_rest_is_preload_spring():
    cfg = GraspConfig(k_n=1000, k_t=500, delta_n=0.01, r=0.03, inertia=1e-4, mu=0.6)
    assert potential_energy(cfg, 0.0) == pytest.approx(0.1, rel=1e-12)


def test_potential_minimum_matches_rest_angle(worked):
    theta = np.linspace(1e-6, math.pi - 1e-6, 400_001)
    i = np.argmin(potential_energy(worked, theta))
    assert theta[i] == pytest.approx(0.8411, abs=1e-4)
    assert theta[i] == pytest.approx(rest_angle(worked), abs=2 * (theta[1] - theta[0]))


@given(configs, angles)
def test_potential_is_even(cfg, theta):
    assert potential_energy(cfg, theta) == pytest.approx(potential_energy(cfg, -theta), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("theta", [0.0, math.pi, -math.pi, 2 * math.pi, 5 * math.pi])
def test_torque_vanishes_at_multiples_of_pi(worked, theta):
    scale = worked.k_n * worked.r**2
    assert abs(torque(worked, theta)) < 1e-12 * scale


def test_torque_matches_finite_difference_worked(worked):
    h = 1e-6
    fd = -(potential_energy(worked, 0.1 + h) - potential_energy(worked, 0.1 - h)) / (2 * h)
    assert torque(worked, 0.1) == pytest.approx(fd, rel=1e-8)


@settings(max_examples=100)
@given(configs, st.floats(-3, 3))
def test_torque_is_negative_energy_gradient(cfg, theta):
    h = 1e-6
    fd = -(potential_energy(cfg, theta + h) - potential_energy(cfg, theta - h)) / (2 * h)
    tau = torque(cfg, theta)
    # absolute floor: cancellation in the difference quotient scales with V / h
    scale = (cfg.k_n + cfg.k_t) * (cfg.delta_n + cfg.r) ** 2
    assert abs(tau - fd) <= 1e-6 * abs(tau) + 1e-8 * scale


def test_contact_forces_at_zero(worked):
    f = contact_forces(worked, 0.0)
    assert f.f_n == preload_force(worked) == 20.0
    assert f.f_t == 0.0


def test_contact_forces_quarter_turn_loses_contact(worked):
    # hand evaluation: f_n = 20 - 1000*0.03*(1 - 0) = -10, f_t = 500*0.03*1 = 15
    f = contact_forces(worked, math.pi / 2)
    assert f.f_n == pytest.approx(-10.0, abs=1e-12)
    assert f.f_t == pytest.approx(15.0, abs=1e-12)
    assert not f.in_contact


def test_contact_ratio_near_slip_boundary(worked):
    f = contact_forces(worked, 0.6175)
    assert f.f_t / f.f_n == pytest.approx(0.6, abs=1e-3)


def test_contact_ratio_crosses_coulomb_limit_at_scanned_angle(worked):
    theta = np.arange(1e-5, math.pi, 1e-5)
    margin = coulomb_margin(contact_forces(worked, theta), worked.mu)
    first = theta[np.argmax(margin < 0)]
    f = contact_forces(worked, first)
    assert f.f_t / f.f_n == pytest.approx(worked.mu, abs=1e-3)


@given(configs)
def test_contact_forces_zero_rotation_property(cfg):
    f = contact_forces(cfg, 0.0)
    assert f.f_n == pytest.approx(preload_force(cfg))
    assert f.f_t == 0.0


@pytest.mark.parametrize("k_n, delta_n, expected", [(1000, 0.02, 20.0), (1000, 0.0, 0.0), (320, 0.03, 9.6)])
def test_preload_force(k_n, delta_n, expected):
    cfg = GraspConfig(k_n=k_n, k_t=100, delta_n=delta_n, r=0.03, inertia=1e-4, mu=0.6)
    assert preload_force(cfg) == pytest.approx(expected, rel=1e-12)
    assert cfg.f_p == preload_force(cfg)


@pytest.mark.parametrize("f_t, expected", [(5.0, 1.0), (6.0, 0.0), (-7.0, -1.0)])
def test_coulomb_margin(f_t, expected):
    assert coulomb_margin(ContactForces(10.0, f_t), 0.6) == pytest.approx(expected, abs=1e-12)


@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(0, 2))
def test_coulomb_margin_ignores_sign_of_transverse_force(f_n, f_t, mu):
    assert coulomb_margin(ContactForces(f_n, f_t), mu) == coulomb_margin(ContactForces(f_n, -f_t), mu)


@pytest.mark.parametrize("shape, kwargs, expected", [
    ("solid-cylinder-axial", {}, 4.5e-5),
    ("solid-sphere", {}, 3.6e-5),
    ("solid-cylinder-transverse", {"h": 0.02}, 0.1 * (0.0027 + 0.0004) / 12),
])
def test_inertia_of(shape, kwargs, expected):
    assert inertia_of(shape, 0.1, 0.03, **kwargs) == pytest.approx(expected, rel=1e-12)


def test_inertia_transverse_cylinder_needs_height():
    with pytest.raises(ValueError, match="h is required"):
        inertia_of("solid-cylinder-transverse", 0.1, 0.03)


def test_inertia_unknown_shape():
    with pytest.raises(ValueError):
        inertia_of("cube", 0.1, 0.03)


@pytest.mark.parametrize("field, value", [
    ("k_n", 0.0), ("k_t", -1.0), ("r", 0.0), ("inertia", 0.0), ("delta_n", -0.01), ("mu", -0.1),
    ("k_n", float("nan")),
])
def test_config_rejects_invalid(worked, field, value):
    data = worked.to_dict()
    data[field] = value
    with pytest.raises(ConfigError, match=field):
        GraspConfig.from_dict(data)


def test_config_json_round_trip(worked):
    text = worked.to_json()
    assert set(json.loads(text)) == {"k_n", "k_t", "delta_n", "r", "inertia", "mu"}
    assert GraspConfig.from_json(text) == worked


def test_config_json_rejects_unknown_field(worked):
    data = worked.to_dict() | {"f_p": 20.0}
    with pytest.raises(ConfigError, match="unknown field"):
        GraspConfig.from_dict(data)


def test_config_json_reports_missing_field(worked):
    data = worked.to_dict()
    del data["k_t"]
    with pytest.raises(ConfigError, match="k_t"):
        GraspConfig.from_dict(data)


def test_config_rejects_non_numeric(worked):
    with pytest.raises(ConfigError, match="r"):
        GraspConfig.from_dict(worked.to_dict() | {"r": "3cm"})
