"""Spring-coupled model of an object held between two compliant fingertips.

Each finger is a lumped linear spring with stiffness ``k_n`` along the grip
normal and ``k_t`` across it, touching the object at radius ``r`` from its
centre of mass. The object rotates by ``theta`` about the axis normal to the
grip plane. All quantities are SI.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import NamedTuple

import numpy as np


class ConfigError(ValueError):
    """Invalid or malformed grasp configuration."""


@dataclass(frozen=True)
class GraspConfig:
    """Parameters of one modelled grasp.

    The preload force is not stored; it is always ``k_n * delta_n``.
    """

    k_n: float
    k_t: float
    delta_n: float
    r: float
    inertia: float
    mu: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{f.name}: expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(f"{f.name}: must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if self.k_n <= 0:
            raise ConfigError(f"k_n: must be > 0, got {self.k_n}")
        if self.r <= 0:
            raise ConfigError(f"r: must be > 0, got {self.r}")
        if self.inertia <= 0:
            raise ConfigError(f"inertia: must be > 0, got {self.inertia}")
        for name in ("k_t", "delta_n", "mu"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be >= 0, got {getattr(self, name)}")

    @property
    def f_p(self) -> float:
        return self.k_n * self.delta_n

    def with_preload(self, f_p: float) -> "GraspConfig":
        """Copy of this config with ``delta_n`` set to give preload ``f_p``."""
        return replace(self, delta_n=f_p / self.k_n)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GraspConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        names = [f.name for f in fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
        missing = [n for n in names if n not in data]
        if missing:
            raise ConfigError(f"missing field(s): {', '.join(missing)}")
        return cls(**{n: data[n] for n in names})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GraspConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


class SystemState(NamedTuple):
    theta: float
    theta_dot: float


class ContactForces(NamedTuple):
    """Normal and transverse force on one finger.

    ``f_n <= 0`` means the model has lost contact; the value is reported
    unclamped.
    """

    f_n: float
    f_t: float

    @property
    def in_contact(self) -> bool:
        return self.f_n > 0


def preload_force(config: GraspConfig) -> float:
    return config.k_n * config.delta_n


def potential_energy(config: GraspConfig, theta):
    """Spring energy stored at rotation ``theta`` (J). Accepts arrays."""
    c, s = np.cos(theta), np.sin(theta)
    r = config.r
    return config.k_n * (config.delta_n - r * (1 - c)) ** 2 + config.k_t * (r * s) ** 2


def torque(config: GraspConfig, theta):
    """Restoring torque, ``I * theta_ddot = torque(theta)``. Accepts arrays."""
    c, s = np.cos(theta), np.sin(theta)
    k_n, k_t, r = config.k_n, config.k_t, config.r
    return (2 * k_n * r * s * config.delta_n
            - 2 * k_n * r**2 * (1 - c) * s
            - 2 * k_t * r**2 * s * c)


def contact_forces(config: GraspConfig, theta) -> ContactForces:
    f_n = preload_force(config) - config.k_n * config.r * (1 - np.cos(theta))
    f_t = config.k_t * config.r * np.sin(theta)
    return ContactForces(f_n, f_t)


def coulomb_margin(forces: ContactForces, mu: float):
    """``mu * f_n - |f_t|``; negative means the contact slips."""
    return mu * forces.f_n - np.abs(forces.f_t)


_SHAPES = ("solid-cylinder-axial", "solid-cylinder-transverse", "solid-sphere")


def inertia_of(shape: str, mass: float, r: float, h: float | None = None) -> float:
    """Rotational inertia of a homogeneous solid about its centroid.

    Parameters
    ----------
    shape : str
        ``"solid-cylinder-axial"`` (about the symmetry axis),
        ``"solid-cylinder-transverse"`` (about a diameter through the centre)
        or ``"solid-sphere"``.
    mass, r : float
        Mass in kg and radius in m.
    h : float, optional
        Cylinder length in m; required for the transverse cylinder.
    """
    if mass <= 0 or r <= 0:
        raise ValueError("mass and r must be positive")
    if shape == "solid-cylinder-axial":
        return 0.5 * mass * r**2
    if shape == "solid-cylinder-transverse":
        if h is None:
            raise ValueError("h is required for solid-cylinder-transverse")
        if h <= 0:
            raise ValueError("h must be positive")
        return mass * (3 * r**2 + h**2) / 12
    if shape == "solid-sphere":
        return 0.4 * mass * r**2
    raise ValueError(f"unknown shape {shape!r}; expected one of {', '.join(_SHAPES)}")
