"""Time-domain simulation of the object's rotation between the fingers.

The undamped model only oscillates about its equilibria; an optional viscous
term ``-damping * theta_dot`` lets trajectories settle so rest angles can be
observed in simulation.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .model import GraspConfig, SystemState, contact_forces, coulomb_margin, potential_energy
from .stability import rest_angle

CONVERGED_ANGLE_TOL = 1e-4
CONVERGED_RATE_TOL = 1e-4
CONVERGED_DWELL = 0.5


@dataclass(frozen=True)
class SimParams:
    dt: float
    t_max: float
    damping: float = 0.0
    theta0: float = 0.0
    theta_dot0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ValueError(f"t_max must be >= dt, got {self.t_max}")
        if not self.damping >= 0:
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        for name in ("theta0", "theta_dot0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def n_samples(self) -> int:
        # tolerance keeps e.g. 5.0 / 1e-3 from flooring to 4999
        return int(math.floor(self.t_max / self.dt + 1e-9)) + 1


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution. Arrays share one length; ``diverged`` marks an early stop."""

    t: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    f_n: np.ndarray
    f_t: np.ndarray
    energy: np.ndarray
    diverged: bool = False

    def __len__(self):
        return len(self.t)

    def state(self, i: int) -> SystemState:
        return SystemState(float(self.theta[i]), float(self.theta_dot[i]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t_s", "theta_rad", "theta_dot_rad_s", "f_n_N", "f_t_N", "energy_J"])
        cols = (self.t, self.theta, self.theta_dot, self.f_n, self.f_t, self.energy)
        for row in zip(*cols):
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


@dataclass(frozen=True)
class SimEvent:
    kind: str  # slip-onset | contact-loss | converged | diverged
    t: float
    theta: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "t": self.t, "theta": self.theta}


def events_to_json(events) -> str:
    return json.dumps([e.to_dict() for e in events], indent=2)


def total_energy(config: GraspConfig, state: SystemState) -> float:
    theta, theta_dot = state
    return 0.5 * config.inertia * theta_dot**2 + float(potential_energy(config, theta))


def _accel_fn(config: GraspConfig, damping: float):
    k_n, k_t, r, d = config.k_n, config.k_t, config.r, config.delta_n
    inv_i = 1.0 / config.inertia
    sin, cos = math.sin, math.cos

    def accel(theta, omega):
        s, c = sin(theta), cos(theta)
        tau = 2 * k_n * r * s * d - 2 * k_n * r * r * (1 - c) * s - 2 * k_t * r * r * s * c
        return (tau - damping * omega) * inv_i

    return accel


def integrate(config: GraspConfig, params: SimParams) -> Trajectory:
    """Fixed-step classical RK4 solution of ``I theta'' = tau(theta) - c theta'``.

    Runs to ``t_max``; stops early only if the state becomes non-finite, in
    which case the trajectory ends at the last finite sample and is flagged.
    """
    n = params.n_samples
    h = params.dt
    accel = _accel_fn(config, params.damping)
    theta = np.empty(n)
    omega = np.empty(n)
    th, om = float(params.theta0), float(params.theta_dot0)
    theta[0], omega[0] = th, om
    count, diverged = n, False
    for i in range(1, n):
        try:
            k1t, k1o = om, accel(th, om)
            k2t = om + 0.5 * h * k1o
            k2o = accel(th + 0.5 * h * k1t, k2t)
            k3t = om + 0.5 * h * k2o
            k3o = accel(th + 0.5 * h * k2t, k3t)
            k4t = om + h * k3o
            k4o = accel(th + h * k3t, k4t)
            th = th + h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t)
            om = om + h / 6 * (k1o + 2 * k2o + 2 * k3o + k4o)
        except (ValueError, OverflowError):  # sin/cos of inf
            th = math.nan
        if not (math.isfinite(th) and math.isfinite(om)):
            count, diverged = i, True
            break
        theta[i], omega[i] = th, om
    theta, omega = theta[:count], omega[:count]
    t = np.arange(count) * h
    f_n, f_t = contact_forces(config, theta)
    with np.errstate(over="ignore"):  # huge but finite states just before divergence
        energy = 0.5 * config.inertia * omega**2 + potential_energy(config, theta)
    return Trajectory(t, theta, omega, np.asarray(f_n), np.asarray(f_t), energy, diverged)


def _first(mask: np.ndarray) -> int | None:
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def _convergence_start(traj: Trajectory, ref: float, dwell: float) -> int | None:
    ok = ((np.abs(traj.theta - ref) < CONVERGED_ANGLE_TOL)
          & (np.abs(traj.theta_dot) < CONVERGED_RATE_TOL))
    if len(traj) < 2:
        return None
    dt = traj.t[1] - traj.t[0]
    need = int(math.ceil(dwell / dt - 1e-9)) + 1
    # start of the first run of `need` consecutive ok samples
    run = 0
    for i, flag in enumerate(ok):
        run = run + 1 if flag else 0
        if run >= need:
            return i - need + 1
    return None


def detect_events(config: GraspConfig, traj: Trajectory,
                  dwell: float = CONVERGED_DWELL) -> list[SimEvent]:
    """Slip, contact-loss and terminal events along a trajectory, ordered by time.

    Convergence is judged against theta = 0 and, when it exists, +/- the rest
    angle; the event time is the start of the dwell window.
    """
    events = []
    forces = contact_forces(config, traj.theta)
    i = _first(coulomb_margin(forces, config.mu) < 0)
    if i is not None:
        events.append(SimEvent("slip-onset", float(traj.t[i]), float(traj.theta[i])))
    i = _first(np.asarray(forces.f_n) <= 0)
    if i is not None:
        events.append(SimEvent("contact-loss", float(traj.t[i]), float(traj.theta[i])))

    if traj.diverged:
        events.append(SimEvent("diverged", float(traj.t[-1]), float(traj.theta[-1])))
    else:
        refs = [0.0]
        th_r = rest_angle(config)
        if th_r is not None:
            refs += [th_r, -th_r]
        starts = [s for s in (_convergence_start(traj, ref, dwell) for ref in refs) if s is not None]
        if starts:
            s = min(starts)
            events.append(SimEvent("converged", float(traj.t[s]), float(traj.theta[s])))
    events.sort(key=lambda e: e.t)
    return events
