"""Equilibrium, stability and slip analysis of the grasp model."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import GraspConfig, coulomb_margin, contact_forces, preload_force

# |ratio| this close to 1 counts as the degenerate boundary (theta_r -> 0 or pi)
RATIO_TOL = 1e-12
SLIP_PRELOAD_TOL = 1e-4
_SCAN_POINTS = 2000


class LinearizedSystem(NamedTuple):
    """``x_dot = A x`` about theta = 0 with ``A = [[0, 1], [a21, 0]]``."""

    a21: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[0.0, 1.0], [self.a21, 0.0]])


class EigenPair(NamedTuple):
    lam1: complex
    lam2: complex

    @property
    def is_real(self) -> bool:
        return self.lam1.imag == 0 and self.lam1.real != 0

    @property
    def is_imaginary(self) -> bool:
        return self.lam1.real == 0 and self.lam1.imag != 0


def linearize(config: GraspConfig) -> LinearizedSystem:
    a21 = 2 * config.r * (preload_force(config) - config.k_t * config.r) / config.inertia
    return LinearizedSystem(a21)


def eigenvalues(linsys: LinearizedSystem) -> EigenPair:
    a = linsys.a21
    if a >= 0:
        lam = complex(math.sqrt(a), 0.0)
    else:
        lam = complex(0.0, math.sqrt(-a))
    # avoid -0.0 components in the negated eigenvalue
    return EigenPair(lam, complex(-lam.real or 0.0, -lam.imag or 0.0))


def stability_threshold(config: GraspConfig) -> float:
    """Preload at which the upright equilibrium turns unstable, ``k_t * r``."""
    return config.k_t * config.r


def rest_ratio(config: GraspConfig) -> float | None:
    """Cosine of the non-trivial equilibrium angle, or None when k_t == k_n."""
    denom = config.k_t * config.r - config.k_n * config.r
    if denom == 0:
        return None
    return (preload_force(config) - config.k_n * config.r) / denom


def rest_angle(config: GraspConfig) -> float | None:
    """Non-trivial equilibrium angle in (0, pi), if one exists.

    Returns None when the cosine ratio is out of (-1, 1); the only
    remaining equilibria are then theta = n*pi.
    """
    ratio = rest_ratio(config)
    if ratio is None or abs(ratio) >= 1 - RATIO_TOL:
        return None
    return math.acos(ratio)


@dataclass(frozen=True)
class RestCurve:
    """Rest angle sampled over preload; NaN marks samples with no solution."""

    f_p: np.ndarray
    theta_r: np.ndarray

    def __iter__(self):
        for f, th in zip(self.f_p, self.theta_r):
            yield float(f), (None if np.isnan(th) else float(th))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["f_p_N", "theta_r_rad"])
        for f, th in self:
            writer.writerow([repr(f), "nan" if th is None else repr(th)])
        return buf.getvalue()


def rest_angle_curve(config: GraspConfig, preload_range, steps: int) -> RestCurve:
    """Rest angle as the preload is swept over ``preload_range = (lo, hi)``.

    Below (and at) the stability threshold the object stays upright and the
    curve is 0.
    """
    lo, hi = preload_range
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps > 1 and not hi > lo:
        raise ValueError("preload_range must be increasing")
    f_p = np.linspace(lo, hi, steps) if steps > 1 else np.array([float(lo)])
    threshold = stability_threshold(config)
    theta = np.empty_like(f_p)
    for i, f in enumerate(f_p):
        if f <= threshold:
            theta[i] = 0.0
        else:
            th = rest_angle(config.with_preload(f))
            theta[i] = np.nan if th is None else th
    return RestCurve(f_p, theta)


def _slip_coefficients(config: GraspConfig):
    a = config.k_t * config.r
    b = -config.mu * config.k_n * config.r
    c = config.mu * preload_force(config) - config.mu * config.k_n * config.r
    return a, b, c


def slip_angle(config: GraspConfig) -> float | None:
    """First rotation angle at which the Coulomb limit ``f_t = mu f_n`` is hit.

    Solves ``a sin(theta) + b cos(theta) = c`` by the tangent half-angle
    substitution and keeps the smallest root in (0, pi] at which the finger
    is still in contact. The margin is even in theta, so roots beyond pi are
    never the first violation.
    """
    if config.mu <= 0:
        raise ValueError("slip_angle requires mu > 0")
    a, b, c = _slip_coefficients(config)
    disc = a * a + b * b - c * c
    if disc < 0:
        return None
    root = math.sqrt(disc)
    denom = b + c
    candidates = []
    if denom != 0:
        for sign in (1.0, -1.0):
            candidates.append(2 * math.atan((a + sign * root) / denom))
    else:
        # the substitution loses theta = pi; the quadratic degenerates to linear
        candidates.append(math.pi)
        if a != 0:
            candidates.append(2 * math.atan((c - b) / (2 * a)))
    good = []
    for th in candidates:
        th = th % (2 * math.pi)
        if not 0 < th <= math.pi:
            continue
        forces = contact_forces(config, th)
        # roundoff-level f_n is contact loss, not slip
        if forces.f_n <= 1e-12 * config.k_n * config.r:
            continue
        if abs(coulomb_margin(forces, config.mu)) > 1e-9 * max(1.0, abs(forces.f_n)):
            continue
        good.append(th)
    return min(good) if good else None


@dataclass(frozen=True)
class SlipPreloadSearch:
    """Outcome of the slip-preload search.

    ``reason`` is ``"found"``, ``"no-rest-angle"`` (the rest condition never
    holds in range) or ``"no-crossing"``.
    """

    f_p: float | None
    reason: str


def find_slip_preload(config: GraspConfig, f_p_max: float,
                      tol: float = SLIP_PRELOAD_TOL) -> SlipPreloadSearch:
    """Smallest preload above the threshold whose rest angle reaches the slip angle."""
    f_lo = stability_threshold(config)
    if not f_p_max > f_lo:
        raise ValueError(f"f_p_max ({f_p_max}) must exceed the stability threshold ({f_lo})")
    if config.mu <= 0:
        raise ValueError("slip preload requires mu > 0")

    any_rest = False

    def slips(f):
        nonlocal any_rest
        cfg = config.with_preload(f)
        th_r = rest_angle(cfg)
        if th_r is None:
            return False
        any_rest = True
        th_f = slip_angle(cfg)
        return th_f is not None and th_r >= th_f

    grid = np.linspace(f_lo, f_p_max, _SCAN_POINTS + 1)[1:]
    prev = f_lo
    for f in grid:
        if slips(f):
            lo, hi = prev, float(f)
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if slips(mid):
                    hi = mid
                else:
                    lo = mid
            return SlipPreloadSearch(hi, "found")
        prev = float(f)
    return SlipPreloadSearch(None, "no-crossing" if any_rest else "no-rest-angle")


def slip_preload(config: GraspConfig, f_p_max: float) -> float | None:
    return find_slip_preload(config, f_p_max).f_p


def default_search_limit(config: GraspConfig) -> float:
    """Upper preload at which a rest angle can still exist (theta_r -> pi)."""
    return 2 * config.k_n * config.r - config.k_t * config.r


def _complex_pair(z: complex):
    return [z.real, z.imag]


@dataclass(frozen=True)
class StabilityReport:
    f_p: float
    f_p_i: float
    stable: bool
    eigenvalues: EigenPair
    rest_angle: float | None = None
    slip_angle: float | None = None
    slip_preload: float | None = None
    slips_at_rest: bool | None = None

    def to_dict(self) -> dict:
        return {
            "f_p": self.f_p,
            "f_p_i": self.f_p_i,
            "stable": self.stable,
            "eigenvalues": [_complex_pair(self.eigenvalues.lam1),
                            _complex_pair(self.eigenvalues.lam2)],
            "rest_angle": self.rest_angle,
            "slip_angle": self.slip_angle,
            "slip_preload": self.slip_preload,
            "slips_at_rest": self.slips_at_rest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def analyze(config: GraspConfig, f_p_max: float | None = None) -> StabilityReport:
    """Run every analysis on one grasp and bundle the results.

    ``f_p_max`` bounds the slip-preload search; by default it is the largest
    preload for which a rest angle can exist.
    """
    f_p = preload_force(config)
    f_p_i = stability_threshold(config)
    th_r = rest_angle(config)
    th_f = slip_angle(config) if config.mu > 0 else None
    slips = None
    if th_r is not None:
        slips = th_f is not None and th_r >= th_f
    f_s = None
    if config.mu > 0:
        limit = default_search_limit(config) if f_p_max is None else f_p_max
        if limit > f_p_i:
            f_s = slip_preload(config, limit)
    return StabilityReport(
        f_p=f_p,
        f_p_i=f_p_i,
        stable=f_p < f_p_i,
        eigenvalues=eigenvalues(linearize(config)),
        rest_angle=th_r,
        slip_angle=th_f,
        slip_preload=f_s,
        slips_at_rest=slips,
    )
