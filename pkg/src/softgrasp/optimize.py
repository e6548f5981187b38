"""Grip parameter search over a measured stiffness map.

Each candidate grip (pressure, offset) is turned into a grasp model through
the map and checked against the rotational stability and slip limits. The
map stores a per-finger preload while the limits are stated for the whole
grip, so limits are divided by ``finger_count_share`` before comparison.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .friction import StiffnessMap
from .model import GraspConfig
from .stability import StabilityReport, analyze

AXES = ("x-instability", "z-instability")
OBJECTIVES = ("max-margin", "max-preload-stable", "max-preload-no-slip")


def grip_force_bound(k_t: float, r: float, finger_count_share: float = 2.0) -> float:
    """Largest grip preload keeping the upright grasp stable."""
    return k_t * r / finger_count_share


@dataclass(frozen=True)
class GripCandidate:
    pressure: float
    offset: float
    object_radius: float
    axis: str = "x-instability"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.object_radius > 0:
            raise ValueError("object_radius must be positive")

    def stiffness_pair(self, k_x: float, k_y: float, k_z: float):
        """``(k_n, k_t)`` for this rotation axis."""
        if self.axis == "x-instability":
            return k_y, k_z
        return k_y, k_x

    def to_dict(self) -> dict:
        return {"pressure": self.pressure, "offset": self.offset,
                "object_radius": self.object_radius, "axis": self.axis}


@dataclass(frozen=True)
class CandidateVerdict:
    candidate: GripCandidate
    config: GraspConfig
    f_p: float
    f_p_i: float
    margin: float
    stable: bool
    slip_preload: float | None
    report: StabilityReport

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate.to_dict(),
            "f_p": self.f_p,
            "f_p_i": self.f_p_i,
            "margin": self.margin,
            "stable": self.stable,
            "slip_preload": self.slip_preload,
            "config": self.config.to_dict(),
            "report": self.report.to_dict(),
        }


def evaluate_candidate(smap: StiffnessMap, cand: GripCandidate, mu: float, inertia: float,
                       finger_count_share: float = 2.0) -> CandidateVerdict:
    k_x, k_y, k_z, f_y = smap.query(cand.pressure, cand.offset)
    k_n, k_t = cand.stiffness_pair(k_x, k_y, k_z)
    config = GraspConfig(k_n=k_n, k_t=k_t, delta_n=f_y / k_n, r=cand.object_radius,
                         inertia=inertia, mu=mu)
    report = analyze(config)
    f_p_i = report.f_p_i / finger_count_share
    slip = None if report.slip_preload is None else report.slip_preload / finger_count_share
    margin = f_p_i - f_y
    return CandidateVerdict(cand, config, f_y, f_p_i, margin, margin > 0, slip, report)


def _axis_grid(knots: np.ndarray, refine: int) -> np.ndarray:
    if len(knots) == 1 or refine <= 1:
        return knots.copy()
    parts = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(knots[:-1], knots[1:])]
    return np.concatenate(parts + [knots[-1:]])


@dataclass(frozen=True)
class FeasibleRegion:
    pressures: np.ndarray
    offsets: np.ndarray
    verdicts: tuple  # row-major over (pressure, offset)

    def margin_grid(self) -> np.ndarray:
        return np.array([v.margin for v in self.verdicts]).reshape(len(self.pressures), len(self.offsets))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["pressure", "offset", "margin_N", "stable"])
        for v in self.verdicts:
            c = v.candidate
            writer.writerow([repr(c.pressure), repr(c.offset), repr(v.margin), str(v.stable).lower()])
        return buf.getvalue()


def feasible_region(smap: StiffnessMap, radius: float, mu: float, inertia: float,
                    refine: int = 1, axis: str = "x-instability",
                    finger_count_share: float = 2.0) -> FeasibleRegion:
    """Evaluate every grid point of the map, with ``refine - 1`` extra points per cell."""
    if refine < 1:
        raise ValueError("refine must be >= 1")
    ps = _axis_grid(smap.pressures, refine)
    os_ = _axis_grid(smap.offsets, refine)
    verdicts = tuple(
        evaluate_candidate(smap, GripCandidate(float(p), float(o), radius, axis), mu, inertia,
                           finger_count_share)
        for p in ps for o in os_)
    return FeasibleRegion(ps, os_, verdicts)


@dataclass(frozen=True)
class RankedVerdict:
    verdict: CandidateVerdict
    feasible: bool
    value: float      # objective value (higher is better)
    violation: float  # how far past the binding limit, 0 when feasible

    def to_dict(self) -> dict:
        c = self.verdict.candidate
        return {"pressure": c.pressure, "offset": c.offset, "feasible": self.feasible,
                "value": self.value, "violation": self.violation,
                "f_p": self.verdict.f_p, "f_p_i": self.verdict.f_p_i,
                "margin": self.verdict.margin, "slip_preload": self.verdict.slip_preload}


@dataclass(frozen=True)
class OptimizationResult:
    best: CandidateVerdict
    ranked: tuple
    objective: str
    feasible: bool

    @property
    def best_value(self) -> float:
        return self.ranked[0].value

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "feasible": self.feasible,
            "best": self.best.to_dict(),
            "best_value": self.best_value,
            "ranked": [r.to_dict() for r in self.ranked],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _score(v: CandidateVerdict, objective: str) -> RankedVerdict:
    if objective == "max-margin":
        return RankedVerdict(v, v.stable, v.margin, max(0.0, -v.margin))
    if objective == "max-preload-stable":
        return RankedVerdict(v, v.stable, v.f_p, max(0.0, -v.margin))
    # rotation is allowed as long as the object comes to rest before slipping
    limit = v.f_p_i if v.slip_preload is None else max(v.f_p_i, v.slip_preload)
    ok = v.stable or v.f_p < limit
    return RankedVerdict(v, ok, v.f_p, 0.0 if ok else v.f_p - limit)


def max_stable_preload(smap: StiffnessMap, radius: float, mu: float, inertia: float,
                       objective: str = "max-margin", refine: int = 1,
                       axis: str = "x-instability",
                       finger_count_share: float = 2.0) -> OptimizationResult:
    """Exhaustive grid search for the best grip under ``objective``.

    Feasible candidates rank first by objective value, infeasible ones after
    them by increasing violation; ties break on (pressure, offset).
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    region = feasible_region(smap, radius, mu, inertia, refine, axis, finger_count_share)
    scored = [_score(v, objective) for v in region.verdicts]

    def key(s: RankedVerdict):
        c = s.verdict.candidate
        if s.feasible:
            return (0, -s.value, c.pressure, c.offset)
        return (1, s.violation, c.pressure, c.offset)

    ranked = tuple(sorted(scored, key=key))
    return OptimizationResult(ranked[0].verdict, ranked, objective, ranked[0].feasible)
