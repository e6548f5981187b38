"""Rotational stability and slip of objects held in compliant precision grasps."""

from .model import (
    ConfigError,
    ContactForces,
    GraspConfig,
    SystemState,
    contact_forces,
    coulomb_margin,
    inertia_of,
    potential_energy,
    preload_force,
    torque,
)
from .stability import (
    EigenPair,
    LinearizedSystem,
    StabilityReport,
    analyze,
    eigenvalues,
    find_slip_preload,
    linearize,
    rest_angle,
    rest_angle_curve,
    slip_angle,
    slip_preload,
    stability_threshold,
)
from .dynamics import SimEvent, SimParams, Trajectory, detect_events, integrate, total_energy
from .friction import (
    ForceTrace,
    FrictionFit,
    PhaseSegmentation,
    StiffnessMap,
    StiffnessProbe,
    build_stiffness_map,
    estimate_stiffness,
    fit_friction,
    load_trace,
    query_stiffness,
    resolve_forces,
    segment_phases,
    synthetic_trace,
)
from .optimize import (
    GripCandidate,
    evaluate_candidate,
    feasible_region,
    grip_force_bound,
    max_stable_preload,
)

__version__ = "0.1.0"
