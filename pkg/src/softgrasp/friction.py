"""Friction and stiffness identification from force/displacement traces.

A sliding trace is recorded while the robot drags a loaded fingertip across
a fixed object at constant speed. The transverse force first rises
elastically (stick), bends over (transition) and settles at the Coulomb
limit (slide). The stick slope gives the finger's transverse bulk stiffness
and the slide level gives the friction coefficient.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

BAR = 1e5
MU_ENVELOPE = (0.49, 0.77)
MU_REFERENCE = 0.6

TRACE_COLUMNS = ("t_s", "disp_m", "fx_N", "fy_N", "fz_N")
MAP_COLUMNS = ("pressure_Pa", "offset_m", "kx_N_m", "ky_N_m", "kz_N_m", "fy_N")
PROBE_COLUMNS = ("direction", "x0_m", "x1_m", "f0_N", "f1_N", "pressure_Pa", "offset_m")

STICK = 0
TRANSITION = 1
SLIDE = 2
PHASE_NAMES = ("stick", "transition", "slide")


class TraceError(ValueError):
    """Base class for trace parsing and validation errors."""


class MalformedRowError(TraceError):
    pass


class MonotonicityError(TraceError):
    pass


class SchemaError(TraceError):
    pass


class SegmentationError(ValueError):
    pass


class InvalidNormalForceError(ValueError):
    pass


class ExtrapolationError(ValueError):
    pass


class IncompleteProbeGroupError(ValueError):
    pass


# metadata key -> (canonical SI name, factor to SI)
_META_UNITS = {
    "pressure_pa": ("pressure", 1.0),
    "pressure_bar": ("pressure", BAR),
    "contact_area_m2": ("contact_area", 1.0),
    "contact_area_cm2": ("contact_area", 1e-4),
    "h_offset_m": ("h_offset", 1.0),
    "h_offset_mm": ("h_offset", 1e-3),
    "v_offset_m": ("v_offset", 1.0),
    "v_offset_mm": ("v_offset", 1e-3),
}


@dataclass(frozen=True)
class ForceTrace:
    t: np.ndarray
    disp: np.ndarray
    fx: np.ndarray
    fy: np.ndarray
    fz: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in ("disp", "fx", "fy", "fz"):
            if len(getattr(self, name)) != n:
                raise SchemaError(f"column {name} has length {len(getattr(self, name))}, expected {n}")
        bad = np.flatnonzero(np.diff(self.t) <= 0)
        if bad.size:
            raise MonotonicityError(f"time not strictly increasing at sample {bad[0] + 1}")
        bad = np.flatnonzero(np.diff(self.disp) < 0)
        if bad.size:
            raise MonotonicityError(f"displacement decreases at sample {bad[0] + 1}")

    def __len__(self):
        return len(self.t)

    @property
    def f_n(self) -> np.ndarray:
        return resolve_forces(self.fx, self.fy, self.fz)[0]

    @property
    def f_t(self) -> np.ndarray:
        return np.asarray(self.fy, dtype=float)

    def scaled(self, factor: float) -> "ForceTrace":
        return ForceTrace(self.t, self.disp, self.fx * factor, self.fy * factor,
                          self.fz * factor, dict(self.metadata))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            unit = {"pressure": "_Pa", "contact_area": "_m2",
                    "h_offset": "_m", "v_offset": "_m"}.get(key, "")
            buf.write(f"# {key}{unit}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in zip(self.t, self.disp, self.fx, self.fy, self.fz):
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def resolve_forces(fx, fy, fz):
    """Normal and transverse force from sensor axes.

    The grip normal lies in the x-z plane; the z component comes from
    asymmetric contact pressure, so it adds to the normal force and never to
    friction.
    """
    return np.hypot(fx, fz), fy


def _read_text(source) -> str:
    # multi-line strings are CSV text, anything else string-like is a path
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source):
        with open(source, "rb") as fh:
            data = fh.read()
    elif hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_trace(source) -> ForceTrace:
    """Parse a trace CSV from a path, a file object, or raw bytes/str.

    Leading ``# key: value`` lines carry metadata; unit suffixes ``_bar``,
    ``_mm`` and ``_cm2`` are converted to SI.
    """
    text = _read_text(source)
    metadata = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if body:
                continue
            key, sep, value = stripped[1:].partition(":")
            if not sep:
                continue
            key, value = key.strip(), value.strip()
            if key.lower() in _META_UNITS:
                name, factor = _META_UNITS[key.lower()]
                try:
                    metadata[name] = float(value) * factor
                except ValueError:
                    raise MalformedRowError(f"metadata {key}: not a number: {value!r}") from None
            else:
                metadata[key] = value
            continue
        body.append(stripped)
    if not body:
        raise SchemaError("no header row")
    header = [h.strip() for h in next(csv.reader([body[0]]))]
    missing = [c for c in TRACE_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    idx = [header.index(c) for c in TRACE_COLUMNS]
    rows = []
    for lineno, row in enumerate(csv.reader(body[1:]), start=2):
        if len(row) != len(header):
            raise MalformedRowError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(row[i]) for i in idx]
        except ValueError:
            raise MalformedRowError(f"row {lineno}: non-numeric field") from None
        if not all(math.isfinite(v) for v in vals):
            raise MalformedRowError(f"row {lineno}: non-finite value")
        rows.append(vals)
    if not rows:
        raise SchemaError("no data rows")
    arr = np.array(rows)
    dt = np.diff(arr[:, 0])
    if (dt <= 0).any():
        # header is data row 1
        bad = int(np.flatnonzero(dt <= 0)[0]) + 3
        raise MonotonicityError(f"row {bad}: time is not strictly increasing")
    dd = np.diff(arr[:, 1])
    if (dd < 0).any():
        bad = int(np.flatnonzero(dd < 0)[0]) + 3
        raise MonotonicityError(f"row {bad}: displacement decreases")
    return ForceTrace(*arr.T, metadata=metadata)


def synthetic_trace(k_y: float, mu: float, f_n: float = 10.0, *, velocity: float = 2e-3,
                    travel: float | None = None, rate: float = 125.0,
                    noise: float = 0.0, transition: float = 0.0,
                    asymmetry: float = 0.1, seed=None, metadata=None) -> ForceTrace:
    """Generate a constant-velocity sliding trace with known stiffness and friction.

    The transverse force rises as ``k_y * disp`` until it reaches ``mu * f_n``.
    ``transition`` (m) rounds the kink with a quadratic blend of that width.
    The normal force is split between x and z by the ``asymmetry`` angle (rad).
    Gaussian noise of std ``noise`` (N) is added to each force channel.

    ``travel`` defaults to 30 mm, extended to three times the stick distance
    when the finger would not reach sliding.
    """
    stick = mu * f_n / k_y
    if travel is None:
        travel = max(30e-3, 3 * (stick + transition))
    n = int(round(travel / velocity * rate)) + 1
    t = np.arange(n) / rate
    disp = velocity * t
    f_t = np.minimum(k_y * disp, mu * f_n)
    if transition > 0:
        # quadratic blend between the ramp and the plateau, C1 at both ends
        x0 = stick - transition / 2
        x1 = stick + transition / 2
        m = (disp > x0) & (disp < x1)
        u = disp[m] - x0
        f_t[m] = k_y * x0 + k_y * u - k_y * u**2 / (2 * transition)
    rng = np.random.default_rng(seed)
    fx = np.full(n, f_n * math.cos(asymmetry))
    fz = np.full(n, f_n * math.sin(asymmetry))
    fy = f_t
    if noise > 0:
        fx = fx + rng.normal(0, noise, n)
        fy = fy + rng.normal(0, noise, n)
        fz = fz + rng.normal(0, noise, n)
    return ForceTrace(t, disp, fx, fy, fz, dict(metadata or {}))


def average_traces(traces, n_points: int | None = None) -> ForceTrace:
    """Mean of repeated runs, resampled onto a common displacement grid."""
    traces = list(traces)
    if not traces:
        raise ValueError("no traces to average")
    lo = max(float(tr.disp[0]) for tr in traces)
    hi = min(float(tr.disp[-1]) for tr in traces)
    if not hi > lo:
        raise ValueError("traces share no displacement range")
    if n_points is None:
        n_points = min(len(tr) for tr in traces)
    grid = np.linspace(lo, hi, n_points)
    cols = {name: np.mean([np.interp(grid, tr.disp, getattr(tr, name)) for tr in traces], axis=0)
            for name in ("t", "fx", "fy", "fz")}
    t = cols["t"]
    # interpolated times can tie where a run paused; nudge to stay strictly increasing
    t = np.maximum.accumulate(t + np.arange(n_points) * 1e-12)
    return ForceTrace(t, grid, cols["fx"], cols["fy"], cols["fz"], dict(traces[0].metadata))


@dataclass(frozen=True)
class PhaseSegmentation:
    t_stick_end: float
    t_slide_start: float
    phases: np.ndarray  # per-sample STICK / TRANSITION / SLIDE
    stick_slope: float  # early-window slope the thresholds were taken from

    @property
    def stick_end_index(self) -> int:
        return int(np.flatnonzero(self.phases == STICK)[-1])

    @property
    def slide_start_index(self) -> int:
        return int(np.flatnonzero(self.phases == SLIDE)[0])

    def labels(self) -> list[str]:
        return [PHASE_NAMES[p] for p in self.phases]


def _robust_noise(y: np.ndarray) -> float:
    d2 = np.diff(y, 2)
    if d2.size == 0:
        return 0.0
    mad = np.median(np.abs(d2 - np.median(d2)))
    return 1.4826 * mad / math.sqrt(6)


def _window_slopes(x: np.ndarray, y: np.ndarray, half: int) -> np.ndarray:
    """Least-squares slope of y on x in a sliding window of ``2*half + 1`` samples.

    Samples within ``half`` of either end reuse the nearest full window.
    """
    n = len(x)
    x = x - x.mean()
    c = lambda a: np.concatenate(([0.0], np.cumsum(a)))
    s1, sx, sy, sxx, sxy = c(np.ones(n)), c(x), c(y), c(x * x), c(x * y)
    centre = np.clip(np.arange(n), half, max(half, n - 1 - half))
    lo = np.clip(centre - half, 0, n)
    hi = np.clip(centre + half + 1, 0, n)
    m = s1[hi] - s1[lo]
    mx = sx[hi] - sx[lo]
    my = sy[hi] - sy[lo]
    vxx = (sxx[hi] - sxx[lo]) - mx * mx / m
    vxy = (sxy[hi] - sxy[lo]) - mx * my / m
    with np.errstate(invalid="ignore", divide="ignore"):
        slope = vxy / vxx
    scale = np.abs(x).max() if n else 1.0
    slope[vxx <= 1e-18 * (scale**2 + 1e-300) * m] = np.nan
    return slope


def _lsq_slope(x, y) -> float:
    xm = x - x.mean()
    return float(np.dot(xm, y - y.mean()) / np.dot(xm, xm))


def _three_piece_sse(x, y, i1, i2):
    # stick line, transition line, then a flat slide level; continuous at both breaks
    cols = [np.ones_like(x), np.minimum(x, x[i1])]
    if i2 != i1:
        cols.append(np.clip(x - x[i1], 0, x[i2] - x[i1]))
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    return float(res @ res)


def _refine_breaks(x, y, lo, hi, first, second):
    """Breaks of the best continuous stick/transition/flat-slide fit on [lo, hi).

    The stick end is searched in ``first`` and the slide start in ``second``
    (absolute index ranges), coarse to fine. A separate transition segment
    costs two parameters; it is kept only when it lowers the BIC against a
    single kink.
    """
    xs, ys = x[lo:hi], y[lo:hi]
    m = hi - lo
    r1 = [i - lo for i in first if 0 < i - lo < m - 1]
    r2 = [i - lo for i in second if 0 < i - lo < m - 1]
    stride = max(1, max(len(r1), len(r2)) // 12)

    def near(c, allowed):
        return [i for i in range(c - stride, c + stride + 1) if i in allowed]

    def best(pairs):
        return min((_three_piece_sse(xs, ys, a, b), a, b) for a, b in pairs)

    kinks = sorted(set(r1) | set(r2))
    _, a, _ = best((c, c) for c in kinks[::stride])
    sse_k, a_k, _ = best((c, c) for c in near(a, set(kinks)))
    pairs = [(a, b) for a in r1[::stride] for b in r2[::stride] if b > a]
    if pairs:
        _, a, b = best(pairs)
        s1, s2 = set(r1), set(r2)
        sse_t, a_t, b_t = best((p, q) for p in near(a, s1) for q in near(b, s2) if q > p)
        if sse_t > 0 and m * math.log(sse_k / sse_t) > 2 * math.log(m):
            return lo + a_t, lo + b_t
    return lo + a_k, lo + a_k


def segment_phases(trace: ForceTrace, *, stick_ratio: float = 0.8, slide_ratio: float = 0.1,
                   smoothing: int = 5, early_fraction: float = 0.25,
                   slope_precision: float = 0.025, refine: bool = True) -> PhaseSegmentation:
    """Split a sliding trace into stick, transition and slide phases.

    Parameters
    ----------
    trace : ForceTrace
        Must run from motion onset into steady sliding.
    stick_ratio, slide_ratio : float
        A sample belongs to the initial stick run while its local slope of
        f_t against displacement is at least ``stick_ratio`` times the early
        stick slope, and to the final slide run while the absolute local
        slope stays below ``slide_ratio`` times it.
    smoothing : int
        Minimum local-slope window in samples. The window is widened
        automatically until the slope noise is below ``slope_precision``
        times the early slope.
    early_fraction : float
        Share of the pre-plateau samples used for the early stick slope.
    refine : bool
        Relocate both boundaries with a continuous three-segment
        least-squares fit around the threshold estimate.

    Raises
    ------
    SegmentationError
        If the trace cannot show both a stick and a slide phase.
    """
    x = np.asarray(trace.disp, dtype=float)
    y = trace.f_t
    n = len(x)
    if n < 4 * smoothing:
        raise SegmentationError(f"trace too short to segment ({n} samples)")

    sigma = _robust_noise(y)
    tail = y[-max(n // 10, smoothing):]
    plateau = float(np.median(tail))
    if plateau <= 0 or plateau <= 5 * sigma:
        raise SegmentationError("no force build-up above noise")
    kernel = np.ones(smoothing) / smoothing
    smooth = np.convolve(y, kernel, mode="same")
    reach = np.flatnonzero(smooth >= 0.9 * plateau)
    m0 = int(reach[0]) if reach.size else n
    early = max(int(early_fraction * m0), 3)
    if m0 < 2 * smoothing or early >= n:
        raise SegmentationError("no stick phase before the plateau")
    k0 = _lsq_slope(x[:early], y[:early]) if np.ptp(x[:early]) > 0 else float("nan")
    if not k0 > 0:
        raise SegmentationError("stick slope is not positive")

    dx = float(np.median(np.diff(x)))
    if dx <= 0:
        raise SegmentationError("displacement does not advance")
    half = max(smoothing // 2, 1)
    while half < n // 4:
        s2 = half * (half + 1) * (2 * half + 1) / 3
        if sigma / (dx * math.sqrt(s2)) <= slope_precision * k0:
            break
        half += 1
    slopes = _window_slopes(x, y, half)

    stick_ok = slopes >= stick_ratio * k0
    i_m = 0
    while i_m + 1 < n and stick_ok[i_m + 1]:
        i_m += 1
    slide_ok = np.abs(slopes) <= slide_ratio * k0
    i_s = n - 1
    while i_s - 1 > i_m and slide_ok[i_s - 1]:
        i_s -= 1
    if not stick_ok[0] or i_m < 2:
        raise SegmentationError("no stick phase at the start of the trace")
    if not slide_ok[-1] or n - i_s < 3:
        raise SegmentationError("no slide phase at the end of the trace")

    if refine:
        # the threshold crossings are blurred by up to about one window half-width
        reach = 2 * half
        lo, hi = max(0, i_m - 2 * reach), min(n, i_s + 2 * reach + 1)
        i_m, i_s = _refine_breaks(x, y, lo, hi,
                                  range(i_m - reach, i_m + reach + 1),
                                  range(i_s - reach, i_s + reach + 1))

    # a sharp kink gives i_m == i_s: T_m == T_s and the kink sample counts as slide
    phases = np.full(n, TRANSITION, dtype=np.int8)
    phases[: i_m + 1] = STICK
    phases[i_s:] = SLIDE
    return PhaseSegmentation(float(trace.t[i_m]), float(trace.t[i_s]), phases, k0)


@dataclass(frozen=True)
class FrictionFit:
    mu: float
    k_y: float
    mu_ratio_of_means: float
    stick_rmse: float
    slide_std: float
    segmentation: PhaseSegmentation
    warnings: tuple = ()

    @property
    def in_envelope(self) -> bool:
        return MU_ENVELOPE[0] <= self.mu <= MU_ENVELOPE[1]

    def to_dict(self) -> dict:
        seg = self.segmentation
        return {
            "mu": self.mu,
            "k_y": self.k_y,
            "mu_ratio_of_means": self.mu_ratio_of_means,
            "mu_reference": MU_REFERENCE,
            "mu_envelope": list(MU_ENVELOPE),
            "in_envelope": self.in_envelope,
            "T_m": seg.t_stick_end,
            "T_s": seg.t_slide_start,
            "residuals": {"stick_rmse_N": self.stick_rmse, "slide_ratio_std": self.slide_std},
            "samples": {name: int(np.sum(seg.phases == i)) for i, name in enumerate(PHASE_NAMES)},
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def fit_friction(trace: ForceTrace, seg: PhaseSegmentation | None = None) -> FrictionFit:
    """Stick-phase stiffness and slide-phase friction coefficient.

    ``k_y`` is the least-squares slope of f_t on displacement over the stick
    samples; ``mu`` is the mean of the pointwise ratio f_t / f_n over the
    slide samples. A friction coefficient outside the usual envelope raises
    a ``UserWarning`` and is recorded in ``warnings``.
    """
    if seg is None:
        seg = segment_phases(trace)
    f_n, f_t = trace.f_n, trace.f_t
    stick = seg.phases == STICK
    slide = seg.phases == SLIDE
    if stick.sum() < 2 or slide.sum() < 1:
        raise SegmentationError("segmentation has an empty stick or slide phase")
    if (f_n[slide] <= 0).any():
        raise InvalidNormalForceError("normal force is not positive in the slide window")
    x = trace.disp[stick]
    k_y = _lsq_slope(x, f_t[stick])
    if not k_y > 0:
        raise SegmentationError("stick slope is not positive")
    resid = f_t[stick] - (f_t[stick].mean() + k_y * (x - x.mean()))
    ratio = f_t[slide] / f_n[slide]
    mu = float(np.mean(ratio))
    notes = []
    if not MU_ENVELOPE[0] <= mu <= MU_ENVELOPE[1]:
        msg = (f"friction coefficient {mu:.3f} outside the expected "
               f"[{MU_ENVELOPE[0]}, {MU_ENVELOPE[1]}] band (reference {MU_REFERENCE})")
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)
    return FrictionFit(
        mu=mu,
        k_y=k_y,
        mu_ratio_of_means=float(np.mean(f_t[slide]) / np.mean(f_n[slide])),
        stick_rmse=float(np.sqrt(np.mean(resid**2))),
        slide_std=float(np.std(ratio)),
        segmentation=seg,
        warnings=tuple(notes),
    )


@dataclass(frozen=True)
class StiffnessProbe:
    """One small relative move of the finger and the forces before and after it."""

    direction: str
    x0: float
    x1: float
    f0: float
    f1: float
    pressure: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.direction not in ("x", "y", "z"):
            raise ValueError(f"direction must be x, y or z, got {self.direction!r}")
        if self.x1 == self.x0:
            raise ValueError("probe displacement is zero")


def estimate_stiffness(probe: StiffnessProbe) -> float:
    return (probe.f1 - probe.f0) / (probe.x1 - probe.x0)


@dataclass(frozen=True)
class MapRow:
    pressure: float
    offset: float
    k_x: float
    k_y: float
    k_z: float
    f_y: float


class StiffnessMap:
    """Directional finger stiffness and preload over (pressure, offset).

    Queries interpolate bilinearly on the rectangular grid of keys and
    refuse to extrapolate.
    """

    def __init__(self, rows, flagged=()):
        rows = sorted(rows, key=lambda r: (r.pressure, r.offset))
        keys = [(r.pressure, r.offset) for r in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (pressure, offset) rows")
        if not rows:
            raise ValueError("empty stiffness map")
        for r in rows:
            if min(r.k_x, r.k_y, r.k_z) < 0:
                raise ValueError(f"negative stiffness at {(r.pressure, r.offset)}")
        self.rows = tuple(rows)
        self.flagged = frozenset(flagged)
        self.pressures = np.array(sorted({r.pressure for r in rows}))
        self.offsets = np.array(sorted({r.offset for r in rows}))
        self._interp = None
        if len(rows) == len(self.pressures) * len(self.offsets):
            values = np.array([[r.k_x, r.k_y, r.k_z, r.f_y] for r in rows])
            grid = values.reshape(len(self.pressures), len(self.offsets), 4)
            self._interp = RegularGridInterpolator((self.pressures, self.offsets), grid,
                                                   method="linear", bounds_error=True)

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, StiffnessMap) and self.rows == other.rows

    @property
    def is_grid(self) -> bool:
        return self._interp is not None

    def query(self, pressure: float, offset: float):
        """``(k_x, k_y, k_z, f_y)`` at a point inside the grid."""
        if self._interp is None:
            raise ValueError("stiffness map is not a complete rectangular grid")
        p_lo, p_hi = self.pressures[0], self.pressures[-1]
        o_lo, o_hi = self.offsets[0], self.offsets[-1]
        if not (p_lo <= pressure <= p_hi and o_lo <= offset <= o_hi):
            raise ExtrapolationError(
                f"query ({pressure}, {offset}) outside map range "
                f"[{p_lo}, {p_hi}] x [{o_lo}, {o_hi}]")
        return tuple(float(v) for v in self._interp([[pressure, offset]])[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(MAP_COLUMNS)
        for r in self.rows:
            writer.writerow([repr(float(v)) for v in (r.pressure, r.offset, r.k_x, r.k_y, r.k_z, r.f_y)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, source) -> "StiffnessMap":
        text = _read_text(source)
        reader = csv.DictReader(line for line in text.splitlines() if line and not line.startswith("#"))
        missing = [c for c in MAP_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"missing column(s): {', '.join(missing)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append(MapRow(*(float(rec[c]) for c in MAP_COLUMNS)))
            except (TypeError, ValueError):
                raise MalformedRowError(f"row {lineno}: non-numeric field") from None
        return cls(rows)


def query_stiffness(smap: StiffnessMap, pressure: float, offset: float):
    return smap.query(pressure, offset)


def build_stiffness_map(probes) -> StiffnessMap:
    """One map row per (pressure, offset) group of x, y and z probes.

    Repeated probes of one direction are averaged and the group is listed in
    ``flagged``. The preload is the y-direction force before the move.
    """
    groups = defaultdict(lambda: defaultdict(list))
    for p in probes:
        groups[(p.pressure, p.offset)][p.direction].append(p)
    rows, flagged = [], []
    for key, by_dir in groups.items():
        missing = [d for d in "xyz" if d not in by_dir]
        if missing:
            raise IncompleteProbeGroupError(
                f"group pressure={key[0]}, offset={key[1]} lacks {', '.join(missing)} probe(s)")
        if any(len(v) > 1 for v in by_dir.values()):
            flagged.append(key)
        k = {d: float(np.mean([estimate_stiffness(p) for p in by_dir[d]])) for d in "xyz"}
        f_y = float(np.mean([p.f0 for p in by_dir["y"]]))
        rows.append(MapRow(key[0], key[1], k["x"], k["y"], k["z"], f_y))
    return StiffnessMap(rows, flagged)


def load_probes(source) -> list[StiffnessProbe]:
    """Read probes from CSV with header ``direction,x0_m,x1_m,f0_N,f1_N,pressure_Pa,offset_m``."""
    text = _read_text(source)
    reader = csv.DictReader(line for line in text.splitlines() if line and not line.startswith("#"))
    missing = [c for c in PROBE_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    probes = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            nums = [float(rec[c]) for c in PROBE_COLUMNS[1:]]
        except (TypeError, ValueError):
            raise MalformedRowError(f"row {lineno}: non-numeric field") from None
        probes.append(StiffnessProbe(rec["direction"].strip(), *nums))
    return probes
