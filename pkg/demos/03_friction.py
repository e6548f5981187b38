"""
Friction and stiffness from force traces
========================================

Dragging a loaded fingertip across a surface gives a transverse force that
rises (stick), bends over (transition) and levels off (slide). The stick
slope is the finger's transverse stiffness and the slide level over the
normal force is the friction coefficient.
"""

# %%
import warnings

import numpy as np

from softgrasp.friction import (StiffnessProbe, average_traces, build_stiffness_map,
                                estimate_stiffness, fit_friction, segment_phases,
                                synthetic_trace)

# %%
# Three noisy repeats of a 2 mm/s, 30 mm drag, averaged on a common
# displacement grid.
runs = [synthetic_trace(800, 0.6, noise=0.05, transition=1e-3, seed=s) for s in range(3)]
trace = average_traces(runs)

seg = segment_phases(trace)
print(f"T_m = {seg.t_stick_end:.3f} s, T_s = {seg.t_slide_start:.3f} s")
print({name: int(np.sum(seg.phases == i)) for i, name in enumerate(("stick", "transition", "slide"))})

# %%
fit = fit_friction(trace, seg)
print(f"k_y = {fit.k_y:.1f} N/m, mu = {fit.mu:.4f} (ratio of means {fit.mu_ratio_of_means:.4f})")

# %%
# Values outside the usual 0.49 to 0.77 band are reported with a warning.
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    slick = fit_friction(synthetic_trace(800, 0.95))
print(f"mu = {slick.mu:.3f}; {caught[0].message}")

# %%
# Small probing moves give directional stiffness: k = (f1 - f0) / (x1 - x0).
print(estimate_stiffness(StiffnessProbe("y", 0.0, 0.002, 1.0, 1.4)), "N/m")

# %%
# Repeating the probes over pressures and offsets gives a stiffness map
# that interpolates bilinearly between the measured grid points.
probes = []
for p in (0.4e5, 0.8e5, 1.2e5):
    for o in (0.0, 0.01, 0.02):
        for d, k in zip("xyz", (400.0, 1000.0, 300.0)):
            k = k * (1 + p / 1e5) * (1 + 10 * o)
            f0 = 2 + p / 1e5 if d == "y" else 0.5
            probes.append(StiffnessProbe(d, 0.0, 2e-3, f0, f0 + k * 2e-3, p, o))
smap = build_stiffness_map(probes)
print(smap.to_csv())
print("at 1.0 bar, 15 mm:", smap.query(1.0e5, 0.015))
