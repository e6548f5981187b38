"""
Choosing grip parameters
========================

A stiffness map turns every (pressure, offset) into a grasp model. The
optimizer checks each grid point against the stability bound, which for a
two-finger grip reads f_y < k_t * r / 2, and ranks them.
"""

# %%
from softgrasp.friction import MapRow, StiffnessMap
from softgrasp.optimize import feasible_region, grip_force_bound, max_stable_preload

print(f"k_t = 320 N/m, r = 3 cm -> grip stays upright up to {grip_force_bound(320, 0.03):.1f} N")

# %%
# A made-up map: preload rises with pressure, transverse stiffness with
# offset.
rows = [MapRow(p, o, 400.0, 1000.0, 200.0 + 2e4 * o, 1.0 + 3e-5 * p)
        for p in (0.4e5, 0.8e5, 1.2e5) for o in (0.0, 0.01, 0.02, 0.03)]
smap = StiffnessMap(rows)

# %%
# The margin k_t r / 2 - f_y over a refined grid, as exported for a heat map.
region = feasible_region(smap, radius=0.03, mu=0.6, inertia=1e-4, refine=2)
print(region.margin_grid().round(2))

# %%
# Larger offsets tolerate more preload. The three objectives pick different
# grips; allowing bounded rotation never lowers the capacity.
for objective in ("max-margin", "max-preload-stable", "max-preload-no-slip"):
    result = max_stable_preload(smap, 0.03, 0.6, 1e-4, objective=objective, refine=2)
    c = result.best.candidate
    print(f"{objective:20s} pressure {c.pressure / 1e5:.1f} bar, offset {c.offset * 1e3:.0f} mm, "
          f"value {result.best_value:.2f} N, feasible {result.feasible}")
