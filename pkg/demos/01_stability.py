"""
Rotational stability of a soft two-finger grasp
================================================

A cylinder held between two compliant fingertips can stay upright or roll
into a tilted rest pose. This walk-through computes the instability preload,
the rest angle, the slip angle and the preload at which rest turns into slip.
"""

# %%
# A grasp is six numbers: normal and transverse finger stiffness, the
# normal squeeze, object radius, object inertia and friction.
import numpy as np

from softgrasp import GraspConfig, analyze, rest_angle_curve, slip_angle, stability_threshold

grasp = GraspConfig(k_n=1000, k_t=500, delta_n=0.02, r=0.03, inertia=1e-4, mu=0.6)
print(f"preload f_p = {grasp.f_p:.1f} N")

# %%
# Upright holding is stable only while the preload stays below k_t * r.
print(f"instability preload f_p^i = {stability_threshold(grasp):.1f} N")

report = analyze(grasp)
print(report.to_json())

# %%
# Past the threshold the object settles at a tilted rest angle. The curve
# stays at zero until f_p^i and then climbs.
curve = rest_angle_curve(grasp, (0.0, 30.0), 13)
for f, th in curve:
    label = "none" if th is None else f"{np.degrees(th):6.2f} deg"
    print(f"f_p = {f:5.1f} N  theta_r = {label}")

# %%
# The object slips once its rotation reaches the slip angle. Here the rest
# angle lies beyond it, so the grasp rotates and then slips.
print(f"slip angle {np.degrees(slip_angle(grasp)):.2f} deg, "
      f"rest angle {np.degrees(report.rest_angle):.2f} deg")
print(f"slips at rest: {report.slips_at_rest}; slip preload {report.slip_preload:.3f} N")

# %%
# A stiffer transverse direction postpones the onset of rotation.
for k_t in (300, 500, 700):
    cfg = GraspConfig(**(grasp.to_dict() | {"k_t": k_t}))
    print(f"k_t = {k_t} N/m -> f_p^i = {stability_threshold(cfg):.1f} N")
