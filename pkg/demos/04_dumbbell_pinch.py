"""Watch a dumbbell pinch, split, and freeze under the modified flow.

Two balls joined by a thin neck, flat background, perimeter threshold
set by a unit reference mass.  The neck collapses first (around t=0.5
for this geometry), the region splits into two components, and each
ball then shrinks until its perimeter crosses 36*pi and freezes.  The
per-sample component table makes the whole story visible in the
terminal; the profile gap column is the quantity that must never rise.
"""

import numpy as np

from isoflow.config import ShapeSpec
from isoflow.flow_levelset import FlowRunConfig, run_modified_flow
from isoflow.measure import AxiGrid
from isoflow.metric import AmbientMetric

h = 0.05
shape = ShapeSpec(kind="dumbbell", ball_radius=3.5, separation=8.4, neck_radius=0.7)
grid = AxiGrid.sample(h, 4.4, -8.8, 8.8, shape.signed_distance)

trace = run_modified_flow(FlowRunConfig(
    metric=AmbientMetric(mass=0.0),
    grid=grid,
    t_max=1.2,
    sample_interval=0.05,
    sweep_cadence=10,
    threshold_mass=1.0,
))

print(f"{'t':>5} {'components':>11} {'frozen':>7} {'A_total':>9} {'gap':>10}  per-component perimeter")
for s in trace.samples:
    ps = " + ".join(f"{c.perimeter:.1f}{'*' if c.frozen else ''}" for c in s.components)
    print(f"{s.t:5.2f} {s.n_components:>11} {s.n_frozen:>7} {s.area:9.2f} {s.profile_gap:10.4f}  {ps}")

print(f"\n(* = frozen)  everything frozen at t = {trace.freeze_all_time}")
gaps = [s.profile_gap for s in trace.samples]
rises = [b - a for a, b in zip(gaps, gaps[1:]) if b > a]
print(f"profile-gap rises between samples: {len(rises)} (flow is monotone here)")
print(f"threshold perimeter 36*pi = {36*np.pi:.4f}; both pieces stop just below it")
