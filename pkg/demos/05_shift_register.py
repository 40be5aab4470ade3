"""Transporting traps by rotating the bias field.

On a stripe lattice the in-plane trap position is locked to the direction
of the bias component in the plane perpendicular to the stripes; rotating
that component walks every trap sideways, one lattice period per full
turn. This is the shift-register primitive.
"""

import numpy as np

import maglattice as ml
from maglattice.patterns import stripes

pat = stripes(period=1e-6, duty=0.5, nx=64, ny=8)
f = ml.fourier_from_pattern(pat, threshold=1e-4, max_order=8)

mag = 2e-3
steps = 75
angles = np.linspace(0.0, 2 * np.pi, steps)
schedule = [np.array([-mag * np.cos(a), 0.5e-3, mag * np.sin(a)]) for a in angles]

out = ml.transport_trajectory(f, schedule, z_range=(0.02e-6, 1.5e-6))
assert out.lost_at_step is None

print(f"{'step':>5} {'angle':>7} {'x (nm)':>9} {'z (nm)':>9} {'B_IP (mT)':>10}")
for snap in out.snapshots[:: steps // 10]:
    a = np.degrees(angles[snap.step])
    x, _, z = snap.positions[0]
    print(f"{snap.step:5d} {a:6.0f}d {x * 1e9:9.2f} {z * 1e9:9.2f} {snap.B_IP[0] * 1e3:10.4f}")

dx = out.snapshots[-1].positions[0][0] - out.snapshots[0].positions[0][0]
print(f"\nnet displacement after one bias turn: {dx * 1e9:.1f} nm "
      f"(one lattice period = {f.geometry.period * 1e9:.0f} nm)")
