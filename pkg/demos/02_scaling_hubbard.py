"""Hubbard energy scales versus lattice period.

Shrinking the lattice period from optical (425 nm) to magnetic-film scale
(100 nm) raises every energy scale by one to two orders of magnitude. The
benchmark depth at each period is the one where J/U hits the 2-D
square-lattice Mott transition value 0.06.
"""

import numpy as np

import maglattice as ml
from maglattice import constants as const

rb = ml.default_rb87()
nK = const.kB * 1e-9

print(f"{'d':>8} {'V0/E_R':>8} {'E_R':>10} {'U':>10} {'J':>10} {'J^2/U':>10}")
for d in (425e-9, 100e-9):
    s = ml.mott_depth(d, rb, j_over_u=0.06)
    hp = ml.hubbard_sinusoidal(d, s, rb)
    print(
        f"{d * 1e9:6.0f}nm {hp.s:8.2f} {hp.E_R / nK:8.1f}nK {hp.U / nK:8.1f}nK "
        f"{hp.J_tun / nK:8.2f}nK {hp.superexchange / nK:8.3f}nK"
    )
print("(depths chosen so that U/4J = %.2f)\n" % (1 / (4 * 0.06)))

# cross-check the J fit against exact 1-D band structure
print("J fit vs plane-wave band structure (units of E_R):")
for s in (6.0, 8.0, 10.0, 12.0):
    fit = 1.43 * s**0.98 * np.exp(-2.07 * np.sqrt(s))
    band = ml.band_J_1d(s).J_band
    print(f"   s = {s:4.1f}: fit {fit:.5f}   band {band:.5f}   dev {abs(fit - band) / band:6.1%}")

# on-site interaction for a measured magnetic microtrap
freqs = (2.1e6, 2.0e6, 0.8e6)  # Hz
U = ml.onsite_U_gaussian(freqs, rb)
print(f"\nmicrotrap at {np.array(freqs) / 1e6} MHz: U/h = {U / const.h / 1e3:.0f} kHz "
      f"({U / const.kB / 1e-9:.0f} nK)")
