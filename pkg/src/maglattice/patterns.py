"""Analytic test patterns.

The optimized film layouts used on real chips are published only as images,
so the toolkit ships a few closed-form patterns whose Fourier series are
known. They double as regression fixtures for the field model.
"""

import numpy as np

from .lattice import LatticeGeometry, MagnetizationPattern


def square_geometry(period: float) -> LatticeGeometry:
    return LatticeGeometry.from_primitives([period, 0.0], [0.0, period])


def stripes(
    period: float,
    duty: float = 0.5,
    nx: int = 64,
    ny: int = 8,
    M0: float = 670e3,
    film_h: float = 300e-9,
) -> MagnetizationPattern:
    """1-D stripe grating along a1: film where frac(x) < duty.

    The 50% duty cycle has the square-wave series S_n = 2/(n pi), odd n.
    """
    if not 0 < duty < 1:
        raise ValueError("duty must be in (0, 1)")
    fx = (np.arange(nx) + 0.5) / nx
    occ = (fx[:, None] < duty) * np.ones((1, ny))
    return MagnetizationPattern(
        geometry=square_geometry(period),
        occupancy=occ.astype(int),
        M0=M0,
        film_h=film_h,
    )


def checkerboard(
    period: float,
    n: int = 64,
    M0: float = 670e3,
    film_h: float = 300e-9,
) -> MagnetizationPattern:
    """Checkerboard on a square cell; dominant modes at (+-1, +-1)."""
    fx = (np.arange(n) + 0.5) / n
    sx = fx < 0.5
    occ = (sx[:, None] == sx[None, :]).astype(int)
    return MagnetizationPattern(
        geometry=square_geometry(period), occupancy=occ, M0=M0, film_h=film_h
    )


def square_islands(
    period: float,
    duty: float = 0.5,
    n: int = 64,
    M0: float = 670e3,
    film_h: float = 300e-9,
) -> MagnetizationPattern:
    """Square film islands of side duty*period centered in the cell.

    Four-fold symmetric; carries (1,0)/(0,1) modes plus diagonal (1,+-1)
    corrections, which is enough structure to form isolated traps.
    """
    if not 0 < duty < 1:
        raise ValueError("duty must be in (0, 1)")
    fx = (np.arange(n) + 0.5) / n
    inside = np.abs(fx - 0.5) < duty / 2
    occ = (inside[:, None] & inside[None, :]).astype(int)
    return MagnetizationPattern(
        geometry=square_geometry(period), occupancy=occ, M0=M0, film_h=film_h
    )


def windmill(
    period: float,
    core: float = 0.30,
    arm_len: float = 0.28,
    arm_width: float = 0.18,
    n: int = 64,
    M0: float = 670e3,
    film_h: float = 300e-9,
) -> MagnetizationPattern:
    """Chiral four-fold pinwheel: square core plus four offset arms.

    Invariant under 90-degree rotation but under no mirror, so rotating the
    bias by 90 degrees swaps the roles of the two lattice axes. That makes
    it the natural fixture for barrier-symmetrization tests: somewhere
    along a 90-degree bias arc the two barriers must cross.
    """
    fx = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(fx, fx, indexing="ij")
    u = X - 0.5
    v = Y - 0.5
    occ = (np.abs(u) < core / 2) & (np.abs(v) < core / 2)
    half_w = arm_width / 2
    # east arm sits above the midline; the rest follow by rotation
    occ |= (u >= core / 2 - 1e-9) & (u < core / 2 + arm_len) & (v >= 0) & (v < 2 * half_w)
    occ |= (v >= core / 2 - 1e-9) & (v < core / 2 + arm_len) & (u < 0) & (u > -2 * half_w)
    occ |= (u <= -core / 2 + 1e-9) & (u > -core / 2 - arm_len) & (v <= 0) & (v > -2 * half_w)
    occ |= (v <= -core / 2 + 1e-9) & (v > -core / 2 - arm_len) & (u > 0) & (u < 2 * half_w)
    return MagnetizationPattern(
        geometry=square_geometry(period), occupancy=occ.astype(int), M0=M0, film_h=film_h
    )


def z_edge_band(
    period: float,
    band_frac: float = 0.5,
    notch_frac: float = 0.25,
    n: int = 64,
    M0: float = 670e3,
    film_h: float = 300e-9,
) -> MagnetizationPattern:
    """Band of film with a crenellated (Z-like) edge.

    Approximates the band-with-corner-edges motif of optimized chip layouts:
    a stripe along a1 whose upper edge steps up and down once per cell,
    giving corrugation along both lattice directions.
    """
    if not 0 < band_frac < 1:
        raise ValueError("band_frac must be in (0, 1)")
    if not 0 < notch_frac < band_frac:
        raise ValueError("notch_frac must be in (0, band_frac)")
    fx = (np.arange(n) + 0.5) / n
    fy = (np.arange(n) + 0.5) / n
    top = np.where(fx < 0.5, band_frac, band_frac - notch_frac)
    occ = (fy[None, :] < top[:, None]).astype(int)
    return MagnetizationPattern(
        geometry=square_geometry(period), occupancy=occ, M0=M0, film_h=film_h
    )
