"""Magnetic field of a periodically patterned, out-of-plane magnetized film.

The film is represented by a truncated Fourier series of the magnetic scalar
potential,

    phi(r) = P * sum_nm exp(-k_nm z) [C_nm cos(k_nm . rho) + S_nm sin(k_nm . rho)],

with P = mu0 * h * M0 / 2 (tesla meter) so that B = B_ext - grad(phi) comes
out in tesla. Each term solves Laplace's equation exactly, so potential,
field, Jacobian and the Hessian of |B| are all available analytically.

A brute-force dipole sum over occupied grid cells is included as an
independent cross-check of the expansion.
"""

from dataclasses import dataclass, field

import numpy as np

from . import constants as const


class NoStructureError(ValueError):
    """Raised when a pattern has no spatial structure (uniform occupancy)."""


class BelowFilmError(ValueError):
    """Raised when a field evaluation point has z <= 0."""


@dataclass(frozen=True)
class LatticeGeometry:
    """Primitive lattice vectors a1, a2 (m) and reciprocals K1, K2 (rad/m).

    Satisfies Ki . aj = 2 pi delta_ij.
    """

    a1: np.ndarray
    a2: np.ndarray
    K1: np.ndarray
    K2: np.ndarray

    @classmethod
    def from_primitives(cls, a1, a2) -> "LatticeGeometry":
        a1 = np.asarray(a1, dtype=float)
        a2 = np.asarray(a2, dtype=float)
        cross = a1[0] * a2[1] - a1[1] * a2[0]
        if abs(cross) <= 0.0:
            raise ValueError("a1, a2 must be linearly independent")
        # rows of 2*pi*inv([a1; a2]) transposed give K1, K2
        A = np.array([[a1[0], a1[1]], [a2[0], a2[1]]])
        K = 2 * np.pi * np.linalg.inv(A).T
        return cls(a1=a1, a2=a2, K1=K[0], K2=K[1])

    def __post_init__(self):
        for Ki, name_i in ((self.K1, "K1"), (self.K2, "K2")):
            for aj, dij in ((self.a1, name_i == "K1"), (self.a2, name_i == "K2")):
                want = 2 * np.pi if dij else 0.0
                got = float(np.dot(Ki, aj))
                if abs(got - want) > 1e-12 * 2 * np.pi:
                    raise ValueError("reciprocal vectors do not satisfy Ki.aj = 2 pi delta_ij")

    @property
    def cell_area(self) -> float:
        return abs(self.a1[0] * self.a2[1] - self.a1[1] * self.a2[0])

    @property
    def period(self) -> float:
        """Longest primitive vector, used as the generic length scale."""
        return max(float(np.hypot(*self.a1)), float(np.hypot(*self.a2)))


@dataclass(frozen=True)
class MagnetizationPattern:
    """Binary occupancy of one unit cell of film.

    occupancy[i, j] = 1 means film present on the cell-center at fractional
    coordinates ((i + 1/2)/Nx, (j + 1/2)/Ny) in the (a1, a2) basis.
    """

    geometry: LatticeGeometry
    occupancy: np.ndarray  # (Nx, Ny) of 0/1
    M0: float  # A/m, out of plane
    film_h: float  # m

    def __post_init__(self):
        occ = np.asarray(self.occupancy)
        if occ.ndim != 2 or occ.shape[0] < 2 or occ.shape[1] < 2:
            raise ValueError("occupancy must be a 2-D grid with Nx, Ny >= 2")
        if not np.all((occ == 0) | (occ == 1)):
            raise ValueError("occupancy entries must be 0 or 1")
        if self.M0 <= 0:
            raise ValueError("M0 must be positive")
        if self.film_h <= 0:
            raise ValueError("film thickness must be positive")


@dataclass(frozen=True)
class FourierExpansion:
    """Truncated mode list of the scalar potential.

    One representative per +/- mode pair is stored; the (-n, -m) partner
    carries (C, -S) and is accounted for implicitly, i.e. the sum over the
    stored modes of C cos + S sin reproduces the zero-mean pattern.
    """

    geometry: LatticeGeometry
    n: np.ndarray  # integer index along K1
    m: np.ndarray  # integer index along K2
    k_vec: np.ndarray  # (nmode, 2) rad/m
    k_mag: np.ndarray  # (nmode,) rad/m
    C: np.ndarray
    S: np.ndarray
    prefactor: float  # mu0 * film_h * M0 / 2, tesla meter
    truncation_threshold: float
    explicitly_kept: np.ndarray = field(default=None)  # bool per mode

    def __post_init__(self):
        if self.explicitly_kept is None:
            object.__setattr__(
                self, "explicitly_kept", np.zeros(len(self.n), dtype=bool)
            )
        kk = np.linalg.norm(self.k_vec, axis=1)
        if not np.allclose(kk, self.k_mag, rtol=1e-12, atol=0.0):
            raise ValueError("k_mag inconsistent with k_vec")
        if np.any((np.asarray(self.n) == 0) & (np.asarray(self.m) == 0)):
            raise ValueError("the (0, 0) mode contributes no field and is excluded")
        amp = np.hypot(self.C, self.S)
        bad = (amp < self.truncation_threshold) & ~self.explicitly_kept
        if np.any(bad):
            raise ValueError("modes below threshold must be flagged explicitly_kept")

    @property
    def nmodes(self) -> int:
        return len(self.n)

    @property
    def k_min(self) -> float:
        """Smallest retained wavenumber; sets the field decay length 1/k_min."""
        return float(np.min(self.k_mag)) if self.nmodes else np.inf


@dataclass(frozen=True)
class FieldSample:
    """Field, Jacobian and |B| Hessian at one point.

    hessian_valid is False at a field zero (Majorana point), where the
    Hessian of |B| is undefined; the array is then all-NaN by convention.
    """

    r: np.ndarray
    B: np.ndarray
    grad: np.ndarray  # dB_i/dr_j
    B_mag: float
    grad_mag: np.ndarray  # grad of |B|
    hessian_mag: np.ndarray
    hessian_valid: bool


def _representative_indices(order_x: int, order_y: int):
    """Mode indices (n, m), one per +/- pair, excluding (0, 0)."""
    pairs = []
    for m in range(1, order_y + 1):
        pairs.append((0, m))
    for n in range(1, order_x + 1):
        for m in range(-order_y, order_y + 1):
            pairs.append((n, m))
    return pairs


def fourier_from_pattern(
    pattern: MagnetizationPattern,
    threshold: float = 1e-4,
    max_order: int = 16,
    keep: list | None = None,
    thickness_correction: bool = False,
) -> FourierExpansion:
    """Fourier-expand the normalized occupancy of a pattern.

    C and S are the real cosine/sine coefficients of the occupancy with its
    mean removed (the mean lands in the discarded (0, 0) term). They are
    computed by direct double-sum DFT over the cell-center samples, which is
    exact for the sampled pattern and cheap at desk scale.

    Args:
        threshold: modes with sqrt(C^2 + S^2) below this are dropped unless
            listed in ``keep``.
        max_order: retain |n|, |m| <= max_order. Orders are additionally
            clamped below the grid Nyquist limit (|n| < Nx/2, |m| < Ny/2)
            since anything beyond is an alias of a lower mode.
        keep: optional list of (n, m) pairs retained regardless of amplitude.
        thickness_correction: multiply each mode by (1 - exp(-k h)) / (k h),
            the finite-thickness correction to the thin-film limit. Off by
            default; the thin-film form is the documented convention.

    Raises:
        NoStructureError: if no mode survives (uniform pattern).
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    keep = set(tuple(p) for p in keep) if keep else set()

    occ = np.asarray(pattern.occupancy, dtype=float)
    Nx, Ny = occ.shape
    f = occ - occ.mean()

    # fractional cell-center coordinates
    fx = (np.arange(Nx) + 0.5) / Nx
    fy = (np.arange(Ny) + 0.5) / Ny

    geom = pattern.geometry
    order_x = min(max_order, (Nx - 1) // 2)
    order_y = min(max_order, (Ny - 1) // 2)
    ns, ms, kvecs, Cs, Ss, kept_flags = [], [], [], [], [], []
    for (n, m) in _representative_indices(order_x, order_y):
        # k . rho = 2 pi (n fx + m fy) in fractional coordinates
        phx = np.exp(-2j * np.pi * n * fx)
        phy = np.exp(-2j * np.pi * m * fy)
        c = (phx @ f @ phy) / (Nx * Ny)
        C = 2.0 * c.real
        S = -2.0 * c.imag
        amp = np.hypot(C, S)
        forced = (n, m) in keep or (-n, -m) in keep
        if amp < threshold and not forced:
            continue
        ns.append(n)
        ms.append(m)
        kvecs.append(n * geom.K1 + m * geom.K2)
        Cs.append(C)
        Ss.append(S)
        kept_flags.append(forced and amp < threshold)

    if not ns:
        raise NoStructureError("pattern has no spatial structure")

    kvecs = np.array(kvecs)
    kmag = np.linalg.norm(kvecs, axis=1)
    Cs = np.array(Cs)
    Ss = np.array(Ss)
    if thickness_correction:
        kh = kmag * pattern.film_h
        corr = (1.0 - np.exp(-kh)) / kh
        Cs = Cs * corr
        Ss = Ss * corr

    return FourierExpansion(
        geometry=geom,
        n=np.array(ns, dtype=int),
        m=np.array(ms, dtype=int),
        k_vec=kvecs,
        k_mag=kmag,
        C=Cs,
        S=Ss,
        prefactor=0.5 * const.mu0 * pattern.film_h * pattern.M0,
        truncation_threshold=threshold,
        explicitly_kept=np.array(kept_flags, dtype=bool),
    )


def _check_z(z):
    if np.any(z <= 0.0):
        raise BelowFilmError("evaluation point below film plane (z <= 0)")


def eval_potential(f: FourierExpansion, r) -> float:
    """Scalar potential phi(r) in tesla meter. Requires r[2] > 0."""
    r = np.asarray(r, dtype=float)
    _check_z(r[2])
    u = f.k_vec @ r[:2]
    env = np.exp(-f.k_mag * r[2])
    return f.prefactor * float(np.sum(env * (f.C * np.cos(u) + f.S * np.sin(u))))


def eval_field_arrays(f: FourierExpansion, bias, points: np.ndarray):
    """Vectorized field evaluation at points (N, 3).

    Returns (B (N,3), grad (N,3,3), B_mag (N,), grad_mag (N,3),
    hess_mag (N,3,3), valid (N,) bool). grad is the Jacobian dB_i/dr_j;
    hess_mag is the Hessian of |B|, NaN where |B| = 0.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    _check_z(pts[:, 2])
    bias = np.asarray(bias, dtype=float)
    N = pts.shape[0]

    field_scale = np.full(N, np.linalg.norm(bias))
    if f.nmodes == 0:
        B = np.broadcast_to(bias, (N, 3)).copy()
        grad = np.zeros((N, 3, 3))
        third = np.zeros((N, 3, 3, 3))
    else:
        kx = f.k_vec[:, 0]
        ky = f.k_vec[:, 1]
        kk = f.k_mag
        u = pts[:, :2] @ f.k_vec.T  # (N, M)
        env = np.exp(-np.outer(pts[:, 2], kk))  # (N, M)
        Ac = env * (f.C * np.cos(u) + f.S * np.sin(u))
        As = env * (-f.C * np.sin(u) + f.S * np.cos(u))
        field_scale = field_scale + f.prefactor * (env @ (kk * np.hypot(f.C, f.S)))

        P = f.prefactor
        # first derivatives of phi
        dphi = np.empty((N, 3))
        dphi[:, 0] = P * (As @ kx)
        dphi[:, 1] = P * (As @ ky)
        dphi[:, 2] = -P * (Ac @ kk)
        B = bias - dphi

        # second derivatives (Hessian of phi); grad of B is its negative
        kxx, kxy, kyy = kx * kx, kx * ky, ky * ky
        kxz, kyz, kzz = kx * kk, ky * kk, kk * kk
        H = np.empty((N, 3, 3))
        H[:, 0, 0] = -P * (Ac @ kxx)
        H[:, 0, 1] = H[:, 1, 0] = -P * (Ac @ kxy)
        H[:, 1, 1] = -P * (Ac @ kyy)
        H[:, 0, 2] = H[:, 2, 0] = -P * (As @ kxz)
        H[:, 1, 2] = H[:, 2, 1] = -P * (As @ kyz)
        H[:, 2, 2] = P * (Ac @ kzz)
        grad = -H

        # third derivatives of phi: T[i, j, l] = d^3 phi / dr_i dr_j dr_l
        third = np.empty((N, 3, 3, 3))

        def sym_set(i, j, l, val):
            for a, b, cdx in ((i, j, l), (i, l, j), (j, i, l), (j, l, i), (l, i, j), (l, j, i)):
                third[:, a, b, cdx] = val

        sym_set(0, 0, 0, -P * (As @ (kx * kxx)))
        sym_set(0, 0, 1, -P * (As @ (kxx * ky)))
        sym_set(0, 1, 1, -P * (As @ (kx * kyy)))
        sym_set(1, 1, 1, -P * (As @ (ky * kyy)))
        sym_set(0, 0, 2, P * (Ac @ (kxx * kk)))
        sym_set(0, 1, 2, P * (Ac @ (kxy * kk)))
        sym_set(1, 1, 2, P * (Ac @ (kyy * kk)))
        sym_set(0, 2, 2, P * (As @ (kx * kzz)))
        sym_set(1, 2, 2, P * (As @ (ky * kzz)))
        sym_set(2, 2, 2, -P * (Ac @ (kk * kzz)))

        third = -third  # dB_i/dr_j dr_l = -d^3 phi

    B_mag = np.linalg.norm(B, axis=1)
    # a zero of |B| (Majorana point) leaves rounding residue; flag anything
    # more than ten digits below the local field scale as an exact zero
    valid = B_mag > 1e-10 * field_scale
    with np.errstate(divide="ignore", invalid="ignore"):
        # grad|B|_j = B_i J_ij / |B|
        grad_mag = np.einsum("ni,nij->nj", B, grad) / B_mag[:, None]
        # Hess|B|_jl = (J^T J + B_i T_ijl)/|B| - grad|B| outer grad|B| / |B|
        JTJ = np.einsum("nij,nil->njl", grad, grad)
        BT = np.einsum("ni,nijl->njl", B, third)
        hess = (JTJ + BT) / B_mag[:, None, None] - np.einsum(
            "nj,nl->njl", grad_mag, grad_mag
        ) / B_mag[:, None, None]
    grad_mag[~valid] = np.nan
    hess[~valid] = np.nan
    return B, grad, B_mag, grad_mag, hess, valid


def eval_field(f: FourierExpansion, bias, r) -> FieldSample:
    """Field sample B = B_ext - grad(phi) at a single point r (z > 0)."""
    r = np.asarray(r, dtype=float)
    B, grad, B_mag, grad_mag, hess, valid = eval_field_arrays(f, bias, r[None, :])
    return FieldSample(
        r=r,
        B=B[0],
        grad=grad[0],
        B_mag=float(B_mag[0]),
        grad_mag=grad_mag[0],
        hessian_mag=hess[0],
        hessian_valid=bool(valid[0]),
    )


def dipole_sum_oracle(
    pattern: MagnetizationPattern, bias, r, n_cells: int = 10
) -> np.ndarray:
    """Brute-force field: bias plus point dipoles at occupied cell centers.

    The film is treated as a sheet of dipoles at z = 0 (thin-film limit),
    each with moment M0 * film_h * dA * z_hat, replicated over
    (2 n_cells + 1)^2 unit cells centered on r. Intended purely as a slow
    cross-check of the Fourier expansion.
    """
    if n_cells < 5:
        raise ValueError("n_cells must be >= 5")
    r = np.asarray(r, dtype=float)
    bias = np.asarray(bias, dtype=float)
    occ = np.asarray(pattern.occupancy, dtype=float)
    Nx, Ny = occ.shape
    geom = pattern.geometry

    ii, jj = np.nonzero(occ)
    if len(ii) == 0:
        return bias.copy()

    # occupied cell centers in one unit cell
    frac = np.stack([(ii + 0.5) / Nx, (jj + 0.5) / Ny], axis=1)
    base = frac[:, 0:1] * geom.a1 + frac[:, 1:2] * geom.a2  # (n_occ, 2)

    # center the replica block on the unit cell containing r
    A = np.array([geom.a1, geom.a2]).T
    center = np.round(np.linalg.solve(A, r[:2]))

    reps = np.arange(-n_cells, n_cells + 1)
    RX, RY = np.meshgrid(reps + center[0], reps + center[1], indexing="ij")
    shifts = RX.ravel()[:, None] * geom.a1 + RY.ravel()[:, None] * geom.a2

    dA = geom.cell_area / (Nx * Ny)
    mz = pattern.M0 * pattern.film_h * dA  # dipole moment magnitude, A m^2

    Btot = np.zeros(3)
    coef = const.mu0 / (4 * np.pi) * mz
    # chunk over replicas to bound memory
    chunk = max(1, int(2e6 // max(len(base), 1)))
    for start in range(0, len(shifts), chunk):
        sh = shifts[start : start + chunk]
        pos = base[None, :, :] + sh[:, None, :]  # (c, n_occ, 2)
        dx = r[0] - pos[..., 0]
        dy = r[1] - pos[..., 1]
        dz = r[2]
        rr2 = dx * dx + dy * dy + dz * dz
        rr = np.sqrt(rr2)
        inv5 = 1.0 / (rr2 * rr2 * rr)
        # B = coef * (3 (m.r) r - m r^2) / r^5 with m along z
        Btot[0] += coef * np.sum(3.0 * dz * dx * inv5)
        Btot[1] += coef * np.sum(3.0 * dz * dy * inv5)
        Btot[2] += coef * np.sum((3.0 * dz * dz - rr2) * inv5)
    return bias + Btot
