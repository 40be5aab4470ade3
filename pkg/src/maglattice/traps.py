"""Trap finding and characterization on a lattice field.

Minima of |B| are located by multi-start quasi-Newton descent (analytic
gradient) followed by a Newton polish on the analytic Hessian, which pushes
|grad|B|| down to ~1e-12 T/m, far below the 1e-8 T/m acceptance tolerance.
Barriers between minima use a climbing-image relaxed string; the bias tuner
wraps everything in a restarted Nelder-Mead search over the three bias
components.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import constants as const
from .atom import AtomState, default_rb87
from .lattice import FourierExpansion, eval_field_arrays

logger = logging.getLogger(__name__)


class MajoranaError(ValueError):
    """Field magnitude is zero: spin-flip point, no Ioffe-Pritchard trap."""


class SaddleError(ValueError):
    """The stationary point is a saddle, not a minimum."""


class TuneUnreachableError(RuntimeError):
    """Bias tuning ended above the cost threshold; best attempt attached."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class BiasField:
    """Uniform external bias field (T). Sanity-bounded to atom-chip scale."""

    B_ext: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "B_ext", np.asarray(self.B_ext, dtype=float))
        if self.B_ext.shape != (3,):
            raise ValueError("bias must be a 3-vector")
        if np.linalg.norm(self.B_ext) >= 0.1:
            raise ValueError("bias magnitude must be < 0.1 T")


def _bias_vec(bias) -> np.ndarray:
    if isinstance(bias, BiasField):
        return bias.B_ext
    b = np.asarray(bias, dtype=float)
    if b.shape != (3,):
        raise ValueError("bias must be a 3-vector")
    if np.linalg.norm(b) >= 0.1:
        raise ValueError("bias magnitude must be < 0.1 T")
    return b


@dataclass(frozen=True)
class TrapReport:
    """Everything we know about one trap minimum."""

    r0: np.ndarray  # m
    B_IP: float  # T, field magnitude at the minimum
    freqs: np.ndarray  # Hz (omega / 2 pi), descending
    axes: np.ndarray  # columns are principal axes, matching freqs
    depth: float  # T, |B_ext| - B_IP (escape to z -> infinity)
    barriers: tuple  # ((label, height T), ...)
    omega_over_larmor: float
    larmor_healthy: bool
    bias: np.ndarray  # T, for provenance
    vdw_valid: bool | None = None  # filled in by the surface module


@dataclass(frozen=True)
class TuneObjective:
    """Target for the bias tuner.

    mode is "symmetric_barriers" (equalize the barriers along the two
    lattice directions) or "channels_along_a1" / "channels_along_a2"
    (suppress the barrier along that axis).
    """

    target_z: float
    mode: str = "symmetric_barriers"
    weighting: float = 1.0

    def __post_init__(self):
        if self.target_z <= 0:
            raise ValueError("target_z must be positive")
        if self.mode not in (
            "symmetric_barriers",
            "channels_along_a1",
            "channels_along_a2",
        ):
            raise ValueError(f"unknown tune mode {self.mode!r}")


@dataclass(frozen=True)
class BarrierResult:
    height: float  # T above the trap's B_IP
    coarse: bool  # True when the string fell back to a straight line scan
    saddle: np.ndarray | None  # position of the path maximum


@dataclass(frozen=True)
class TransportSnapshot:
    step: int
    bias: np.ndarray
    positions: np.ndarray  # (n_traps, 3)
    B_IP: np.ndarray  # (n_traps,)
    freqs: np.ndarray  # (n_traps, 3) Hz


@dataclass(frozen=True)
class TransportResult:
    snapshots: list
    lost_at_step: int | None


# ----------------------------------------------------------------------
# minimization of |B|


def _sample_one(f, bias, r):
    B, grad, B_mag, grad_mag, hess, valid = eval_field_arrays(f, bias, np.asarray(r)[None])
    return B_mag[0], grad_mag[0], hess[0], bool(valid[0])


def _newton_polish(f, bias, x0, z_bounds, gtol, max_iter=25):
    """Drive |grad|B|| below gtol with Newton steps on the analytic Hessian.

    Near-singular (channel) directions are projected out via eigenvalue
    truncation, so flat directions simply stay put.
    """
    x = np.array(x0, dtype=float)
    _, g, H, valid = _sample_one(f, bias, x)
    if not valid:
        return x, np.inf
    for _ in range(max_iter):
        gn = np.linalg.norm(g)
        if gn < gtol:
            break
        H = 0.5 * (H + H.T)
        lam, V = np.linalg.eigh(H)
        lmax = np.max(np.abs(lam))
        if lmax <= 0:
            break
        inv = np.where(lam > 1e-10 * lmax, 1.0 / np.where(lam > 0, lam, 1.0), 0.0)
        step = -V @ (inv * (V.T @ g))
        # trust region: never step more than a small fraction of the cell
        cap = 0.05 * f.geometry.period
        sn = np.linalg.norm(step)
        if sn > cap:
            step *= cap / sn
        xn = x + step
        xn[2] = np.clip(xn[2], z_bounds[0], z_bounds[1])
        _, gn_new, Hn, validn = _sample_one(f, bias, xn)
        if not validn:
            break
        x, g, H = xn, gn_new, Hn
    return x, np.linalg.norm(g)


def _descend(f, bias, x0, z_bounds, gtol=1e-8, xy_box=None):
    """One local minimization of |B| from x0. Returns (x, gnorm) or None.

    xy_box, when given, is a half-width bounding the in-plane search around
    x0; it keeps branch-tracking descents (transport) from hopping to a
    lattice-translated copy of the same trap. Converging onto any bound is
    treated as failure.
    """
    x0 = np.asarray(x0, dtype=float)
    if xy_box is None:
        bounds = [(None, None), (None, None), z_bounds]
    else:
        bounds = [
            (x0[0] - xy_box, x0[0] + xy_box),
            (x0[1] - xy_box, x0[1] + xy_box),
            z_bounds,
        ]

    def fun(x):
        B_mag, g, _, valid = _sample_one(f, bias, x)
        if not valid or not np.all(np.isfinite(g)):
            return B_mag, np.zeros(3)
        return B_mag, g

    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": 300, "ftol": 1e-18, "gtol": 1e-14},
    )
    x, gnorm = _newton_polish(f, bias, res.x, z_bounds, gtol)
    if gnorm > gtol:
        return None
    # reject saddles and bound artifacts
    _, _, H, valid = _sample_one(f, bias, x)
    if not valid:
        return None
    lam = np.linalg.eigvalsh(0.5 * (H + H.T))
    if lam[0] < -1e-7 * max(np.max(np.abs(lam)), 1e-300):
        return None
    if x[2] <= z_bounds[0] * (1 + 1e-9) or x[2] >= z_bounds[1] * (1 - 1e-9):
        return None
    if xy_box is not None and np.max(np.abs(x[:2] - x0[:2])) >= xy_box * (1 - 1e-9):
        return None
    return x, gnorm


def _to_cell(geometry, r):
    """Map r into the home unit cell (fractional part of in-plane coords)."""
    A = np.array([geometry.a1, geometry.a2]).T
    frac = np.linalg.solve(A, r[:2]) % 1.0
    xy = A @ frac
    return np.array([xy[0], xy[1], r[2]])


def _cell_distance(geometry, ra, rb):
    """Minimum-image distance between two points, modulo lattice translations."""
    A = np.array([geometry.a1, geometry.a2]).T
    dfrac = np.linalg.solve(A, (ra - rb)[:2])
    dfrac -= np.round(dfrac)
    dxy = A @ dfrac
    return float(np.sqrt(dxy @ dxy + (ra[2] - rb[2]) ** 2))


def find_trap_minima(
    f: FourierExpansion,
    bias,
    z_range: tuple,
    grid_seed_n: int = 6,
    gtol: float = 1e-8,
) -> list:
    """Locate distinct |B| minima in one unit cell.

    Seeds a grid_seed_n^3 grid over the unit cell times z_range, descends
    from every seed, and deduplicates converged minima modulo lattice
    translations (merge radius 1e-3 of the lattice period). Returns one
    representative per minimum, ties broken by smallest (z, x, y).
    Non-converging seeds are dropped; the count is logged at debug level.
    """
    b = _bias_vec(bias)
    z_min, z_max = z_range
    if not (0 < z_min < z_max):
        raise ValueError("need 0 < z_min < z_max")
    if grid_seed_n < 4:
        raise ValueError("grid_seed_n must be >= 4")
    if f.nmodes == 0:
        return []

    geom = f.geometry
    fr = (np.arange(grid_seed_n) + 0.5) / grid_seed_n
    zs = np.linspace(z_min, z_max, grid_seed_n + 2)[1:-1]
    found = []
    discarded = 0
    for fx in fr:
        for fy in fr:
            xy = fx * geom.a1 + fy * geom.a2
            for z in zs:
                out = _descend(f, b, [xy[0], xy[1], z], (z_min, z_max), gtol)
                if out is None:
                    discarded += 1
                    continue
                found.append(_to_cell(geom, out[0]))
    if discarded:
        logger.debug(
            "find_trap_minima: %d of %d seeds discarded (non-convergence, "
            "saddle, or range bound)", discarded, grid_seed_n**3,
        )

    merge_tol = 1e-3 * geom.period
    reps = []
    for r in found:
        matched = False
        for i, q in enumerate(reps):
            if _cell_distance(geom, r, q) < merge_tol:
                # keep the representative with smallest (z, x, y)
                if (r[2], r[0], r[1]) < (q[2], q[0], q[1]):
                    reps[i] = r
                matched = True
                break
        if not matched:
            reps.append(r)
    reps.sort(key=lambda p: (p[2], p[0], p[1]))
    return reps


# ----------------------------------------------------------------------
# characterization


def frequencies_from_hessian(hess_mag: np.ndarray, atom: AtomState):
    """Principal trap frequencies from the Hessian of |B| at a minimum.

    The potential is V = gF mF muB |B|, so omega_i = sqrt(gF mF muB
    lambda_i / m) for each Hessian eigenvalue lambda_i. Returns
    (freqs_Hz descending, axes with matching columns). Slightly negative
    eigenvalues within numerical noise are clamped to zero; genuinely
    negative ones raise SaddleError.
    """
    H = 0.5 * (hess_mag + hess_mag.T)
    lam, V = np.linalg.eigh(H)
    scale = max(np.max(np.abs(lam)), 1e-300)
    if lam[0] < -1e-7 * scale:
        raise SaddleError("saddle, not minimum: Hessian has a negative eigenvalue")
    lam = np.clip(lam, 0.0, None)
    omega = np.sqrt(atom.mu * lam / atom.mass)
    order = np.argsort(omega)[::-1]
    return omega[order] / (2 * np.pi), V[:, order]


def characterize_trap(
    f: FourierExpansion,
    bias,
    r0,
    atom: AtomState,
    grad_tol: float = 1e-6,
    with_barriers: bool = True,
) -> TrapReport:
    """Full report for a verified minimum r0.

    Raises MajoranaError at a field zero and SaddleError if the Hessian is
    not positive semidefinite. Barriers are computed toward the four
    lattice-translated copies of the trap (labels '+a1', '-a1', '+a2',
    '-a2') unless with_barriers is False.
    """
    b = _bias_vec(bias)
    r0 = np.asarray(r0, dtype=float)
    B_mag, g, H, valid = _sample_one(f, b, r0)
    if not valid or B_mag <= 0.0:
        raise MajoranaError("field zero at trap position (Majorana point)")
    if np.linalg.norm(g) > grad_tol:
        raise ValueError(
            f"r0 is not a verified minimum: |grad|B|| = {np.linalg.norm(g):.3e} T/m"
        )
    freqs, axes = frequencies_from_hessian(H, atom)

    omega_max = 2 * np.pi * freqs[0]
    omega_larmor = atom.mu * B_mag / const.hbar
    ratio = omega_max / omega_larmor

    barriers = ()
    if with_barriers:
        geom = f.geometry
        out = []
        for label, shift in (
            ("+a1", np.append(geom.a1, 0.0)),
            ("-a1", np.append(-geom.a1, 0.0)),
            ("+a2", np.append(geom.a2, 0.0)),
            ("-a2", np.append(-geom.a2, 0.0)),
        ):
            res = barrier_heights(f, b, r0, r0 + shift)
            out.append((label, res.height))
        barriers = tuple(out)

    return TrapReport(
        r0=r0,
        B_IP=float(B_mag),
        freqs=freqs,
        axes=axes,
        depth=float(np.linalg.norm(b) - B_mag),
        barriers=barriers,
        omega_over_larmor=float(ratio),
        larmor_healthy=bool(ratio < 0.1),
        bias=b,
    )


# ----------------------------------------------------------------------
# barriers: climbing-image relaxed string


def _polish_saddle(f, bias, x0, guard_dist):
    """Newton-converge a near-saddle point; None if it wanders or is no saddle."""
    x = np.array(x0, dtype=float)
    for _ in range(30):
        val, g, H, valid = _sample_one(f, bias, x)
        if not valid:
            return None
        gn = np.linalg.norm(g)
        if gn < 1e-10:
            break
        H = 0.5 * (H + H.T)
        lam, V = np.linalg.eigh(H)
        lmax = np.max(np.abs(lam))
        if lmax == 0:
            return None
        inv = np.where(np.abs(lam) > 1e-9 * lmax, 1.0 / lam, 0.0)
        step = -V @ (inv * (V.T @ g))
        sn = np.linalg.norm(step)
        cap = 0.25 * guard_dist
        if sn > cap:
            step *= cap / sn
        x = x + step
        if x[2] <= 0:
            return None
        if np.linalg.norm(x - x0) > guard_dist:
            return None
    val, g, H, valid = _sample_one(f, bias, x)
    if not valid or np.linalg.norm(g) > 1e-8:
        return None
    lam = np.linalg.eigvalsh(0.5 * (H + H.T))
    neg = np.sum(lam < -1e-7 * max(np.max(np.abs(lam)), 1e-300))
    if neg != 1:
        return None
    return x, val


def barrier_heights(
    f: FourierExpansion,
    bias,
    r_i,
    r_j,
    n_nodes: int = 64,
    max_sweeps: int = 400,
) -> BarrierResult:
    """Minimax barrier of |B| between two minima (possibly translated copies).

    A straight path is relaxed transversally to the local tangent while the
    highest node climbs along it; the converged top node is Newton-polished
    onto the saddle. Returns the saddle height above the trap floor
    min(|B|(r_i), |B|(r_j)).

    When the barriers between sites exceed the escape value |B_ext| the
    minimax path detours over the lattice (z -> infinity, where the barrier
    degenerates to the trap depth); that is escape, not inter-site physics,
    so a path drifting more than a few decay lengths above the endpoints
    counts as divergence. Any divergence falls back to an unrelaxed
    straight-line scan, flagged coarse.
    """
    b = _bias_vec(bias)
    r_i = np.asarray(r_i, dtype=float)
    r_j = np.asarray(r_j, dtype=float)
    if n_nodes < 8:
        raise ValueError("need at least 8 nodes")
    chord = np.linalg.norm(r_j - r_i)
    if chord == 0.0:
        raise ValueError("endpoints must be distinct")
    z_ceiling = max(r_i[2], r_j[2]) + 3.0 / f.k_min if f.nmodes else np.inf

    def batch(pts):
        B, grad, B_mag, grad_mag, hess, valid = eval_field_arrays(f, b, pts)
        return B_mag, grad_mag, hess, valid

    ends, *_ = batch(np.stack([r_i, r_j]))
    B_IP = float(np.min(ends))

    path = np.linspace(r_i, r_j, n_nodes)
    diverged = False
    prev_top = np.inf
    for sweep in range(max_sweeps):
        vals, gmag, hess, valid = batch(path)
        if not np.all(valid):
            diverged = True
            break
        top = int(np.argmax(vals))

        # tangents by central difference
        tan = np.empty_like(path)
        tan[1:-1] = path[2:] - path[:-2]
        tan[0] = path[1] - path[0]
        tan[-1] = path[-1] - path[-2]
        tan /= np.linalg.norm(tan, axis=1)[:, None] + 1e-300

        g_par = np.einsum("ni,ni->n", gmag, tan)[:, None] * tan
        g_perp = gmag - g_par
        force = -g_perp
        if 0 < top < n_nodes - 1:
            force[top] = -gmag[top] + 2.0 * g_par[top]  # climbing image

        # curvature-scaled steps, trust-capped at a fraction of node spacing
        lam = np.linalg.eigvalsh(0.5 * (hess + np.transpose(hess, (0, 2, 1))))
        lmax = np.maximum(np.max(np.abs(lam), axis=1), 1e-300)
        step = force / lmax[:, None]
        spacing = max(np.linalg.norm(path[1] - path[0]), 1e-300)
        sn = np.linalg.norm(step, axis=1)
        cap = 0.4 * spacing
        big = sn > cap
        step[big] *= (cap / sn[big])[:, None]
        step[0] = 0.0
        step[-1] = 0.0
        path = path + step

        # reparametrize to uniform arc length
        seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        if (
            s[-1] > 8.0 * chord
            or np.max(np.linalg.norm(path - np.linspace(r_i, r_j, n_nodes), axis=1)) > 4.0 * chord
            or np.max(path[:, 2]) > z_ceiling
        ):
            diverged = True
            break
        su = np.linspace(0.0, s[-1], n_nodes)
        path = np.stack([np.interp(su, s, path[:, k]) for k in range(3)], axis=1)
        if np.any(path[:, 2] <= 0):
            diverged = True
            break

        top_val = float(np.max(vals))
        moved = float(np.max(np.linalg.norm(step, axis=1)))
        if abs(top_val - prev_top) < 1e-9 * max(top_val, 1e-300) and moved < 1e-4 * spacing:
            break
        prev_top = top_val

    if diverged:
        # coarse fallback: unrelaxed straight line scan with dense sampling
        ts = np.linspace(0.0, 1.0, 4 * n_nodes)
        pts = r_i[None, :] + ts[:, None] * (r_j - r_i)[None, :]
        vals, *_ = batch(pts)
        return BarrierResult(
            height=float(np.max(vals) - B_IP), coarse=True, saddle=None
        )

    vals, *_ = batch(path)
    top = int(np.argmax(vals))
    height = float(vals[top] - B_IP)
    saddle = path[top]
    if 0 < top < n_nodes - 1 and height > 0:
        polished = _polish_saddle(f, b, path[top], guard_dist=0.5 * chord)
        if polished is not None:
            x, val = polished
            if abs(val - vals[top]) < 0.25 * max(height, 1e-300):
                height = float(val - B_IP)
                saddle = x
    return BarrierResult(height=max(height, 0.0), coarse=False, saddle=saddle)


# ----------------------------------------------------------------------
# bias tuning


def tune_bias(
    f: FourierExpansion,
    objective: TuneObjective,
    atom: AtomState,
    initial,
    restarts: int = 5,
    seed: int = 0,
    cost_threshold: float = 2e-3,
    maxiter: int = 150,
):
    """Tune the three bias components toward a trap configuration.

    Cost: ((z - target_z)/target_z)^2 plus, depending on mode, the squared
    relative barrier asymmetry between the two lattice axes or the squared
    ratio of along-channel to transverse barrier. Derivative-free simplex
    search restarted from jittered initial points; deterministic for a given
    seed. Raises TuneUnreachableError (best attempt attached) if the final
    cost stays above cost_threshold.
    """
    b0 = _bias_vec(initial)
    if f.nmodes == 0:
        raise ValueError("expansion has no modes")
    k1 = f.k_min
    if k1 * objective.target_z >= 20:
        raise TuneUnreachableError(
            "objective unreachable: target_z is beyond the decay length of "
            f"the dominant mode (k1 * target_z = {k1 * objective.target_z:.1f} >= 20, "
            "the lattice field there is below any workable bias)",
            best=(BiasField(b0), None),
        )

    geom = f.geometry
    z_lo = objective.target_z / 4
    z_hi = min(4 * objective.target_z, 19.9 / k1)
    a1_shift = np.append(geom.a1, 0.0)
    a2_shift = np.append(geom.a2, 0.0)
    state = {"r_prev": None, "r_anchor": None, "saddles": {}}

    def full_search(bvec):
        minima = find_trap_minima(f, bvec, (z_lo, z_hi), grid_seed_n=4)
        if not minima:
            return None
        # prefer the minimum closest to the target height
        return min(minima, key=lambda r: abs(r[2] - objective.target_z))

    def locate(bvec):
        # inside the search loop only warm-started descents run; the grid
        # multistart happens once per restart (see below), otherwise a
        # single plateau evaluation would cost as much as a full search
        for r in (state["r_prev"], state["r_anchor"]):
            if r is None:
                continue
            out = _descend(f, bvec, r, (z_lo, z_hi))
            if out is not None:
                return out[0]
        return None

    def line_scan_barrier(bvec, r0, shift):
        ts = np.linspace(0.0, 1.0, 96)
        pts = r0[None, :] + ts[:, None] * shift[None, :]
        _, _, B_mag, *_ = eval_field_arrays(f, bvec, pts)
        return float(np.max(B_mag) - B_mag[0])

    def tracked_barrier(bvec, r0, shift, label):
        """Barrier along one lattice direction, reusing the previous saddle
        as a warm start so the string method runs only on cache misses.
        Directions whose string diverged (inter-site saddle above the
        escape value) stay on the cheap straight-line scan."""
        cached = state["saddles"].get(label)
        if isinstance(cached, str):
            return line_scan_barrier(bvec, r0, shift)
        B_IP, *_ = _sample_one(f, bvec, r0)
        if cached is not None:
            pol = _polish_saddle(f, bvec, cached, guard_dist=0.6 * np.linalg.norm(shift))
            if pol is not None:
                x, val = pol
                state["saddles"][label] = x
                return max(float(val - B_IP), 0.0)
            state["saddles"].pop(label, None)
        res = barrier_heights(f, bvec, r0, r0 + shift, n_nodes=24, max_sweeps=80)
        if res.coarse:
            state["saddles"][label] = "line"
        elif res.saddle is not None:
            state["saddles"][label] = res.saddle
        return res.height

    def cost(bvec):
        if np.linalg.norm(bvec) >= 0.1:
            return 1e6
        r = locate(bvec)
        if r is None:
            state["r_prev"] = None
            return 1e5
        state["r_prev"] = r
        B_mag, *_ = _sample_one(f, bvec, r)
        if B_mag < 1e-7:  # Majorana-adjacent, useless trap
            return 1e4
        zterm = ((r[2] - objective.target_z) / objective.target_z) ** 2
        w = objective.weighting
        if objective.mode == "symmetric_barriers":
            b1 = tracked_barrier(bvec, r, a1_shift, "a1")
            b2 = tracked_barrier(bvec, r, a2_shift, "a2")
            asym = (b1 - b2) / max(b1 + b2, 1e-300)
            return zterm + w * asym**2
        shift = a1_shift if objective.mode == "channels_along_a1" else a2_shift
        along = tracked_barrier(bvec, r, shift, "along")
        # scale the along-channel barrier by the bias magnitude so the
        # term is dimensionless and comparable to the z term
        return zterm + w * (along / max(np.linalg.norm(bvec), 1e-300)) ** 2

    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(restarts):
        x0 = b0 if attempt == 0 else b0 * (1 + 0.15 * rng.standard_normal(3))
        state["r_prev"] = None
        state["r_anchor"] = full_search(x0)
        state["saddles"] = {}
        if state["r_anchor"] is None:
            continue
        # spread the initial simplex over ~10% of the bias magnitude per
        # axis; the default (5% of each component) cannot turn the bias
        # vector when a component starts near zero
        span = 0.1 * max(np.linalg.norm(x0), 1e-5)
        simplex = np.vstack([x0, x0 + span * np.eye(3)])
        res = minimize(
            cost,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": maxiter,
                "initial_simplex": simplex,
                "xatol": 1e-7 * max(np.linalg.norm(b0), 1e-6),
                "fatol": 1e-8,
            },
        )
        if best is None or res.fun < best.fun:
            best = res
        if best.fun < cost_threshold:
            break

    if best is None:
        raise TuneUnreachableError(
            "objective unreachable: no trap found at any restart point",
            best=(BiasField(b0), None),
        )
    state["r_prev"] = None
    state["r_anchor"] = full_search(best.x)
    r_best = locate(best.x)
    if r_best is None:
        raise TuneUnreachableError(
            "objective unreachable: no trap at best-found bias", best=(best.x, None)
        )
    report = characterize_trap(f, best.x, r_best, atom)
    if best.fun >= cost_threshold:
        raise TuneUnreachableError(
            f"objective unreachable: best cost {best.fun:.3e} >= {cost_threshold:.1e}",
            best=(BiasField(best.x), report),
        )
    return BiasField(best.x), report


# ----------------------------------------------------------------------
# transport


def transport_trajectory(
    f: FourierExpansion,
    schedule: list,
    z_range: tuple | None = None,
    atom: AtomState | None = None,
    grid_seed_n: int = 6,
) -> TransportResult:
    """Track trap minima through a schedule of bias fields.

    Minima found at the first bias are followed step to step by
    warm-started descent; a match is rejected (tracking lost, trajectory
    truncated) when a minimum jumps farther than a quarter lattice period.
    """
    if len(schedule) < 2:
        raise ValueError("schedule must contain at least 2 bias steps")
    vecs = [_bias_vec(b) for b in schedule]
    for a, b in zip(vecs[:-1], vecs[1:]):
        if np.linalg.norm(b - a) >= 0.1 * max(np.linalg.norm(a), 1e-300):
            raise ValueError("consecutive bias steps too large (|dB| >= 0.1 |B|)")
    atom = atom or default_rb87()
    geom = f.geometry
    if z_range is None:
        z_range = (geom.period / 50, 3 * geom.period)
    guard = geom.period / 4

    positions = find_trap_minima(f, vecs[0], z_range, grid_seed_n=grid_seed_n)
    if not positions:
        raise ValueError("no minima at the first schedule step")
    positions = np.array(positions)

    def snapshot(step, bvec, pos):
        Bm = np.empty(len(pos))
        fr = np.empty((len(pos), 3))
        for i, r in enumerate(pos):
            B_mag, _, H, valid = _sample_one(f, bvec, r)
            Bm[i] = B_mag if valid else np.nan
            try:
                fq, _ = frequencies_from_hessian(H, atom)
            except (SaddleError, ValueError):
                fq = np.full(3, np.nan)
            fr[i] = fq
        return TransportSnapshot(
            step=step, bias=bvec.copy(), positions=pos.copy(), B_IP=Bm, freqs=fr
        )

    snaps = [snapshot(0, vecs[0], positions)]
    lost_at = None
    for step in range(1, len(vecs)):
        new_pos = np.empty_like(positions)
        ok = True
        for i, r in enumerate(positions):
            out = _descend(f, vecs[step], r, z_range, xy_box=guard)
            if out is None or np.linalg.norm(out[0] - r) > guard:
                ok = False
                break
            new_pos[i] = out[0]
        if not ok:
            lost_at = step
            break
        positions = new_pos
        snaps.append(snapshot(step, vecs[step], positions))
    return TransportResult(snapshots=snaps, lost_at_step=lost_at)
