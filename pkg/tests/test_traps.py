import numpy as np
import pytest

from maglattice import constants as const
from maglattice.lattice import eval_field, fourier_from_pattern
from maglattice.patterns import windmill, z_edge_band
from maglattice.traps import (
    BiasField,
    MajoranaError,
    SaddleError,
    TuneObjective,
    barrier_heights,
    characterize_trap,
    find_trap_minima,
    frequencies_from_hessian,
    transport_trajectory,
)



def stripe_bias(Bx=-2e-3, By=0.5e-3, Bz=0.0):
    return np.array([Bx, By, Bz])


def stripe_zstar(f, Bx):
    k = f.k_mag[0]
    return np.log(f.prefactor * k / abs(Bx)) / k


def test_bias_field_validation():
    with pytest.raises(ValueError):
        BiasField(np.array([0.2, 0.0, 0.0]))
    with pytest.raises(ValueError):
        BiasField(np.array([1e-3, 0.0]))
    b = BiasField(np.array([1e-3, 0.0, 0.0]))
    assert np.allclose(b.B_ext, [1e-3, 0, 0])


# ----------------------------------------------------------------------
# find_trap_minima


def test_zero_modes_no_minima():
    from maglattice.lattice import FourierExpansion
    from maglattice.patterns import square_geometry

    f = FourierExpansion(
        geometry=square_geometry(1e-6),
        n=np.empty(0, dtype=int),
        m=np.empty(0, dtype=int),
        k_vec=np.empty((0, 2)),
        k_mag=np.empty(0),
        C=np.empty(0),
        S=np.empty(0),
        prefactor=1e-8,
        truncation_threshold=0.0,
    )
    assert find_trap_minima(f, stripe_bias(), (0.1e-6, 1e-6)) == []


def test_stripe_minima_match_closed_form(stripe_expansion):
    f = stripe_expansion
    bias = stripe_bias()
    zstar = stripe_zstar(f, bias[0])
    minima = find_trap_minima(f, bias, (0.05e-6, 1.2e-6), grid_seed_n=5)
    assert minima
    for r in minima:
        assert abs(r[2] - zstar) < 0.1e-9
        # transverse position: lattice field anti-parallel to in-plane bias
        assert abs(r[0] - 0.25e-6) < 0.1e-9
    # converged gradient below the stated tolerance
    s = eval_field(f, bias, minima[0])
    assert np.linalg.norm(s.grad_mag) < 1e-8


def test_minima_input_validation(stripe_expansion):
    with pytest.raises(ValueError):
        find_trap_minima(stripe_expansion, stripe_bias(), (0.0, 1e-6))
    with pytest.raises(ValueError):
        find_trap_minima(stripe_expansion, stripe_bias(), (1e-6, 0.5e-6))
    with pytest.raises(ValueError):
        find_trap_minima(stripe_expansion, stripe_bias(), (0.1e-6, 1e-6), grid_seed_n=3)


def test_lattice_covariance_under_pattern_translation():
    # shifting the pattern by grid cells translates every minimum with it
    pat = z_edge_band(1e-6, n=32)
    f = fourier_from_pattern(pat, max_order=5)
    bias = np.array([-1.2e-3, 0.0, 0.0])
    minima = find_trap_minima(f, bias, (0.1e-6, 1.3e-6), grid_seed_n=5)
    assert minima
    shifted = type(pat)(
        geometry=pat.geometry,
        occupancy=np.roll(pat.occupancy, 3, axis=0),
        M0=pat.M0,
        film_h=pat.film_h,
    )
    f2 = fourier_from_pattern(shifted, max_order=5)
    minima2 = find_trap_minima(f2, bias, (0.1e-6, 1.3e-6), grid_seed_n=5)
    assert len(minima) == len(minima2)
    delta = 3 / 32 * 1e-6
    period = f.geometry.period
    for r in minima:
        target = r + np.array([delta, 0.0, 0.0])
        dists = [
            min(
                np.linalg.norm(q - target + np.array([n1 * 1e-6, 0, 0]))
                for n1 in (-1, 0, 1)
            )
            for q in minima2
        ]
        assert min(dists) < 1e-3 * period


# ----------------------------------------------------------------------
# characterize_trap


def test_frequencies_from_synthetic_quadratic(rb87):
    # |B| = B0 + c x^2 / 2: omega = sqrt(gF mF muB c / m), exactly
    c = 4e9  # T/m^2
    H = np.diag([c, 0.0, 0.25 * c])
    freqs, axes = frequencies_from_hessian(H, rb87)
    expected = np.sqrt(rb87.mu * c / rb87.mass) / (2 * np.pi)
    assert freqs[0] == pytest.approx(expected, rel=1e-12)
    assert freqs[1] == pytest.approx(expected / 2, rel=1e-12)
    assert freqs[2] == 0.0
    assert np.allclose(axes.T @ axes, np.eye(3), atol=1e-9)


def test_frequencies_reject_saddle(rb87):
    with pytest.raises(SaddleError):
        frequencies_from_hessian(np.diag([1e9, -1e9, 1e9]), rb87)


def test_characterize_stripe_trap(stripe_expansion, rb87):
    f = stripe_expansion
    bias = stripe_bias()
    k = f.k_mag[0]
    minima = find_trap_minima(f, bias, (0.05e-6, 1.2e-6), grid_seed_n=5)
    rep = characterize_trap(f, bias, minima[0], rb87, with_barriers=False)
    assert rep.B_IP == pytest.approx(abs(bias[1]), rel=1e-9)
    assert rep.depth == pytest.approx(np.hypot(*bias[:2]) - abs(bias[1]), rel=1e-9)
    # closed-form transverse frequency, doubly degenerate, zero along y
    om = k * abs(bias[0]) * np.sqrt(rb87.mu / (rb87.mass * abs(bias[1])))
    assert rep.freqs[0] == pytest.approx(om / (2 * np.pi), rel=1e-6)
    assert rep.freqs[1] == pytest.approx(om / (2 * np.pi), rel=1e-6)
    assert rep.freqs[2] == pytest.approx(0.0, abs=1e-3)
    assert rep.omega_over_larmor == pytest.approx(
        om / (rb87.mu * rep.B_IP / const.hbar), rel=1e-6
    )
    assert np.allclose(rep.axes.T @ rep.axes, np.eye(3), atol=1e-9)


def test_depth_identity_reference_pairs():
    # depth = |B_ext| - B_IP for the two reference bias/Ioffe pairs
    b1 = np.array([-0.98e-3, -0.39e-3, 0.0])
    assert np.linalg.norm(b1) - 0.76e-3 == pytest.approx(0.29e-3, abs=0.01e-3)
    b2 = np.array([-1.99e-3, -0.04e-3, 0.0])
    assert np.linalg.norm(b2) - 1.83e-3 == pytest.approx(0.16e-3, abs=0.01e-3)


def test_characterize_rejects_majorana(stripe_expansion, rb87):
    f = stripe_expansion
    k = f.k_mag[0]
    z = 0.6e-6
    b = f.prefactor * k * np.exp(-k * z)
    with pytest.raises(MajoranaError):
        characterize_trap(f, [-b, 0.0, 0.0], [0.25e-6, 0.0, z], rb87)


def test_characterize_rejects_nonminimum(stripe_expansion, rb87):
    with pytest.raises(ValueError, match="not a verified minimum"):
        characterize_trap(stripe_expansion, stripe_bias(), [0.1e-6, 0.0, 0.3e-6], rb87)


def test_frequency_scaling_invariance(stripe_expansion, rb87):
    # scaling all amplitudes and the bias by s scales B_IP and depth by s
    # and frequencies by sqrt(s)
    from dataclasses import replace

    f = stripe_expansion
    s = 2.5
    f2 = replace(f, prefactor=f.prefactor * s)
    bias = stripe_bias()
    m1 = find_trap_minima(f, bias, (0.05e-6, 1.2e-6), grid_seed_n=5)
    m2 = find_trap_minima(f2, bias * s, (0.05e-6, 1.2e-6), grid_seed_n=5)
    r1 = characterize_trap(f, bias, m1[0], rb87, with_barriers=False)
    r2 = characterize_trap(f2, bias * s, m2[0], rb87, with_barriers=False)
    assert r2.B_IP == pytest.approx(s * r1.B_IP, rel=1e-9)
    assert r2.depth == pytest.approx(s * r1.depth, rel=1e-9)
    assert r2.freqs[0] == pytest.approx(np.sqrt(s) * r1.freqs[0], rel=1e-6)


# ----------------------------------------------------------------------
# barriers


def test_stripe_barrier_along_channel_is_zero(stripe_expansion):
    f = stripe_expansion
    bias = stripe_bias()
    minima = find_trap_minima(f, bias, (0.05e-6, 1.2e-6), grid_seed_n=5)
    r0 = minima[0]
    res = barrier_heights(f, bias, r0, r0 + np.array([0.0, 1e-6, 0.0]))
    assert res.height == pytest.approx(0.0, abs=1e-12)


def test_barrier_symmetry_and_saddle():
    # axis bias on the chiral windmill: the transverse (a2) saddle sits
    # below the escape value, so the string converges onto a true saddle
    f = fourier_from_pattern(
        windmill(1e-6, core=0.24, arm_len=0.34, arm_width=0.16, n=48, film_h=100e-9),
        threshold=1e-3,
        max_order=6,
    )
    bias = np.array([-1e-3, 0.0, 0.0])
    minima = find_trap_minima(f, bias, (0.15e-6, 1.4e-6), grid_seed_n=5)
    assert minima
    r0 = minima[0]
    shift = np.array([0.0, 1e-6, 0.0])
    fwd = barrier_heights(f, bias, r0, r0 + shift)
    rev = barrier_heights(f, bias, r0 + shift, r0)
    assert not fwd.coarse
    assert fwd.height == pytest.approx(rev.height, rel=1e-6)
    # the saddle is a genuine critical point with exactly one unstable axis
    s = eval_field(f, bias, fwd.saddle)
    assert np.linalg.norm(s.grad_mag) < 1e-7
    lam = np.linalg.eigvalsh(s.hessian_mag)
    assert lam[0] < 0 < lam[1]
    # barrier equals the saddle value above the trap floor
    assert fwd.height == pytest.approx(s.B_mag - eval_field(f, bias, r0).B_mag, rel=1e-9)
    # the other direction's saddle exceeds the escape value, so the string
    # would drift over the lattice: coarse line-scan fallback
    over = barrier_heights(f, bias, r0, r0 + np.array([1e-6, 0.0, 0.0]))
    assert over.coarse
    escape = np.linalg.norm(bias) - eval_field(f, bias, r0).B_mag
    assert over.height > escape


def test_barrier_input_validation(stripe_expansion):
    r = np.array([0.1e-6, 0.0, 0.5e-6])
    with pytest.raises(ValueError):
        barrier_heights(stripe_expansion, stripe_bias(), r, r)


# ----------------------------------------------------------------------
# transport


def test_transport_constant_schedule(stripe_expansion):
    f = stripe_expansion
    bias = stripe_bias()
    schedule = [bias, bias, bias]
    out = transport_trajectory(f, schedule, z_range=(0.05e-6, 1.2e-6))
    assert out.lost_at_step is None
    p0 = out.snapshots[0].positions
    for snap in out.snapshots[1:]:
        assert np.allclose(snap.positions, p0, atol=1e-12)


def test_transport_closed_loop(stripe_expansion):
    # |dB| < 0.1 |B| forces > 62 steps for a full turn of this schedule
    f = stripe_expansion
    period = f.geometry.period
    n = 75
    angles = np.linspace(0, 2 * np.pi, n)
    mag = 2e-3
    schedule = [
        np.array([-mag * np.cos(a), 0.5e-3, mag * np.sin(a)]) for a in angles
    ]
    out = transport_trajectory(f, schedule, z_range=(0.02e-6, 1.5e-6))
    assert out.lost_at_step is None
    # same field at the last step, so the minima set is unchanged modulo
    # the lattice; each tracked trap has been carried exactly one period
    # over (the shift-register mechanism)
    disp = out.snapshots[-1].positions - out.snapshots[0].positions
    assert np.allclose(disp[:, 0], period, atol=1e-3 * period)
    assert np.allclose(disp[:, 1:], 0.0, atol=1e-3 * period)


def test_transport_rotation_moves_traps_monotonically(stripe_expansion):
    # rotating the in-plane/vertical bias angle walks the minima along x:
    # half a turn moves them by half a lattice period
    f = stripe_expansion
    n = 40
    angles = np.linspace(0, np.pi, n)
    mag = 2e-3
    schedule = [
        np.array([-mag * np.cos(a), 0.5e-3, mag * np.sin(a)]) for a in angles
    ]
    out = transport_trajectory(f, schedule, z_range=(0.02e-6, 1.5e-6))
    assert out.lost_at_step is None
    xs = np.array([s.positions[0][0] for s in out.snapshots])
    steps = np.diff(xs)
    assert np.all(steps > 0) or np.all(steps < 0)
    assert abs(xs[-1] - xs[0]) == pytest.approx(0.5e-6, rel=1e-3)


def test_transport_validation(stripe_expansion):
    with pytest.raises(ValueError, match="at least 2"):
        transport_trajectory(stripe_expansion, [stripe_bias()])
    big_jump = [stripe_bias(), stripe_bias() * 3.0]
    with pytest.raises(ValueError, match="too large"):
        transport_trajectory(stripe_expansion, big_jump)


def test_tune_objective_validation():
    with pytest.raises(ValueError):
        TuneObjective(target_z=-1e-7)
    with pytest.raises(ValueError):
        TuneObjective(target_z=1e-7, mode="sideways")


def test_tune_target_beyond_decay_unreachable(stripe_expansion, rb87):
    from maglattice.traps import TuneUnreachableError, tune_bias

    # k1 * target_z = 50: the lattice field has decayed below any bias scale
    objective = TuneObjective(target_z=50 / stripe_expansion.k_min)
    with pytest.raises(TuneUnreachableError, match="objective unreachable"):
        tune_bias(stripe_expansion, objective, rb87, stripe_bias(), seed=0)
