"""Command-line entry point.

One subcommand per pipeline: field-map, traps, tune-bias, hubbard, surface,
fano, transport. A single strict JSON config document supplies the pattern,
geometry, film, bias, atom and material parameters; every run writes
report.json (plus CSV files where applicable) into --out. Exit codes:
0 success, 1 input error, 2 physics-level failure.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import constants as const
from .atom import AtomState, default_rb87
from .fano import LossModel, TrajectoryEnsemble, simulate_three_body
from .hubbard import hubbard_sinusoidal, mott_depth
from .io import load_pbm, write_fano_csv, write_field_map_csv
from .lattice import (
    LatticeGeometry,
    MagnetizationPattern,
    NoStructureError,
    eval_field_arrays,
    fourier_from_pattern,
)
from .surface import MaterialParams, surface_budget
from .traps import (
    TuneObjective,
    TuneUnreachableError,
    characterize_trap,
    find_trap_minima,
    transport_trajectory,
    tune_bias,
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    pattern_path: str | None
    occupancy: np.ndarray | None
    a1: np.ndarray  # m
    a2: np.ndarray  # m
    M0: float  # A/m
    film_h: float  # m
    bias: np.ndarray  # T
    atom: AtomState
    material: MaterialParams
    max_order: int
    threshold: float
    seed: int

    def expansion(self):
        if self.occupancy is None:
            raise ConfigError("this subcommand needs a 'pattern' PBM in the config")
        pattern = MagnetizationPattern(
            geometry=LatticeGeometry.from_primitives(self.a1, self.a2),
            occupancy=self.occupancy,
            M0=self.M0,
            film_h=self.film_h,
        )
        return fourier_from_pattern(
            pattern, threshold=self.threshold, max_order=self.max_order
        ), pattern

    def echo(self) -> dict:
        """Resolved config with unit-suffixed keys, echoed into every report."""
        return {
            "pattern": self.pattern_path,
            "geometry": {
                "a1_nm": [self.a1[0] * 1e9, self.a1[1] * 1e9],
                "a2_nm": [self.a2[0] * 1e9, self.a2[1] * 1e9],
            },
            "film": {"M0_kA_per_m": self.M0 / 1e3, "thickness_nm": self.film_h * 1e9},
            "bias_mT": [b * 1e3 for b in self.bias],
            "atom": {
                "mass_kg": self.atom.mass,
                "gF": self.atom.gF,
                "mF": self.atom.mF,
                "a_s_nm": self.atom.a_s * 1e9,
                "lambda_bar_nm": self.atom.lambda_bar * 1e9,
                "gamma_over_2pi_MHz": self.atom.gamma_nat / (2 * np.pi) / 1e6,
            },
            "material": {
                "epsilon_factor": self.material.epsilon_factor,
                "sigma_S_per_m": self.material.sigma,
                "coating_thickness_nm": self.material.coating_t * 1e9,
                "johnson_C0_um_per_s": self.material.johnson_C0 * 1e6,
            },
            "truncation": {"max_order": self.max_order, "threshold": self.threshold},
            "seed": self.seed,
        }


def _pop(d: dict, key: str, default, path: str, required: bool = False):
    if key not in d:
        if required:
            raise ConfigError(f"missing required config key '{path}{key}'")
        return default
    return d.pop(key)


def _reject_unknown(d: dict, path: str):
    if d:
        keys = ", ".join(f"'{path}{k}'" for k in sorted(d))
        raise ConfigError(f"unknown config key(s): {keys}")


def _vec(value, n, path):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{path}' must be a numeric {n}-vector") from exc
    if arr.shape != (n,):
        raise ConfigError(f"'{path}' must have exactly {n} entries")
    return arr


def _positive(value, path):
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{path}' must be a number") from exc
    if v <= 0:
        raise ConfigError(f"'{path}' must be positive")
    return v


def parse_config(path) -> RunConfig:
    """Load and validate the JSON config. Unknown keys are rejected so a
    typo in a physics parameter cannot pass silently."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")

    pattern_path = _pop(doc, "pattern", None, "")
    geo = _pop(doc, "geometry", {}, "")
    if not isinstance(geo, dict):
        raise ConfigError("'geometry' must be an object")
    a1 = _vec(_pop(geo, "a1_nm", [1000.0, 0.0], "geometry."), 2, "geometry.a1_nm") * 1e-9
    a2 = _vec(_pop(geo, "a2_nm", [0.0, 1000.0], "geometry."), 2, "geometry.a2_nm") * 1e-9
    _reject_unknown(geo, "geometry.")

    film = _pop(doc, "film", {}, "")
    if not isinstance(film, dict):
        raise ConfigError("'film' must be an object")
    M0 = _positive(_pop(film, "M0_kA_per_m", 670.0, "film."), "film.M0_kA_per_m") * 1e3
    film_h = (
        _positive(_pop(film, "thickness_nm", 300.0, "film."), "film.thickness_nm")
        * 1e-9
    )
    _reject_unknown(film, "film.")

    bias = _vec(_pop(doc, "bias_mT", None, "", required=True), 3, "bias_mT") * 1e-3
    if np.linalg.norm(bias) >= 0.1:
        raise ConfigError("'bias_mT' magnitude must be below 100 mT")

    base = default_rb87()
    at = _pop(doc, "atom", {}, "")
    if not isinstance(at, dict):
        raise ConfigError("'atom' must be an object")
    atom = AtomState(
        mass=_positive(_pop(at, "mass_kg", base.mass, "atom."), "atom.mass_kg"),
        gF=float(_pop(at, "gF", base.gF, "atom.")),
        mF=float(_pop(at, "mF", base.mF, "atom.")),
        a_s=_positive(_pop(at, "a_s_nm", base.a_s * 1e9, "atom."), "atom.a_s_nm") * 1e-9,
        lambda_bar=_positive(
            _pop(at, "lambda_bar_nm", base.lambda_bar * 1e9, "atom."),
            "atom.lambda_bar_nm",
        )
        * 1e-9,
        gamma_nat=_positive(
            _pop(at, "gamma_over_2pi_MHz", base.gamma_nat / (2 * np.pi) / 1e6, "atom."),
            "atom.gamma_over_2pi_MHz",
        )
        * 2
        * np.pi
        * 1e6,
    )
    _reject_unknown(at, "atom.")

    mat = _pop(doc, "material", {}, "")
    if not isinstance(mat, dict):
        raise ConfigError("'material' must be an object")
    material = MaterialParams(
        epsilon_factor=float(_pop(mat, "epsilon_factor", 0.85, "material.")),
        sigma=_positive(_pop(mat, "sigma_S_per_m", 45e6, "material."), "material.sigma_S_per_m"),
        coating_t=_positive(
            _pop(mat, "coating_thickness_nm", 50.0, "material."),
            "material.coating_thickness_nm",
        )
        * 1e-9,
        johnson_C0=_positive(
            _pop(mat, "johnson_C0_um_per_s", 88.0, "material."),
            "material.johnson_C0_um_per_s",
        )
        * 1e-6,
    )
    _reject_unknown(mat, "material.")

    trunc = _pop(doc, "truncation", {}, "")
    if not isinstance(trunc, dict):
        raise ConfigError("'truncation' must be an object")
    max_order = int(_pop(trunc, "max_order", 16, "truncation."))
    if max_order < 1:
        raise ConfigError("'truncation.max_order' must be >= 1")
    threshold = float(_pop(trunc, "threshold", 1e-4, "truncation."))
    if threshold < 0:
        raise ConfigError("'truncation.threshold' must be >= 0")
    _reject_unknown(trunc, "truncation.")

    seed = int(_pop(doc, "seed", 0, ""))
    _reject_unknown(doc, "")

    occupancy = None
    if pattern_path is not None:
        pbm = Path(pattern_path)
        if not pbm.is_absolute():
            pbm = p.parent / pbm
        occupancy = load_pbm(pbm)

    return RunConfig(
        pattern_path=pattern_path,
        occupancy=occupancy,
        a1=a1,
        a2=a2,
        M0=M0,
        film_h=film_h,
        bias=bias,
        atom=atom,
        material=material,
        max_order=max_order,
        threshold=threshold,
        seed=seed,
    )


# ----------------------------------------------------------------------
# report plumbing


def _trap_payload(report) -> dict:
    return {
        "position_nm": [v * 1e9 for v in report.r0],
        "B_IP_mT": report.B_IP * 1e3,
        "freqs_kHz": [f / 1e3 for f in report.freqs],
        "axes": [list(row) for row in report.axes],
        "depth_mT": report.depth * 1e3,
        "barriers_mT": {label: h * 1e3 for label, h in report.barriers},
        "omega_over_larmor": report.omega_over_larmor,
        "larmor_healthy": report.larmor_healthy,
    }


def _emit(args, subcommand, config_echo, payload, warnings):
    doc = {
        "tool": f"maglattice {__version__}",
        "subcommand": subcommand,
        "config": config_echo,
        "payload": payload,
        "warnings": warnings,
    }
    if not args.no_timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(doc, indent=2, sort_keys=True)
    (out / "report.json").write_text(text + "\n")
    if args.json:
        print(text)
    return doc


# ----------------------------------------------------------------------
# subcommand handlers


def _cmd_field_map(args, cfg: RunConfig):
    f, _ = cfg.expansion()
    n = args.n
    z = args.z_nm * 1e-9
    fr = (np.arange(n) + 0.5) / n
    FX, FY = np.meshgrid(fr, fr, indexing="ij")
    pts = (
        FX.ravel()[:, None] * cfg.a1[None, :]
        + FY.ravel()[:, None] * cfg.a2[None, :]
    )
    pts = np.column_stack([pts, np.full(len(pts), z)])

    workers = max(1, args.threads)
    chunks = np.array_split(np.arange(len(pts)), workers)
    B = np.empty((len(pts), 3))

    def work(idx):
        B[idx], *_ = eval_field_arrays(f, cfg.bias, pts[idx])

    if workers == 1:
        work(np.arange(len(pts)))
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(work, chunks))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "field_map.csv"
    write_field_map_csv(csv_path, pts, B)
    payload = {
        "z_nm": args.z_nm,
        "grid_n": n,
        "csv": csv_path.name,
        "modes_retained": int(f.nmodes),
        "Bmag_min_mT": float(np.linalg.norm(B, axis=1).min() * 1e3),
        "Bmag_max_mT": float(np.linalg.norm(B, axis=1).max() * 1e3),
    }
    _emit(args, "field-map", cfg.echo(), payload, [])
    return 0


def _cmd_traps(args, cfg: RunConfig):
    f, _ = cfg.expansion()
    period = f.geometry.period
    z_lo = (args.z_min_nm * 1e-9) if args.z_min_nm else period / 50
    z_hi = (args.z_max_nm * 1e-9) if args.z_max_nm else 2 * period
    minima = find_trap_minima(f, cfg.bias, (z_lo, z_hi), grid_seed_n=args.seeds)
    if not minima:
        _emit(args, "traps", cfg.echo(), {"traps": []}, ["no minima found"])
        print("no minima found in the search range", file=sys.stderr)
        return 2
    reports = [
        characterize_trap(f, cfg.bias, r, cfg.atom, with_barriers=not args.no_barriers)
        for r in minima
    ]
    payload = {"traps": [_trap_payload(r) for r in reports]}
    _emit(args, "traps", cfg.echo(), payload, [])
    return 0


def _cmd_tune_bias(args, cfg: RunConfig):
    f, _ = cfg.expansion()
    mode = {
        "symmetric": "symmetric_barriers",
        "channels-a1": "channels_along_a1",
        "channels-a2": "channels_along_a2",
    }[args.mode]
    objective = TuneObjective(
        target_z=args.target_z_nm * 1e-9, mode=mode, weighting=args.weight
    )
    try:
        bias, report = tune_bias(
            f, objective, cfg.atom, cfg.bias, seed=args.seed if args.seed is not None else cfg.seed
        )
    except TuneUnreachableError as exc:
        warn = [str(exc)]
        best_bias, best_report = exc.best
        payload = {"reached": False}
        if best_report is not None:
            payload["best_bias_mT"] = [b * 1e3 for b in np.asarray(best_bias.B_ext)]
            payload["best_trap"] = _trap_payload(best_report)
        _emit(args, "tune-bias", cfg.echo(), payload, warn)
        print(exc, file=sys.stderr)
        return 2
    payload = {
        "reached": True,
        "bias_mT": [b * 1e3 for b in bias.B_ext],
        "trap": _trap_payload(report),
    }
    _emit(args, "tune-bias", cfg.echo(), payload, [])
    return 0


def _cmd_hubbard(args, cfg: RunConfig):
    ds = [float(v) * 1e-9 for v in args.d.split(",") if v.strip()]
    if not ds:
        raise ConfigError("--d must list at least one period in nm")
    rows = []
    for d in ds:
        s = mott_depth(d, cfg.atom, args.j_over_u)
        hp = hubbard_sinusoidal(d, s, cfg.atom)
        rows.append(
            {
                "d_nm": d * 1e9,
                "s": hp.s,
                "E_R_nK": hp.E_R / const.kB / 1e-9,
                "U_nK": hp.U / const.kB / 1e-9,
                "J_nK": hp.J_tun / const.kB / 1e-9,
                "J2_over_U_nK": hp.superexchange / const.kB / 1e-9,
                "U_over_4J": hp.U_over_J / 4.0,
            }
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["d_nm", "s", "E_R_nK", "U_nK", "J_nK", "J2_over_U_nK", "U_over_4J"]
    with open(out / "hubbard.csv", "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(f"{row[c]:.9g}" for c in cols) + "\n")
    payload = {"j_over_u": args.j_over_u, "rows": rows, "csv": "hubbard.csv"}
    _emit(args, "hubbard", cfg.echo(), payload, [])
    return 0


def _cmd_surface(args, cfg: RunConfig):
    f, _ = cfg.expansion()
    period = f.geometry.period
    z_lo = (args.z_min_nm * 1e-9) if args.z_min_nm else period / 50
    z_hi = (args.z_max_nm * 1e-9) if args.z_max_nm else 2 * period
    minima = find_trap_minima(f, cfg.bias, (z_lo, z_hi), grid_seed_n=args.seeds)
    if not minima:
        print("no minima found in the search range", file=sys.stderr)
        return 2
    if not 0 <= args.trap_index < len(minima):
        raise ConfigError(
            f"--trap-index {args.trap_index} out of range ({len(minima)} traps)"
        )
    report = characterize_trap(
        f, cfg.bias, minima[args.trap_index], cfg.atom, with_barriers=False
    )
    budget = surface_budget(f, cfg.bias, report, cfg.atom, cfg.material)
    payload = {
        "trap": _trap_payload(budget.report),
        "C3_Jm3": budget.C3,
        "z0_nm": budget.z0 * 1e9,
        "omega_z_kHz": budget.omega_z / (2 * np.pi) / 1e3,
        "delta_zt_nm": budget.delta_zt * 1e9,
        "shift_linear_valid": budget.shift_linear_valid,
        "omega_crit_kHz": budget.omega_crit / (2 * np.pi) / 1e3,
        "vdw_pass": budget.vdw_pass,
        "log10_T": budget.log10_T,
        "tunneling_negligible": budget.tunneling_negligible,
        "ell_tunnel_nm": budget.ell_tunnel * 1e9,
        "spin_flip_MHz": budget.spin_flip_omega / (2 * np.pi) / 1e6,
        "skin_depth_um": budget.skin_depth * 1e6,
        "gamma_spinflip_per_s": budget.gamma_spinflip,
        "tau_johnson_s": budget.tau_johnson,
        "epsilon_factor": budget.epsilon_factor,
    }
    warnings = []
    if not budget.vdw_pass:
        warnings.append("VdW destroys trap: omega_z below omega_crit")
    _emit(args, "surface", cfg.echo(), payload, warnings)
    return 0


def _cmd_fano(args, cfg: RunConfig):
    etas = [float(v) for v in args.eta.split(",") if v.strip()]
    seed = args.seed if args.seed is not None else cfg.seed
    model = LossModel(rate_constant=args.gamma3)
    ensemble = TrajectoryEnsemble(
        n_traj=args.ntraj, N0=args.n0, distribution=args.dist, seed=seed
    )
    curve = simulate_three_body(model, ensemble, etas)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_fano_csv(out / "fano.csv", curve)
    payload = {
        "N0": curve.N0,
        "n_traj": curve.n_traj,
        "seed": curve.seed,
        "distribution": curve.distribution,
        "csv": "fano.csv",
        "points": [
            {
                "eta": p.eta,
                "eta_actual": p.eta_actual,
                "mean_N": p.mean_N,
                "F": None if p.exhausted else p.F,
                "stderr_F": None if p.exhausted else p.stderr_F,
                "exhausted": p.exhausted,
            }
            for p in curve.points
        ],
    }
    warnings = [f"checkpoint eta={p.eta} exhausted" for p in curve.points if p.exhausted]
    _emit(args, "fano", cfg.echo(), payload, warnings)
    return 0


def _cmd_transport(args, cfg: RunConfig):
    f, _ = cfg.expansion()
    if args.schedule_json:
        sched_doc = json.loads(Path(args.schedule_json).read_text())
        schedule = [np.asarray(row, dtype=float) * 1e-3 for row in sched_doc]
    else:
        angles = np.linspace(0.0, np.radians(args.degrees), args.steps)
        b0 = cfg.bias
        plane = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}[args.rotate_plane]
        schedule = []
        for th in angles:
            b = b0.copy()
            i, j = plane
            ci, cj = b0[i], b0[j]
            b[i] = ci * np.cos(th) - cj * np.sin(th)
            b[j] = ci * np.sin(th) + cj * np.cos(th)
            schedule.append(b)
    result = transport_trajectory(f, schedule, atom=cfg.atom)
    warnings = []
    if result.lost_at_step is not None:
        warnings.append(f"tracking lost at step {result.lost_at_step}")
    payload = {
        "n_steps_completed": len(result.snapshots),
        "snapshots": [
            {
                "step": s.step,
                "bias_mT": [b * 1e3 for b in s.bias],
                "positions_nm": (s.positions * 1e9).tolist(),
                "B_IP_mT": (s.B_IP * 1e3).tolist(),
                "freqs_kHz": (s.freqs / 1e3).tolist(),
            }
            for s in result.snapshots
        ],
    }
    _emit(args, "transport", cfg.echo(), payload, warnings)
    return 0


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="maglattice",
        description="Magnetic-lattice atom chip design and analysis",
    )
    ap.add_argument("--config", required=True, help="path to the JSON config")
    ap.add_argument("--out", default=".", help="output directory (default: .)")
    ap.add_argument("--json", action="store_true", help="print report.json to stdout")
    ap.add_argument("--no-timestamp", action="store_true", help="omit the timestamp")
    ap.add_argument("--threads", type=int, default=1, help="worker thread cap")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("field-map", help="export |B| over one unit cell as CSV")
    p.add_argument("--z-nm", type=float, required=True)
    p.add_argument("--n", type=int, default=32)
    p.set_defaults(handler=_cmd_field_map)

    p = sub.add_parser("traps", help="find and characterize trap minima")
    p.add_argument("--z-min-nm", type=float, default=None)
    p.add_argument("--z-max-nm", type=float, default=None)
    p.add_argument("--seeds", type=int, default=6)
    p.add_argument("--no-barriers", action="store_true")
    p.set_defaults(handler=_cmd_traps)

    p = sub.add_parser("tune-bias", help="tune the bias toward an objective")
    p.add_argument("--target-z-nm", type=float, required=True)
    p.add_argument(
        "--mode", choices=["symmetric", "channels-a1", "channels-a2"], default="symmetric"
    )
    p.add_argument("--weight", type=float, default=1.0)
    p.set_defaults(handler=_cmd_tune_bias)

    p = sub.add_parser("hubbard", help="Hubbard parameter table versus period")
    p.add_argument("--d", required=True, help="comma list of lattice periods in nm")
    p.add_argument("--j-over-u", type=float, default=0.06)
    p.set_defaults(handler=_cmd_hubbard)

    p = sub.add_parser("surface", help="surface-loss budget for one trap")
    p.add_argument("--trap-index", type=int, default=0)
    p.add_argument("--z-min-nm", type=float, default=None)
    p.add_argument("--z-max-nm", type=float, default=None)
    p.add_argument("--seeds", type=int, default=6)
    p.set_defaults(handler=_cmd_surface)

    p = sub.add_parser("fano", help="three-body loss Fano-curve simulation")
    p.add_argument("--n0", type=int, default=1000)
    p.add_argument("--dist", choices=["poisson", "fixed"], default="poisson")
    p.add_argument("--ntraj", type=int, default=10000)
    p.add_argument("--eta", default="0.9,0.7,0.5,0.3,0.1")
    p.add_argument("--gamma3", type=float, default=1.0)
    p.set_defaults(handler=_cmd_fano)

    p = sub.add_parser("transport", help="track minima through a bias schedule")
    p.add_argument("--schedule-json", default=None, help="JSON list of bias mT vectors")
    p.add_argument("--steps", type=int, default=90)
    p.add_argument("--degrees", type=float, default=360.0)
    p.add_argument("--rotate-plane", choices=["xy", "xz", "yz"], default="xy")
    p.set_defaults(handler=_cmd_transport)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.handler(args, cfg)
    except (ConfigError, NoStructureError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
