"""Batch command-line front end.

Subcommands: fig1, tfim, mhc, rom, selfcheck.  Every run resolves its
configuration (flags > config file > defaults), writes CSV/JSON outputs into
--out-dir, and records a manifest with the resolved configuration and a
sha256 digest of every output file; re-running a manifest reproduces the
outputs byte for byte.

Exit codes: 0 success, 1 usage error, 2 numerical/solver failure,
3 selfcheck failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .fitting import FitError, fit_power_law
from .magic import (
    MAX_NN_TWO_QUBIT,
    haar_nn_cdf,
    haar_nn_mean,
    haar_nn_pdf,
    mutual_sre,
    nn_two_qubit_pure_analytic,
    pauli_expectations,
    sre2_mixed,
    sre2_pure,
)
from .monitored import CircuitConfig, averaged_nn_scan, minn_scan_mhc, swapping_from_curves
from .optimize import OptimizationError, OptimizerConfig, nn_optimize
from .records import CHAIN_COLUMNS, CIRCUIT_COLUMNS, write_scan_csv
from .robustness import enumerate_stabilizer_states, nn_rom, solve_l1_lp
from .simplex import SimplexError
from .states import (
    T,
    apply_gate,
    basis_state,
    density_matrix,
    haar_random_state,
    log_negativity,
    partial_trace,
    schmidt_theta,
    von_neumann_entropy,
    werner_state,
)
from .tfim import (
    FreeFermionChain,
    ResourceLimitError,
    SolverError,
    TfimConfig,
    minn_scan,
    two_point_nn_scan,
)

REFERENCE_VALUES = {
    "max_two_qubit_nn": math.log(4.0 / 3.0),
    "haar_mean_nn": 0.1917,
    "critical_nn_decay_exponent": 0.5,
    "critical_xx_decay_exponent": 0.25,
    "separable_state_nn_rom": 0.0703,
    "minn_decay_exponent_reference": 0.76,
    "mutual_information_decay_exponent_reference": 3.31,
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _sanitize(value):
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(_sanitize(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="nlmagic", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master RNG seed")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes for trajectory scans (default: logical cores)")
    common.add_argument("--out-dir", default=None, help="output directory (default: nlmagic-out)")
    common.add_argument("--config", default=None, help="JSON config file (flags take precedence)")
    common.add_argument("--paper-targets", action="store_true", default=None,
                        help="annotate outputs with published reference values (labels only)")

    sub = parser.add_subparsers(dest="command", required=True)

    p_fig1 = sub.add_parser("fig1", parents=[common],
                            help="two-qubit sweeps: Schmidt-angle curves, Haar histogram, Werner family")
    p_fig1.add_argument("--n-theta", type=int, default=None, help="points in the theta sweep")
    p_fig1.add_argument("--n-haar", type=int, default=None, help="Haar samples for the histogram")
    p_fig1.add_argument("--n-bins", type=int, default=None, help="histogram bins")
    p_fig1.add_argument("--n-werner", type=int, default=None, help="points in the Werner sweep")

    p_tfim = sub.add_parser("tfim", parents=[common], help="transverse-field Ising chain scans")
    p_tfim.add_argument("--L", type=int, default=None)
    p_tfim.add_argument("--h", type=float, nargs="+", default=None, help="one or more field values")
    p_tfim.add_argument("--backend", choices=["ed", "free_fermion"], default=None)
    p_tfim.add_argument("--r-min", type=int, default=None)
    p_tfim.add_argument("--r-max", type=int, default=None)
    p_tfim.add_argument("--axes", nargs="*", default=None,
                        help="measurement axes for MINN scans (subset of x y z; ED only)")
    p_tfim.add_argument("--mode", choices=["enumerate", "sample"], default=None)
    p_tfim.add_argument("--n-samples", type=int, default=None, help="samples per r in sample mode")
    p_tfim.add_argument("--fit-window", type=int, nargs=2, default=None,
                        help="power-law fit window (default 4 L/4)")

    p_mhc = sub.add_parser("mhc", parents=[common], help="monitored Haar-circuit scans")
    p_mhc.add_argument("--L", type=int, default=None)
    p_mhc.add_argument("--p", type=float, default=None, help="measurement rate")
    p_mhc.add_argument("--depth", type=int, default=None)
    p_mhc.add_argument("--n-traj", type=int, default=None, help="trajectories for the NN scan")
    p_mhc.add_argument("--minn-traj", type=int, default=None, help="trajectories for the MINN scan")
    p_mhc.add_argument("--r-min", type=int, default=None)
    p_mhc.add_argument("--r-max", type=int, default=None)
    p_mhc.add_argument("--opt-starts", type=int, default=None,
                       help="Nelder-Mead starts per NN point")
    p_mhc.add_argument("--skip-nn", action="store_true", default=None,
                       help="skip the optimizer-heavy averaged NN scan")

    p_rom = sub.add_parser("rom", parents=[common], help="robustness-of-magic decomposition")
    p_rom.add_argument("--state", default=None,
                       help="state spec: rho0 | tplus | bell | werner:<x> (default rho0)")
    p_rom.add_argument("--starts", type=int, default=None, help="optimizer starts for nn_rom")
    p_rom.add_argument("--no-optimize", action="store_true", default=None,
                       help="only decompose; skip the local-unitary minimization")

    sub.add_parser("selfcheck", parents=[common],
                   help="run the cross-validation oracle suite; exit 3 on any failure")
    return parser


def resolve_config(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge CLI flags over a JSON config file over defaults."""
    from_file = {}
    if args.config:
        with open(args.config) as fh:
            from_file = json.load(fh)
    resolved = {}
    for key, default in defaults.items():
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            resolved[key] = flag_val
        elif key in from_file:
            resolved[key] = from_file[key]
        else:
            resolved[key] = default
    return resolved


GLOBAL_DEFAULTS = {
    "seed": 0,
    "threads": os.cpu_count() or 1,
    "out_dir": "nlmagic-out",
    "paper_targets": False,
}


def cmd_fig1(cfg: dict) -> list[str]:
    out_dir = cfg["out_dir"]
    rng = np.random.default_rng(cfg["seed"])
    outputs = []

    # panel-b sweep over the Schmidt angle, including pi/8 exactly
    n_theta = cfg["n_theta"]
    thetas = np.linspace(0.0, np.pi / 2, n_theta)
    rows = []
    for th in thetas:
        psi = np.zeros(4, dtype=complex)
        psi[0], psi[3] = np.cos(th), np.sin(th)
        ent = von_neumann_entropy(partial_trace(psi, (0,)))
        rows.append(
            (th, nn_two_qubit_pure_analytic(psi), ent, mutual_sre(psi),
             sre2_pure(psi), sre2_pure(apply_gate(psi, T, (0,))))
        )
    path = os.path.join(out_dir, "fig1b.csv")
    _write_rows(path, "theta,nn,entanglement_entropy,mutual_sre,sre2,sre2_t_gate", rows)
    outputs.append(path)

    # panel-c Haar histogram against the analytic density
    n_haar, n_bins = cfg["n_haar"], cfg["n_bins"]
    samples = np.empty(n_haar)
    for i in range(n_haar):
        samples[i] = nn_two_qubit_pure_analytic(haar_random_state(2, rng))
    edges = np.linspace(0.0, MAX_NN_TWO_QUBIT, n_bins + 1)
    counts, _ = np.histogram(samples, bins=edges)
    widths = np.diff(edges)
    mids = (edges[:-1] + edges[1:]) / 2
    prob_exact = np.diff(haar_nn_cdf(edges))
    rows = [
        (edges[i], edges[i + 1], int(counts[i]), counts[i] / n_haar / widths[i],
         haar_nn_pdf(mids[i]), prob_exact[i])
        for i in range(n_bins)
    ]
    path = os.path.join(out_dir, "fig1c.csv")
    _write_rows(path, "bin_left,bin_right,count,density,pdf_mid,prob_exact", rows)
    outputs.append(path)
    path = os.path.join(out_dir, "fig1c_summary.json")
    _write_json(path, {
        "n_samples": n_haar,
        "sample_mean": float(samples.mean()),
        "sample_stderr": float(samples.std(ddof=1) / np.sqrt(n_haar)),
        "quadrature_mean": haar_nn_mean(),
    })
    outputs.append(path)

    # panel-d Werner family
    xs = np.linspace(0.0, 1.0, cfg["n_werner"])
    rows = []
    for x in xs:
        rho = werner_state(x)
        t_rho = np.kron(T, np.eye(2)) @ rho @ np.kron(T, np.eye(2)).conj().T
        rows.append(
            (x, sre2_mixed(rho), log_negativity(rho), sre2_mixed(t_rho), mutual_sre(rho))
        )
    path = os.path.join(out_dir, "fig1d.csv")
    _write_rows(path, "x,nn,log_negativity,sre2_t_gate,mutual_sre", rows)
    outputs.append(path)
    return outputs


def _write_rows(path: str, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def cmd_tfim(cfg: dict) -> list[str]:
    out_dir = cfg["out_dir"]
    r_values = list(range(cfg["r_min"], cfg["r_max"] + 1))
    records = []
    fits = {}
    for h in cfg["h"]:
        config = TfimConfig(L=cfg["L"], h=h, backend=cfg["backend"])
        recs = two_point_nn_scan(config, r_values, seed=cfg["seed"])
        records.extend(recs)
        window = tuple(cfg["fit_window"]) if cfg["fit_window"] else (4, max(4, cfg["L"] // 4))
        rs = np.array(r_values, dtype=float)
        for name, with_offset in (("nn", True), ("xx", False)):
            vals = np.array([rec.value for rec in recs if rec.measure_name == name])
            try:
                fit = fit_power_law(rs, np.abs(vals), window=window, with_offset=with_offset)
                fits[f"h={h}:{name}"] = {
                    "exponent": fit.exponent, "amplitude": fit.amplitude,
                    "offset": fit.offset, "residual": fit.residual,
                    "stderr_exponent": fit.stderr_exponent, "window": list(fit.window),
                }
            except FitError as exc:
                fits[f"h={h}:{name}"] = {"error": str(exc)}
        for axis in cfg["axes"] or []:
            records.extend(
                minn_scan(config, r_values, axis=axis, mode=cfg["mode"],
                          n_samples=cfg["n_samples"], seed=cfg["seed"])
            )
    scan_path = os.path.join(out_dir, "tfim_scan.csv")
    write_scan_csv(scan_path, records, CHAIN_COLUMNS)
    fit_path = os.path.join(out_dir, "tfim_fits.json")
    _write_json(fit_path, fits)
    return [scan_path, fit_path]


def cmd_mhc(cfg: dict) -> list[str]:
    out_dir = cfg["out_dir"]
    config = CircuitConfig(L=cfg["L"], p=cfg["p"], depth=cfg["depth"], seed=cfg["seed"])
    r_values = list(range(cfg["r_min"], cfg["r_max"] + 1))
    outputs = []
    records = []
    if not cfg["skip_nn"]:
        records.extend(
            averaged_nn_scan(
                config, r_values, n_traj=cfg["n_traj"],
                opt_config=OptimizerConfig(n_starts=cfg["opt_starts"], seed=cfg["seed"]),
                n_workers=cfg["threads"],
            )
        )
    minn_records = minn_scan_mhc(
        config, r_values, n_traj=cfg["minn_traj"], n_workers=cfg["threads"]
    )
    records.extend(minn_records)
    scan_path = os.path.join(out_dir, "mhc_scan.csv")
    write_scan_csv(scan_path, records, CIRCUIT_COLUMNS)
    outputs.append(scan_path)

    minn = [rec.value for rec in minn_records if rec.measure_name == "minn"]
    ie = [rec.value for rec in minn_records if rec.measure_name == "mutual_information"]
    report = swapping_from_curves(r_values, minn, ie)
    diag_path = os.path.join(out_dir, "mhc_swapping.json")
    _write_json(diag_path, {
        "alpha_minn": report.alpha_minn,
        "alpha_ie": report.alpha_ie,
        "stderr_minn": report.stderr_minn,
        "stderr_ie": report.stderr_ie,
        "ratio": report.ratio,
        "swapping": report.swapping,
        "swapping_significance": report.swapping_significance,
        "ordering_significance": report.ordering_significance,
        "inconclusive": report.inconclusive,
        "reference_exponents": list(report.reference_exponents),
    })
    outputs.append(diag_path)
    return outputs


def _rom_state(spec: str) -> np.ndarray:
    if spec == "rho0":
        phi0 = np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)], dtype=complex)
        return 0.5 * density_matrix(np.kron(phi0, phi0)) + 0.5 * density_matrix(basis_state(2))
    if spec == "tplus":
        plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
        return density_matrix(np.kron(T @ plus, T @ plus))
    if spec == "bell":
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1.0 / np.sqrt(2)
        return density_matrix(bell)
    if spec.startswith("werner:"):
        return werner_state(float(spec.split(":", 1)[1]))
    raise UsageError(f"unknown state spec {spec!r}; use rho0|tplus|bell|werner:<x>")


def cmd_rom(cfg: dict) -> list[str]:
    out_dir = cfg["out_dir"]
    rho = _rom_state(cfg["state"])
    basis = enumerate_stabilizer_states(2)
    sol = solve_l1_lp(pauli_expectations(rho), basis)
    payload = {
        "state": cfg["state"],
        "n_basis_states": len(basis),
        "l1_norm": sol.l1_norm,
        "rom": sol.rom,
        "residual": sol.residual,
        "coefficients": [float(c) for c in sol.coefficients],
    }
    if not cfg["no_optimize"]:
        payload["nn_rom"] = nn_rom(rho, OptimizerConfig(n_starts=cfg["starts"], seed=cfg["seed"]))
    path = os.path.join(out_dir, "rom.json")
    _write_json(path, payload)
    return [path]


def _selfcheck_optimizer(seed: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        psi = haar_random_state(2, rng)
        val, _ = nn_optimize(psi, OptimizerConfig(n_starts=8, seed=seed))
        worst = max(worst, abs(val - nn_two_qubit_pure_analytic(psi)))
    return worst < 1e-5, f"max |optimized - analytic| = {worst:.2e} over 20 Haar states"


def _selfcheck_backends(_seed: int):
    from .tfim import ground_state_ed, two_site_rdm_canonical, sre2_from_r

    config = TfimConfig(L=10, h=1.0)
    state = ground_state_ed(config)
    chain = FreeFermionChain(10, 1.0)
    worst = 0.0
    for r in range(1, 6):
        _, rmat = two_site_rdm_canonical(state, r)
        ff = chain.two_site_r_matrix(r)
        worst = max(worst, float(np.max(np.abs(rmat - ff))))
    return worst < 1e-6, f"max |ED - free-fermion| R-matrix entry = {worst:.2e} at L=10"


def _selfcheck_lp(seed: int):
    from scipy.optimize import linprog

    basis = enumerate_stabilizer_states(1)
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    tstate = density_matrix(T @ plus)
    sol = solve_l1_lp(pauli_expectations(tstate), basis)
    err_t = abs(sol.rom - (np.sqrt(2.0) - 1.0))
    basis2 = enumerate_stabilizer_states(2)
    rng = np.random.default_rng(seed)
    worst = err_t
    for _ in range(5):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        target = pauli_expectations(rho)
        mine = solve_l1_lp(target, basis2).l1_norm
        ref = linprog(
            np.ones(2 * len(basis2)),
            A_eq=np.hstack([basis2.vectors.T, -basis2.vectors.T]),
            b_eq=target, bounds=(0, None), method="highs",
        ).fun
        worst = max(worst, abs(mine - ref))
    return worst < 1e-6, f"max LP deviation from reference = {worst:.2e}"


def _selfcheck_minn(seed: int):
    config = TfimConfig(L=8, h=1.0)
    worst = 0.0
    for r in (2, 4):
        enum = minn_scan(config, [r], axis="z", mode="enumerate")[0]
        samp = minn_scan(config, [r], axis="z", mode="sample", n_samples=4000, seed=seed)[0]
        sigma = abs(enum.value - samp.value) / samp.stderr
        worst = max(worst, sigma)
    return worst < 3.0, f"max enumerate-vs-sample deviation = {worst:.2f} sigma"


def cmd_selfcheck(cfg: dict) -> tuple[list[str], bool]:
    checks = [
        ("optimizer-vs-theorem", _selfcheck_optimizer),
        ("ed-vs-free-fermion", _selfcheck_backends),
        ("lp-vs-reference", _selfcheck_lp),
        ("minn-enumerate-vs-sample", _selfcheck_minn),
    ]
    results = {}
    all_ok = True
    for name, fn in checks:
        ok, detail = fn(cfg["seed"])
        results[name] = {"pass": bool(ok), "detail": detail}
        all_ok &= ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    path = os.path.join(cfg["out_dir"], "selfcheck.json")
    _write_json(path, results)
    return [path], all_ok


SUBCOMMAND_DEFAULTS = {
    "fig1": {"n_theta": 201, "n_haar": 100000, "n_bins": 60, "n_werner": 101},
    "tfim": {
        "L": 128, "h": [1.0], "backend": "free_fermion", "r_min": 1, "r_max": 32,
        "axes": [], "mode": "enumerate", "n_samples": 10000, "fit_window": None,
    },
    "mhc": {
        "L": 12, "p": 0.17, "depth": None, "n_traj": 500, "minn_traj": 2000,
        "r_min": 2, "r_max": 6, "opt_starts": 30, "skip_nn": False,
    },
    "rom": {"state": "rho0", "starts": 200, "no_optimize": False},
    "selfcheck": {},
}


def run_command(command: str, cfg: dict) -> tuple[list[str], int]:
    if command == "fig1":
        return cmd_fig1(cfg), 0
    if command == "tfim":
        return cmd_tfim(cfg), 0
    if command == "mhc":
        return cmd_mhc(cfg), 0
    if command == "rom":
        return cmd_rom(cfg), 0
    if command == "selfcheck":
        outputs, ok = cmd_selfcheck(cfg)
        return outputs, 0 if ok else 3
    raise UsageError(f"unknown command {command!r}")


def execute(command: str, cfg: dict) -> int:
    """Run a resolved configuration and write the manifest."""
    os.makedirs(cfg["out_dir"], exist_ok=True)
    started = _utcnow()
    outputs, code = run_command(command, cfg)
    manifest = {
        "subcommand": command,
        "config": {k: v for k, v in cfg.items()},
        "seed": cfg["seed"],
        "version": __version__,
        "started_at": started,
        "finished_at": _utcnow(),
        "outputs": {os.path.basename(p): _sha256(p) for p in outputs},
    }
    if cfg["paper_targets"]:
        manifest["reference_values"] = REFERENCE_VALUES
        targets_path = os.path.join(cfg["out_dir"], f"{command}_targets.json")
        _write_json(targets_path, {
            "note": "published reference values for side-by-side comparison; "
                    "labels only, never assertions",
            "values": REFERENCE_VALUES,
        })
    _write_json(os.path.join(cfg["out_dir"], f"{command}_manifest.json"), manifest)
    return code


def rerun_from_manifest(manifest_path: str, out_dir: str | None = None) -> int:
    """Re-execute a recorded run; identical config implies identical outputs."""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    cfg = dict(manifest["config"])
    if out_dir is not None:
        cfg["out_dir"] = out_dir
    return execute(manifest["subcommand"], cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        defaults = dict(GLOBAL_DEFAULTS)
        defaults.update(SUBCOMMAND_DEFAULTS[args.command])
        cfg = resolve_config(args, defaults)
        return execute(args.command, cfg)
    except (UsageError, ResourceLimitError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, SimplexError, OptimizationError, FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
