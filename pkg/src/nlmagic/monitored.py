"""Monitored Haar-random brick-wall circuits at a tunable measurement rate.

Each trajectory alternates layers of independent Haar 4x4 gates on
neighbouring pairs (periodic brick-wall pairing: even offsets on even layers,
odd offsets with a wrap pair on odd layers) with a round of projective
z measurements, each site measured independently with probability p.  Gates
and measurement draws are keyed by (seed, trajectory, layer, bond/site), so
any subset of trajectories is reproducible in isolation and parallel
schedules give identical output to serial ones.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fitting import FitError, FitResult, fit_power_law
from .magic import nn_from_schmidt_angle, sre2_mixed, sre2_pure
from .optimize import OptimizationError, OptimizerConfig, nn_optimize
from .records import ScanRecord
from .states import (
    apply_gate,
    basis_state,
    haar_random_unitary,
    mutual_information,
    n_qubits_of,
    partial_trace,
)
from .tfim import _outcome_amplitude_matrix, _minn_from_columns, project_qubit

STATEVECTOR_MAX_SITES = 16
ENUMERATE_MAX_SITES = 12


@dataclass
class CircuitConfig:
    L: int
    p: float
    depth: int | None = None     # defaults to 4L, past the relaxation time
    seed: int = 0
    measure_every: int = 1       # layers between measurement rounds

    def __post_init__(self):
        if self.L < 4 or self.L % 2:
            raise ValueError("L must be an even integer >= 4")
        if self.L > STATEVECTOR_MAX_SITES:
            raise ValueError(f"statevector backend is capped at L={STATEVECTOR_MAX_SITES}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("measurement rate p must lie in [0, 1]")
        if self.depth is None:
            self.depth = 4 * self.L
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.measure_every < 1:
            raise ValueError("measure_every must be at least 1")


@dataclass
class TrajectoryRecord:
    seed: int
    traj_index: int
    outcomes: list = field(default_factory=list)  # (layer, site, outcome) triples
    observables: dict = field(default_factory=dict)


def _layer_pairs(L: int, layer: int):
    if layer % 2 == 0:
        return [(i, i + 1) for i in range(0, L, 2)]
    return [(i, (i + 1) % L) for i in range(1, L, 2)]


def _gate_rng(seed: int, traj: int, layer: int, bond: int):
    return np.random.default_rng(np.random.SeedSequence((seed, traj, layer, bond)))


def _measure_rng(seed: int, traj: int, layer: int):
    return np.random.default_rng(np.random.SeedSequence((seed, traj, layer, 0xFEED)))


def run_trajectory(config: CircuitConfig, traj_index: int = 0):
    """Evolve one trajectory from |0...0>; returns (state, TrajectoryRecord).

    Bit-exact reproducible for a given (config.seed, traj_index).
    """
    state = basis_state(config.L)
    record = TrajectoryRecord(seed=config.seed, traj_index=traj_index)
    for layer in range(config.depth):
        for bond, pair in enumerate(_layer_pairs(config.L, layer)):
            gate = haar_random_unitary(4, _gate_rng(config.seed, traj_index, layer, bond))
            state = apply_gate(state, gate, pair)
        if (layer + 1) % config.measure_every:
            continue
        rng = _measure_rng(config.seed, traj_index, layer)
        chosen = [site for site in range(config.L) if rng.random() < config.p]
        for site in chosen:
            L = config.L
            bit = (np.arange(state.size) >> (L - 1 - site)) & 1
            p1 = float(np.sum(np.abs(state[bit == 1]) ** 2))
            outcome = 1 if rng.random() < p1 else 0
            state, _ = project_qubit(state, site, outcome)
            record.outcomes.append((layer, site, outcome))
    return state, record


def replay_trajectory(config: CircuitConfig, record: TrajectoryRecord) -> np.ndarray:
    """Rebuild the final state from an outcome log, bit-exactly."""
    state = basis_state(config.L)
    by_layer: dict[int, list] = {}
    for layer, site, outcome in record.outcomes:
        by_layer.setdefault(layer, []).append((site, outcome))
    for layer in range(config.depth):
        for bond, pair in enumerate(_layer_pairs(config.L, layer)):
            gate = haar_random_unitary(4, _gate_rng(config.seed, record.traj_index, layer, bond))
            state = apply_gate(state, gate, pair)
        for site, outcome in by_layer.get(layer, ()):
            state, _ = project_qubit(state, site, outcome)
    return state


def _nn_scan_one(args):
    config, traj_index, r_values, opt_config = args
    state, _ = run_trajectory(config, traj_index)
    nn_vals, sre_vals = [], []
    try:
        for r in r_values:
            rho = partial_trace(state, (0, r))
            nn_vals.append(nn_optimize(rho, opt_config)[0])
            sre_vals.append(sre2_mixed(rho))
    except OptimizationError:
        return None
    return nn_vals, sre_vals


def averaged_nn_scan(
    config: CircuitConfig,
    r_values,
    n_traj: int = 500,
    opt_config: OptimizerConfig | None = None,
    n_workers: int = 1,
):
    """Trajectory-averaged two-point NN and SRE-2 of rho_(0, r).

    The circuit has no symmetry forcing canonical form, so every point runs
    the full local-unitary optimization (30 starts by default, validated
    against a 100-start reference).  Failed trajectories are skipped and
    counted in the n_failed column.
    """
    r_values = [int(r) for r in r_values]
    # reduced per-point budget (30 starts, looser simplex tolerance), validated
    # against a 100-start tight-tolerance reference at the 1e-4 level
    opt_config = opt_config or OptimizerConfig(n_starts=30, xtol=1e-4, seed=config.seed)
    jobs = [(config, t, r_values, opt_config) for t in range(n_traj)]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_nn_scan_one, jobs, chunksize=4))
    else:
        results = [_nn_scan_one(job) for job in jobs]
    kept = [res for res in results if res is not None]
    failed = n_traj - len(kept)
    nn = np.array([res[0] for res in kept])
    sre = np.array([res[1] for res in kept])
    n_ok = nn.shape[0]
    records = []
    common = dict(
        backend="statevector", L=config.L, r=0, p=config.p, depth=config.depth,
        n_traj=n_traj, n_failed=failed, seed=config.seed, n_samples=n_ok,
    )
    for k, r in enumerate(r_values):
        for name, col in (("nn", nn[:, k]), ("sre2", sre[:, k])):
            rec = ScanRecord(**{**common, "r": r, "measure_name": name,
                                "value": float(col.mean()),
                                "stderr": float(col.std(ddof=1) / np.sqrt(n_ok))})
            records.append(rec)
    return records


def _minn_one(args):
    config, traj_index, r_values, mode = args
    state, _ = run_trajectory(config, traj_index)
    minn_vals, post_vals, ie_vals = [], [], []
    for r in r_values:
        keep = (0, r)
        ie_vals.append(mutual_information(state, keep))
        measured = [q for q in range(config.L) if q not in keep]
        if mode == "enumerate":
            amps = _outcome_amplitude_matrix(state, keep)
            probs = np.sum(np.abs(amps) ** 2, axis=0)
            minn, _ = _minn_from_columns(amps)
            live = probs > 1e-14
            post = 0.0
            for m in np.nonzero(live)[0]:
                col = amps[:, m] / np.sqrt(probs[m])
                post += probs[m] * sre2_pure(col)
            minn_vals.append(minn)
            post_vals.append(post)
        else:
            rng = np.random.default_rng(
                np.random.SeedSequence((config.seed, traj_index, r, 0xB0))
            )
            post_state = state
            for q in measured:
                L = config.L
                bit = (np.arange(post_state.size) >> (L - 1 - q)) & 1
                p1 = float(np.sum(np.abs(post_state[bit == 1]) ** 2))
                outcome = 1 if rng.random() < p1 else 0
                post_state, _ = project_qubit(post_state, q, outcome)
            amps = _outcome_amplitude_matrix(post_state, keep)
            col = amps[:, int(np.argmax(np.sum(np.abs(amps) ** 2, axis=0)))]
            svals = np.linalg.svd(col.reshape(2, 2), compute_uv=False)
            minn_vals.append(nn_from_schmidt_angle(float(np.arctan2(svals[1], svals[0]))))
            post_vals.append(sre2_pure(col / np.linalg.norm(col)))
    return minn_vals, post_vals, ie_vals


def minn_scan_mhc(
    config: CircuitConfig,
    r_values,
    n_traj: int = 5000,
    mode: str = "sample",
    n_workers: int = 1,
):
    """Measurement-induced NN along z, with the post-measurement SRE-2.

    In sample mode each trajectory contributes one sampled outcome on the
    L-2 measured qubits; enumerate mode (L <= 12) sums all outcomes with
    Born weights.  Also emits the pre-measurement mutual information of the
    kept pair, used by the swapping diagnostic.
    """
    if mode == "enumerate" and config.L > ENUMERATE_MAX_SITES:
        raise ValueError(f"enumerate mode is capped at L={ENUMERATE_MAX_SITES}")
    if mode not in ("enumerate", "sample"):
        raise ValueError(f"mode must be 'enumerate' or 'sample', got {mode!r}")
    r_values = [int(r) for r in r_values]
    jobs = [(config, t, r_values, mode) for t in range(n_traj)]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_minn_one, jobs, chunksize=8))
    else:
        results = [_minn_one(job) for job in jobs]
    minn = np.array([res[0] for res in results])
    post = np.array([res[1] for res in results])
    ie = np.array([res[2] for res in results])
    records = []
    common = dict(
        backend="statevector", L=config.L, axis="z", p=config.p, depth=config.depth,
        n_traj=n_traj, n_failed=0, seed=config.seed, n_samples=n_traj,
    )
    for k, r in enumerate(r_values):
        for name, col in (("minn", minn[:, k]), ("post_sre2", post[:, k]),
                          ("mutual_information", ie[:, k])):
            records.append(
                ScanRecord(**{**common, "r": r, "measure_name": name,
                              "value": float(col.mean()),
                              "stderr": float(col.std(ddof=1) / np.sqrt(n_traj))})
            )
    return records


@dataclass
class SwappingReport:
    """Comparison of post-measurement NN decay against pre-measurement
    mutual-information decay.

    Swapping means the measurement induces NN with longer range than any
    pre-existing correlation, which requires alpha_minn < alpha_ie / 2; the
    weaker ordering alpha_minn < alpha_ie is also reported with its
    significance.  Reference exponents from large-scale studies of the same
    circuit (0.76 and 3.31) are carried as metadata, not assertions.
    """

    alpha_minn: float
    alpha_ie: float
    stderr_minn: float
    stderr_ie: float
    ratio: float
    swapping: bool
    swapping_significance: float   # sigmas for alpha_ie/2 - alpha_minn > 0
    ordering_significance: float   # sigmas for alpha_ie - alpha_minn > 0
    fit_minn: FitResult | None
    fit_ie: FitResult | None
    inconclusive: bool = False
    reference_exponents: tuple = (0.76, 3.31)


def swapping_from_curves(r_values, minn_values, ie_values, with_offset=True) -> SwappingReport:
    """Fit both decay curves and compare their exponents."""
    r_values = np.asarray(r_values, dtype=float)
    try:
        fit_minn = fit_power_law(r_values, np.asarray(minn_values, dtype=float),
                                 with_offset=with_offset)
        fit_ie = fit_power_law(r_values, np.asarray(ie_values, dtype=float),
                               with_offset=with_offset)
    except FitError:
        return SwappingReport(
            alpha_minn=np.nan, alpha_ie=np.nan, stderr_minn=np.nan, stderr_ie=np.nan,
            ratio=np.nan, swapping=False, swapping_significance=0.0,
            ordering_significance=0.0, fit_minn=None, fit_ie=None, inconclusive=True,
        )
    se = float(np.hypot(fit_minn.stderr_exponent, fit_ie.stderr_exponent))
    swap_margin = fit_ie.exponent / 2.0 - fit_minn.exponent
    order_margin = fit_ie.exponent - fit_minn.exponent
    se_half = float(np.hypot(fit_minn.stderr_exponent, fit_ie.stderr_exponent / 2.0))
    return SwappingReport(
        alpha_minn=fit_minn.exponent,
        alpha_ie=fit_ie.exponent,
        stderr_minn=fit_minn.stderr_exponent,
        stderr_ie=fit_ie.stderr_exponent,
        ratio=fit_minn.exponent / fit_ie.exponent if fit_ie.exponent else np.nan,
        swapping=bool(swap_margin > 0),
        swapping_significance=float(swap_margin / se_half) if se_half else np.inf,
        ordering_significance=float(order_margin / se) if se else np.inf,
        fit_minn=fit_minn,
        fit_ie=fit_ie,
    )


def swapping_diagnostic(
    config: CircuitConfig,
    r_values,
    n_traj: int = 2000,
    n_workers: int = 1,
) -> SwappingReport:
    """Run the MINN scan and diagnose nonstabilizerness swapping."""
    records = minn_scan_mhc(config, r_values, n_traj=n_traj, n_workers=n_workers)
    minn = [rec.value for rec in records if rec.measure_name == "minn"]
    ie = [rec.value for rec in records if rec.measure_name == "mutual_information"]
    return swapping_from_curves([int(r) for r in r_values], minn, ie)
