"""Numerical non-local nonstabilizerness via local-unitary minimization.

NN of a bipartite state is the minimum SRE-2 over product unitaries
U_A x U_B.  Each single-qubit unitary is the three-angle form

    U(theta, phi, lam) = [[cos(t/2),            -e^{i lam} sin(t/2)      ],
                          [e^{i phi} sin(t/2),   e^{i(phi+lam)} cos(t/2) ]]

with no global phase (it cancels in conjugation).  For two-qubit inputs the
objective is evaluated in the Pauli-coefficient picture: conjugation acts on
the 4x4 R matrix as R -> Q_A R Q_B^T with Q = diag(1, O) and O in SO(3), so
minimizing SRE-2 is maximizing sum |R'|^4.  Multi-start Nelder-Mead with a
deterministic per-seed start schedule keeps results reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .magic import r_matrix, sre2_mixed, sre2_pure
from .states import apply_gate, density_matrix, n_qubits_of

SIMPLEX_EDGE = 0.25  # initial simplex edge, radians per coordinate


class OptimizationError(RuntimeError):
    """Raised when the objective returns a non-finite value."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


@dataclass
class OptimizerConfig:
    """Multi-start Nelder-Mead settings."""

    n_starts: int = 100
    max_iterations: int = 4000
    tol: float = 1e-9        # convergence tolerance on the objective spread
    xtol: float = 1e-6       # convergence tolerance on the simplex diameter
    seed: int | None = 0

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")


@dataclass
class LocalUnitaryParams:
    """Angle triples (theta, phi, lam), one row per subsystem qubit."""

    angles: np.ndarray

    def __post_init__(self):
        self.angles = np.atleast_2d(np.asarray(self.angles, dtype=float))
        if self.angles.shape[1] != 3:
            raise ValueError("angles must have shape (n_qubits, 3)")

    def unitaries(self) -> list[np.ndarray]:
        return [single_qubit_unitary(*row) for row in self.angles]

    def kron(self) -> np.ndarray:
        out = np.eye(1, dtype=complex)
        for u in self.unitaries():
            out = np.kron(out, u)
        return out


def single_qubit_unitary(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]]
    )


def bloch_rotation(theta: float, phi: float, lam: float) -> np.ndarray:
    """SO(3) matrix O with U^dag s_i U = sum_j O_ij s_j for the unitary above.

    Equals Rz(phi) Ry(theta) Rz(lam) in the adjoint representation; angles are
    periodic through the trig functions, so no box constraints are needed.
    """
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    cl, sl = np.cos(lam), np.sin(lam)
    return np.array(
        [
            [cp * ct * cl - sp * sl, -cp * ct * sl - sp * cl, cp * st],
            [sp * ct * cl + cp * sl, -sp * ct * sl + cp * cl, sp * st],
            [-st * cl, st * sl, ct],
        ]
    )


def nelder_mead(objective, start, config: OptimizerConfig | None = None):
    """Single Nelder-Mead run; returns (argmin, min_value).

    Standard reflection/expansion/contraction/shrink coefficients (1, 2, 0.5,
    0.5); converges when the simplex diameter and objective spread fall below
    config.xtol / config.tol, or at the iteration cap.  A non-finite objective
    value raises OptimizationError carrying the offending point.
    """
    config = config or OptimizerConfig()
    start = np.atleast_1d(np.asarray(start, dtype=float))

    def guarded(x):
        val = objective(x)
        if not np.isfinite(val):
            raise OptimizationError(f"objective returned {val}", point=np.array(x))
        return val

    simplex = np.vstack([start, start + SIMPLEX_EDGE * np.eye(start.size)])
    res = minimize(
        guarded,
        start,
        method="Nelder-Mead",
        options=dict(
            xatol=config.xtol,
            fatol=config.tol,
            maxiter=config.max_iterations,
            maxfev=4 * config.max_iterations,
            initial_simplex=simplex,
        ),
    )
    return res.x, float(res.fun)


def _start_points(n_params: int, config: OptimizerConfig) -> np.ndarray:
    """Identity start first, the rest uniform over the angle box."""
    rng = np.random.default_rng(config.seed)
    starts = np.zeros((config.n_starts, n_params))
    if config.n_starts > 1:
        box = np.tile([np.pi, 2 * np.pi, 2 * np.pi], n_params // 3)
        starts[1:] = rng.uniform(0.0, 1.0, (config.n_starts - 1, n_params)) * box
    return starts


def _as_two_qubit_dm(state_or_rho: np.ndarray) -> np.ndarray:
    arr = np.asarray(state_or_rho, dtype=complex)
    if arr.ndim == 1:
        if arr.shape != (4,):
            raise ValueError("expected a two-qubit state vector")
        return density_matrix(arr)
    if arr.shape != (4, 4):
        raise ValueError("expected a two-qubit density matrix")
    return arr


def nn_optimize(state_or_rho: np.ndarray, config: OptimizerConfig | None = None):
    """Two-qubit NN: min over U_A x U_B of SRE-2, by multi-start Nelder-Mead.

    Returns (nn_value_nats, LocalUnitaryParams).  The identity start makes the
    result exact for states already in canonical form, and guarantees the
    result never exceeds the SRE-2 of the untransformed input.
    """
    config = config or OptimizerConfig()
    rho = _as_two_qubit_dm(state_or_rho)
    r = r_matrix(rho)
    a, b, t = r[1:, 0].copy(), r[0, 1:].copy(), r[1:, 1:].copy()
    s2 = float((r**2).sum())

    def objective(p):
        oa = bloch_rotation(p[0], p[1], p[2])
        ob = bloch_rotation(p[3], p[4], p[5])
        ap = oa @ a
        bp = ob @ b
        tp = oa @ t @ ob.T
        return -(1.0 + (ap**4).sum() + (bp**4).sum() + (tp**4).sum())

    best_val = np.inf
    best_x = np.zeros(6)
    for start in _start_points(6, config):
        x, val = nelder_mead(objective, start, config)
        if val < best_val:
            best_val, best_x = val, x
    nn = float(-np.log(-best_val / s2))
    return nn, LocalUnitaryParams(best_x.reshape(2, 3))


def nn_optimize_nqubit(state: np.ndarray, bipartition, config: OptimizerConfig | None = None):
    """NN upper bound for a pure state of up to 4 qubits.

    Minimizes SRE-2 over products of single-qubit unitaries (one per qubit, 3
    parameters each).  For subsystems larger than one qubit this ansatz is a
    restriction of the general product unitary, so the result only upper
    bounds the true NN.  `bipartition` is a pair of disjoint qubit-index
    tuples covering all qubits.

    Besides the identity and random starts, every pairing of the qubits into
    two-qubit marginals is solved with nn_optimize and used as a warm start;
    for product inputs this reproduces the pairwise optimum exactly.
    """
    config = config or OptimizerConfig()
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state)
    if n > 4:
        raise ValueError("nn_optimize_nqubit supports at most 4 qubits")
    half_a, half_b = (tuple(int(q) for q in part) for part in bipartition)
    if sorted(half_a + half_b) != list(range(n)):
        raise ValueError(f"bipartition {bipartition} does not cover qubits 0..{n - 1}")

    def objective(p):
        psi = state
        for q in range(n):
            psi = apply_gate(psi, single_qubit_unitary(*p[3 * q : 3 * q + 3]), (q,))
        return sre2_pure(psi)

    starts = list(_start_points(3 * n, config))
    if n == 4:
        from .states import partial_trace

        pair_cfg = OptimizerConfig(
            n_starts=min(config.n_starts, 12), max_iterations=config.max_iterations,
            tol=config.tol, xtol=config.xtol, seed=config.seed,
        )
        for pair in ((0, 1), (0, 2), (0, 3)):
            rest = tuple(q for q in range(4) if q not in pair)
            warm = np.zeros(12)
            for duo in (pair, rest):
                _, params = nn_optimize(partial_trace(state, duo), pair_cfg)
                for row, q in zip(params.angles, duo):
                    warm[3 * q : 3 * q + 3] = row
            starts.append(warm)

    best_val = np.inf
    for start in starts:
        _, val = nelder_mead(objective, start, config)
        best_val = min(best_val, val)
    return float(best_val)
