"""Transverse-field Ising chain: two-point NN and measurement-induced NN.

The Hamiltonian is H = -sum_i sx_i sx_{i+1} - h sum_i sz_i on a periodic
chain.  It commutes with the spin-flip parity prod_i sz_i; all ground states
here are taken in the even-parity sector, where reality of the wavefunction
plus the parity constraint force every two-site reduced state into canonical
form (Bloch vectors along z, diagonal correlation block), so the two-point NN
equals the two-point SRE-2 without any optimization.

Two backends produce the same even-sector ground state: matrix-free Lanczos
diagonalization for L <= 16, and an exact free-fermion solution for large L
(the spin chain maps to quadratic fermions; the even-parity sector carries
antiperiodic boundary conditions).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .magic import is_canonical_form, nn_from_schmidt_angle, r_matrix, sre2_mixed
from .records import ScanRecord
from .states import H as HADAMARD
from .states import S as SGATE
from .states import apply_gate, n_qubits_of, partial_trace

ED_MAX_SITES = 16
ENUMERATE_MAX_SITES = 14
_PARITY_PENALTY = 0.5  # separates the even sector; exact since [H, parity] = 0


class SolverError(RuntimeError):
    """Ground-state solve did not converge."""


class SymmetryError(RuntimeError):
    """A reduced state violated the canonical form expected from symmetry."""


class ResourceLimitError(ValueError):
    """Requested computation exceeds a hard size cap."""


@dataclass
class TfimConfig:
    L: int
    h: float
    backend: str = "ed"          # "ed" or "free_fermion"
    boundary: str = "periodic"

    def __post_init__(self):
        if self.L < 4:
            raise ValueError("L must be at least 4")
        if self.h < 0:
            raise ValueError("h must be non-negative")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundary conditions are supported")
        if self.backend not in ("ed", "free_fermion"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "ed" and self.L > ED_MAX_SITES:
            raise ResourceLimitError(
                f"ED is capped at L={ED_MAX_SITES}; use backend='free_fermion'"
            )


def _bit_masks(L: int) -> np.ndarray:
    return 1 << (L - 1 - np.arange(L))


def parity_expectation(state: np.ndarray) -> float:
    """Expectation of the spin-flip parity prod_i sz_i."""
    L = n_qubits_of(state)
    ks = np.arange(2**L, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(ks).astype(np.int64) % 2)
    return float(np.real(np.sum(signs * np.abs(state) ** 2)))


def ground_state_ed(config: TfimConfig) -> np.ndarray:
    """Even-parity ground state by matrix-free Lanczos iteration (L <= 16).

    A parity penalty -mu * prod sz (mu = 0.5) shifts the odd sector up without
    touching eigenvectors, so the lowest state of the penalized operator is
    always the even-sector ground state, including the h < 1 regime where the
    two sectors are nearly degenerate.
    """
    if config.L > ED_MAX_SITES:
        raise ResourceLimitError(f"ED is capped at L={ED_MAX_SITES}")
    L, h = config.L, config.h
    dim = 2**L
    ks = np.arange(dim, dtype=np.int64)
    masks = _bit_masks(L)

    diag = np.zeros(dim)
    for m in masks:
        diag += 1.0 - 2.0 * ((ks & m) > 0)
    parity = 1.0 - 2.0 * (np.bitwise_count(ks.astype(np.uint64)).astype(np.int64) % 2)
    diag = -h * diag - _PARITY_PENALTY * parity

    bond_index = [
        ks ^ (masks[i] | masks[(i + 1) % L]) for i in range(L)
    ]

    def matvec(psi):
        out = diag * psi
        for idx in bond_index:
            out = out - psi[idx]
        return out

    op = LinearOperator((dim, dim), matvec=matvec, dtype=float)
    v0 = np.full(dim, 1.0 / np.sqrt(dim))
    try:
        w, v = eigsh(op, k=1, which="SA", v0=v0, tol=0)
    except ArpackNoConvergence as exc:
        raise SolverError("Lanczos ground-state solve did not converge") from exc
    state = v[:, 0].astype(complex)
    state = state / np.linalg.norm(state)
    pivot = int(np.argmax(np.abs(state)))
    state = state * (np.abs(state[pivot]) / state[pivot])
    par = parity_expectation(state)
    if abs(par - 1.0) > 1e-8:
        raise SolverError(f"ground state left the even-parity sector: <P> = {par}")
    return state


def ground_energy_ed(config: TfimConfig) -> float:
    """Even-sector ground energy (penalty removed)."""
    state = ground_state_ed(config)
    L, h = config.L, config.h
    masks = _bit_masks(L)
    ks = np.arange(2**L, dtype=np.int64)
    diag = np.zeros(2**L)
    for m in masks:
        diag += 1.0 - 2.0 * ((ks & m) > 0)
    e = -h * np.sum(diag * np.abs(state) ** 2)
    for i in range(L):
        idx = ks ^ (masks[i] | masks[(i + 1) % L])
        e -= np.real(np.vdot(state, state[idx]))
    return float(e)


class FreeFermionChain:
    """Even-parity TFIM ground state through the quadratic-fermion mapping.

    The chain maps to fermions with hopping and pairing amplitudes of unit
    strength and chemical term 2h; in the even-parity sector the fermions
    obey antiperiodic boundary conditions.  Diagonalizing the 2L x 2L
    Bogoliubov-de Gennes matrix gives the correlators

        G_ij = <c+_i c_j>,   F_ij = <c_i c_j>

    as blocks of the positive-energy spectral projector.  Spin correlators
    follow from Wick's theorem; the x-x (and y-y) correlators need the string
    of Majorana pairs between the two sites, which reduces to an r x r
    determinant of mixed contractions <B_l A_m>, A = c + c+, B = c+ - c.

    Attributes
    ----------
    G, F : (L, L) float arrays, the fermionic correlators.
    energy : even-sector ground energy.
    """

    def __init__(self, L: int, h: float):
        if L < 4:
            raise ValueError("L must be at least 4")
        self.L = L
        self.h = float(h)
        a = np.zeros((L, L))
        b = np.zeros((L, L))
        for i in range(L):
            j = (i + 1) % L
            sign = -1.0 if j < i else 1.0  # antiperiodic wrap
            a[i, j] += -sign
            a[j, i] += -sign
            b[i, j] += -sign
            b[j, i] += +sign
            a[i, i] += 2.0 * h
        bdg = np.block([[a, b], [-b, -a]])
        evals, evecs = np.linalg.eigh(bdg)
        pos = evals > 0
        w = evecs[:, pos]
        proj = w @ w.T
        self.G = proj[L:, L:]
        self.F = proj[:L, L:]
        self.energy = float(-0.5 * np.sum(evals[pos]))
        # <B_l A_m> contractions; <A A> and <B B> vanish off the diagonal
        self._ba = 2.0 * self.G - 2.0 * self.F - np.eye(L)

    def sigma_z(self) -> float:
        return float(1.0 - 2.0 * self.G[0, 0])

    def _string_det(self, rows, cols) -> float:
        sub = self._ba[np.ix_(rows, cols)]
        sign, logabs = np.linalg.slogdet(sub)
        if sign == 0.0:
            return 0.0
        if logabs < np.log(1e-13):
            warnings.warn(
                f"string determinant magnitude below 1e-13 at r={len(rows)}; "
                "value may lose relative precision",
                RuntimeWarning,
                stacklevel=3,
            )
        return float(sign * np.exp(logabs))

    def correlators(self, r: int):
        """(<sz>, <sx_0 sx_r>, <sy_0 sy_r>, <sz_0 sz_r>) for separation r."""
        if not 1 <= r < self.L:
            raise ValueError(f"separation r={r} out of range for L={self.L}")
        mz = 1.0 - 2.0 * np.diag(self.G)
        xx = self._string_det(range(0, r), range(1, r + 1))
        yy = self._string_det(range(1, r + 1), range(0, r))
        zz = float(mz[0] * mz[r] + 4.0 * (self.F[0, r] ** 2 - self.G[0, r] ** 2))
        return float(mz[0]), xx, yy, zz

    def two_site_r_matrix(self, r: int) -> np.ndarray:
        """Canonical-form R matrix of the reduced state on sites (0, r)."""
        mz, xx, yy, zz = self.correlators(r)
        out = np.zeros((4, 4))
        out[0, 0] = 1.0
        out[3, 0] = mz
        out[0, 3] = mz
        out[1, 1] = xx
        out[2, 2] = yy
        out[3, 3] = zz
        return out


def sre2_from_r(r_mat: np.ndarray) -> float:
    """SRE-2 from a two-qubit Pauli-coefficient matrix."""
    flat = np.asarray(r_mat, dtype=float).reshape(-1)
    return float(-np.log(np.sum(flat**4) / np.sum(flat**2)))


def two_site_rdm_canonical(state: np.ndarray, r: int, tol: float = 1e-7):
    """Reduced state of sites (0, r) with its R matrix, canonical form asserted.

    Raises SymmetryError when the R matrix is not canonical, which signals a
    symmetry-broken input state.
    """
    rho = partial_trace(state, (0, r))
    rmat = r_matrix(rho)
    if not is_canonical_form(rmat, tol):
        raise SymmetryError(
            f"reduced state of sites (0, {r}) is not in canonical form within {tol}"
        )
    return rho, rmat


def two_point_nn_scan(config: TfimConfig, r_values, seed: int | None = None):
    """Two-point NN (= SRE-2 in canonical form) for each separation r.

    Also emits the four correlator channels used by the decay-exponent rule.
    """
    records = []
    common = dict(backend=config.backend, L=config.L, h=config.h, seed=seed)
    if config.backend == "ed":
        state = ground_state_ed(config)
        for r in r_values:
            rho, rmat = two_site_rdm_canonical(state, int(r))
            records.append(ScanRecord(r=int(r), measure_name="nn", value=sre2_mixed(rho), **common))
            for name, value in _correlators_from_r(rmat):
                records.append(ScanRecord(r=int(r), measure_name=name, value=value, **common))
    else:
        chain = FreeFermionChain(config.L, config.h)
        for r in r_values:
            rmat = chain.two_site_r_matrix(int(r))
            records.append(ScanRecord(r=int(r), measure_name="nn", value=sre2_from_r(rmat), **common))
            for name, value in _correlators_from_r(rmat):
                records.append(ScanRecord(r=int(r), measure_name=name, value=value, **common))
    return records


def _correlators_from_r(rmat: np.ndarray):
    return [
        ("sigma_z", float(rmat[3, 0])),
        ("xx", float(rmat[1, 1])),
        ("yy", float(rmat[2, 2])),
        ("zz", float(rmat[3, 3])),
    ]


_AXIS_ROTATION = {
    "x": HADAMARD,
    "y": HADAMARD @ SGATE.conj().T,
    "z": np.eye(2, dtype=complex),
}


def _rotate_measured(state: np.ndarray, measured, axis: str) -> np.ndarray:
    gate = _AXIS_ROTATION[axis]
    if axis == "z":
        return state
    for q in measured:
        state = apply_gate(state, gate, (q,))
    return state


def _outcome_amplitude_matrix(state: np.ndarray, keep_pair) -> np.ndarray:
    """(4, 2**(L-2)) amplitudes: rows kept-pair basis, columns outcomes."""
    L = n_qubits_of(state)
    rest = [q for q in range(L) if q not in keep_pair]
    psi = state.reshape([2] * L).transpose(list(keep_pair) + rest)
    return psi.reshape(4, -1)


def _minn_from_columns(amps: np.ndarray):
    """Outcome-weighted analytic NN from unnormalized post-measurement columns."""
    probs = np.sum(np.abs(amps) ** 2, axis=0)
    keep = probs > 1e-14
    cols = amps[:, keep].T.reshape(-1, 2, 2)
    svals = np.linalg.svd(cols, compute_uv=False)
    thetas = np.arctan2(svals[:, 1], svals[:, 0])
    nn = np.log(8.0 / (7.0 + np.cos(8.0 * thetas)))
    return float(np.sum(probs[keep] * nn)), float(np.sum(probs))


def project_qubit(state: np.ndarray, qubit: int, outcome: int):
    """Project one qubit onto |outcome> and renormalize; returns (state, prob)."""
    L = n_qubits_of(state)
    bit = (np.arange(state.size) >> (L - 1 - qubit)) & 1
    mask = bit == outcome
    prob = float(np.sum(np.abs(state[mask]) ** 2))
    if prob <= 1e-300:
        raise ValueError(f"projection onto a zero-probability branch (qubit {qubit})")
    out = np.where(mask, state, 0.0)
    return out / np.sqrt(prob), prob


def sample_z_outcomes(state: np.ndarray, qubits, rng):
    """Sequential Born-rule z measurements; returns (state, outcome list)."""
    outcomes = []
    for q in qubits:
        L = n_qubits_of(state)
        bit = (np.arange(state.size) >> (L - 1 - q)) & 1
        p1 = float(np.sum(np.abs(state[bit == 1]) ** 2))
        outcome = 1 if rng.random() < p1 else 0
        state, _ = project_qubit(state, q, outcome)
        outcomes.append(outcome)
    return state, outcomes


def minn_of_state(
    state: np.ndarray,
    r: int,
    axis: str = "z",
    mode: str = "enumerate",
    n_samples: int = 10000,
    rng=None,
):
    """Outcome-averaged NN of sites (0, r) after measuring all other qubits.

    Returns (value, stderr); stderr is None in enumerate mode, which sums all
    outcomes with their Born weights.  Post-measurement two-qubit states are
    pure, so each outcome's NN is the analytic closed form.
    """
    if axis not in _AXIS_ROTATION:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    L = n_qubits_of(state)
    keep = (0, int(r))
    measured = [q for q in range(L) if q not in keep]
    rotated = _rotate_measured(state, measured, axis)
    if mode == "enumerate":
        amps = _outcome_amplitude_matrix(rotated, keep)
        minn, total = _minn_from_columns(amps)
        if abs(total - 1.0) > 1e-10:
            raise RuntimeError(f"outcome probabilities sum to {total}, not 1")
        return minn, None
    if mode != "sample":
        raise ValueError(f"mode must be 'enumerate' or 'sample', got {mode!r}")
    rng = np.random.default_rng(rng)
    vals = np.empty(n_samples)
    for i in range(n_samples):
        post, _ = sample_z_outcomes(rotated, measured, rng)
        pair = _outcome_amplitude_matrix(post, keep)
        col = pair[:, int(np.argmax(np.sum(np.abs(pair) ** 2, axis=0)))]
        svals = np.linalg.svd(col.reshape(2, 2), compute_uv=False)
        vals[i] = nn_from_schmidt_angle(float(np.arctan2(svals[1], svals[0])))
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


def minn_scan(
    config: TfimConfig,
    r_values,
    axis: str = "z",
    mode: str = "enumerate",
    n_samples: int = 10000,
    seed: int | None = 0,
):
    """Measurement-induced NN of the ground state for each separation r."""
    if mode == "enumerate" and config.L > ENUMERATE_MAX_SITES:
        raise ResourceLimitError(
            f"enumerate mode is capped at L={ENUMERATE_MAX_SITES}; use mode='sample'"
        )
    if config.backend != "ed":
        raise ValueError("minn_scan needs the ED backend (pure global state)")

    state = ground_state_ed(config)
    records = []
    common = dict(backend=config.backend, L=config.L, h=config.h, axis=axis, seed=seed)
    for r in r_values:
        r = int(r)
        rng = np.random.default_rng(np.random.SeedSequence((seed or 0, r)))
        value, stderr = minn_of_state(state, r, axis=axis, mode=mode,
                                      n_samples=n_samples, rng=rng)
        records.append(
            ScanRecord(
                r=r, measure_name="minn", value=value, stderr=stderr,
                n_samples=n_samples if mode == "sample" else None, **common,
            )
        )
    return records
