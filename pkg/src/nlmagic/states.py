"""Dense linear algebra for small qubit systems.

States are plain complex numpy vectors of length 2**n, density matrices are
complex (2**n, 2**n) arrays.  Qubit 0 is the leftmost tensor factor, i.e. the
most significant bit of the amplitude index.  All entropies are in nats.
"""

from __future__ import annotations

import numpy as np

ATOL_NORM = 1e-10
ATOL_EIG = 1e-9

# single-qubit constants
ID2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
PAULIS_1Q = np.stack([ID2, X, Y, Z])


def n_qubits_of(vec_or_mat: np.ndarray) -> int:
    """Number of qubits for a state vector or square density matrix."""
    d = vec_or_mat.shape[0]
    n = int(round(np.log2(d)))
    if 2**n != d:
        raise ValueError(f"dimension {d} is not a power of 2")
    return n


def normalize(state: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(state)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return state / nrm


def check_state(state: np.ndarray) -> np.ndarray:
    """Validate and return a state vector (unit norm, power-of-2 length)."""
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1:
        raise ValueError("state must be a 1d amplitude vector")
    n_qubits_of(state)
    if abs(np.linalg.norm(state) - 1.0) > ATOL_NORM:
        raise ValueError("state vector is not normalized")
    return state


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, eigenvalues >= -1e-9."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    n_qubits_of(rho)
    if np.max(np.abs(rho - rho.conj().T)) > ATOL_NORM:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > ATOL_NORM:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -ATOL_EIG:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def basis_state(n_qubits: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def kron_all(ops) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def density_matrix(state: np.ndarray) -> np.ndarray:
    """Projector |psi><psi| of a pure state."""
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def werner_state(x: float) -> np.ndarray:
    """Werner state x |psi-><psi-| + (1 - x) I/4; separable iff x <= 1/3."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("Werner mixing parameter must lie in [0, 1]")
    singlet = np.zeros(4, dtype=complex)
    singlet[1], singlet[2] = 1.0 / np.sqrt(2), -1.0 / np.sqrt(2)
    return x * density_matrix(singlet) + (1.0 - x) * np.eye(4) / 4.0


def partial_trace(state: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix of a pure state on the kept qubits.

    `keep` is an ordered tuple of one or two distinct qubit indices; the
    returned matrix carries the qubits in exactly that order.
    """
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state)
    keep = tuple(int(k) for k in (keep if np.iterable(keep) else (keep,)))
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit index in keep={keep}")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"qubit index out of range in keep={keep} for n={n}")
    rest = [q for q in range(n) if q not in keep]
    psi = state.reshape([2] * n).transpose(list(keep) + rest)
    mat = psi.reshape(2 ** len(keep), -1)
    return mat @ mat.conj().T


def partial_trace_dm(rho: np.ndarray, keep: int) -> np.ndarray:
    """Single-qubit marginal of a two-qubit density matrix (keep in {0, 1})."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("partial_trace_dm expects a two-qubit density matrix")
    r = rho.reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ikjk->ij", r)
    if keep == 1:
        return np.einsum("kikj->ij", r)
    raise ValueError("keep must be 0 or 1")


def schmidt_theta(state: np.ndarray) -> float:
    """Schmidt angle of a two-qubit pure state.

    The Schmidt coefficients are (cos t, sin t) with t in [0, pi/4]
    (weights sorted descending).
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (4,):
        raise ValueError("schmidt_theta expects a two-qubit state vector")
    s = np.linalg.svd(state.reshape(2, 2), compute_uv=False)
    return float(np.arctan2(s[1], s[0]))


def _clipped_eigvals(rho: np.ndarray) -> np.ndarray:
    # partial traces produce eigenvalues as low as -1e-12; clip before the log
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -ATOL_EIG:
        raise ValueError("density matrix has a negative eigenvalue")
    return np.clip(lam, 0.0, None)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-sum(lam ln lam) over the spectrum, with 0 ln 0 = 0, in nats."""
    lam = _clipped_eigvals(np.asarray(rho, dtype=complex))
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def renyi2_entropy(rho: np.ndarray) -> float:
    """-ln Tr(rho^2) in nats; zero for pure states."""
    rho = np.asarray(rho, dtype=complex)
    return float(-np.log(np.real(np.trace(rho @ rho))))


def log_negativity(rho: np.ndarray) -> float:
    """ln of the trace norm of the partial transpose (second qubit), in nats."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("log_negativity expects a two-qubit density matrix")
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    trace_norm = np.sum(np.abs(np.linalg.eigvalsh(pt)))
    return float(np.log(trace_norm))


def mutual_information(state_or_rho: np.ndarray, pair=(0, 1)) -> float:
    """S(rho_a) + S(rho_b) - S(rho_ab) for the given qubit pair, in nats."""
    arr = np.asarray(state_or_rho, dtype=complex)
    if arr.ndim == 1:
        rho_ab = partial_trace(arr, pair)
    elif arr.shape == (4, 4):
        rho_ab = arr
    else:
        raise ValueError("expected a pure state vector or a two-qubit density matrix")
    s_a = von_neumann_entropy(partial_trace_dm(rho_ab, 0))
    s_b = von_neumann_entropy(partial_trace_dm(rho_ab, 1))
    return s_a + s_b - von_neumann_entropy(rho_ab)


def haar_random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The QR phases are fixed with the diagonal of R so the distribution is
    exactly Haar rather than merely unitary.
    """
    rng = np.random.default_rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z / np.sqrt(2))
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_state(n_qubits: int, rng) -> np.ndarray:
    """Haar-random pure state: random unitary applied to |0...0>."""
    return haar_random_unitary(2**n_qubits, rng)[:, 0].copy()


def apply_gate(state: np.ndarray, gate: np.ndarray, targets) -> np.ndarray:
    """Apply a k-qubit unitary to the target qubits of a state vector."""
    state = np.asarray(state, dtype=complex)
    gate = np.asarray(gate, dtype=complex)
    n = n_qubits_of(state)
    targets = tuple(int(t) for t in (targets if np.iterable(targets) else (targets,)))
    k = len(targets)
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"gate shape {gate.shape} does not match {k} targets")
    if len(set(targets)) != k:
        raise ValueError(f"duplicate target in {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"target out of range in {targets} for n={n}")
    if np.max(np.abs(gate.conj().T @ gate - np.eye(2**k))) > ATOL_NORM:
        raise ValueError("gate is not unitary")
    rest = [q for q in range(n) if q not in targets]
    perm = list(targets) + rest
    psi = state.reshape([2] * n).transpose(perm).reshape(2**k, -1)
    psi = gate @ psi
    inv = np.argsort(perm)
    return psi.reshape([2] * n).transpose(inv).reshape(-1)
