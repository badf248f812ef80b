"""Nonstabilizerness measures with closed forms.

Second stabilizer Renyi entropy (SRE-2) for pure and mixed states, the 4x4
Pauli-coefficient representation of two-qubit states with its canonical-form
test, the exact two-qubit non-local nonstabilizerness (NN), the distribution
of NN over Haar-random two-qubit states, and the decay-exponent rule for
two-point SRE in critical chains.  All values in nats.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import integrate
from scipy.linalg import hadamard

from .states import PAULIS_1Q, check_density_matrix, n_qubits_of, schmidt_theta

MAX_NN_TWO_QUBIT = math.log(4.0 / 3.0)

_SRE_MAX_QUBITS = 10  # dense Pauli spectrum is O(8^n)


@functools.lru_cache(maxsize=8)
def pauli_basis(n_qubits: int) -> np.ndarray:
    """All 4**n Pauli strings as a (4**n, 2**n, 2**n) array.

    Order is lexicographic in (I, X, Y, Z) with qubit 0 the most significant
    digit, so index p has digit (p // 4**(n-1-j)) % 4 on qubit j.
    """
    if n_qubits > 5:
        raise ValueError("dense Pauli basis is capped at 5 qubits")
    stack = PAULIS_1Q
    for _ in range(n_qubits - 1):
        stack = np.einsum("iab,jcd->ijacbd", stack, PAULIS_1Q).reshape(
            -1, stack.shape[1] * 2, stack.shape[1] * 2
        )
    return stack


def pauli_expectations(rho: np.ndarray) -> np.ndarray:
    """Tr(rho P) for every Pauli string P, in pauli_basis order (real)."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho)
    return np.real(np.einsum("pij,ji->p", pauli_basis(n), rho))


@functools.lru_cache(maxsize=8)
def _xor_table(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return idx[:, None] ^ idx[None, :]


def _pauli_fourth_moment_sum(state: np.ndarray) -> float:
    """sum_P <psi|P|psi>^4 over all 4**n Pauli strings.

    Writes P = i^s X^a Z^b; then <P> picks up a Walsh-Hadamard transform over
    b of the vector conj(psi[k ^ a]) * psi[k], and the phase drops out of the
    fourth power.
    """
    n = n_qubits_of(state)
    if n > _SRE_MAX_QUBITS:
        raise ValueError(f"sre2_pure supports at most {_SRE_MAX_QUBITS} qubits")
    had = hadamard(2**n)
    v = state.conj()[_xor_table(n)] * state[None, :]
    amps = v @ had
    return float(np.sum(np.abs(amps) ** 4))


def sre2_pure(state: np.ndarray) -> float:
    """Second stabilizer Renyi entropy of a pure state, in nats.

    M = -ln[ 2**-n * sum_P <psi|P|psi>^4 ]; zero exactly on stabilizer states.
    """
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state)
    return float(-np.log(_pauli_fourth_moment_sum(state) / 2**n))


def sre2_mixed(rho: np.ndarray) -> float:
    """Second stabilizer Renyi entropy of a 1- or 2-qubit density matrix.

    M = -ln( sum_P |Tr rho P|^4 / sum_P |Tr rho P|^2 ); agrees with sre2_pure
    on projectors and vanishes on the maximally mixed state.
    """
    exps = pauli_expectations(rho)
    return float(-np.log(np.sum(exps**4) / np.sum(exps**2)))


def r_matrix(rho: np.ndarray) -> np.ndarray:
    """4x4 real Pauli-coefficient matrix R[mu, nu] = Tr(rho s_mu x s_nu)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("r_matrix expects a two-qubit density matrix")
    return pauli_expectations(rho).reshape(4, 4)


def rho_from_r(r: np.ndarray) -> np.ndarray:
    """Inverse of r_matrix: rho = (1/4) sum R[mu, nu] s_mu x s_nu."""
    r = np.asarray(r, dtype=float)
    return np.einsum("mn,mnij->ij", r.reshape(4, 4), pauli_basis(2).reshape(4, 4, 4, 4)) / 4.0


def bloch_blocks(r: np.ndarray):
    """Split R into (a, b, T): Bloch vectors of qubits A and B and the
    correlation block.  With R[mu, nu] = Tr(rho s_mu x s_nu), qubit A's
    vector sits in column 0 and qubit B's in row 0."""
    r = np.asarray(r, dtype=float)
    return r[1:, 0].copy(), r[0, 1:].copy(), r[1:, 1:].copy()


def is_canonical_form(r: np.ndarray, tol: float = 1e-8) -> bool:
    """True if both Bloch vectors are single-axis (or zero) and T is diagonal."""
    a, b, t = bloch_blocks(r)
    for v in (a, b):
        if np.sum(np.abs(v) > tol) > 1:
            return False
    off = t - np.diag(np.diag(t))
    return bool(np.max(np.abs(off)) < tol)


def nn_two_qubit_pure_analytic(state: np.ndarray) -> float:
    """Exact NN of a two-qubit pure state from its Schmidt angle.

    Equal to ln(8 / (7 + cos 8t)) where (cos t, sin t) are the Schmidt
    coefficients; ranges over [0, ln(4/3)] with the maximum at t = pi/8.
    """
    return nn_from_schmidt_angle(schmidt_theta(state))


def nn_from_schmidt_angle(theta: float) -> float:
    return float(np.log(8.0 / (7.0 + np.cos(8.0 * theta))))


def mutual_sre(state_or_rho: np.ndarray) -> float:
    """Mutual SRE: M of the whole two-qubit state minus M of both marginals.

    Basis dependent and possibly negative.  Accepts a pure state vector or a
    two-qubit density matrix (marginals always via sre2_mixed).
    """
    from .states import partial_trace, partial_trace_dm

    arr = np.asarray(state_or_rho, dtype=complex)
    if arr.ndim == 1:
        if arr.shape != (4,):
            raise ValueError("mutual_sre expects a two-qubit state")
        whole = sre2_pure(arr)
        rho_a = partial_trace(arr, (0,))
        rho_b = partial_trace(arr, (1,))
    else:
        check_density_matrix(arr)
        whole = sre2_mixed(arr)
        rho_a = partial_trace_dm(arr, 0)
        rho_b = partial_trace_dm(arr, 1)
    return whole - sre2_mixed(rho_a) - sre2_mixed(rho_b)


# ---------------------------------------------------------------------------
# Distribution of NN over Haar-random two-qubit pure states.
#
# The larger Schmidt weight x = cos^2(t) of a Haar-random two-qubit state has
# density 3(1-2x)^2 on [0, 1]; pushing it through y = -ln(1 + 4x(x-1)(1-2x)^2)
# gives the closed forms below.  The density diverges (integrably) at the
# upper endpoint ln(4/3).


def haar_nn_pdf(y) -> np.ndarray:
    """Probability density of NN for Haar-random two-qubit pure states."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.zeros_like(y)
    inside = (y > 0) & (y < MAX_NN_TWO_QUBIT)
    yi = y[inside]
    z = np.sqrt(4.0 - 3.0 * np.exp(yi))
    w = np.exp(-yi / 2.0) * z
    out[inside] = (
        3.0 * np.exp(-yi / 2.0) / (2.0 * np.sqrt(2.0) * z)
        * (np.sqrt(1.0 + w) + np.sqrt(1.0 - w))
    )
    return out[0] if scalar else out


def haar_nn_cdf(y) -> np.ndarray:
    """Cumulative distribution of NN for Haar-random two-qubit pure states."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(np.clip(y, 0.0, MAX_NN_TWO_QUBIT))
    z = np.sqrt(np.clip(4.0 - 3.0 * np.exp(y), 0.0, None))
    w = np.exp(-y / 2.0) * z
    out = ((1.0 - w) / 2.0) ** 1.5 + 1.0 - ((1.0 + w) / 2.0) ** 1.5
    return out[0] if scalar else out


def haar_nn_mean() -> float:
    """Mean NN of Haar-random two-qubit states by quadrature (about 0.1917).

    Integrates y * pdf(y) over the open support; the Gauss-Kronrod nodes
    avoid the integrable endpoint singularity at ln(4/3).
    """
    val, _ = integrate.quad(
        lambda y: y * haar_nn_pdf(y), 0.0, MAX_NN_TWO_QUBIT, epsrel=1e-8, limit=200
    )
    return float(val)


def exponent_law(alphas, consts) -> float:
    """Decay exponent of two-point SRE from per-channel correlator exponents.

    Each Pauli-pair channel carries a power-law exponent alpha (use inf for
    vanishing correlators) and a constant offset c (product of the one-site
    expectations).  With a* = min alpha and abar = min over channels with
    c != 0, the two-point SRE decays with exponent min(2 a*, abar).

    `alphas` and `consts` are parallel sequences, or dicts over the same keys.
    """
    if isinstance(alphas, dict):
        keys = list(alphas)
        if set(keys) != set(consts):
            raise ValueError("alphas and consts must cover the same channels")
        pairs = [(float(alphas[k]), float(consts[k])) for k in keys]
    else:
        alphas = [float(a) for a in alphas]
        consts = [float(c) for c in consts]
        if len(alphas) != len(consts):
            raise ValueError("alphas and consts must have equal length")
        pairs = list(zip(alphas, consts))
    if any(a <= 0 for a, _ in pairs):
        raise ValueError("exponents must be positive (use inf for vanishing channels)")
    finite = [a for a, _ in pairs if np.isfinite(a)]
    if not finite:
        raise ValueError("at least one channel must have a finite exponent")
    alpha_star = min(a for a, _ in pairs)
    weighted = [a for a, c in pairs if c != 0.0]
    alpha_bar = min(weighted) if weighted else np.inf
    return float(min(2.0 * alpha_star, alpha_bar))
