"""Robustness of magic over pure stabilizer states.

Enumerates the pure single- and two-qubit stabilizer states as Pauli
expectation vectors, decomposes a target density matrix as an affine
combination of them with minimal L1 norm (an exact linear program), and
minimizes the resulting robustness over local unitaries to decide whether a
state can be rotated into the stabilizer polytope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .magic import pauli_basis, pauli_expectations, r_matrix
from .optimize import OptimizerConfig, bloch_rotation, nelder_mead, _start_points
from .simplex import solve_lp

RECONSTRUCTION_TOL = 1e-8


@dataclass
class StabilizerStateSet:
    """Pure stabilizer states as rows of Pauli expectation vectors."""

    n_qubits: int
    vectors: np.ndarray  # (n_states, 4**n), entries in {-1, 0, +1}

    def __len__(self):
        return self.vectors.shape[0]


@dataclass
class L1Decomposition:
    """Result of the minimal-L1 stabilizer decomposition of a state."""

    coefficients: np.ndarray
    l1_norm: float
    rom: float          # l1_norm - 1
    residual: float


def _commutes(p: np.ndarray, q: np.ndarray) -> bool:
    return np.max(np.abs(p @ q - q @ p)) < 1e-12


def enumerate_stabilizer_states(n_qubits: int) -> StabilizerStateSet:
    """All pure stabilizer states on 1 or 2 qubits (6 and 60 states).

    Enumerates maximal commuting Pauli subgroups and assigns signs to their
    generators; each signed subgroup averages to a rank-1 projector
    rho = 2**-n sum_g g.
    """
    if n_qubits not in (1, 2):
        raise ValueError("stabilizer enumeration supports 1 or 2 qubits")
    paulis = pauli_basis(n_qubits)
    dim = 2**n_qubits
    eye = np.eye(dim, dtype=complex)

    generator_sets = []
    if n_qubits == 1:
        generator_sets = [(p,) for p in range(1, 4)]
    else:
        seen = set()
        for i in range(1, 16):
            for j in range(i + 1, 16):
                if not _commutes(paulis[i], paulis[j]):
                    continue
                prod = paulis[i] @ paulis[j]
                overlaps = np.real(np.einsum("pij,ji->p", paulis, prod)) / dim
                k = int(np.argmax(np.abs(overlaps)))
                key = frozenset((i, j, k))
                if key not in seen:
                    seen.add(key)
                    generator_sets.append((i, j))
        assert len(generator_sets) == 15

    vectors = {}
    for gens in generator_sets:
        for signs in np.ndindex(*(2,) * len(gens)):
            group = [eye]
            for g, s in zip(gens, signs):
                signed = (1.0 if s == 0 else -1.0) * paulis[g]
                group = group + [m @ signed for m in group]
            rho = sum(group) / dim
            vec = pauli_expectations(rho)
            vectors[tuple(np.round(vec, 8))] = vec
    out = np.array(list(vectors.values()))
    expected = {1: 6, 2: 60}[n_qubits]
    if out.shape[0] != expected:
        raise RuntimeError(
            f"stabilizer enumeration produced {out.shape[0]} states, expected {expected}"
        )
    return StabilizerStateSet(n_qubits=n_qubits, vectors=out)


def solve_l1_lp(target: np.ndarray, basis: StabilizerStateSet) -> L1Decomposition:
    """Minimal-L1 affine decomposition of a Pauli vector over stabilizer states.

    Splits x = u - v with u, v >= 0 and solves the resulting equality-form LP
    exactly with the dense simplex.  The robustness of magic is l1 - 1.
    """
    target = np.asarray(target, dtype=float)
    s = basis.vectors.T  # (4**n, n_states)
    if target.shape != (s.shape[0],):
        raise ValueError(
            f"target length {target.shape} does not match basis dimension {s.shape[0]}"
        )
    n_states = s.shape[1]
    a_eq = np.hstack([s, -s])
    cost = np.ones(2 * n_states)
    z, l1 = solve_lp(cost, a_eq, target)
    coeff = z[:n_states] - z[n_states:]
    residual = float(np.max(np.abs(s @ coeff - target)))
    if residual > RECONSTRUCTION_TOL:
        raise RuntimeError(f"LP reconstruction residual {residual:.2e} too large")
    return L1Decomposition(
        coefficients=coeff, l1_norm=float(l1), rom=float(l1 - 1.0), residual=residual
    )


def rom(rho: np.ndarray, basis: StabilizerStateSet | None = None) -> float:
    """Robustness of magic of a 1- or 2-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    n = 1 if rho.shape == (2, 2) else 2
    basis = basis or enumerate_stabilizer_states(n)
    return solve_l1_lp(pauli_expectations(rho), basis).rom


def nn_rom(rho: np.ndarray, config: OptimizerConfig | None = None) -> float:
    """Min over local unitaries of the robustness of magic of a 2-qubit state.

    The LP value is piecewise linear in the rotated Pauli vector, so the
    Nelder-Mead search runs with a raised multi-start count by default (200).
    """
    config = config or OptimizerConfig(n_starts=200)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("nn_rom expects a two-qubit density matrix")
    basis = enumerate_stabilizer_states(2)
    r = r_matrix(rho)

    def objective(p):
        qa = np.eye(4)
        qa[1:, 1:] = bloch_rotation(p[0], p[1], p[2])
        qb = np.eye(4)
        qb[1:, 1:] = bloch_rotation(p[3], p[4], p[5])
        rotated = (qa @ r @ qb.T).reshape(-1)
        return solve_l1_lp(rotated, basis).rom

    best = np.inf
    for start in _start_points(6, config):
        _, val = nelder_mead(objective, start, config)
        best = min(best, val)
    return float(max(best, 0.0))
