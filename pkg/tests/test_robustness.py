"""Simplex LP solver, stabilizer enumeration, robustness of magic."""

import numpy as np
import pytest
from scipy.optimize import linprog

from nlmagic.magic import pauli_expectations
from nlmagic.optimize import OptimizerConfig
from nlmagic.robustness import (
    enumerate_stabilizer_states,
    nn_rom,
    rom,
    solve_l1_lp,
)
from nlmagic.simplex import SimplexError, solve_lp
from nlmagic.states import T, basis_state, density_matrix, haar_random_state, werner_state


def random_dm(rng, dim=4):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class TestSimplex:
    def test_tiny_known_lp(self):
        # min x0 + 2 x1 s.t. x0 + x1 = 1 -> x = (1, 0)
        x, val = solve_lp(np.array([1.0, 2.0]), np.array([[1.0, 1.0]]), np.array([1.0]))
        np.testing.assert_allclose(x, [1.0, 0.0], atol=1e-10)
        assert abs(val - 1.0) < 1e-10

    def test_negative_rhs_handled(self):
        x, val = solve_lp(np.array([1.0, 1.0]), np.array([[-1.0, 0.0]]), np.array([-2.0]))
        np.testing.assert_allclose(x, [2.0, 0.0], atol=1e-10)

    def test_redundant_rows_dropped(self):
        a = np.array([[1.0, 1.0], [2.0, 2.0]])
        x, val = solve_lp(np.array([1.0, 3.0]), a, np.array([1.0, 2.0]))
        assert abs(val - 1.0) < 1e-10

    def test_infeasible_detected(self):
        with pytest.raises(SimplexError):
            solve_lp(np.array([1.0]), np.array([[0.0]]), np.array([1.0]))

    def test_unbounded_detected(self):
        # min -x0 with a vacuous constraint row
        with pytest.raises(SimplexError):
            solve_lp(np.array([-1.0, 0.0]), np.array([[0.0, 1.0]]), np.array([1.0]))

    def test_matches_reference_on_random_feasible_lps(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            m, n = 5, 12
            a = rng.standard_normal((m, n))
            b = a @ rng.uniform(0, 1, n)
            c = rng.uniform(0.1, 2.0, n)
            x, val = solve_lp(c, a, b)
            ref = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
            assert ref.status == 0
            assert abs(val - ref.fun) < 1e-8
            assert np.max(np.abs(a @ x - b)) < 1e-8
            assert np.min(x) > -1e-12


class TestEnumeration:
    def test_single_qubit_states(self):
        ss = enumerate_stabilizer_states(1)
        assert len(ss) == 6
        vecs = {tuple(np.round(v, 6)) for v in ss.vectors}
        assert (1.0, 0.0, 0.0, 1.0) in vecs   # |0>
        assert (1.0, 1.0, 0.0, 0.0) in vecs   # |+>
        assert (1.0, 0.0, -1.0, 0.0) in vecs  # |-i>

    def test_two_qubit_count(self):
        assert len(enumerate_stabilizer_states(2)) == 60

    def test_vector_invariants(self):
        for n in (1, 2):
            ss = enumerate_stabilizer_states(n)
            sums = (ss.vectors**2).sum(axis=1)
            np.testing.assert_allclose(sums, 2**n, atol=1e-10)
            assert np.all(np.isin(np.round(ss.vectors, 8), [-1.0, 0.0, 1.0]))
            np.testing.assert_allclose(ss.vectors[:, 0], 1.0, atol=1e-10)

    def test_unsupported_size(self):
        with pytest.raises(ValueError):
            enumerate_stabilizer_states(3)


class TestL1Decomposition:
    def test_stabilizer_state_is_free(self):
        ss = enumerate_stabilizer_states(2)
        sol = solve_l1_lp(ss.vectors[17], ss)
        assert abs(sol.l1_norm - 1.0) < 1e-9
        assert abs(sol.rom) < 1e-9

    def test_t_state_rom(self):
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        tstate = density_matrix(T @ plus)
        ss = enumerate_stabilizer_states(1)
        sol = solve_l1_lp(pauli_expectations(tstate), ss)
        # brute-force LP oracle over the same basis
        ref = linprog(
            np.ones(12), A_eq=np.hstack([ss.vectors.T, -ss.vectors.T]),
            b_eq=pauli_expectations(tstate), bounds=(0, None), method="highs",
        )
        assert abs(sol.rom - (np.sqrt(2) - 1)) < 1e-6
        assert abs(sol.l1_norm - ref.fun) < 1e-8

    def test_maximally_mixed_two_qubits(self):
        ss = enumerate_stabilizer_states(2)
        sol = solve_l1_lp(pauli_expectations(np.eye(4, dtype=complex) / 4), ss)
        assert abs(sol.rom) < 1e-9

    def test_stabilizer_mixtures_are_free(self):
        rng = np.random.default_rng(1)
        ss = enumerate_stabilizer_states(2)
        for _ in range(10):
            idx = rng.choice(60, size=5, replace=False)
            w = rng.dirichlet(np.ones(5))
            target = w @ ss.vectors[idx]
            sol = solve_l1_lp(target, ss)
            assert abs(sol.rom) < 1e-8

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(2)
        ss = enumerate_stabilizer_states(2)
        for _ in range(10):
            target = pauli_expectations(random_dm(rng))
            sol = solve_l1_lp(target, ss)
            assert sol.residual < 1e-8

    def test_matches_reference_on_random_states(self):
        rng = np.random.default_rng(3)
        ss = enumerate_stabilizer_states(2)
        a_ref = np.hstack([ss.vectors.T, -ss.vectors.T])
        for _ in range(10):
            target = pauli_expectations(random_dm(rng))
            sol = solve_l1_lp(target, ss)
            ref = linprog(np.ones(120), A_eq=a_ref, b_eq=target,
                          bounds=(0, None), method="highs")
            assert abs(sol.l1_norm - ref.fun) < 1e-8

    def test_column_permutation_invariance(self):
        rng = np.random.default_rng(4)
        ss = enumerate_stabilizer_states(2)
        target = pauli_expectations(random_dm(rng))
        base = solve_l1_lp(target, ss).l1_norm
        perm = rng.permutation(60)
        shuffled = type(ss)(n_qubits=2, vectors=ss.vectors[perm])
        assert abs(solve_l1_lp(target, shuffled).l1_norm - base) < 1e-9


class TestNNRom:
    def test_bell_state_free(self):
        bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        val = nn_rom(density_matrix(bell), OptimizerConfig(n_starts=4, seed=0))
        assert abs(val) < 1e-6

    def test_single_qubit_factor_diagonalizable(self):
        phi0 = np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)], dtype=complex)
        rho = np.kron(density_matrix(phi0), np.eye(2) / 2)
        val = nn_rom(rho, OptimizerConfig(n_starts=24, seed=0))
        assert abs(val) < 1e-6

    def test_never_exceeds_unrotated_rom(self):
        rho = werner_state(0.8)
        val = nn_rom(rho, OptimizerConfig(n_starts=4, seed=0))
        assert val <= rom(rho) + 1e-9
