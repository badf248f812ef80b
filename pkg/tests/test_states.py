"""State, entropy, negativity, and sampling primitives."""

import numpy as np
import pytest

from nlmagic.states import (
    CNOT,
    H,
    T,
    X,
    apply_gate,
    basis_state,
    density_matrix,
    haar_random_state,
    haar_random_unitary,
    kron_all,
    log_negativity,
    mutual_information,
    partial_trace,
    renyi2_entropy,
    schmidt_theta,
    von_neumann_entropy,
    werner_state,
)

BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def random_product_state(rng):
    return np.kron(haar_random_state(1, rng), haar_random_state(1, rng))


class TestPartialTrace:
    def test_full_system_kept(self):
        rho = partial_trace(basis_state(2), (0, 1))
        np.testing.assert_allclose(rho, density_matrix(basis_state(2)), atol=1e-12)

    def test_bell_marginal_maximally_mixed(self):
        rho = partial_trace(BELL, (0,))
        np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-12)

    def test_ghz_marginal(self):
        ghz = np.zeros(8, dtype=complex)
        ghz[0] = ghz[7] = 1 / np.sqrt(2)
        rho = partial_trace(ghz, (0, 2))
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 0.5
        np.testing.assert_allclose(rho, expected, atol=1e-12)

    def test_keep_order_respected(self):
        psi = np.kron(np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
        rho_01 = partial_trace(psi, (0, 1))
        rho_10 = partial_trace(psi, (1, 0))
        swap = np.zeros((4, 4))
        for a in range(2):
            for b in range(2):
                swap[2 * b + a, 2 * a + b] = 1
        np.testing.assert_allclose(rho_10, swap @ rho_01 @ swap.T, atol=1e-12)

    def test_duplicate_index_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(BELL, (0, 0))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            partial_trace(BELL, (0, 2))

    def test_trace_preserved_over_complements(self):
        rng = np.random.default_rng(0)
        psi = haar_random_state(4, rng)
        for keep in [(0,), (3,), (1, 2), (0, 3)]:
            rho = partial_trace(psi, keep)
            assert abs(np.trace(rho).real - 1.0) < 1e-10


class TestSchmidt:
    def test_schmidt_form_state(self):
        psi = np.zeros(4, dtype=complex)
        psi[0], psi[3] = np.cos(0.3), np.sin(0.3)
        assert abs(schmidt_theta(psi) - 0.3) < 1e-12

    def test_bell_state_maximal(self):
        assert abs(schmidt_theta(SINGLET) - np.pi / 4) < 1e-12

    def test_local_unitary_invariance_single(self):
        psi = np.zeros(4, dtype=complex)
        psi[0], psi[3] = np.cos(0.3), np.sin(0.3)
        rotated = apply_gate(psi, T, (0,))
        assert abs(schmidt_theta(rotated) - 0.3) < 1e-12

    def test_local_unitary_invariance_sampled(self):
        # 1e4 sampled product unitaries leave the Schmidt angle fixed
        rng = np.random.default_rng(1)
        psi = haar_random_state(2, rng)
        theta = schmidt_theta(psi)
        worst = 0.0
        for _ in range(10000):
            u = np.kron(haar_random_unitary(2, rng), haar_random_unitary(2, rng))
            worst = max(worst, abs(schmidt_theta(u @ psi) - theta))
        assert worst < 1e-9


class TestEntropies:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(density_matrix(basis_state(2))) == 0.0

    def test_maximally_mixed_single_qubit(self):
        assert abs(von_neumann_entropy(np.eye(2) / 2) - np.log(2)) < 1e-12

    def test_marginal_closed_form(self):
        th = np.pi / 8
        psi = np.zeros(4, dtype=complex)
        psi[0], psi[3] = np.cos(th), np.sin(th)
        expected = -np.cos(th) ** 2 * np.log(np.cos(th) ** 2) - np.sin(th) ** 2 * np.log(
            np.sin(th) ** 2
        )
        assert abs(von_neumann_entropy(partial_trace(psi, (0,))) - expected) < 1e-12

    def test_marginal_entropies_agree_for_pure_states(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            psi = haar_random_state(2, rng)
            sa = von_neumann_entropy(partial_trace(psi, (0,)))
            sb = von_neumann_entropy(partial_trace(psi, (1,)))
            assert abs(sa - sb) < 1e-9

    def test_renyi2_pure_projector(self):
        assert abs(renyi2_entropy(density_matrix(BELL))) < 1e-12

    def test_renyi2_maximally_mixed(self):
        assert abs(renyi2_entropy(np.eye(4) / 4) - np.log(4)) < 1e-12

    def test_renyi2_werner_half(self):
        # Tr rho_W^2 = (1 + 3x^2)/4 by direct matrix evaluation
        rho = werner_state(0.5)
        direct = np.real(np.trace(rho @ rho))
        assert abs(direct - 7 / 16) < 1e-12
        assert abs(renyi2_entropy(rho) - (-np.log(7 / 16))) < 1e-12


class TestLogNegativity:
    def test_product_state_zero(self):
        rng = np.random.default_rng(3)
        assert abs(log_negativity(density_matrix(random_product_state(rng)))) < 1e-12

    def test_bell_state(self):
        assert abs(log_negativity(density_matrix(BELL)) - np.log(2)) < 1e-12

    def test_werner_closed_form(self):
        # oracle: eigen-decompose the partial transpose directly
        for x in (0.4, 0.6, 0.9):
            rho = werner_state(x)
            pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
            oracle = np.log(np.sum(np.abs(np.linalg.eigvalsh(pt))))
            assert abs(log_negativity(rho) - np.log((1 + 3 * x) / 2)) < 1e-12
            assert abs(log_negativity(rho) - oracle) < 1e-12

    def test_separable_mixtures_vanish(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            weights = rng.dirichlet(np.ones(4))
            rho = sum(
                w * density_matrix(random_product_state(rng)) for w in weights
            )
            assert log_negativity(rho) < 1e-8


class TestMutualInformation:
    def test_product_state_zero(self):
        rng = np.random.default_rng(5)
        assert abs(mutual_information(random_product_state(rng))) < 1e-10

    def test_bell_pair(self):
        assert abs(mutual_information(BELL) - 2 * np.log(2)) < 1e-12

    def test_tfim_pair_against_dense_oracle(self):
        # independent oracle: dense Hamiltonian, full eigh, pair (1, 5)
        L, h = 8, 1.0
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sz = np.diag([1.0, -1.0]).astype(complex)
        ham = np.zeros((2**L, 2**L), dtype=complex)
        for i in range(L):
            ops_x = [np.eye(2, dtype=complex)] * L
            ops_x[i] = sx
            ops_x[(i + 1) % L] = sx
            ops_z = [np.eye(2, dtype=complex)] * L
            ops_z[i] = sz
            ham -= kron_all(ops_x) + h * kron_all(ops_z)
        parity = kron_all([sz] * L)
        evals, evecs = np.linalg.eigh(ham + 0.5 * (np.eye(2**L) - parity))
        gs = evecs[:, 0]

        from nlmagic.tfim import TfimConfig, ground_state_ed

        state = ground_state_ed(TfimConfig(L=L, h=h))
        mi_lanczos = mutual_information(state, (1, 5))
        mi_dense = mutual_information(gs.astype(complex), (1, 5))
        assert abs(mi_lanczos - mi_dense) < 1e-8
        assert mi_lanczos >= 0


class TestHaarSampling:
    def test_deterministic_per_seed(self):
        assert np.array_equal(haar_random_state(2, 7), haar_random_state(2, 7))
        assert np.array_equal(haar_random_unitary(4, 7), haar_random_unitary(4, 7))

    def test_unitarity(self):
        u = haar_random_unitary(8, 0)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-10)

    def test_first_moment(self):
        # Haar moment: E |<0|U|0>|^2 = 1/dim, checked at dim 4 with 1e5 draws
        rng = np.random.default_rng(11)
        n = 100000
        vals = np.empty(n)
        for i in range(n):
            z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            q, r = np.linalg.qr(z / np.sqrt(2))
            d = np.diag(r)
            vals[i] = np.abs((q * (d / np.abs(d)))[0, 0]) ** 2
        se = vals.std(ddof=1) / np.sqrt(n)
        assert abs(vals.mean() - 0.25) < 3 * se


class TestApplyGate:
    def test_x_flips(self):
        np.testing.assert_allclose(apply_gate(basis_state(1), X, (0,)), [0, 1], atol=1e-12)

    def test_cnot(self):
        out = apply_gate(basis_state(2, 0b10), CNOT, (0, 1))
        np.testing.assert_allclose(out, basis_state(2, 0b11), atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(6)
        psi = haar_random_state(3, rng)
        out = apply_gate(psi, haar_random_unitary(4, rng), (2, 0))
        assert abs(np.linalg.norm(out) - 1) < 1e-10

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            apply_gate(basis_state(1), np.array([[1, 0], [0, 2]], dtype=complex), (0,))

    def test_hadamard_matches_kron(self):
        rng = np.random.default_rng(8)
        psi = haar_random_state(2, rng)
        direct = kron_all([H, np.eye(2)]) @ psi
        np.testing.assert_allclose(apply_gate(psi, H, (0,)), direct, atol=1e-12)
