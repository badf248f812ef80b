"""Ising-chain ground states, correlators, NN scans, and MINN."""

import numpy as np
import pytest

from nlmagic.fitting import FitError, fit_power_law
from nlmagic.magic import is_canonical_form, r_matrix, sre2_mixed
from nlmagic.optimize import OptimizerConfig, nn_optimize
from nlmagic.states import T, apply_gate, basis_state, partial_trace
from nlmagic.tfim import (
    FreeFermionChain,
    ResourceLimitError,
    SymmetryError,
    TfimConfig,
    ground_energy_ed,
    ground_state_ed,
    minn_of_state,
    minn_scan,
    parity_expectation,
    sre2_from_r,
    two_point_nn_scan,
    two_site_rdm_canonical,
)


def values_of(records, name):
    return np.array([rec.value for rec in records if rec.measure_name == name])


class TestConfig:
    def test_minimum_size(self):
        with pytest.raises(ValueError):
            TfimConfig(L=3, h=1.0)

    def test_negative_field(self):
        with pytest.raises(ValueError):
            TfimConfig(L=8, h=-0.1)

    def test_ed_cap(self):
        with pytest.raises(ResourceLimitError):
            TfimConfig(L=18, h=1.0, backend="ed")

    def test_free_fermion_allows_large_l(self):
        TfimConfig(L=256, h=1.0, backend="free_fermion")


class TestGroundStateED:
    def test_paramagnetic_limit(self):
        h = 50.0
        cfg = TfimConfig(L=4, h=h)
        state = ground_state_ed(cfg)
        assert abs(state[0]) ** 2 > 0.999
        assert abs(ground_energy_ed(cfg) + h * 4) / (h * 4) < 1e-3

    def test_energy_matches_free_fermions(self):
        for h in (0.5, 1.0, 2.0):
            cfg = TfimConfig(L=8, h=h)
            assert abs(ground_energy_ed(cfg) - FreeFermionChain(8, h).energy) < 1e-8

    def test_even_parity_sector(self):
        for h in (0.2, 1.0, 3.0):
            state = ground_state_ed(TfimConfig(L=8, h=h))
            assert abs(parity_expectation(state) - 1.0) < 1e-8


class TestTwoSiteRdm:
    def test_polarized_limit(self):
        state = ground_state_ed(TfimConfig(L=8, h=5.0))
        _, rmat = two_site_rdm_canonical(state, 3)
        a = rmat[1:, 0]
        assert abs(a[0]) < 1e-8 and abs(a[1]) < 1e-8
        assert a[2] > 0.95

    def test_critical_point_canonical(self):
        state = ground_state_ed(TfimConfig(L=12, h=1.0))
        _, rmat = two_site_rdm_canonical(state, 3)
        assert is_canonical_form(rmat, 1e-7)

    def test_ordered_limit_xx(self):
        state = ground_state_ed(TfimConfig(L=8, h=0.0))
        _, rmat = two_site_rdm_canonical(state, 2)
        assert abs(rmat[1, 1] - 1.0) < 1e-8

    def test_symmetry_broken_state_rejected(self):
        state = ground_state_ed(TfimConfig(L=8, h=1.0))
        broken = apply_gate(state, T, (0,))
        with pytest.raises(SymmetryError):
            two_site_rdm_canonical(broken, 3)


class TestFreeFermions:
    def test_strong_field_limits(self):
        chain = FreeFermionChain(64, 50.0)
        mz, xx, yy, zz = chain.correlators(5)
        assert abs(mz - 1.0) < 1e-3
        assert abs(xx) < 1e-3 and abs(yy) < 1e-3
        assert abs(zz - mz * mz) < 1e-3

    def test_matches_ed_at_l12(self):
        # acceptance criterion 7: all four correlators and NN at every r, 1e-6
        state = ground_state_ed(TfimConfig(L=12, h=1.0))
        chain = FreeFermionChain(12, 1.0)
        for r in range(1, 7):
            rho, rmat = two_site_rdm_canonical(state, r)
            ff = chain.two_site_r_matrix(r)
            assert np.max(np.abs(rmat - ff)) < 1e-6
            assert abs(sre2_mixed(rho) - sre2_from_r(ff)) < 1e-6

    def test_critical_xx_exponent(self):
        chain = FreeFermionChain(128, 1.0)
        rs = np.arange(4, 33)
        xx = np.array([chain.correlators(int(r))[1] for r in rs])
        fit = fit_power_law(rs, xx, with_offset=False)
        assert abs(fit.exponent - 0.25) < 0.03

    def test_determinant_precision_warning(self):
        chain = FreeFermionChain(128, 2.0)
        with pytest.warns(RuntimeWarning):
            chain.correlators(60)


class TestTwoPointNN:
    def test_canonical_form_shortcut_matches_optimizer(self):
        state = ground_state_ed(TfimConfig(L=10, h=1.0))
        for r in (2, 4):
            rho, _ = two_site_rdm_canonical(state, r)
            direct = sre2_mixed(rho)
            optimized, _ = nn_optimize(rho, OptimizerConfig(n_starts=8, seed=0))
            assert abs(direct - optimized) < 1e-6

    def test_backends_agree(self):
        ed = two_point_nn_scan(TfimConfig(L=12, h=1.5), range(1, 7))
        ff = two_point_nn_scan(
            TfimConfig(L=12, h=1.5, backend="free_fermion"), range(1, 7)
        )
        np.testing.assert_allclose(
            values_of(ed, "nn"), values_of(ff, "nn"), atol=1e-6
        )

    def test_translational_invariance(self):
        state = ground_state_ed(TfimConfig(L=10, h=1.0))
        d = 2
        base = sre2_mixed(partial_trace(state, (0, d)))
        for k in range(1, 10 - d):
            val = sre2_mixed(partial_trace(state, (k, k + d)))
            assert abs(val - base) < 1e-8

    def test_asymptotic_critical_exponent(self):
        # the 1/2 exponent emerges once r is deep in the scaling regime
        chain = FreeFermionChain(512, 1.0)
        rs = np.arange(1, 129)
        nn = np.array([sre2_from_r(chain.two_site_r_matrix(int(r))) for r in rs])
        fit = fit_power_law(rs, nn, window=(32, 128), with_offset=True)
        assert abs(fit.exponent - 0.5) < 0.05

    def test_exponent_transient_shrinks_with_scale(self):
        from nlmagic.magic import exponent_law

        target = exponent_law({"xx": 0.25, "zz": 2.0}, {"xx": 0.0, "zz": 1.0})
        gaps = []
        for L, window in ((128, (4, 32)), (256, (8, 64)), (512, (16, 128))):
            chain = FreeFermionChain(L, 1.0)
            rs = np.arange(1, window[1] + 1)
            nn = np.array([sre2_from_r(chain.two_site_r_matrix(int(r))) for r in rs])
            fit = fit_power_law(rs, nn, window=window, with_offset=True)
            gaps.append(abs(fit.exponent - target))
        assert gaps[0] > gaps[1] > gaps[2]

    def test_mutual_information_exponent_tracks_nn(self):
        from nlmagic.magic import rho_from_r
        from nlmagic.states import mutual_information

        chain = FreeFermionChain(512, 1.0)
        rs = np.arange(1, 129)
        nn, mi = [], []
        for r in rs:
            rmat = chain.two_site_r_matrix(int(r))
            nn.append(sre2_from_r(rmat))
            mi.append(mutual_information(rho_from_r(rmat)))
        fit_nn = fit_power_law(rs, np.array(nn), window=(32, 128), with_offset=True)
        fit_mi = fit_power_law(rs, np.array(mi), window=(32, 128), with_offset=True)
        # both decay toward the common asymptotic exponent 1/2; mutual
        # information converges from above and more slowly
        assert abs(fit_nn.exponent - 0.5) < 0.05
        assert 0.5 < fit_mi.exponent < 0.75


class TestMinn:
    def test_product_state_input_zero(self):
        for axis in ("x", "y", "z"):
            val, _ = minn_of_state(basis_state(6), 3, axis=axis, mode="enumerate")
            assert abs(val) < 1e-12

    def test_enumerate_vs_sample(self):
        state = ground_state_ed(TfimConfig(L=8, h=1.0))
        rng = np.random.default_rng(0)
        for axis in ("x", "y", "z"):
            exact, _ = minn_of_state(state, 3, axis=axis, mode="enumerate")
            est, se = minn_of_state(state, 3, axis=axis, mode="sample",
                                    n_samples=2000, rng=rng)
            assert abs(exact - est) < 3 * se

    def test_scan_records(self):
        recs = minn_scan(TfimConfig(L=8, h=1.0), [2, 3], axis="y")
        assert [rec.r for rec in recs] == [2, 3]
        assert all(rec.axis == "y" for rec in recs)
        assert all(rec.value >= 0 for rec in recs)

    def test_enumerate_cap(self):
        with pytest.raises(ResourceLimitError):
            minn_scan(TfimConfig(L=16, h=1.0), [2], mode="enumerate")

    def test_free_fermion_backend_rejected(self):
        with pytest.raises(ValueError):
            minn_scan(TfimConfig(L=32, h=1.0, backend="free_fermion"), [2])

    def test_bad_axis_rejected(self):
        with pytest.raises(ValueError):
            minn_of_state(basis_state(4), 2, axis="w")


class TestFitPowerLaw:
    def test_exact_offset_recovery(self):
        rs = np.arange(2, 65)
        fit = fit_power_law(rs, 2.0 * rs**-0.5 + 0.1)
        assert abs(fit.exponent - 0.5) < 1e-6
        assert abs(fit.offset - 0.1) < 1e-6
        assert abs(fit.amplitude - 2.0) < 1e-5

    def test_exact_pure_power(self):
        rs = np.arange(2, 65)
        fit = fit_power_law(rs, 1.7 * rs**-0.8, with_offset=False)
        assert abs(fit.exponent - 0.8) < 1e-9
        assert fit.offset == 0.0

    def test_noisy_recovery(self):
        rng = np.random.default_rng(1)
        rs = np.arange(2, 65)
        vals = (1.3 * rs**-0.6 + 0.05) * (1 + 0.01 * rng.standard_normal(rs.size))
        fit = fit_power_law(rs, vals)
        assert abs(fit.exponent - 0.6) < 0.05

    def test_window_too_small(self):
        with pytest.raises(FitError):
            fit_power_law(np.arange(2, 10), np.ones(8), window=(2, 4))

    def test_nonpositive_values_rejected(self):
        rs = np.arange(2, 10)
        with pytest.raises(FitError):
            fit_power_law(rs, rs**-1.0 - 0.3, with_offset=False)
