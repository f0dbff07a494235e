import numpy as np
import pytest

from qestim.estimation import outcome_moments
from qestim.operators import DensityOperator, HermitianOperator, InvalidInputError, ProbOperatorMeasure
from qestim.grid import Grid1D, GridWavefunction
from qestim.sampling import random_density
from qestim.scenarios import (
    ConfigError,
    EprConfig,
    HeterodyneConfig,
    scenario_energy_grid,
    scenario_epr,
    scenario_heterodyne,
    scenario_momentum_grid,
    scenario_qubit,
    scenario_unbiased_joint,
    unbiased_state_sweep,
)
from qestim.scenarios.epr import binned_moments, central_mask, closed_form_estimate
from qestim.scenarios.heterodyne import coherent_amplitudes, squeezed_vacuum_amplitudes
from qestim.scenarios.qubit import MAX_GAMMA


class TestQubit:
    def test_eigenstate_is_estimated_perfectly(self):
        res = scenario_qubit("0", "sz", "x")
        assert res.report.noise_sq == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(res.optimal_values, [1.0, 1.0], atol=1e-12)

    def test_plus_y_in_x_basis(self):
        r = scenario_qubit("+y", "sz", "x").report
        assert r.noise_sq == pytest.approx(1.0, abs=1e-12)
        assert r.noise_bound_sq == pytest.approx(1.0, abs=1e-12)
        assert r.estimator_variance == pytest.approx(0.0, abs=1e-12)
        assert r.observable_variance == pytest.approx(1.0, abs=1e-12)
        assert abs(r.geometric_residual) < 1e-12

    def test_eigenbasis_measurement(self):
        res = scenario_qubit("+x", "sz", "z")
        assert res.report.noise_sq == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(res.optimal_values, [1.0, -1.0], atol=1e-12)

    def test_mixed_state_is_not_tight(self):
        # maximally mixed: sz measured in x gives no information, nothing to win or lose
        r = scenario_qubit("mixed", "sz", "x").report
        assert r.noise_sq == pytest.approx(1.0, abs=1e-12)
        assert r.noise_bound_sq == pytest.approx(0.0, abs=1e-12)

    def test_bad_spec(self):
        with pytest.raises(InvalidInputError):
            scenario_qubit("+w", "sz", "x")


class TestUnbiasedJoint:
    def test_equality_at_max_gamma(self):
        res = scenario_unbiased_joint(MAX_GAMMA, "0")
        assert res.product.lhs == pytest.approx(1.0, abs=1e-9)
        assert res.product.rhs == pytest.approx(1.0, abs=1e-9)
        assert res.defect_x < 1e-12 and res.defect_y < 1e-12

    def test_no_commutator_on_plus_x(self):
        res = scenario_unbiased_joint(MAX_GAMMA, "+x")
        assert res.product.lhs == pytest.approx(1.0, abs=1e-9)
        assert res.product.rhs == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("gamma", [0.05, 0.2, 0.5, MAX_GAMMA])
    def test_noise_grows_as_pom_weakens(self, gamma):
        res = scenario_unbiased_joint(gamma, "0")
        expected = 1 / gamma**2 - 1
        assert res.noise_sq_x == pytest.approx(expected, rel=1e-12)
        assert res.noise_sq_y == pytest.approx(expected, rel=1e-12)

    def test_noise_closed_form_on_random_states(self, rng):
        # unbiased f: sum f^2 p = 1/gamma^2, sum f s = 2 tr[rho sx^2] = 2, for every state
        gamma = 0.4
        for _ in range(10):
            rho = random_density(2, rng)
            res = scenario_unbiased_joint(gamma, rho)
            assert res.noise_sq_x == pytest.approx(1 / gamma**2 - 1, rel=1e-10)

    @pytest.mark.parametrize("gamma", [0.0, -0.1, 0.75])
    def test_gamma_out_of_range(self, gamma):
        with pytest.raises(InvalidInputError):
            scenario_unbiased_joint(gamma)

    def test_state_sweep(self):
        worst_product, worst_joint = unbiased_state_sweep(MAX_GAMMA, states=100, seed=3)
        assert worst_product >= -1e-9
        assert worst_joint >= -1e-9


def _squeezed_optimal_variance(v):
    # Gaussian Husimi density with per-axis variance v + 1/4
    return v**2 / (v + 0.25)


@pytest.fixture(scope="module")
def coherent():
    return scenario_heterodyne(HeterodyneConfig(state="coherent", beta=1.0 + 0.5j))


class TestHeterodyne:
    def test_standard_product(self, coherent):
        assert coherent.standard_product == pytest.approx(0.5, abs=1e-3)

    def test_optimal_product(self, coherent):
        assert coherent.optimal_product == pytest.approx(0.125, abs=1e-3)
        assert coherent.improvement == pytest.approx(4.0, abs=0.02)

    def test_geometric_identity(self, coherent):
        for q in (coherent.x, coherent.y):
            assert q.optimal.observable_variance == pytest.approx(0.25, abs=1e-9)
            assert q.optimal.estimator_variance + q.optimal.noise_sq == pytest.approx(0.25, abs=1e-3)

    def test_closed_form_agrees_with_engine(self, coherent):
        assert coherent.closed_form_max_deviation <= 10 * coherent.grid.step

    def test_optimal_estimate_is_midpoint(self, coherent):
        # X_opt = (alpha_1 + beta_1)/2 for a coherent state
        a1, _ = coherent.grid.mesh()
        region = coherent.husimi > 1e-6 * coherent.husimi.max()
        np.testing.assert_allclose(coherent.x.optimal_values[region], ((a1 + 1.0) / 2)[region], atol=1e-6)

    def test_squeezed_matches_gaussian_closed_form(self):
        r = 0.5
        res = scenario_heterodyne(HeterodyneConfig(state="squeezed", r=r))
        vx, vy = np.exp(-2 * r) / 4, np.exp(2 * r) / 4
        assert res.x.optimal.observable_variance == pytest.approx(vx, rel=1e-6)
        assert res.x.optimal.estimator_variance == pytest.approx(_squeezed_optimal_variance(vx), rel=1e-3)
        assert res.y.optimal.estimator_variance == pytest.approx(_squeezed_optimal_variance(vy), rel=1e-3)
        assert res.standard_product >= 0.5 - 1e-3

    def test_squeezing_lowers_optimal_product(self):
        # pure Gaussian states put the coherent state at the top, not the bottom
        res = scenario_heterodyne(HeterodyneConfig(state="squeezed", r=0.5))
        assert res.optimal_product < 0.125 - 1e-2

    def test_fock_state_products(self):
        res = scenario_heterodyne(HeterodyneConfig(state="fock", photons=1))
        # Q ~ |alpha|^2 exp(-|alpha|^2): per-axis variance 3/4 + 1/4
        assert res.standard_product == pytest.approx(1.0, abs=1e-6)
        assert res.x.optimal.observable_variance == pytest.approx(0.75, abs=1e-9)

    def test_truncation_rejected(self):
        with pytest.raises(ConfigError):
            scenario_heterodyne(HeterodyneConfig(state="coherent", beta=5.0, fock_dim=16))

    def test_small_radius_rejected(self):
        with pytest.raises(ConfigError):
            scenario_heterodyne(HeterodyneConfig(state="coherent", beta=1.0, grid_radius=3.0))

    def test_unknown_state(self):
        with pytest.raises(ConfigError):
            scenario_heterodyne(HeterodyneConfig(state="thermal"))

    def test_coherent_amplitudes_normalized(self):
        amps = coherent_amplitudes(2.0 - 1.0j, 128)
        assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.isfinite(coherent_amplitudes(np.array([0.0, 30.0]), 128)))

    def test_squeezed_amplitudes_normalized(self):
        assert np.linalg.norm(squeezed_vacuum_amplitudes(0.5, 0.3, 64)) == pytest.approx(1.0, abs=1e-10)


@pytest.fixture(scope="module")
def default():
    return scenario_epr(EprConfig(sigma=0.5, tau=0.5, hbar=1.0))


class TestEpr:
    def test_noise_ratio(self, default):
        expected = (1 + 0.0625) ** -0.5
        assert default.noise_ratio == pytest.approx(expected, rel=1e-2)
        assert default.closed_form_ratio == pytest.approx(0.97014, abs=1e-5)

    def test_estimate_matches_linear_formula(self, default):
        assert default.estimate_relative_error <= 1e-2

    def test_ratio_below_one(self, default):
        assert default.noise_ratio < 1.0

    def test_offsets(self):
        res = scenario_epr(EprConfig(sigma=0.5, tau=0.5, a=0.3, b=0.7))
        assert res.noise_ratio == pytest.approx(res.closed_form_ratio, rel=1e-6)
        assert res.estimate_relative_error <= 1e-6

    def test_perfect_correlation_limit(self):
        devs, gaps = [], []
        for tau in (0.5, 0.25, 0.125, 0.0625):
            res = scenario_epr(EprConfig(sigma=1.0, tau=tau, b=0.7))
            c = res.central
            scale = np.max(np.abs(res.config.b - res.momenta[c]))
            devs.append(res.naive_deviation / scale)
            gaps.append(1.0 - res.noise_ratio)
        assert np.all(np.diff(devs) < 0) and np.all(np.diff(gaps) < 0)
        # both shrink like sigma^2 tau^2
        np.testing.assert_allclose(np.array(devs[:-1]) / devs[1:], 4.0, rtol=0.25)
        assert devs[-1] < 1e-2 and gaps[-1] < 1e-2

    def test_binning_converges(self):
        errors = []
        for bin_factor in (8, 4, 2, 1):
            res = scenario_epr(EprConfig(sigma=0.5, tau=0.5, bin_factor=bin_factor))
            assert res.optimal_values.size == 256 // bin_factor
            errors.append(abs(res.noise_ratio - res.closed_form_ratio))
        assert np.all(np.diff(errors) < 0)
        assert errors[-1] < 1e-8

    def test_invalid_product(self):
        with pytest.raises(ConfigError):
            EprConfig(sigma=2.0, tau=0.9)

    def test_coarse_grid_rejected(self):
        with pytest.raises(ConfigError):
            scenario_epr(EprConfig(sigma=0.5, tau=0.5, half_width=3.0))

    def test_closed_form_limit(self):
        cfg = EprConfig(sigma=1e-4, tau=1e-4, b=1.5)
        np.testing.assert_allclose(closed_form_estimate([0.0, 1.0], cfg), [1.5, 0.5], atol=1e-7)

    def test_central_mask_mass(self):
        prob = np.exp(-np.linspace(-5, 5, 401) ** 2)
        mask = central_mask(prob)
        frac = prob[mask].sum() / prob.sum()
        assert 0.9 <= frac <= 0.92


@pytest.mark.parametrize("bin_factor", [1, 2])
def test_binned_moments_match_dense_engine(rng, bin_factor):
    g1, g2 = Grid1D(8, -1.0, 0.4), Grid1D(9, -2.0, 0.7)
    amps = rng.normal(size=(8, 9)) + 1j * rng.normal(size=(8, 9))
    phi = GridWavefunction((g1, g2), amps)
    moments, centers = binned_moments(phi, bin_factor)

    v = (phi.amplitudes * np.sqrt(phi.cell)).ravel()
    rho = DensityOperator(np.outer(v, v.conj()))
    eye = np.eye(9)
    ops = []
    for b in range(8 // bin_factor):
        sel = np.zeros(8)
        sel[b * bin_factor:(b + 1) * bin_factor] = 1.0
        ops.append(np.kron(np.diag(sel), eye))
    M = ProbOperatorMeasure(np.array(ops, dtype=complex))
    A = HermitianOperator(np.kron(np.eye(8), np.diag(g2.points)))
    dense = outcome_moments(rho, M, A)

    np.testing.assert_allclose(moments.probabilities, dense.probabilities, atol=1e-12)
    np.testing.assert_allclose(moments.signal, dense.signal, atol=1e-12)
    np.testing.assert_allclose(dense.asym, 0.0, atol=1e-12)
    assert moments.second_moment == pytest.approx(dense.second_moment, abs=1e-12)
    np.testing.assert_allclose(moments.optimal_values(), dense.optimal_values(), atol=1e-12)
    np.testing.assert_allclose(centers, g1.points.reshape(-1, bin_factor).mean(axis=1))


class TestContinuumScenarios:
    def test_gaussian_momentum(self):
        res = scenario_momentum_grid("gaussian", sigma=1.3, k=0.8, chirp=0.2)
        assert abs(res.uncertainty.crosscheck_residual) < 1e-6
        assert res.mean_p_opt == pytest.approx(res.mean_p, abs=1e-9)

    def test_two_bump_momentum(self):
        res = scenario_momentum_grid("two-bump", sigma=1.0, separation=4.0, chirp=0.3)
        assert abs(res.uncertainty.crosscheck_residual) < 1e-4

    def test_unknown_shape(self):
        with pytest.raises(InvalidInputError):
            scenario_momentum_grid("square")

    def test_energy_grid(self):
        res = scenario_energy_grid(mass=2.0, omega=0.7)
        assert res.max_deviation < 1e-4
        assert res.target == pytest.approx(0.35)
        assert res.mean_e_opt == pytest.approx(res.hamiltonian_mean, rel=1e-6)

    def test_energy_bad_mass(self):
        with pytest.raises(InvalidInputError):
            scenario_energy_grid(mass=0.0)

