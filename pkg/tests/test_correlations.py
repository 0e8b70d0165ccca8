import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dicke_fringe.correlations import (
    CorrelationGrid,
    G2Params,
    classical_inequality_check,
    g1_bilinear,
    g1_intensity,
    g1_visibility,
    g2_analytic,
    g2_grid,
    g2_numeric,
    g2_zero_delay,
    g2_zero_delay_by_reduction,
    steady_populations,
)
from dicke_fringe.dynamics import assemble_liouvillian, propagate, steady_state
from dicke_fringe.errors import DegenerateDriveError, DomainError
from dicke_fringe.qcore import DensityMatrix4, SystemParams

SM = np.array([[0, 0], [1, 0]], complex)


def regression_oracle(omega, d1, d2, t):
    """<A1+ A2+(t) A2(t) A1> / (<A1+A1><A2+A2>) built from explicit matrices and propagate."""
    params = SystemParams.from_phi(omega, 0.0)
    rho = steady_state(params).to_product()
    ops = [np.kron(SM, np.eye(2)) + np.exp(1j * d) * np.kron(np.eye(2), SM) for d in (d1, d2)]
    n1 = np.trace(ops[0].conj().T @ ops[0] @ rho.entries).real
    n2 = np.trace(ops[1].conj().T @ ops[1] @ rho.entries).real
    cond = DensityMatrix4(ops[0] @ rho.entries @ ops[0].conj().T / n1)
    later = propagate(assemble_liouvillian(params), cond, t).entries
    return np.trace(ops[1].conj().T @ ops[1] @ later).real / n2


class TestFirstOrder:
    def test_fringe_at_zero(self):
        assert g1_intensity(steady_state(SystemParams.from_phi(1.0)), 0.0) == pytest.approx(8 / 9, abs=1e-12)

    @pytest.mark.parametrize("phi", [0.0, 0.6])
    def test_intensity_matches_bilinear_form(self, phi):
        rho = steady_state(SystemParams.from_phi(0.7, phi))
        for d in np.linspace(0, 2 * np.pi, 9):
            assert g1_intensity(rho, d) == pytest.approx(g1_bilinear(rho, d), abs=1e-12)

    def test_visibility(self):
        assert g1_visibility(SystemParams.from_phi(1.0)) == pytest.approx(1 / 3, abs=1e-12)
        assert g1_visibility(SystemParams.from_phi(1e3)) < 1e-5
        # weak drive: coherent scattering dominates
        assert g1_visibility(SystemParams.from_phi(0.01)) > 0.99

    def test_steady_populations(self):
        assert sum(steady_populations(0.8)) == pytest.approx(1.0)


class TestClosedFormG2:
    def test_reference_values(self):
        # reduction-then-intensity oracle at Omega = 0.8, frozen
        assert g2_zero_delay(0.8, 0.0, 0.0) == pytest.approx(0.4832, abs=1e-4)
        assert g2_zero_delay(0.8, np.pi, np.pi) == pytest.approx(3.1729, abs=1e-4)
        assert g2_analytic(0.8, 0.0, 0.0, 0.0) == pytest.approx(g2_zero_delay(0.8, 0.0, 0.0), abs=1e-12)

    def test_decorrelates(self):
        assert g2_analytic(0.8, 0.0, 0.0, 60.0) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 5.0), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), st.floats(0, 8))
    def test_against_regression_oracle(self, omega, d1, d2, t):
        assert g2_analytic(omega, d1, d2, t) == pytest.approx(regression_oracle(omega, d1, d2, t), abs=1e-8)

    @pytest.mark.parametrize("omega", [0.25 - 1e-3, 0.25 - 1e-6, 0.25, 0.25 + 1e-6, 0.25 + 1e-3])
    def test_near_removable_singularity(self, omega):
        d = np.array([0.0, 1.0, np.pi])
        t = np.array([0.0, 0.7, 3.0])
        a = g2_analytic(omega, d[:, None], d[None, :], t[:, None, None])
        n = np.array([[[regression_oracle(omega, x, y, tt) for y in d] for x in d] for tt in t])
        np.testing.assert_allclose(a, n, atol=1e-7)

    def test_overdamped_branch(self):
        assert G2Params.from_omega(0.2).overdamped and not G2Params.from_omega(0.8).overdamped
        a = g2_analytic(0.2, 3.141593, 3.141593, 1.0)
        assert a == pytest.approx(g2_numeric(0.2, 3.141593, 3.141593, 1.0), abs=1e-8)

    @given(st.floats(0, 2 * np.pi))
    def test_opposite_phases_never_coincide(self, d):
        assert g2_zero_delay(0.8, d, d + np.pi) < 1e-12

    def test_periodicity_and_symmetry(self):
        assert g2_analytic(1.3, 0.4, 1.9, 0.8) == pytest.approx(g2_analytic(1.3, 0.4 + 2 * np.pi, 1.9 - 2 * np.pi, 0.8))
        assert g2_zero_delay(1.3, 0.4, 1.9) == pytest.approx(g2_zero_delay(1.3, 1.9, 0.4))

    def test_broadcasting(self):
        out = g2_analytic(0.8, np.zeros(3)[:, None], np.zeros(4)[None, :], 0.5)
        assert out.shape == (3, 4)

    def test_errors(self):
        with pytest.raises(DegenerateDriveError):
            g2_analytic(0.0, 0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            g2_analytic(0.8, 0.0, 0.0, -1.0)
        with pytest.raises(DomainError):
            g2_numeric(0.8, 0.0, 0.0, [-1.0])


class TestRegression:
    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 5.0), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
    def test_zero_delay_by_reduction(self, omega, d1, d2):
        assert g2_zero_delay_by_reduction(omega, d1, d2) == pytest.approx(g2_zero_delay(omega, d1, d2), abs=1e-10)

    def test_grid_methods_agree(self):
        d = np.linspace(0, 2 * np.pi, 5, endpoint=False)
        t = np.linspace(0, 4, 5)
        a = g2_grid(0.8, d, d, t, "analytic")
        n = g2_grid(0.8, d, d, t, "numeric")
        assert a.values.shape == (5, 5, 5)
        np.testing.assert_allclose(a.values, n.values, atol=1e-10)

    def test_numeric_scalar_and_array(self):
        assert isinstance(g2_numeric(0.8, 0.0, 0.0, 0.5), float)
        assert g2_numeric(0.8, 0.0, 0.0, [0.5, 1.0]).shape == (2,)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            CorrelationGrid(np.zeros(2), np.zeros(2), np.zeros(2), np.zeros((2, 2, 3)), 0.8, "analytic")
        with pytest.raises(ValueError):
            CorrelationGrid(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros((1, 1, 1)), 0.8, "guess")
        with pytest.raises(ValueError):
            g2_grid(0.8, [0.0], [0.0], [0.0], "montecarlo")


class TestClassicalInequality:
    def test_violated_for_opposite_detectors(self):
        res = classical_inequality_check(0.8, 0.0, np.pi)
        assert res.violated
        assert res.lhs == pytest.approx(-1.123, abs=1e-3)
        assert res.rhs == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0.05, 5.0), st.floats(0, 2 * np.pi))
    def test_same_detector_never_violates(self, omega, d):
        assert not classical_inequality_check(omega, d, d).violated
