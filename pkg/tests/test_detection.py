import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dicke_fringe.detection import (
    detection_probability,
    directional_lowering,
    lowering_matrix,
    product_factors,
    reduce_on_detection,
    sa_coherence,
    sa_coherence_closed_form,
    separability_witness,
)
from dicke_fringe.dynamics import steady_state
from dicke_fringe.errors import BasisMismatchError, NoPhotonError
from dicke_fringe.qcore import Basis, DensityMatrix4, DetectionDirection, SymmetrizedBasis, SystemParams, to_symmetrized

SM = np.array([[0, 0], [1, 0]], complex)
E, G = np.array([1, 0], complex), np.array([0, 1], complex)


def brute_force_sa(omega, phi, delta):
    """Conditioned Im rho_sa from explicit matrices, no library helpers."""
    params = SystemParams.from_phi(omega, phi)
    rho = steady_state(params).to_product().entries
    op = np.kron(SM, np.eye(2)) + np.exp(1j * (delta - 2 * phi)) * np.kron(np.eye(2), SM)
    m = op @ rho @ op.conj().T
    m /= np.trace(m)
    s = (np.exp(-1j * phi) * np.kron(E, G) + np.exp(1j * phi) * np.kron(G, E)) / np.sqrt(2)
    a = (np.exp(-1j * phi) * np.kron(E, G) - np.exp(1j * phi) * np.kron(G, E)) / np.sqrt(2)
    return (s.conj() @ m @ a).imag


class TestLoweringOperator:
    @pytest.mark.parametrize("delta,phi", [(0.0, 0.0), (1.2, 0.4), (np.pi, 2.0)])
    def test_kron_oracle(self, delta, phi):
        expected = np.kron(SM, np.eye(2)) + np.exp(1j * (delta - 2 * phi)) * np.kron(np.eye(2), SM)
        np.testing.assert_allclose(lowering_matrix(delta, phi), expected, atol=1e-15)

    def test_from_direction(self):
        params = SystemParams(1.0, [0, 0, 1.0], [0.0, 0.0, 0.15])
        op = directional_lowering(params, DetectionDirection.along([1.0, 0, 0]))
        assert op.delta == pytest.approx(2 * np.pi * 0.15)
        np.testing.assert_allclose(op.intensity_op, op.raising @ op.matrix)
        assert not op.matrix.flags.writeable

    def test_doubly_excited_emits_at_every_phase(self):
        params = SystemParams.from_phi(1.0, 0.3)
        for d in np.linspace(0, 2 * np.pi, 7):
            assert detection_probability(DensityMatrix4.basis_state("ee"), directional_lowering(params, d)) == pytest.approx(2.0)


class TestReduction:
    def test_ground_state_has_no_photon(self):
        with pytest.raises(NoPhotonError):
            reduce_on_detection(DensityMatrix4.basis_state("gg"), directional_lowering(SystemParams.from_phi(1.0), 0.0))

    def test_antisymmetric_state_dark_at_zero(self):
        params = SystemParams.from_phi(1.0, 0.6)
        with pytest.raises(NoPhotonError):
            reduce_on_detection(DensityMatrix4.basis_state("a", 0.6), directional_lowering(params, 0.0))

    @pytest.mark.parametrize("phi", [0.0, 0.5, np.pi / 2, 2.7])
    def test_excited_goes_to_symmetric_at_zero_phase(self, phi):
        params = SystemParams.from_phi(1.0, phi)
        e = DensityMatrix4.basis_state("e", phi)
        out = reduce_on_detection(e, directional_lowering(params, 0.0))
        assert out.basis is Basis.SYMMETRIZED
        assert out["ss"].real == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("phi", [0.0, 0.5, np.pi / 2, 2.7])
    def test_excited_goes_to_antisymmetric_at_pi(self, phi):
        params = SystemParams.from_phi(1.0, phi)
        out = reduce_on_detection(DensityMatrix4.basis_state("e", phi), directional_lowering(params, np.pi))
        assert out["aa"].real == pytest.approx(1.0, abs=1e-14)

    def test_perpendicular_geometry(self):
        # laser and detector both perpendicular to x12 (r_hat . x12 = 0, phi = 0)
        params = SystemParams(1.0, [0, 0, 1.0], [3.0, 0, 0])
        ee = to_symmetrized(DensityMatrix4.basis_state("ee"), SymmetrizedBasis(params.phi))
        out = reduce_on_detection(ee, directional_lowering(params, DetectionDirection.along([0, 1.0, 0])))
        assert out["ss"].real == pytest.approx(1.0, abs=1e-12)

    def test_random_reductions_are_states(self):
        rng = np.random.default_rng(11)
        params = SystemParams.from_phi(1.0, 0.3)
        for _ in range(500):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            m = a @ a.conj().T
            rho = DensityMatrix4(m / np.trace(m))
            reduce_on_detection(rho, directional_lowering(params, rng.uniform(0, 2 * np.pi))).validate()

    def test_product_basis_in_product_out(self):
        params = SystemParams.from_phi(0.8, 0.2)
        rho = steady_state(params).to_product()
        out = reduce_on_detection(rho, directional_lowering(params, 1.0))
        assert out.basis is Basis.PRODUCT
        sym = reduce_on_detection(steady_state(params), directional_lowering(params, 1.0))
        np.testing.assert_allclose(sym.to_product().entries, out.entries, atol=1e-14)


class TestSaCoherence:
    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.05, 5.0), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
    def test_closed_form_vs_brute_force(self, omega, phi, delta):
        params = SystemParams.from_phi(omega, phi)
        after = reduce_on_detection(steady_state(params), directional_lowering(params, delta))
        assert sa_coherence(after) == pytest.approx(brute_force_sa(omega, phi, delta), abs=1e-12)
        assert sa_coherence_closed_form(params, delta) == pytest.approx(sa_coherence(after), abs=1e-12)

    @pytest.mark.parametrize("delta,expected", [
        # brute-force values at Omega = gamma, phi = pi/2, frozen
        (0.0, 0.0),
        (np.pi, 0.0),
        (np.pi / 2, -1 / 6),
        (-np.pi / 2, 1 / 6),
        (2.0, -0.5 * np.sin(2.0) / (2.0 + 1.0 + np.cos(2.0))),
    ])
    def test_reference_values(self, delta, expected):
        assert brute_force_sa(1.0, np.pi / 2, delta) == pytest.approx(expected, abs=1e-12)
        assert sa_coherence_closed_form(SystemParams.from_phi(1.0, np.pi / 2), delta) == pytest.approx(expected, abs=1e-12)

    def test_periodic_in_delta(self):
        for d in (0.3, 2.0, 4.4):
            assert brute_force_sa(0.8, 0.4, d) == pytest.approx(brute_force_sa(0.8, 0.4, d + 2 * np.pi), abs=1e-13)

    def test_double_reduction_at_opposed_phases(self):
        params = SystemParams.from_phi(1.0, 0.7)
        after = reduce_on_detection(steady_state(params), directional_lowering(params, 0.0))
        # a click at delta=0 leaves |s>/|g> weight only; nothing left for the pi channel at the same instant
        assert detection_probability(after, directional_lowering(params, np.pi)) == pytest.approx(0.0, abs=1e-12)

    def test_requires_symmetrized(self):
        with pytest.raises(BasisMismatchError):
            sa_coherence(DensityMatrix4.basis_state("gg"))


class TestSeparability:
    def test_steady_state_conditioned_is_entangled(self):
        params = SystemParams.from_phi(1.0, 0.0)
        after = reduce_on_detection(steady_state(params), directional_lowering(params, 0.0))
        assert not separability_witness(after)

    def test_steady_state_itself_is_product(self):
        # independent atoms driven in phase stay uncorrelated
        assert separability_witness(steady_state(SystemParams.from_phi(1.3, 0.4)))

    def test_bell_like_states(self):
        assert not separability_witness(DensityMatrix4.basis_state("s", 0.2))
        assert not separability_witness(DensityMatrix4.basis_state("a", 0.2))

    def test_product_state_with_sa_coherence(self):
        # (|e>+|g>)(|e>+i|g>)/2 is a product yet has Im rho_sa != 0
        ket = np.kron(E + G, E + 1j * G) / 2
        rho = DensityMatrix4.from_ket(ket)
        assert separability_witness(rho)
        assert abs(to_symmetrized(rho, SymmetrizedBasis(0.0))["sa"].imag) > 0.1

    def test_factors(self):
        r1, r2 = product_factors(DensityMatrix4.basis_state("eg"))
        np.testing.assert_allclose(r1, np.diag([1, 0]))
        np.testing.assert_allclose(r2, np.diag([0, 1]))
