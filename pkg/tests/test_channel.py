import numpy as np
import pytest

from conftest import max_abs
from fermigauss.channel import (
    GaussianChannel,
    adjoint,
    apply,
    apply_map,
    compose,
    identity_channel,
    is_cptp,
    sandwich_inv_sqrt,
    sandwich_sqrt,
    validate_cp,
    validate_tp,
    validate_unital,
)
from fermigauss.dense import (
    dense_channel,
    dense_covariance_of,
    dense_overlap,
    dense_state_from_covariance,
    psd_function,
    psd_sqrt,
)
from fermigauss.errors import FaithfulnessError, InvalidInputError, InvalidStateError, SingularityError
from fermigauss.linalg import block_diag_j, pfaffian
from fermigauss.models import (
    erasure,
    random_channel,
    random_dilation,
    random_special_orthogonal,
    random_state,
    unitary_channel,
)
from fermigauss.state import from_williamson, maximally_mixed


class TestDataType:
    def test_defaults_are_cptp(self):
        ch = GaussianChannel(np.zeros((2, 2)), np.eye(2))
        assert ch.C == 1 and max_abs(ch.D) == 0.0
        assert is_cptp(ch)

    def test_rectangular_b(self):
        ch = GaussianChannel(np.zeros((2, 2)), np.zeros((2, 4)))
        assert (ch.n_out, ch.n_in) == (1, 2)
        assert ch.N.shape == (6, 6)

    @pytest.mark.parametrize(
        "A, B, D",
        [
            (np.eye(2), np.eye(2), None),
            (np.zeros((4, 4)), np.eye(2), None),
            (np.zeros((2, 2)), np.eye(2), np.zeros((4, 4))),
            (np.zeros((2, 2)), np.ones((2, 3)), None),
        ],
    )
    def test_rejects_malformed(self, A, B, D):
        with pytest.raises(InvalidInputError):
            GaussianChannel(A, B, 1.0, D)


class TestValidation:
    def test_identity(self):
        ch = identity_channel(2)
        assert validate_cp(ch) and validate_tp(ch) and validate_unital(ch)

    def test_expanding_b_not_cp(self):
        verdict = validate_cp(GaussianChannel(np.zeros((2, 2)), 1.2 * np.eye(2)))
        assert not verdict
        assert verdict.max_singular_value == pytest.approx(1.2)

    def test_negative_constant_not_cp(self):
        assert not validate_cp(GaussianChannel(np.zeros((2, 2)), np.eye(2), -1.0))

    def test_sandwich_sqrt_orthogonal_block_matrix(self):
        ch = sandwich_sqrt(random_state(1, 3))
        assert max_abs(ch.N.T @ ch.N - np.eye(12)) < 1e-12
        assert validate_cp(ch)
        assert not validate_tp(ch) and not validate_unital(ch)

    def test_adjoint_of_cptp_is_unital(self):
        ch = adjoint(random_channel(3, 2, 1))
        assert validate_unital(ch) and validate_cp(ch)


class TestApply:
    def test_identity(self):
        G = random_state(1, 2)
        assert max_abs(apply(identity_channel(2), G).G - G.G) == 0.0

    def test_erasure(self):
        fixed = random_state(2, 2)
        assert max_abs(apply(erasure(fixed), random_state(3, 2)).G - fixed.G) < 1e-15

    def test_non_cp_data_detected(self):
        with pytest.raises(InvalidStateError):
            apply(GaussianChannel(np.zeros((2, 2)), 1.5 * np.eye(2)), block_diag_j([0.9]))

    def test_non_tp_rejected(self):
        with pytest.raises(InvalidInputError):
            apply(sandwich_sqrt(maximally_mixed(1)), maximally_mixed(1))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            apply(identity_channel(2), maximally_mixed(1))

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_dense_dilation(self, seed):
        from fermigauss.models import dilation_channel

        d = random_dilation(seed, 2, 1)
        G = random_state(seed + 100, 2)
        out = dense_channel(d)(dense_state_from_covariance(G))
        assert max_abs(dense_covariance_of(out) - apply(dilation_channel(d), G).G) < 1e-9


class TestApplyMap:
    def test_block_pfaffian_identity(self, rng):
        G = random_state(4, 3).G
        D = random_state(5, 3).G
        I = np.eye(6)
        lhs = pfaffian(G) * pfaffian(D + np.linalg.inv(G))
        assert pfaffian(np.block([[G, I], [-I, D]])) == pytest.approx(lhs, rel=1e-10)

    @pytest.mark.parametrize("seed", range(3))
    def test_sqrt_sandwich_matches_dense(self, seed):
        sigma, rho = random_state(seed, 2), random_state(seed + 50, 2)
        ds, dr = dense_state_from_covariance(sigma), dense_state_from_covariance(rho)
        root = psd_sqrt(ds)
        out = root @ dr @ root
        G, weight = apply_map(sandwich_sqrt(sigma), rho)
        assert weight == pytest.approx(np.trace(out), abs=1e-12)
        assert weight == pytest.approx(dense_overlap(dr, ds), abs=1e-12)
        assert max_abs(dense_covariance_of(out / np.trace(out)) - G) < 1e-9

    @pytest.mark.parametrize("seed", range(3))
    def test_inverse_sqrt_sandwich_matches_dense(self, seed):
        tau, rho = random_state(seed, 2), random_state(seed + 60, 2)
        dt, dr = dense_state_from_covariance(tau), dense_state_from_covariance(rho)
        m = psd_function(dt, lambda w: 1 / np.sqrt(w))
        out = m @ dr @ m
        G, weight = apply_map(sandwich_inv_sqrt(tau), rho)
        assert weight == pytest.approx(np.trace(out), rel=1e-10)
        assert max_abs(dense_covariance_of(out / np.trace(out)) - G) < 1e-9

    def test_pure_input(self):
        sigma = random_state(1, 1)
        G, weight = apply_map(sandwich_sqrt(sigma), block_diag_j([1.0]))
        out = psd_sqrt(dense_state_from_covariance(sigma)) @ dense_state_from_covariance(block_diag_j([1.0]))
        assert weight == pytest.approx(np.trace(out @ psd_sqrt(dense_state_from_covariance(sigma))), abs=1e-12)


class TestCompose:
    def test_identity_is_neutral(self):
        """A one-mode environment leaves A singular, so this exercises the regularized path."""
        ch = random_channel(1, 2, 1)
        out = compose(identity_channel(2), ch)
        assert max_abs(out.A - ch.A) < 1e-9 and max_abs(out.B - ch.B) < 1e-9
        assert out.C == pytest.approx(1.0)

    def test_unitaries_compose_as_rotations(self, rng):
        R1, R2 = random_special_orthogonal(rng, 4), random_special_orthogonal(rng, 4)
        out = compose(unitary_channel(R2), unitary_channel(R1))
        assert max_abs(out.B - R2 @ R1) < 1e-9
        assert max_abs(out.A) < 1e-9 and max_abs(out.D) < 1e-9
        assert out.C == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_covariance_consistency(self, seed):
        c1, c2 = random_channel(seed, 2, 1), random_channel(seed + 10, 2, 2)
        G = random_state(seed + 20, 2)
        out = compose(c2, c1)
        assert max_abs(apply(out, G).G - apply(c2, apply(c1, G)).G) < 1e-9

    @pytest.mark.parametrize("seed", range(200))
    def test_cptp_closure(self, seed):
        c1, c2 = random_channel(2 * seed, 2, 1), random_channel(2 * seed + 1, 2, 1)
        out = compose(c2, c1)
        assert validate_cp(out) and validate_tp(out)

    def test_associativity(self):
        c1, c2, c3 = (random_channel(s, 3, 1) for s in (7, 8, 9))
        G = random_state(10, 3)
        left = apply(compose(c3, compose(c2, c1)), G).G
        right = apply(compose(compose(c3, c2), c1), G).G
        assert max_abs(left - right) < 1e-8

    def test_mode_changing(self):
        c1 = GaussianChannel(np.zeros((4, 4)), np.vstack([np.eye(2), np.zeros((2, 2))]))
        c2 = GaussianChannel(np.zeros((2, 2)), np.hstack([np.eye(2), np.zeros((2, 2))]))
        out = compose(c2, c1)
        assert (out.n_out, out.n_in) == (1, 1)
        assert max_abs(out.B - np.eye(2)) < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            compose(identity_channel(2), identity_channel(1))

    def test_singular_inner_matrix_raises(self):
        """D2 + A1^{-1} = 0 has no finite composite."""
        A1 = block_diag_j([0.5])
        first = GaussianChannel(A1, np.eye(2))
        second = GaussianChannel(np.zeros((2, 2)), np.eye(2), 1.0, -np.linalg.inv(A1))
        with pytest.raises(SingularityError):
            compose(second, first)

    def test_sandwich_chain_constant_squares_to_one(self):
        sigma = random_state(11, 2)
        ch = random_channel(12, 2, 1)
        inner = compose(adjoint(ch), sandwich_inv_sqrt(apply(ch, sigma)))
        full = compose(sandwich_sqrt(sigma), inner)
        assert full.C**2 == pytest.approx(1.0, abs=1e-9)

    def test_sandwich_inverse_pair_is_identity(self):
        """tau^{1/2} (tau^{-1/2} X tau^{-1/2}) tau^{1/2} = X."""
        tau = random_state(13, 2)
        out = compose(sandwich_sqrt(tau), sandwich_inv_sqrt(tau))
        assert max_abs(out.B - np.eye(4)) < 1e-9
        assert max_abs(out.A) < 1e-9 and max_abs(out.D) < 1e-9
        assert out.C == pytest.approx(1.0, abs=1e-9)


class TestAdjoint:
    def test_unitary(self, rng):
        R = random_special_orthogonal(rng, 4)
        adj = adjoint(unitary_channel(R))
        assert max_abs(adj.B - R.T) == 0.0 and max_abs(adj.A) == 0.0 and max_abs(adj.D) == 0.0

    def test_cptp_form(self):
        ch = random_channel(1, 2, 1)
        adj = adjoint(ch)
        assert max_abs(adj.A) == 0.0 and adj.C == 1.0
        assert max_abs(adj.B - ch.B.T) == 0.0 and max_abs(adj.D + ch.A) == 0.0

    def test_involution(self):
        ch = random_channel(2, 2, 1)
        back = adjoint(adjoint(ch))
        assert max_abs(back.A - ch.A) == 0.0 and max_abs(back.B - ch.B) == 0.0

    def test_hilbert_schmidt_pairing(self, rng):
        S = dense_channel(random_dilation(3, 2, 1))
        X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        Y = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert abs(np.vdot(X, S(Y)) - np.vdot(S.adjoint()(X), Y)) < 1e-9

    def test_matches_dense_adjoint_on_gaussian_input(self):
        """Unital adjoint acting on a Gaussian operator agrees with the dense adjoint."""
        d = random_dilation(4, 1, 1)
        from fermigauss.models import dilation_channel

        adj = adjoint(dilation_channel(d))
        rho = random_state(5, 1)
        G, weight = apply_map(adj, rho)
        out = dense_channel(d).adjoint()(dense_state_from_covariance(rho))
        assert weight == pytest.approx(np.trace(out), abs=1e-12)
        assert max_abs(dense_covariance_of(out / np.trace(out)) - G) < 1e-9


class TestSandwich:
    def test_maximally_mixed_sqrt(self):
        ch = sandwich_sqrt(maximally_mixed(2))
        assert max_abs(ch.A) == 0.0 and max_abs(ch.B - np.eye(4)) == 0.0
        assert ch.C == pytest.approx(0.25) and max_abs(ch.D) == 0.0

    def test_maximally_mixed_inv_sqrt(self):
        ch = sandwich_inv_sqrt(maximally_mixed(2))
        assert max_abs(ch.A) == 0.0 and max_abs(ch.B - np.eye(4)) == 0.0
        assert ch.C == pytest.approx(4.0)

    def test_inv_sqrt_orthogonal_and_positive(self):
        ch = sandwich_inv_sqrt(random_state(3, 3))
        assert max_abs(ch.N.T @ ch.N - np.eye(12)) < 1e-12
        assert ch.C.real > 0

    def test_inv_sqrt_pure_rejected(self):
        with pytest.raises(FaithfulnessError) as err:
            sandwich_inv_sqrt(from_williamson([1.0, 0.5]))
        assert err.value.pure_modes == (0,)
