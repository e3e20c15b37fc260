import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ur.builtin import bae_model, cnot_model
from ur.config import DEFAULT_TOLERANCES
from ur.errors import PremiseError, ShapeError
from ur.operators import psd_check
from ur.measurement import oup_matrix
from ur.symplectic import (
    SymplecticMap,
    gexp_scale,
    heisenberg_form_verdict,
    is_symplectic,
    random_symplectic,
    rotated_ozawa_experiment,
    rotated_ozawa_from_matrices,
    rotation,
    standard_form,
    symplectic_exp,
    transform_nd,
)

J = standard_form(1)


def test_is_symplectic_basic():
    assert is_symplectic(np.eye(2))[0]
    assert is_symplectic(rotation(np.pi / 4))[0]
    assert is_symplectic(np.diag([2.0, 0.5]))[0]
    ok, res = is_symplectic(np.diag([2.0, 2.0]))
    assert not ok and res == pytest.approx(3.0)
    with pytest.raises(ShapeError):
        is_symplectic(np.eye(3))


def test_symplectic_map_rejects():
    with pytest.raises(ShapeError):
        SymplecticMap(1, np.diag([2.0, 2.0]))
    with pytest.raises(ShapeError):
        SymplecticMap(2, np.eye(2))


def test_rotation_closed_form():
    np.testing.assert_allclose(rotation(np.pi / 4), np.array([[1, 1], [-1, 1]]) / np.sqrt(2), atol=1e-16)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_rotation_composition(a, b):
    np.testing.assert_allclose(rotation(a) @ rotation(b), rotation(a + b), atol=1e-12)


def test_exp_zero_is_identity():
    np.testing.assert_array_equal(symplectic_exp(np.zeros((4, 4))), np.eye(4))


def test_random_symplectic_deterministic():
    a = random_symplectic(2, 7).matrix
    b = random_symplectic(2, 7).matrix
    assert np.array_equal(a, b)
    assert not np.array_equal(a, random_symplectic(2, 8).matrix)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_symplectic_samples(n):
    seeds = np.random.SeedSequence(n).spawn(1000)
    for s in seeds:
        ok, res = is_symplectic(random_symplectic(n, s).matrix)
        assert ok, res


def test_random_symplectic_bad_n():
    with pytest.raises(ShapeError):
        random_symplectic(0, 1)


def test_transform_identity():
    k = np.array([[1.0, 0.2], [0.2, 0.5]])
    gamma = np.zeros((2, 2))
    t = transform_nd(np.eye(2), k, gamma, 0.5 * J)
    np.testing.assert_array_equal(t.K, k)
    np.testing.assert_array_equal(t.Gexp, 0.5 * J)
    assert t.gexp_invariant


def test_transform_flags_non_canonical_gexp():
    g = np.array([[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0, 0, 0, 0], [0, 0, 0, 0]])
    s = random_symplectic(2, 3)
    t = transform_nd(s, np.eye(4), np.zeros((4, 4)), g)
    assert not t.gexp_invariant
    np.testing.assert_allclose(t.Gexp, s.matrix @ g @ s.matrix.T)


def test_transform_shape_mismatch():
    with pytest.raises(ShapeError):
        transform_nd(np.eye(2), np.eye(4), np.zeros((4, 4)), standard_form(2))


def test_gexp_scale():
    assert gexp_scale(0.5 * J) == 0.5
    assert gexp_scale(standard_form(2) * 3) == 3.0
    assert gexp_scale(np.array([[0.0, 1.0], [1.0, 0.0]])) is None


def test_pi4_closed_form():
    eps2, eta2 = 0.3, 1.7
    t = transform_nd(rotation(np.pi / 4), np.diag([eps2, eta2]), np.zeros((2, 2)), 0.5 * J)
    assert t.K[0, 0] == pytest.approx((eps2 + eta2) / 2, abs=1e-15)
    assert t.K[1, 1] == pytest.approx((eps2 + eta2) / 2, abs=1e-15)
    assert t.K[0, 1] == pytest.approx((eta2 - eps2) / 2, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3))
def test_verdict_invariance(seed, n):
    rng = np.random.default_rng(seed)
    k = np.diag(rng.uniform(0.0, 2.0, 2 * n))
    before = heisenberg_form_verdict(k, 0.5)
    t = transform_nd(random_symplectic(n, seed), k, np.zeros_like(k), 0.5 * standard_form(n))
    after = psd_check(oup_matrix(t.K, t.Gamma, t.Gexp), tol=1e-9)
    assert before.is_psd == after.is_psd


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_symmetry_classes_preserved(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4))
    k, g = a @ a.T, a - a.T
    t = transform_nd(random_symplectic(2, seed), k, g, standard_form(2))
    np.testing.assert_allclose(t.K, t.K.T, atol=1e-10)
    np.testing.assert_allclose(t.Gamma, -t.Gamma.T, atol=1e-10)
    assert np.linalg.eigvalsh(t.K)[0] > -1e-9


def test_rotated_zero_angle_matches_original():
    rep = rotated_ozawa_experiment(bae_model(2.0), 0.0)
    assert rep.epsilon_rot == pytest.approx(rep.epsilon, abs=1e-15)
    assert rep.eta_rot == pytest.approx(rep.eta, abs=1e-15)
    assert rep.sum_lhs is None
    assert rep.matrix_before.is_psd == rep.matrix_after.is_psd


def test_rotated_pi4_bae():
    rep = rotated_ozawa_experiment(bae_model(1.0), np.pi / 4)
    # K = [[1/4, -1/2], [-1/2, 1/4]] becomes diag(-1/4, 3/4)
    assert rep.correlation_rot == pytest.approx(0.0, abs=1e-15)
    assert rep.sum_lhs == pytest.approx(0.5, abs=1e-15)
    assert rep.sum_rhs == pytest.approx(0.5, abs=1e-15)
    assert rep.literal_sum_rhs == pytest.approx(1.0, abs=1e-15)
    assert not rep.matrix_before.is_psd and not rep.matrix_after.is_psd


def test_rotated_random_diagonal(rng):
    for _ in range(100):
        k = np.diag(rng.uniform(0.0, 1.0, 2))
        rep = rotated_ozawa_from_matrices(k, np.zeros((2, 2)), 0.5 * J, np.pi / 4)
        assert rep.matrix_before.is_psd == rep.matrix_after.is_psd
        assert rep.matrix_before.is_psd == (k[0, 0] * k[1, 1] >= 1 / 16 - 1e-12)
        corr = rep.correlation_rot
        assert rep.sum_rhs == pytest.approx(2 * np.sqrt(0.0625 + corr ** 2), abs=1e-15)
        assert rep.sum_holds == rep.matrix_after.is_psd


def test_rotated_premise_errors():
    with pytest.raises(PremiseError, match="independent intervention"):
        rotated_ozawa_experiment(cnot_model(), np.pi / 4)
    with pytest.raises(PremiseError):
        rotated_ozawa_from_matrices(np.eye(4), np.zeros((4, 4)), standard_form(2), 0.1)
    with pytest.raises(PremiseError):
        rotated_ozawa_from_matrices(np.eye(2), np.zeros((2, 2)), np.array([[0, 1], [1, 0.0]]), 0.1,
                                    DEFAULT_TOLERANCES)
