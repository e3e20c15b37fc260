import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ur.builtin import bae_model, truncated_bae_model
from ur.errors import ContractViolation, DomainError, ShapeError
from ur.fuzz import standard_to_interleaved
from ur.gaussian import (
    COUNTEREXAMPLE_PROBE_COV,
    VACUUM_COV,
    CanonicalAlgebra,
    GaussianMoments,
    LinearChannel,
    LinearObservable,
    apply_channel,
    bae_channel,
    direct_sum_form,
    lin_commutator,
    moment_expectation,
    moment_sym_cov,
    physicality_check,
)
from ur.measurement import (
    analyze,
    build_nd_system,
    g_matrix,
    gamma_matrix,
    model_state,
    nd_covariance,
)
from ur.operators import commutator, quadratures, tensor
from ur.symplectic import random_symplectic

ALG2 = CanonicalAlgebra(2, 0.5)
XA, YA, XB, YB = (LinearObservable.quadrature(4, k) for k in range(4))


def interleaved_random_symplectic(modes, seed):
    return LinearChannel(standard_to_interleaved(random_symplectic(modes, seed).matrix))


def test_quadrature_commutators():
    assert lin_commutator(XA, YA, ALG2) == 0.5j
    assert lin_commutator(XA, XB, ALG2) == 0
    assert lin_commutator(YB, XB, ALG2) == -0.5j


def test_lin_commutator_shape():
    with pytest.raises(ShapeError):
        lin_commutator(LinearObservable([1.0, 0.0]), XA, ALG2)


def test_offsets_do_not_contribute():
    u = LinearObservable([1.0, 0, 0, 0], offset=3.0)
    assert lin_commutator(u, YA, ALG2) == 0.5j


def test_lin_commutator_matches_truncated_oscillators(rng):
    dim = 30
    x, y = quadratures(dim, 0.5)
    eye = np.eye(dim)
    z = [tensor(x, eye), tensor(y, eye), tensor(eye, x), tensor(eye, y)]
    u, v = rng.standard_normal(4), rng.standard_normal(4)
    U = sum(c * op for c, op in zip(u, z))
    V = sum(c * op for c, op in zip(v, z))
    c = commutator(U, V)
    expected = lin_commutator(LinearObservable(u), LinearObservable(v), ALG2)
    low = [i * dim + j for i in range(4) for j in range(4)]
    block = c[np.ix_(low, low)]
    np.testing.assert_allclose(block, expected * np.eye(len(low)), atol=1e-6)


def test_counterexample_moments():
    gain = 1.7
    mom = GaussianMoments(np.zeros(2), COUNTEREXAMPLE_PROBE_COV)
    n = LinearObservable([1 / gain, 0])
    d = LinearObservable([0, -gain])
    assert moment_sym_cov(n, n, mom) == pytest.approx(1 / (4 * gain ** 2), abs=1e-15)
    assert moment_sym_cov(n, d, mom) == pytest.approx(-0.5, abs=1e-15)
    assert moment_sym_cov(d, d, mom) == pytest.approx(gain ** 2 / 4, abs=1e-15)


def test_moment_expectation():
    mom = GaussianMoments([0.3, -1.2], VACUUM_COV)
    assert moment_expectation(LinearObservable([0.0, 0.0]), mom) == 0
    assert moment_expectation(LinearObservable([2.0, 1.0], offset=0.5), mom) == pytest.approx(0.6 - 1.2 + 0.5)


def test_apply_channel_bae():
    g = 2.5
    s = bae_channel(g)
    assert apply_channel(s, YA).allclose(YA - g * YB)
    assert apply_channel(s, XB).allclose(XB + g * XA)
    assert apply_channel(s, XA).allclose(XA)
    assert apply_channel(s, YB).allclose(YB)


def test_apply_channel_identity(rng):
    u = LinearObservable(rng.standard_normal(6), offset=1.0)
    assert apply_channel(LinearChannel.identity(3), u).allclose(u)


def test_apply_channel_needs_validated_channel():
    with pytest.raises(ContractViolation):
        apply_channel(np.eye(4), XA)


def test_channel_rejects_non_symplectic():
    with pytest.raises(ContractViolation):
        LinearChannel(2 * np.eye(2))


def test_channel_composition(rng):
    for seed in range(20):
        s1 = interleaved_random_symplectic(2, seed)
        s2 = interleaved_random_symplectic(2, seed + 100)
        u = LinearObservable(rng.standard_normal(4))
        lhs = apply_channel(s2, apply_channel(s1, u))
        assert lhs.allclose(apply_channel(s1.compose(s2), u), atol=1e-12)


def test_bae_model_operators():
    g = 3.0
    sys = build_nd_system(bae_model(g))
    n, d = sys.k
    assert n.allclose((1 / g) * XB)
    assert d.allclose(-g * YB)


def test_bae_channel_symplectic():
    s = bae_channel(1.0).matrix
    omega = 0.5 * direct_sum_form(2)
    np.testing.assert_array_equal(s @ omega @ s.T, omega)


def test_bae_gain_domain():
    with pytest.raises(DomainError):
        bae_model(0.0)
    with pytest.raises(DomainError):
        bae_model(-1.0)


def test_physicality_vacuum_saturates():
    v = physicality_check(GaussianMoments.vacuum(1), CanonicalAlgebra(1, 0.5))
    assert v.is_psd
    assert abs(v.min_eigenvalue) < 1e-15


def test_physicality_counterexample_fails():
    v = physicality_check(GaussianMoments(np.zeros(2), COUNTEREXAMPLE_PROBE_COV), CanonicalAlgebra(1, 0.5))
    assert not v.is_psd
    # eigenvalues 1/4 -+ |1/2 + i/4| = (1 -+ sqrt 5)/4
    assert v.min_eigenvalue == pytest.approx((1 - np.sqrt(5)) / 4, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-4, 4))
def test_physicality_squeezed(r):
    cov = np.diag([np.exp(-2 * r) / 4, np.exp(2 * r) / 4])
    v = physicality_check(GaussianMoments(np.zeros(2), cov), CanonicalAlgebra(1, 0.5))
    assert v.is_psd
    # product of the diagonal is 1/16, so the smaller eigenvalue is exactly 0
    assert abs(v.min_eigenvalue) <= 1e-10 * max(abs(e) for e in v.eigenvalues)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3))
def test_channel_preserves_commutators(seed, modes):
    rng = np.random.default_rng(seed)
    s = interleaved_random_symplectic(modes, seed)
    alg = CanonicalAlgebra(modes, 0.5)
    u = LinearObservable(rng.standard_normal(2 * modes))
    v = LinearObservable(rng.standard_normal(2 * modes))
    before = lin_commutator(u, v, alg)
    after = lin_commutator(apply_channel(s, u), apply_channel(s, v), alg)
    assert abs(before - after) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-2, 2), st.floats(-2, 2))
def test_sym_cov_bilinear_symmetric(seed, a, b):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((4, 4))
    mom = GaussianMoments(np.zeros(4), z @ z.T)
    u, v, w = (LinearObservable(rng.standard_normal(4)) for _ in range(3))
    assert moment_sym_cov(u, v, mom) == pytest.approx(moment_sym_cov(v, u, mom), abs=1e-12)
    lhs = moment_sym_cov(a * u + b * v, w, mom)
    rhs = a * moment_sym_cov(u, w, mom) + b * moment_sym_cov(v, w, mom)
    assert lhs == pytest.approx(rhs, abs=1e-10)


@pytest.mark.slow
def test_backends_agree_on_bae_matrices():
    gaussian = bae_model(1.0, probe_cov=VACUUM_COV)
    finite = truncated_bae_model(1.0, 30)
    gs, fs = build_nd_system(gaussian), build_nd_system(finite)
    g_state, f_state = model_state(gaussian), model_state(finite)
    for fn in (nd_covariance, gamma_matrix, g_matrix):
        np.testing.assert_allclose(fn(fs, f_state), fn(gs, g_state), atol=1e-6)
    rep = analyze(finite)
    assert rep.matrix_oup.is_psd
