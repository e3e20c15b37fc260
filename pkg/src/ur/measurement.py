"""Noise and disturbance operators and the inequalities built from them.

For a model with observables ``A_i``, ``B_j`` and meters ``M_i`` the
collective input vector is ``Z_in = (A_1..A_n, B_1..B_n)``, the output
vector is ``Z_out = (M_1_out..M_n_out, B_1_out..B_n_out)`` and the
noise/disturbance vector is ``K = Z_out - Z_in``. Three real matrices
summarise a state:

* ``K``     symmetrised covariance of the components of ``K``;
* ``Gamma`` ``<[Z_in_a, K_b] + [K_a, Z_in_b]> / i``;
* ``Gexp``  ``<[Z_in_a, Z_in_b]> / i``.

The matrix inequality is ``K + (i/2)(Gamma + Gexp) >= 0``.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ModelInvalid, NumericalContamination, ShapeError
from .gaussian import CanonicalAlgebra, GaussianMoments, apply_channel, physicality_check
from .operators import (
    PsdVerdict,
    QuantumState,
    commutator,
    expectation,
    heisenberg_out,
    psd_check,
)


@dataclass(frozen=True, eq=False)
class NDSystem:
    backend: str
    n: int
    z_in: list
    z_out: list
    k: list
    # canonical commutation form of the joint modes; gaussian backend only
    omega: Optional[np.ndarray] = None


def build_nd_system(model, tol: Tolerances = DEFAULT_TOLERANCES) -> NDSystem:
    """Heisenberg-evolve the model's observables and form ``K = Z_out - Z_in``.

    Raises
    ------
    ModelInvalid
        If the output observables fail to commute.
    """
    model.validate(tol)
    a_in, b_in, m_in = model.embedded()
    if model.backend == "finite":
        u = model.unitary
        m_out = [heisenberg_out(u, m, tol.unitary) for m in m_in]
        b_out = [heisenberg_out(u, b, tol.unitary) for b in b_in]
        omega = None
    else:
        m_out = [apply_channel(model.channel, m) for m in m_in]
        b_out = [apply_channel(model.channel, b) for b in b_in]
        omega = model.algebra.omega
    z_in = a_in + b_in
    z_out = m_out + b_out
    k = [zo - zi for zo, zi in zip(z_out, z_in)]
    sys = NDSystem(model.backend, model.n, z_in, z_out, k, omega)
    res = commutation_residual(sys)
    scale = max(1.0, max(_op_scale(sys, z) for z in z_out) ** 2)
    if res > tol.hermitian * scale:
        raise ModelInvalid(f"output observables do not commute (residual {res:.3e})")
    return sys


def _op_scale(sys, x):
    if sys.backend == "finite":
        return float(np.linalg.norm(x, 2))
    return float(np.linalg.norm(x.coeffs))


def model_state(model):
    if model.backend == "finite":
        return model.composite_state()
    return model.joint_moments()


def _check_state(sys, state):
    if sys.backend == "finite":
        if not isinstance(state, QuantumState):
            raise ShapeError("finite backend needs a QuantumState")
        if state.dim != sys.z_in[0].shape[0]:
            raise ShapeError(f"state dimension {state.dim} does not match {sys.z_in[0].shape[0]}")
    else:
        if not isinstance(state, GaussianMoments):
            raise ShapeError("gaussian backend needs GaussianMoments")
        if state.size != sys.z_in[0].coeffs.size:
            raise ShapeError(f"moments of size {state.size} do not match {sys.z_in[0].coeffs.size}")


def _product_expectations(xs, ys, state) -> np.ndarray:
    """Complex matrix ``<x_a y_b>`` without forming the products."""
    if state.kind == "pure":
        v = state.data
        left = np.array([x.conj().T @ v for x in xs])
        right = np.array([y @ v for y in ys])
        return left.conj() @ right.T
    rho = state.data
    return np.array([[np.sum((rho @ x) * y.T) for y in ys] for x in xs])


def comm_expectations(sys, xs, ys, state) -> np.ndarray:
    """Complex matrix ``<[x_a, y_b]>``."""
    if sys.backend == "gaussian":
        cx = np.array([x.coeffs for x in xs])
        cy = np.array([y.coeffs for y in ys])
        return 1j * (cx @ sys.omega @ cy.T)
    return _product_expectations(xs, ys, state) - _product_expectations(ys, xs, state).T


def _centered_ops(xs, state):
    out = []
    for x in xs:
        mean = expectation(x, state).real
        out.append(x - mean * np.eye(x.shape[0]))
    return out


def _as_real(m, tol, what):
    m = np.asarray(m)
    res = float(np.max(np.abs(m.imag), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(m.real), initial=0.0)))
    if res > tol * scale:
        raise NumericalContamination(f"{what} has imaginary residual {res:.3e}")
    return np.array(m.real, dtype=float)


def sym_covariance(sys, xs, ys, state, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Real matrix ``<sym(dx_a, dy_b)>``."""
    if sys.backend == "gaussian":
        cx = np.array([x.coeffs for x in xs])
        cy = np.array([y.coeffs for y in ys])
        return cx @ state.cov @ cy.T
    dx, dy = _centered_ops(xs, state), _centered_ops(ys, state)
    m = 0.5 * (_product_expectations(dx, dy, state) + _product_expectations(dy, dx, state).T)
    return _as_real(m, tol.norm, "symmetrised covariance")


def nd_covariance(sys: NDSystem, state, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    _check_state(sys, state)
    return sym_covariance(sys, sys.k, sys.k, state, tol)


def gamma_matrix(sys: NDSystem, state, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    _check_state(sys, state)
    c = comm_expectations(sys, sys.z_in, sys.k, state)
    c = c + comm_expectations(sys, sys.k, sys.z_in, state)
    return _as_real(c / 1j, tol.norm, "Gamma")


def g_matrix(sys: NDSystem, state, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    _check_state(sys, state)
    c = comm_expectations(sys, sys.z_in, sys.z_in, state)
    return _as_real(c / 1j, tol.norm, "Gexp")


def second_moments(sys: NDSystem, state) -> np.ndarray:
    """Unsymmetrised ``<dK_a dK_b>``, a Gram matrix."""
    _check_state(sys, state)
    if sys.backend == "gaussian":
        ck = np.array([x.coeffs for x in sys.k])
        return ck @ state.cov @ ck.T + 0.5j * (ck @ sys.omega @ ck.T)
    dk = _centered_ops(sys.k, state)
    return _product_expectations(dk, dk, state)


def oup_matrix(k_matrix, gamma, gexp) -> np.ndarray:
    return k_matrix + 0.5j * (gamma + gexp)


def matrix_oup(k_matrix, gamma, gexp, tol: Tolerances = DEFAULT_TOLERANCES) -> PsdVerdict:
    return psd_check(oup_matrix(k_matrix, gamma, gexp), tol=tol.psd, hermitian_tol=tol.hermitian)


def commutation_residual(sys: NDSystem) -> float:
    """Largest entry of any commutator among the output observables."""
    if sys.backend == "gaussian":
        c = np.array([z.coeffs for z in sys.z_out])
        return float(np.max(np.abs(c @ sys.omega @ c.T)))
    worst = 0.0
    for a in range(len(sys.z_out)):
        for b in range(a + 1, len(sys.z_out)):
            worst = max(worst, float(np.max(np.abs(commutator(sys.z_out[a], sys.z_out[b])))))
    return worst


def identity_terms(sys: NDSystem, state):
    """The three contributions whose sum must vanish, as complex matrices.

    ``<[Z_in, Z_in]>``, ``<[Z_in, K] + [K, Z_in]>`` and ``<[dK, dK]>``,
    each computed from the observables directly.
    """
    _check_state(sys, state)
    t_g = comm_expectations(sys, sys.z_in, sys.z_in, state)
    t_gamma = comm_expectations(sys, sys.z_in, sys.k, state) + comm_expectations(sys, sys.k, sys.z_in, state)
    if sys.backend == "gaussian":
        t_kk = comm_expectations(sys, sys.k, sys.k, state)
    else:
        dk = _centered_ops(sys.k, state)
        t_kk = np.array([[expectation(commutator(a, b), state) for b in dk] for a in dk])
    return t_g, t_gamma, t_kk


@dataclass
class Inequality:
    lhs: float
    rhs: float
    holds: bool

    def as_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def _ineq(lhs, rhs, slack) -> Inequality:
    lhs, rhs = float(lhs), float(rhs)
    return Inequality(lhs, rhs, lhs >= rhs - slack * max(1.0, abs(rhs)))


@dataclass
class PairChecks:
    """Scalar relations for the pair ``(A_i, B_j)``; indices are 0-based."""

    i: int
    j: int
    epsilon: float
    eta: float
    sigma_a: float
    sigma_b: float
    commutator_abs: float
    cross_abs: float
    ozawa: Inequality
    heisenberg: Inequality
    robertson: Inequality
    pair_determinant: float
    det_correlated: Inequality
    det_bound: Inequality
    det_abs_gap: Inequality
    det_gap: Inequality

    @property
    def universal_hold(self) -> bool:
        return all(q.holds for q in (self.ozawa, self.robertson, self.det_abs_gap, self.det_gap,
                                     self.det_correlated, self.det_bound))

    def as_dict(self):
        d = {"i": self.i, "j": self.j, "epsilon": self.epsilon, "eta": self.eta,
             "sigma_a": self.sigma_a, "sigma_b": self.sigma_b,
             "commutator_abs": self.commutator_abs, "cross_abs": self.cross_abs,
             "pair_determinant": self.pair_determinant}
        for name in ("ozawa", "heisenberg", "robertson", "det_correlated", "det_bound", "det_abs_gap", "det_gap"):
            d[name] = getattr(self, name).as_dict()
        return d


def _sqrt0(x):
    return float(np.sqrt(max(x, 0.0)))


def scalar_checks(k_matrix, gamma, gexp, sigma_z, tol: Tolerances = DEFAULT_TOLERANCES) -> List[PairChecks]:
    """All scalar relations for every ``(i, j)`` pair.

    ``sigma_z`` is the symmetrised covariance of ``Z_in`` in the object
    state. Ratios are never formed so zero noise or disturbance is fine.
    """
    n = k_matrix.shape[0] // 2
    s = tol.scalar
    out = []
    for i in range(n):
        for j in range(n):
            a, b = i, n + j
            eps, eta = _sqrt0(k_matrix[a, a]), _sqrt0(k_matrix[b, b])
            sa, sb = _sqrt0(sigma_z[a, a]), _sqrt0(sigma_z[b, b])
            comm = abs(gexp[a, b])
            cross = abs(gamma[a, b])
            knd = k_matrix[a, b]
            total = gamma[a, b] + gexp[a, b]
            det = k_matrix[a, a] * k_matrix[b, b] - knd ** 2 - 0.25 * total ** 2
            out.append(PairChecks(
                i=i, j=j, epsilon=eps, eta=eta, sigma_a=sa, sigma_b=sb,
                commutator_abs=float(comm), cross_abs=float(cross),
                ozawa=_ineq(eps * eta + eps * sb + sa * eta, comm / 2, s),
                heisenberg=_ineq(eps * eta, comm / 2, s),
                robertson=_ineq(sa * sb, comm / 2, s),
                pair_determinant=float(det),
                det_correlated=_ineq(k_matrix[a, a] * k_matrix[b, b], knd ** 2 + 0.25 * total ** 2, s),
                det_bound=_ineq(k_matrix[a, a] * k_matrix[b, b], 0.25 * total ** 2, s),
                det_abs_gap=_ineq(eps * eta, 0.5 * abs(cross - comm), s),
                det_gap=_ineq(eps * eta, 0.5 * comm - 0.5 * cross, s),
            ))
    return out


@dataclass
class DerivationCheck:
    """Per-probe-vector residuals of the commutator identity and values of the Hermitian form."""

    identity_residuals: np.ndarray
    out_commutator_residuals: np.ndarray
    forms: np.ndarray
    verdict: PsdVerdict
    witness_form: Optional[float] = None

    @property
    def max_identity_residual(self) -> float:
        return float(np.max(self.identity_residuals, initial=0.0))

    def consistent(self, slack=1e-9) -> bool:
        """Forms non-negative when PSD; a negative witness when not."""
        if self.verdict.is_psd:
            return bool(np.all(self.forms >= -slack))
        return self.witness_form is not None and self.witness_form < 0


def derivation_identity_check(sys: NDSystem, state, probes, tol: Tolerances = DEFAULT_TOLERANCES) -> DerivationCheck:
    """Evaluate the commutator identity and the Hermitian form on each probe vector ``lam``.

    The identity residual is ``|lam^H (T_G + T_Gamma + T_KK) lam|`` with the
    three terms from :func:`identity_terms`; the out-commutator residual is the
    same form of ``<[dZ_out, dZ_out]>`` computed on its own. The form is
    ``lam^H (K + (i/2)(Gamma + Gexp)) lam``.
    """
    t_g, t_gamma, t_kk = identity_terms(sys, state)
    total = t_g + t_gamma + t_kk
    out_comm = comm_expectations(sys, sys.z_out, sys.z_out, state)
    k_matrix = nd_covariance(sys, state, tol)
    h = oup_matrix(k_matrix, gamma_matrix(sys, state, tol), g_matrix(sys, state, tol))
    verdict = psd_check(h, tol=tol.psd, hermitian_tol=tol.hermitian)
    lams = np.atleast_2d(np.asarray(probes, dtype=complex))
    if np.any(np.linalg.norm(lams, axis=1) == 0):
        raise ValueError("probe vectors must be nonzero")
    ident = np.abs(np.einsum("ka,ab,kb->k", lams.conj(), total, lams))
    outc = np.abs(np.einsum("ka,ab,kb->k", lams.conj(), out_comm, lams))
    forms = np.einsum("ka,ab,kb->k", lams.conj(), h, lams).real
    witness_form = None
    if not verdict.is_psd:
        w = np.array(verdict.witness)
        witness_form = float((w.conj() @ h @ w).real)
    return DerivationCheck(ident, outc, forms, verdict, witness_form)


@dataclass
class UncertaintyReport:
    model_name: str
    backend: str
    n: int
    K: np.ndarray
    Gamma: np.ndarray
    Gexp: np.ndarray
    sigma_z: np.ndarray
    matrix_oup: PsdVerdict
    heisenberg_matrix: PsdVerdict
    rsup: PsdVerdict
    pairs: List[PairChecks]
    independent_intervention: bool
    diagnostics: dict
    tolerances: Tolerances
    physicality: dict = field(default_factory=dict)

    @property
    def epsilon(self):
        return [float(np.sqrt(max(self.K[i, i], 0.0))) for i in range(self.n)]

    @property
    def eta(self):
        return [float(np.sqrt(max(self.K[self.n + j, self.n + j], 0.0))) for j in range(self.n)]

    @property
    def oup_matrix(self) -> np.ndarray:
        return oup_matrix(self.K, self.Gamma, self.Gexp)

    @property
    def all_hold(self) -> bool:
        """Every universally valid relation holds.

        The Heisenberg-type relations (scalar and matrix) are reported but
        not counted: they are known to fail for legitimate measurements.
        """
        return (self.matrix_oup.is_psd and self.rsup.is_psd
                and all(p.universal_hold for p in self.pairs))

    @property
    def exit_code(self) -> int:
        return 0 if self.all_hold else 2

    def as_dict(self) -> dict:
        return {
            "model": self.model_name,
            "backend": self.backend,
            "n": self.n,
            "K": self.K.tolist(),
            "Gamma": self.Gamma.tolist(),
            "Gexp": self.Gexp.tolist(),
            "sigma_z": self.sigma_z.tolist(),
            "epsilon": self.epsilon,
            "eta": self.eta,
            "matrix_oup": self.matrix_oup.as_dict(),
            "heisenberg_matrix": self.heisenberg_matrix.as_dict(),
            "rsup": self.rsup.as_dict(),
            "independent_intervention": self.independent_intervention,
            "pairs": [p.as_dict() for p in self.pairs],
            "physicality": {k: v.as_dict() for k, v in self.physicality.items()},
            "diagnostics": dict(self.diagnostics),
            "all_hold": self.all_hold,
        }


def _skew_residual(m, sign):
    return float(np.max(np.abs(m - sign * m.T), initial=0.0))


def analyze(model, tol: Tolerances = DEFAULT_TOLERANCES) -> UncertaintyReport:
    """Build the full report for ``model`` in its own initial state."""
    sys = build_nd_system(model, tol)
    state = model_state(model)
    k_matrix = nd_covariance(sys, state, tol)
    gamma = gamma_matrix(sys, state, tol)
    gexp = g_matrix(sys, state, tol)
    sigma_z = sym_covariance(sys, sys.z_in, sys.z_in, state, tol)
    t_g, t_gamma, t_kk = identity_terms(sys, state)
    gscale = max(1.0, float(np.max(np.abs(gexp))))

    physicality = {}
    if model.backend == "gaussian":
        physicality["object"] = physicality_check(
            model.object_moments, CanonicalAlgebra(model.object_modes, model.comm_constant), tol.psd)
        physicality["probe"] = physicality_check(
            model.probe_moments, CanonicalAlgebra(model.probe_modes, model.comm_constant), tol.psd)

    return UncertaintyReport(
        model_name=model.name,
        backend=model.backend,
        n=model.n,
        K=k_matrix,
        Gamma=gamma,
        Gexp=gexp,
        sigma_z=sigma_z,
        matrix_oup=matrix_oup(k_matrix, gamma, gexp, tol),
        heisenberg_matrix=psd_check(oup_matrix(k_matrix, 0.0 * gamma, gexp), tol=tol.psd,
                                    hermitian_tol=tol.hermitian),
        rsup=psd_check(sigma_z + 0.5j * gexp, tol=tol.psd, hermitian_tol=tol.hermitian),
        pairs=scalar_checks(k_matrix, gamma, gexp, sigma_z, tol),
        independent_intervention=bool(np.max(np.abs(gamma)) <= tol.hermitian * gscale),
        diagnostics={
            "commutation_residual": commutation_residual(sys),
            "identity_residual": float(np.max(np.abs(t_g + t_gamma + t_kk))),
            "K_symmetry_residual": _skew_residual(k_matrix, 1),
            "Gamma_skew_residual": _skew_residual(gamma, -1),
            "Gexp_skew_residual": _skew_residual(gexp, -1),
        },
        tolerances=tol,
        physicality=physicality,
    )
