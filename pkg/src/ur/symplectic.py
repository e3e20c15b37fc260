"""Symplectic maps acting on the noise/disturbance vector.

Here the ``2n`` components are ordered ``(N_1..N_n, D_1..D_n)`` so the
standard form is ``J = [[0, I], [-I, 0]]``.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import PremiseError, ShapeError
from .measurement import analyze, oup_matrix
from .operators import PsdVerdict, psd_check


@lru_cache(maxsize=None)
def standard_form(n: int) -> np.ndarray:
    """Read-only ``[[0, I], [-I, 0]]``, cached since it is rebuilt in hot loops."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    j.flags.writeable = False
    return j


def is_symplectic(matrix, tol=1e-10):
    """Return ``(ok, residual)`` with ``residual = max |S J S^T - J|``."""
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise ShapeError(f"need a square matrix of even size, got {s.shape}")
    j = standard_form(s.shape[0] // 2)
    res = float(np.max(np.abs(s @ j @ s.T - j)))
    return res <= tol, res


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2 * self.n, 2 * self.n):
            raise ShapeError(f"expected a {2 * self.n}x{2 * self.n} matrix, got {m.shape}")
        ok, res = is_symplectic(m)
        if not ok:
            raise ShapeError(f"matrix is not symplectic (residual {res:.3e})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def rotation(angle: float) -> np.ndarray:
    """``[[cos, sin], [-sin, cos]]``; at ``pi/4`` this is ``(1/sqrt 2)[[1, 1], [-1, 1]]``."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def symplectic_exp(generator) -> np.ndarray:
    """``expm(J H)`` for a symmetric ``H``, which is always symplectic."""
    h = np.asarray(generator, dtype=float)
    return expm(standard_form(h.shape[0] // 2) @ h)


def random_symplectic(n: int, seed) -> SymplecticMap:
    if n < 1:
        raise ShapeError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    h = rng.uniform(-1.0, 1.0, size=(2 * n, 2 * n))
    h = 0.5 * (h + h.T) / (2 * n)
    return SymplecticMap(n, symplectic_exp(h))


@dataclass
class TransformedND:
    K: np.ndarray
    Gamma: np.ndarray
    Gexp: np.ndarray
    # True when Gexp was gamma*J and so is left unchanged
    gexp_invariant: bool


def transform_nd(s, k_matrix, gamma, gexp, tol=1e-10) -> TransformedND:
    """Congruence of the three matrices by ``S``.

    ``Gexp`` proportional to ``J`` is left fixed; anything else is
    transformed as well and flagged, since invariance then no longer applies.
    """
    s = s.matrix if isinstance(s, SymplecticMap) else np.asarray(s, dtype=float)
    k_matrix, gamma, gexp = (np.asarray(x, dtype=float) for x in (k_matrix, gamma, gexp))
    if not (s.shape == k_matrix.shape == gamma.shape == gexp.shape):
        raise ShapeError("S, K, Gamma and Gexp must share one square shape")
    j = standard_form(s.shape[0] // 2)
    g = gexp_scale(gexp, tol)
    if g is not None:
        new_gexp, invariant = g * j, True
    else:
        new_gexp, invariant = s @ gexp @ s.T, False
    return TransformedND(s @ k_matrix @ s.T, s @ gamma @ s.T, new_gexp, invariant)


def gexp_scale(gexp, tol=1e-10) -> Optional[float]:
    """``gamma`` if ``gexp == gamma J`` within ``tol``, else ``None``."""
    gexp = np.asarray(gexp, dtype=float)
    j = standard_form(gexp.shape[0] // 2)
    g = float(np.sum(gexp * j) / np.sum(j * j))
    if np.max(np.abs(gexp - g * j)) <= tol * max(1.0, abs(g)):
        return g
    return None


def heisenberg_form_verdict(k_matrix, gamma_scale, tol=1e-10) -> PsdVerdict:
    j = standard_form(k_matrix.shape[0] // 2)
    return psd_check(k_matrix + 0.5j * gamma_scale * j, tol=tol)


@dataclass
class RotatedOzawa:
    angle: float
    bound: float
    epsilon: float
    eta: float
    epsilon_rot: float
    eta_rot: float
    correlation_rot: float
    original_holds: bool
    # the product relation evaluated naively on the rotated quantities
    naive_rot_lhs: float
    naive_rot_holds: bool
    # sum form at pi/4: eps'^2 + eta'^2 >= 2 sqrt(bound^2 + corr'^2)
    sum_lhs: Optional[float]
    sum_rhs: Optional[float]
    sum_holds: Optional[bool]
    # the printed right side sqrt(1 + 4 corr'^2), which is the bound = 1/2 case
    literal_sum_rhs: Optional[float]
    matrix_before: PsdVerdict
    matrix_after: PsdVerdict

    def as_dict(self):
        d = {k: v for k, v in self.__dict__.items() if not isinstance(v, PsdVerdict)}
        d["matrix_before"] = self.matrix_before.as_dict()
        d["matrix_after"] = self.matrix_after.as_dict()
        return d


def rotated_ozawa_from_matrices(k_matrix, gamma, gexp, angle, tol: Tolerances = DEFAULT_TOLERANCES) -> RotatedOzawa:
    """Rotate a single noise/disturbance pair and compare scalar and matrix relations.

    Raises
    ------
    PremiseError
        Unless ``n == 1``, ``Gamma == 0`` and ``Gexp`` is proportional to ``J``.
    """
    k_matrix = np.asarray(k_matrix, dtype=float)
    if k_matrix.shape != (2, 2):
        raise PremiseError(f"rotation experiment needs n = 1, got K of shape {k_matrix.shape}")
    gres = float(np.max(np.abs(gamma)))
    if gres > tol.hermitian * max(1.0, float(np.max(np.abs(gexp)))):
        raise PremiseError(f"interaction is not of independent intervention (max |Gamma| = {gres:.3e})")
    g = gexp_scale(gexp, tol.hermitian)
    if g is None:
        raise PremiseError("Gexp is not proportional to J")
    r = rotation(angle)
    kr = r @ k_matrix @ r.T
    bound = abs(g) / 2.0
    eps, eta = np.sqrt(max(k_matrix[0, 0], 0.0)), np.sqrt(max(k_matrix[1, 1], 0.0))
    eps_r, eta_r = np.sqrt(max(kr[0, 0], 0.0)), np.sqrt(max(kr[1, 1], 0.0))
    corr = float(kr[0, 1])
    slack = tol.scalar
    sum_lhs = sum_rhs = sum_holds = literal = None
    if np.isclose(np.mod(angle, 2 * np.pi), np.pi / 4, rtol=0, atol=1e-12):
        sum_lhs = float(kr[0, 0] + kr[1, 1])
        sum_rhs = float(2.0 * np.sqrt(bound ** 2 + corr ** 2))
        sum_holds = bool(sum_lhs >= sum_rhs - slack * max(1.0, sum_rhs))
        literal = float(np.sqrt(1.0 + 4.0 * corr ** 2))
    return RotatedOzawa(
        angle=float(angle), bound=bound,
        epsilon=float(eps), eta=float(eta),
        epsilon_rot=float(eps_r), eta_rot=float(eta_r), correlation_rot=corr,
        original_holds=bool(eps * eta >= bound - slack * max(1.0, bound)),
        naive_rot_lhs=float(eps_r * eta_r),
        naive_rot_holds=bool(eps_r * eta_r >= bound - slack * max(1.0, bound)),
        sum_lhs=sum_lhs, sum_rhs=sum_rhs, sum_holds=sum_holds, literal_sum_rhs=literal,
        matrix_before=psd_check(oup_matrix(k_matrix, 0.0, gexp), tol=tol.psd),
        matrix_after=psd_check(oup_matrix(kr, 0.0, gexp), tol=tol.psd),
    )


def rotated_ozawa_experiment(model, angle: float, tol: Tolerances = DEFAULT_TOLERANCES) -> RotatedOzawa:
    report = analyze(model, tol)
    return rotated_ozawa_from_matrices(report.K, report.Gamma, report.Gexp, angle, tol)
