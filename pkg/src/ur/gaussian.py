"""Moment-level backend for linear observables of canonical modes.

Canonical vectors are ordered mode by mode, ``z = (x_1, y_1, ..., x_m, y_m)``,
so the commutation form is a direct sum of 2x2 blocks ``c [[0, 1], [-1, 0]]``.
Covariances use the symmetrised convention
``cov[a, b] = <(dz_a dz_b + dz_b dz_a) / 2>``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DomainError, ShapeError
from .operators import PsdVerdict, psd_check

# probe covariance used in the amplifier counterexample; not a physical state
COUNTEREXAMPLE_PROBE_COV = np.array([[0.25, 0.5], [0.5, 0.25]])
VACUUM_COV = np.diag([0.25, 0.25])


def direct_sum_form(modes: int) -> np.ndarray:
    """Mode-interleaved standard symplectic matrix of size ``2 modes``."""
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CanonicalAlgebra:
    modes: int
    comm_constant: float = 1.0

    def __post_init__(self):
        if self.modes < 1:
            raise DomainError(f"modes must be positive, got {self.modes}")
        if not self.comm_constant > 0:
            raise DomainError(f"comm_constant must be positive, got {self.comm_constant}")

    @property
    def size(self) -> int:
        return 2 * self.modes

    @property
    def omega(self) -> np.ndarray:
        return self.comm_constant * direct_sum_form(self.modes)


@dataclass(frozen=True, eq=False)
class LinearObservable:
    """``coeffs . z + offset``."""

    coeffs: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1:
            raise ShapeError(f"coefficients must be a vector, got shape {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def quadrature(cls, size: int, index: int, scale: float = 1.0) -> "LinearObservable":
        c = np.zeros(size)
        c[index] = scale
        return cls(c)

    def __add__(self, other):
        return LinearObservable(self.coeffs + other.coeffs, self.offset + other.offset)

    def __sub__(self, other):
        return LinearObservable(self.coeffs - other.coeffs, self.offset - other.offset)

    def __neg__(self):
        return LinearObservable(-self.coeffs, -self.offset)

    def __mul__(self, scalar):
        return LinearObservable(scalar * self.coeffs, scalar * self.offset)

    __rmul__ = __mul__

    def embed(self, size: int, start: int) -> "LinearObservable":
        """Place the coefficients at ``start`` inside a longer canonical vector."""
        c = np.zeros(size)
        c[start:start + len(self.coeffs)] = self.coeffs
        return LinearObservable(c, self.offset)

    def allclose(self, other, atol=1e-12) -> bool:
        return (self.coeffs.shape == other.coeffs.shape
                and np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol)
                and abs(self.offset - other.offset) <= atol)

    def __repr__(self):
        return f"LinearObservable(coeffs={self.coeffs.tolist()}, offset={self.offset})"


@dataclass(frozen=True, eq=False)
class GaussianMoments:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise ShapeError(f"moments need an even-length mean and matching square cov, "
                             f"got {mean.shape} and {cov.shape}")
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-12:
            raise ContractViolation("covariance matrix is not symmetric")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls, modes: int, comm_constant: float = 0.5) -> "GaussianMoments":
        return cls(np.zeros(2 * modes), 0.5 * comm_constant * np.eye(2 * modes))

    @property
    def size(self) -> int:
        return self.mean.size

    def join(self, other: "GaussianMoments") -> "GaussianMoments":
        """Moments of the product state, ``self`` occupying the leading modes."""
        n, m = self.size, other.size
        cov = np.zeros((n + m, n + m))
        cov[:n, :n] = self.cov
        cov[n:, n:] = other.cov
        return GaussianMoments(np.concatenate([self.mean, other.mean]), cov)


def symplectic_residual(matrix, form) -> float:
    s = np.asarray(matrix, dtype=float)
    return float(np.max(np.abs(s @ form @ s.T - form)))


@dataclass(frozen=True, eq=False)
class LinearChannel:
    """Heisenberg-picture map ``z_out = matrix @ z_in``, validated symplectic."""

    matrix: np.ndarray
    tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        s = np.array(self.matrix, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ShapeError(f"channel matrix must be square of even size, got {s.shape}")
        res = symplectic_residual(s, direct_sum_form(s.shape[0] // 2))
        if res > self.tol:
            raise ContractViolation(f"channel does not preserve the commutation form (residual {res:.3e})")
        s.flags.writeable = False
        object.__setattr__(self, "matrix", s)

    @classmethod
    def identity(cls, modes: int) -> "LinearChannel":
        return cls(np.eye(2 * modes))

    def compose(self, other: "LinearChannel") -> "LinearChannel":
        """``apply_channel(self.compose(other), u) == apply_channel(other, apply_channel(self, u))``."""
        return LinearChannel(self.matrix @ other.matrix)


def _check_len(u: LinearObservable, size: int):
    if u.coeffs.size != size:
        raise ShapeError(f"observable has {u.coeffs.size} coefficients, expected {size}")


def lin_commutator(u: LinearObservable, v: LinearObservable, alg: CanonicalAlgebra) -> complex:
    """``[u, v]``, a multiple of the identity."""
    _check_len(u, alg.size)
    _check_len(v, alg.size)
    return 1j * float(u.coeffs @ alg.omega @ v.coeffs)


def moment_expectation(u: LinearObservable, mom: GaussianMoments) -> float:
    _check_len(u, mom.size)
    return float(u.coeffs @ mom.mean) + u.offset


def moment_sym_cov(u: LinearObservable, v: LinearObservable, mom: GaussianMoments) -> float:
    _check_len(u, mom.size)
    _check_len(v, mom.size)
    return float(u.coeffs @ mom.cov @ v.coeffs)


def apply_channel(s: LinearChannel, u: LinearObservable) -> LinearObservable:
    """Express the evolved observable in terms of the input variables."""
    if not isinstance(s, LinearChannel):
        raise ContractViolation("apply_channel needs a validated LinearChannel")
    _check_len(u, s.matrix.shape[0])
    return LinearObservable(u.coeffs @ s.matrix, u.offset)


def bae_channel(gain: float) -> LinearChannel:
    """Backaction-evading quadrature amplifier on ``(x_a, y_a, x_b, y_b)``.

    ``x_b`` picks up ``gain * x_a`` and ``y_a`` picks up ``-gain * y_b``;
    ``x_a`` and ``y_b`` pass through unchanged.
    """
    if not gain > 0:
        raise DomainError(f"gain must be positive, got {gain}")
    return LinearChannel(np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, -gain],
        [gain, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]))


def physicality_check(mom: GaussianMoments, alg: CanonicalAlgebra, tol=1e-10) -> PsdVerdict:
    """Positivity of ``cov + (i/2) omega``, necessary for moments of a quantum state."""
    if mom.size != alg.size:
        raise ShapeError(f"moments of size {mom.size} do not match {alg.modes} modes")
    return psd_check(mom.cov + 0.5j * alg.omega, tol=tol)
