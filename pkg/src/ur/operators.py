"""Finite-dimensional operator algebra.

Operators are plain complex ``numpy`` arrays. The functions here add the
checks the rest of the package relies on: Hermiticity and unitarity within
tolerance, normalised states, and a positivity certificate built on a
Hermitian eigensolver.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, MAX_COMPOSITE_DIM
from .errors import ContractViolation, ModelTooLarge, NumericalContamination, ShapeError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def as_operator(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ShapeError(f"operator must be a non-empty square matrix, got shape {a.shape}")
    return a


def hermitian_residual(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol=DEFAULT_TOLERANCES.hermitian) -> bool:
    m = as_operator(m)
    return hermitian_residual(m) <= tol * max(_matrix_norm(m), 1.0)


def unitary_residual(u) -> float:
    u = as_operator(u)
    return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))


def is_unitary(u, tol=DEFAULT_TOLERANCES.unitary) -> bool:
    return unitary_residual(u) <= tol


def _matrix_norm(m) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def tensor(a, b, max_dim=MAX_COMPOSITE_DIM) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` with the first factor as the slow index."""
    a, b = as_operator(a), as_operator(b)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise ModelTooLarge(f"composite dimension {dim} exceeds the limit {max_dim}")
    return np.kron(a, b)


def _same_shape(a, b):
    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def commutator(a, b) -> np.ndarray:
    a, b = _same_shape(a, b)
    return a @ b - b @ a


def sym_product(a, b) -> np.ndarray:
    """Symmetrised product ``(ab + ba)/2``; its expectation of ``(x, x)`` is ``<x^2>``."""
    a, b = _same_shape(a, b)
    return 0.5 * (a @ b + b @ a)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A pure vector or a density matrix on a finite Hilbert space."""

    kind: str
    data: np.ndarray

    def __post_init__(self):
        if self.kind not in ("pure", "density"):
            raise ValueError(f"kind must be 'pure' or 'density', got {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def pure(cls, vector, tol=DEFAULT_TOLERANCES.norm) -> "QuantumState":
        v = np.asarray(vector, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise ShapeError(f"pure state must be a non-empty vector, got shape {v.shape}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > tol:
            raise ContractViolation(f"state vector norm is {norm!r}, expected 1")
        v = v.copy()
        v.flags.writeable = False
        return cls("pure", v)

    @classmethod
    def density(cls, rho, tol=DEFAULT_TOLERANCES.norm, psd_tol=DEFAULT_TOLERANCES.psd) -> "QuantumState":
        rho = as_operator(rho).copy()
        res = hermitian_residual(rho)
        if res > tol * max(_matrix_norm(rho), 1.0):
            raise ContractViolation(f"density matrix is not Hermitian (residual {res:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > tol:
            raise ContractViolation(f"density matrix trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if lo < -psd_tol:
            raise ContractViolation(f"density matrix has negative eigenvalue {lo:.3e}")
        rho.flags.writeable = False
        return cls("density", rho)

    def density_matrix(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)

    def tensor(self, other: "QuantumState") -> "QuantumState":
        if self.kind == other.kind == "pure":
            return QuantumState("pure", np.kron(self.data, other.data))
        return QuantumState("density", np.kron(self.density_matrix(), other.density_matrix()))


def expectation(op, state: QuantumState) -> complex:
    op = as_operator(op)
    if op.shape[0] != state.dim:
        raise ShapeError(f"operator dimension {op.shape[0]} does not match state dimension {state.dim}")
    if state.kind == "pure":
        v = state.data
        return complex(np.vdot(v, op @ v))
    return complex(np.trace(state.data @ op))


def real_expectation(op, state: QuantumState, tol=DEFAULT_TOLERANCES.norm) -> float:
    """Expectation of a Hermitian operator with the imaginary residual checked and dropped."""
    val = expectation(op, state)
    if abs(val.imag) > tol * max(_matrix_norm(np.asarray(op)), 1.0):
        raise NumericalContamination(f"expectation of a Hermitian operator has imaginary part {val.imag:.3e}")
    return val.real


def centered(op, state: QuantumState) -> np.ndarray:
    """``op - <op> I``."""
    op = as_operator(op)
    return op - expectation(op, state).real * np.eye(op.shape[0])


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eigenvalue: float
    determinant: float
    determinant_imag: float
    tolerance_used: float
    eigenvalues: tuple = ()
    # eigenvector of the smallest eigenvalue; a refuting direction when not PSD
    witness: tuple = ()

    def as_dict(self) -> dict:
        return {
            "is_psd": self.is_psd,
            "min_eigenvalue": self.min_eigenvalue,
            "determinant": self.determinant,
            "determinant_imag": self.determinant_imag,
            "tolerance_used": self.tolerance_used,
            "eigenvalues": list(self.eigenvalues),
        }


def psd_check(m, tol=DEFAULT_TOLERANCES.psd, hermitian_tol=DEFAULT_TOLERANCES.hermitian) -> PsdVerdict:
    """Certify or refute positive semidefiniteness of a Hermitian matrix.

    The matrix is PSD when its smallest eigenvalue is at least
    ``-tol * scale``, where ``scale`` is the largest absolute eigenvalue
    (1 for the zero matrix).

    Raises
    ------
    ContractViolation
        If ``m`` is not Hermitian within ``hermitian_tol``.
    """
    m = as_operator(m)
    res = hermitian_residual(m)
    if res > hermitian_tol * max(_matrix_norm(m), 1.0):
        raise ContractViolation(f"matrix is not Hermitian (residual {res:.3e})")
    h = 0.5 * (m + m.conj().T)
    evals, evecs = np.linalg.eigh(h)
    scale = float(np.max(np.abs(evals)))
    if scale == 0.0:
        scale = 1.0
    lo = float(evals[0])
    det = complex(np.linalg.det(m))
    return PsdVerdict(
        is_psd=lo >= -tol * scale,
        min_eigenvalue=lo,
        determinant=det.real,
        determinant_imag=abs(det.imag),
        tolerance_used=tol,
        eigenvalues=tuple(float(e) for e in evals),
        witness=tuple(complex(x) for x in evecs[:, 0]),
    )


def heisenberg_out(u, op, tol=DEFAULT_TOLERANCES.unitary) -> np.ndarray:
    """Heisenberg-picture evolution ``u^† op u``."""
    u, op = _same_shape(u, op)
    res = unitary_residual(u)
    if res > tol:
        raise ContractViolation(f"evolution is not unitary (residual {res:.3e})")
    return u.conj().T @ op @ u


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def quadratures(dim: int, comm_constant: float = 0.5):
    """Truncated quadratures ``(X, Y)`` with ``[X, Y] = i c`` away from the cutoff."""
    a = annihilation(dim)
    s = np.sqrt(comm_constant / 2.0)
    return s * (a + a.conj().T), -1j * s * (a - a.conj().T)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(dim: int, rng: np.random.Generator) -> QuantumState:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return QuantumState.pure(v / np.linalg.norm(v))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)


def random_commuting_family(dim: int, count: int, rng: np.random.Generator):
    """``count`` Hermitian operators sharing a random eigenbasis."""
    v = haar_unitary(dim, rng)
    return [(v * rng.standard_normal(dim)) @ v.conj().T for _ in range(count)]
