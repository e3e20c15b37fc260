"""Measurement models: an object, a probe, observables and an interaction."""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .config import DEFAULT_TOLERANCES, MAX_COMPOSITE_DIM, Tolerances
from .errors import ContractViolation, ModelInvalid, ModelTooLarge, ShapeError
from .gaussian import CanonicalAlgebra, GaussianMoments, LinearChannel, LinearObservable
from .operators import (
    QuantumState,
    as_operator,
    commutator,
    hermitian_residual,
    tensor,
    unitary_residual,
)


def _check_commuting(ops, label, tol):
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            c = commutator(ops[i], ops[j])
            res = float(np.max(np.abs(c)))
            scale = max(np.linalg.norm(ops[i], 2) * np.linalg.norm(ops[j], 2), 1.0)
            if res > tol * scale:
                raise ModelInvalid(f"[{label}{i + 1}, {label}{j + 1}] != 0 (residual {res:.3e})")


@dataclass(frozen=True, eq=False)
class FiniteModel:
    """Object and probe on finite Hilbert spaces coupled by a unitary.

    ``A`` and ``B`` act on the object, ``M`` on the probe; ``unitary`` acts
    on ``object (x) probe`` with the object as the slow tensor index.
    """

    object_state: QuantumState
    probe_state: QuantumState
    A: Tuple[np.ndarray, ...]
    B: Tuple[np.ndarray, ...]
    M: Tuple[np.ndarray, ...]
    unitary: np.ndarray
    name: str = "custom"
    max_dim: int = field(default=MAX_COMPOSITE_DIM, repr=False)

    backend = "finite"

    def __post_init__(self):
        for label in ("A", "B", "M"):
            ops = tuple(as_operator(o) for o in getattr(self, label))
            object.__setattr__(self, label, ops)
        object.__setattr__(self, "unitary", as_operator(self.unitary))

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def object_dim(self) -> int:
        return self.object_state.dim

    @property
    def probe_dim(self) -> int:
        return self.probe_state.dim

    def composite_state(self) -> QuantumState:
        return self.object_state.tensor(self.probe_state)

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        n = self.n
        if n < 1 or len(self.B) != n or len(self.M) != n:
            raise ShapeError(f"need n >= 1 observables of each kind, got "
                             f"{len(self.A)} A, {len(self.B)} B, {len(self.M)} M")
        dim = self.object_dim * self.probe_dim
        if dim > self.max_dim:
            raise ModelTooLarge(f"composite dimension {dim} exceeds the limit {self.max_dim}")
        for label, ops, d in (("A", self.A, self.object_dim), ("B", self.B, self.object_dim),
                              ("M", self.M, self.probe_dim)):
            for i, op in enumerate(ops):
                if op.shape != (d, d):
                    raise ShapeError(f"{label}{i + 1} has shape {op.shape}, expected {(d, d)}")
                res = hermitian_residual(op)
                if res > tol.hermitian * max(np.linalg.norm(op, 2), 1.0):
                    raise ContractViolation(f"{label}{i + 1} is not Hermitian (residual {res:.3e})")
        if self.unitary.shape != (dim, dim):
            raise ShapeError(f"unitary has shape {self.unitary.shape}, expected {(dim, dim)}")
        res = unitary_residual(self.unitary)
        if res > tol.unitary:
            raise ContractViolation(f"interaction is not unitary (residual {res:.3e})")
        _check_commuting(self.A, "A", tol.hermitian)
        _check_commuting(self.B, "B", tol.hermitian)
        _check_commuting(self.M, "M", tol.hermitian)

    def embedded(self):
        """``(A_in, B_in, M_in)`` on the composite space."""
        i_obj = np.eye(self.object_dim)
        i_probe = np.eye(self.probe_dim)
        a = [tensor(op, i_probe, self.max_dim) for op in self.A]
        b = [tensor(op, i_probe, self.max_dim) for op in self.B]
        m = [tensor(i_obj, op, self.max_dim) for op in self.M]
        return a, b, m


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Object and probe modes coupled by a linear symplectic channel.

    ``A`` and ``B`` are linear forms over the object's canonical vector,
    ``M`` over the probe's. The channel acts on the joint vector with the
    object modes first.
    """

    object_moments: GaussianMoments
    probe_moments: GaussianMoments
    A: Tuple[LinearObservable, ...]
    B: Tuple[LinearObservable, ...]
    M: Tuple[LinearObservable, ...]
    channel: LinearChannel
    comm_constant: float = 1.0
    name: str = "custom"

    backend = "gaussian"

    def __post_init__(self):
        for label in ("A", "B", "M"):
            object.__setattr__(self, label, tuple(getattr(self, label)))

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def object_modes(self) -> int:
        return self.object_moments.size // 2

    @property
    def probe_modes(self) -> int:
        return self.probe_moments.size // 2

    @property
    def algebra(self) -> CanonicalAlgebra:
        return CanonicalAlgebra(self.object_modes + self.probe_modes, self.comm_constant)

    def joint_moments(self) -> GaussianMoments:
        return self.object_moments.join(self.probe_moments)

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        n = self.n
        if n < 1 or len(self.B) != n or len(self.M) != n:
            raise ShapeError(f"need n >= 1 observables of each kind, got "
                             f"{len(self.A)} A, {len(self.B)} B, {len(self.M)} M")
        sa, sb = self.object_moments.size, self.probe_moments.size
        for label, obs, size in (("A", self.A, sa), ("B", self.B, sa), ("M", self.M, sb)):
            for i, u in enumerate(obs):
                if u.coeffs.size != size:
                    raise ShapeError(f"{label}{i + 1} has {u.coeffs.size} coefficients, expected {size}")
        if self.channel.matrix.shape != (sa + sb, sa + sb):
            raise ShapeError(f"channel has shape {self.channel.matrix.shape}, expected {(sa + sb, sa + sb)}")
        omega_a = CanonicalAlgebra(self.object_modes, self.comm_constant).omega
        omega_b = CanonicalAlgebra(self.probe_modes, self.comm_constant).omega
        for label, obs, omega in (("A", self.A, omega_a), ("B", self.B, omega_a), ("M", self.M, omega_b)):
            for i in range(len(obs)):
                for j in range(i + 1, len(obs)):
                    res = abs(float(obs[i].coeffs @ omega @ obs[j].coeffs))
                    if res > tol.hermitian * max(1.0, self.comm_constant):
                        raise ModelInvalid(f"[{label}{i + 1}, {label}{j + 1}] != 0 (residual {res:.3e})")

    def embedded(self):
        size = self.object_moments.size + self.probe_moments.size
        a = [u.embed(size, 0) for u in self.A]
        b = [u.embed(size, 0) for u in self.B]
        m = [u.embed(size, self.object_moments.size) for u in self.M]
        return a, b, m
