"""Ready-made measurement models."""

import numpy as np

from .errors import DomainError
from .gaussian import (
    COUNTEREXAMPLE_PROBE_COV,
    VACUUM_COV,
    GaussianMoments,
    LinearObservable,
    bae_channel,
)
from .model import FiniteModel, GaussianModel
from .operators import CNOT, PAULI_X, PAULI_Z, QuantumState, quadratures

QUADRATURE_COMM = 0.5
PLUS_I = np.array([1.0, 1.0j]) / np.sqrt(2.0)
KET0 = np.array([1.0, 0.0])


def bae_model(gain: float, probe_cov=COUNTEREXAMPLE_PROBE_COV, object_cov=VACUUM_COV,
              object_mean=(0.0, 0.0), probe_mean=(0.0, 0.0)) -> GaussianModel:
    """Backaction-evading amplifier measuring ``x_a`` with meter ``x_b / gain``.

    The default probe covariance is the counterexample assignment
    ``[[1/4, 1/2], [1/2, 1/4]]``, which is not the covariance of any
    quantum state; pass ``VACUUM_COV`` for a physical probe.
    """
    if not gain > 0:
        raise DomainError(f"gain must be positive, got {gain}")
    return GaussianModel(
        object_moments=GaussianMoments(object_mean, object_cov),
        probe_moments=GaussianMoments(probe_mean, probe_cov),
        A=(LinearObservable([1.0, 0.0]),),
        B=(LinearObservable([0.0, 1.0]),),
        M=(LinearObservable([1.0 / gain, 0.0]),),
        channel=bae_channel(gain),
        comm_constant=QUADRATURE_COMM,
        name="bae",
    )


def identity_model(psi=PLUS_I) -> FiniteModel:
    """Qubit probe that never interacts; the meter mirrors ``A`` on the probe."""
    return FiniteModel(
        object_state=QuantumState.pure(psi),
        probe_state=QuantumState.pure(KET0),
        A=(PAULI_Z,), B=(PAULI_X,), M=(PAULI_Z,),
        unitary=np.eye(4),
        name="identity",
    )


def cnot_model(psi=PLUS_I) -> FiniteModel:
    """CNOT copies the ``z`` basis of the object qubit onto a probe in ``|0>``."""
    return FiniteModel(
        object_state=QuantumState.pure(psi),
        probe_state=QuantumState.pure(KET0),
        A=(PAULI_Z,), B=(PAULI_X,), M=(PAULI_Z,),
        unitary=CNOT,
        name="cnot",
    )


def truncated_bae_model(gain: float, dim: int = 30) -> FiniteModel:
    """The amplifier on two truncated oscillators, both in the vacuum.

    The interaction is ``exp(-2i gain x_a (x) y_b)``; in the untruncated
    limit it reproduces the linear map of :func:`ur.gaussian.bae_channel`.
    """
    if not gain > 0:
        raise DomainError(f"gain must be positive, got {gain}")
    x, y = quadratures(dim, QUADRATURE_COMM)
    lx, vx = np.linalg.eigh(x)
    ly, vy = np.linalg.eigh(y)
    v = np.kron(vx, vy)
    phases = np.exp(-2j * gain * np.kron(lx, ly))
    u = (v * phases) @ v.conj().T
    vac = np.zeros(dim)
    vac[0] = 1.0
    return FiniteModel(
        object_state=QuantumState.pure(vac),
        probe_state=QuantumState.pure(vac),
        A=(x,), B=(y,), M=(x / gain,),
        unitary=u,
        name="bae-truncated",
    )


BUILTIN = {
    "bae": bae_model,
    "identity": identity_model,
    "cnot": cnot_model,
}
