"""Numerical tolerances and their resolution from environment and flags."""

import os
from dataclasses import dataclass, replace

ENV_VAR = "UR_TOL"
MAX_COMPOSITE_DIM = 4096


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    unitary: float = 1e-10
    norm: float = 1e-10
    psd: float = 1e-10
    # slack for scalar inequalities, relative to max(1, |rhs|)
    scalar: float = 1e-9

    def with_all(self, value: float) -> "Tolerances":
        return replace(self, hermitian=value, unitary=value, norm=value,
                       psd=value, scalar=value)

    def as_dict(self) -> dict:
        return {"hermitian": self.hermitian, "unitary": self.unitary,
                "norm": self.norm, "psd": self.psd, "scalar": self.scalar}


DEFAULT_TOLERANCES = Tolerances()


def resolve_tolerances(flag=None, environ=None) -> Tolerances:
    """Defaults, then ``UR_TOL``, then the command-line flag (which wins)."""
    environ = os.environ if environ is None else environ
    tol = DEFAULT_TOLERANCES
    env_value = environ.get(ENV_VAR)
    if env_value:
        try:
            tol = tol.with_all(float(env_value))
        except ValueError as exc:
            raise ValueError(f"{ENV_VAR} must be a number, got {env_value!r}") from exc
    if flag is not None:
        tol = tol.with_all(float(flag))
    return tol
