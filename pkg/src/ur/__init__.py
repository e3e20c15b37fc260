"""Noise-disturbance uncertainty relations for quantum measurement models."""

__version__ = "0.1.0"

from .builtin import bae_model, cnot_model, identity_model, truncated_bae_model
from .config import Tolerances
from .measurement import UncertaintyReport, analyze, build_nd_system
from .model import FiniteModel, GaussianModel
from .operators import PsdVerdict, QuantumState, psd_check

__all__ = [
    "FiniteModel", "GaussianModel", "PsdVerdict", "QuantumState", "Tolerances",
    "UncertaintyReport", "analyze", "bae_model", "build_nd_system", "cnot_model",
    "identity_model", "psd_check", "truncated_bae_model",
]
