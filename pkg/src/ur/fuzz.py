"""Seeded random measurement models and fuzz campaigns.

Every trial draws from its own child of ``numpy.random.SeedSequence(seed)``
so a campaign is reproducible and may be split across workers without
changing its result.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .builtin import bae_model
from .config import DEFAULT_TOLERANCES, Tolerances
from .gaussian import GaussianMoments, LinearChannel, LinearObservable
from .measurement import analyze, build_nd_system, derivation_identity_check, model_state
from .model import FiniteModel, GaussianModel
from .modelfile import model_to_doc
from .operators import haar_unitary, random_commuting_family, random_pure_state
from .symplectic import random_symplectic

NEAR_ZERO_MARGIN = 1e-3
OZAWA_SLACK = 1e-3


def random_finite_model(object_dim, probe_dim, rng, n=1, name="fuzz") -> FiniteModel:
    """Haar interaction, random pure product state, random commuting observables."""
    return FiniteModel(
        object_state=random_pure_state(object_dim, rng),
        probe_state=random_pure_state(probe_dim, rng),
        A=random_commuting_family(object_dim, n, rng),
        B=random_commuting_family(object_dim, n, rng),
        M=random_commuting_family(probe_dim, n, rng),
        unitary=haar_unitary(object_dim * probe_dim, rng),
        name=name,
    )


def standard_to_interleaved(matrix) -> np.ndarray:
    """Reorder ``(x_1..x_m, y_1..y_m)`` coordinates into ``(x_1, y_1, ...)``."""
    m = matrix.shape[0] // 2
    order = np.ravel(np.column_stack([np.arange(m), np.arange(m, 2 * m)]))
    return np.asarray(matrix)[np.ix_(order, order)]


def random_pure_moments(modes, comm_constant, rng) -> GaussianMoments:
    s = standard_to_interleaved(random_symplectic(modes, int(rng.integers(2 ** 63))).matrix)
    cov = 0.5 * comm_constant * s @ s.T
    return GaussianMoments(rng.standard_normal(2 * modes), 0.5 * (cov + cov.T))


def random_gaussian_model(modes, rng, comm_constant=0.5, name="fuzz") -> GaussianModel:
    """Random pure Gaussian object and probe, random symplectic channel, ``n = 1``."""
    total = 2 * modes
    ch = standard_to_interleaved(random_symplectic(total, int(rng.integers(2 ** 63))).matrix)
    return GaussianModel(
        object_moments=random_pure_moments(modes, comm_constant, rng),
        probe_moments=random_pure_moments(modes, comm_constant, rng),
        A=(LinearObservable(rng.standard_normal(2 * modes)),),
        B=(LinearObservable(rng.standard_normal(2 * modes)),),
        M=(LinearObservable(rng.standard_normal(2 * modes)),),
        channel=LinearChannel(ch),
        comm_constant=comm_constant,
        name=name,
    )


@dataclass
class TrialResult:
    index: int
    physical: bool
    is_psd: bool
    margin: float
    ozawa_slack: float
    heisenberg_holds: bool
    identity_max: float
    commutation: float
    chain_ok: bool
    doc: dict

    @property
    def near_zero(self) -> bool:
        return self.ozawa_slack > OZAWA_SLACK and self.margin < NEAR_ZERO_MARGIN


def run_trial(model, index, rng, lambdas=100, tol: Tolerances = DEFAULT_TOLERANCES) -> TrialResult:
    report = analyze(model, tol)
    sys = build_nd_system(model, tol)
    size = 2 * model.n
    lams = rng.standard_normal((lambdas, size)) + 1j * rng.standard_normal((lambdas, size))
    check = derivation_identity_check(sys, model_state(model), lams, tol)
    scale = max(abs(e) for e in report.matrix_oup.eigenvalues) or 1.0
    physical = all(v.is_psd for v in report.physicality.values())
    slack = min(p.ozawa.lhs - p.ozawa.rhs for p in report.pairs)
    return TrialResult(
        index=index,
        physical=physical,
        is_psd=report.matrix_oup.is_psd,
        margin=report.matrix_oup.min_eigenvalue / scale,
        ozawa_slack=slack,
        heisenberg_holds=all(p.heisenberg.holds for p in report.pairs),
        identity_max=check.max_identity_residual,
        commutation=report.diagnostics["commutation_residual"],
        chain_ok=all(p.det_abs_gap.holds and p.det_gap.holds for p in report.pairs),
        doc=model_to_doc(model),
    )


def _trial_task(args):
    backend, dims, modes, n, seq, index, lambdas, tol = args
    rng = np.random.default_rng(seq)
    if backend == "finite":
        model = random_finite_model(dims[0], dims[1], rng, n=n, name=f"fuzz-{index}")
    else:
        model = random_gaussian_model(modes, rng, name=f"fuzz-{index}")
    return run_trial(model, index, rng, lambdas, tol)


def run_campaign(backend="finite", dims=(2, 2), modes=1, trials=100, seed=0, n=1, lambdas=100,
                 include_counterexample=False, jobs=1, tol: Tolerances = DEFAULT_TOLERANCES):
    """Run ``trials`` random models and summarise what was found.

    The summary never contains timings so that equal seeds give equal output.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if backend not in ("finite", "gaussian"):
        raise ValueError(f"backend must be 'finite' or 'gaussian', got {backend!r}")
    children = np.random.SeedSequence(seed).spawn(trials)
    tasks = [(backend, tuple(dims), modes, n, children[i], i, lambdas, tol) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial_task, tasks))
    else:
        results = [_trial_task(t) for t in tasks]
    if include_counterexample:
        rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(trials + 1)[-1])
        results.append(run_trial(bae_model(1.0), trials, rng, lambdas, tol))
    return summarize(results, backend, dims, modes, trials, seed, n)


def summarize(results, backend, dims, modes, trials, seed, n) -> dict:
    physical = [r for r in results if r.physical]
    unphysical = [r for r in results if not r.physical]
    violations = [r for r in physical if not r.is_psd]
    identity = np.array([r.identity_max for r in results])
    tightest = min(physical, key=lambda r: r.margin) if physical else None
    summary = {
        "backend": backend,
        "dims": list(dims) if backend == "finite" else None,
        "modes": modes if backend == "gaussian" else None,
        "n": n,
        "trials": trials,
        "seed": seed,
        "physical_models": len(physical),
        "physical_violations": len(violations),
        "violation_indices": [r.index for r in violations],
        "unphysical_models": len(unphysical),
        "unphysical_violations": sum(not r.is_psd for r in unphysical),
        # scalar product relation holds yet the matrix relation fails
        "scalar_holds_matrix_violated": [r.index for r in results if r.heisenberg_holds and not r.is_psd],
        "near_zero_margin_with_ozawa_slack": sum(r.near_zero for r in physical),
        "determinant_chain_failures_when_psd": sum(r.is_psd and not r.chain_ok for r in results),
        "identity_residual": {"max": float(identity.max()), "mean": float(identity.mean())},
        "commutation_residual_max": float(max(r.commutation for r in results)),
        "min_margin": float(tightest.margin) if tightest else None,
        "extremal": {
            "tightest_physical": tightest.doc if tightest else None,
            "violations": [r.doc for r in violations],
            "unphysical_violations": [r.doc for r in unphysical if not r.is_psd],
        },
    }
    return summary
