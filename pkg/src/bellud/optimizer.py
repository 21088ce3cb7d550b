"""Multi-start search for the best unambiguous success over 4-mode networks.

The hard objective (success probability counting only events with confidence
>= 1 - epsilon) is zero almost everywhere, so each restart is refined on a
confidence-weighted surrogate

    S_k(x) = sum_e top_e * (top_e / total_e) ** k,

where top_e is the largest joint probability p_i P(e | Psi_i) of event e and
total_e their sum.  A Nelder-Mead run is made for each k in an increasing
schedule, each starting where the previous stopped; large k drives leakage into
the chosen events to zero.  Every reported value is the hard objective.

Random starts are drawn from ``numpy.random.default_rng(seed)`` (PCG64),
uniform on [0, 2*pi) for all twelve parameters, in restart order.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .discrimination import DEFAULT_EPSILON, UNIFORM, probability_table, success_probability
from .optics import NetworkParams, mesh_unitary
from .states import BellLikeFamily, ValidationError, bell_like_states

DEFAULT_RESTARTS = 64
DEFAULT_SEED = 7
DEFAULT_POWERS = (1.0, 8.0, 64.0, 512.0, 4096.0, 32768.0, 262144.0)
XATOL = 1e-7
FATOL = 1e-15
MAXFEV = 20000


def params_digest(params: NetworkParams) -> str:
    return hashlib.sha256(np.asarray(params.as_vector(), dtype="<f8").tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class TraceEntry:
    restart: int
    stage: int
    digest: str
    objective: float


@dataclass
class OptimizationResult:
    best_params: NetworkParams
    best_success: float
    evaluations: int
    seed: int
    restarts: int
    converged: bool
    best_restart: int
    trace: list[TraceEntry] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "best_success": self.best_success,
            "best_params": self.best_params.to_json(),
            "seed": self.seed,
            "evaluations": self.evaluations,
            "restarts": self.restarts,
            "converged": self.converged,
        }


def objective(params: NetworkParams, family: BellLikeFamily,
              epsilon: float = DEFAULT_EPSILON, priors: Sequence[float] = UNIFORM) -> float:
    return success_probability(probability_table(family, mesh_unitary(params), priors), epsilon)


def _refine(start, coeffs, priors, powers):
    return kernels.anneal(start, coeffs, priors, powers, XATOL, FATOL, MAXFEV)


def maximize_success(family: BellLikeFamily, restarts: int = DEFAULT_RESTARTS,
                     seed: int = DEFAULT_SEED, epsilon: float = DEFAULT_EPSILON,
                     priors: Sequence[float] = UNIFORM,
                     powers: Sequence[float] = DEFAULT_POWERS,
                     workers: int = 1) -> OptimizationResult:
    """Best hard success found over ``restarts`` annealed simplex refinements.

    Restart results are merged by maximum, ties going to the lowest restart
    index, so ``workers`` changes wall time but not the answer.
    """
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = rng.uniform(0.0, 2 * math.pi, size=(restarts, 12))
    coeffs = np.stack([s.coeffs for s in bell_like_states(family)])
    pri = np.asarray(priors, dtype=float)
    powers = tuple(float(p) for p in powers)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda s: _refine(s, coeffs, pri, powers), starts))
    else:
        runs = [_refine(s, coeffs, pri, powers) for s in starts]

    trace: list[TraceEntry] = []
    evaluations = 0
    best = None  # (value, restart, params, converged)
    for r, (start, (xs, nfev, conv)) in enumerate(zip(starts, runs)):
        evaluations += int(np.sum(nfev))
        inc_params = NetworkParams.from_vector(start)
        inc_val = objective(inc_params, family, epsilon, priors)
        inc_conv = True
        trace.append(TraceEntry(r, 0, params_digest(inc_params), inc_val))
        for stage, (x, ok) in enumerate(zip(xs, conv), 1):
            cand = NetworkParams.from_vector(x)
            val = objective(cand, family, epsilon, priors)
            if val >= inc_val:
                inc_params, inc_val, inc_conv = cand, val, bool(ok)
                trace.append(TraceEntry(r, stage, params_digest(cand), val))
        if best is None or inc_val > best[0]:
            best = (inc_val, r, inc_params, inc_conv)
    value, r_best, params, converged = best
    return OptimizationResult(params, value, evaluations, seed, restarts, converged, r_best, trace)


def sweep_families(theta_grid: Iterable[tuple[float, float]], restarts: int = DEFAULT_RESTARTS,
                   seed: int = DEFAULT_SEED, epsilon: float = DEFAULT_EPSILON,
                   workers: int = 1) -> list[tuple[BellLikeFamily, float]]:
    grid = list(theta_grid)
    if not grid:
        raise ValidationError("theta grid is empty")
    out = []
    for theta1, theta2 in grid:
        fam = BellLikeFamily.from_angles(theta1, theta2)
        res = maximize_success(fam, restarts, seed, epsilon, workers=workers)
        out.append((fam, res.best_success))
    return out
