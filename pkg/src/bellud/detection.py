"""Two-photon detection statistics behind a linear-optical network.

Three independent routes to the same numbers:

* :func:`event_probability` evaluates one event with the pi-map matrix
  elements between columns of U† (slow, literal);
* :func:`outcome_distribution` evaluates every event with the backend kernel;
* :func:`brute_force_distribution` expands the output polynomial in b†
  operators term by term and reads off monomial coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from . import kernels
from .optics import ModeUnitary
from .states import TwoPhotonState, ValidationError

MIN_DIM, MAX_DIM = 4, 8
NORM_TOL = 1e-10


@dataclass(frozen=True, order=True)
class DetectionEvent:
    """Photons in detectors m and n (1-based, stored with m <= n)."""

    m: int
    n: int

    def __post_init__(self):
        if self.m > self.n:
            m, n = self.n, self.m
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "n", n)
        if self.m < 1:
            raise ValidationError(f"detector index must be >= 1, got {self.m}")

    @property
    def bunched(self) -> bool:
        return self.m == self.n

    def check(self, dim: int) -> "DetectionEvent":
        if self.n > dim:
            raise ValidationError(f"event {self} out of range for {dim} modes")
        return self

    def label(self) -> str:
        return f"{self.m}{self.n}"

    def __str__(self) -> str:
        return f"({self.m},{self.n})"


def events(dim: int) -> list[DetectionEvent]:
    """All events in kernel order: bunched (1,1)..(dim,dim), then pairs lexicographically."""
    return ([DetectionEvent(i, i) for i in range(1, dim + 1)]
            + [DetectionEvent(i, j) for i in range(1, dim + 1) for j in range(i + 1, dim + 1)])


def as_event(ev) -> DetectionEvent:
    return ev if isinstance(ev, DetectionEvent) else DetectionEvent(*ev)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    dim: int
    probs: Mapping[DetectionEvent, float]

    @classmethod
    def from_array(cls, dim: int, values) -> "OutcomeDistribution":
        return cls(dim, dict(zip(events(dim), (float(v) for v in values))))

    def __getitem__(self, ev) -> float:
        return self.probs[as_event(ev)]

    def __iter__(self) -> Iterator[DetectionEvent]:
        return iter(self.probs)

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def as_array(self) -> np.ndarray:
        return np.array([self.probs[ev] for ev in events(self.dim)])

    def validate(self, tol: float = NORM_TOL) -> "OutcomeDistribution":
        vals = self.as_array()
        if np.any(vals < -tol) or np.any(vals > 1 + tol):
            raise ValidationError("probability outside [0, 1]")
        if abs(self.total() - 1.0) > tol:
            raise ValidationError(f"distribution sums to {self.total()!r}")
        return self


def _check_dim(dim: int) -> None:
    if not (MIN_DIM <= dim <= MAX_DIM):
        raise ValidationError(f"dim={dim} outside supported range {MIN_DIM}..{MAX_DIM}")


def _n_matrix(state: TwoPhotonState, dim: int) -> np.ndarray:
    n = np.zeros((dim, dim), dtype=complex)
    n[:2, 2:4] = state.coeffs
    return n


def pi_map(state: TwoPhotonState, dim: int = 4) -> np.ndarray:
    """Symmetric matrix N + N^T: [[0, A], [A^T, 0]] on the first four modes, zero-padded."""
    if dim < 4:
        raise ValidationError(f"pi map needs dim >= 4, got {dim}")
    n = _n_matrix(state, dim)
    return n + n.T


def _bracket(u: np.ndarray, x: np.ndarray, n: int, m: int) -> complex:
    # <phi_n| X |phi*_m>, phi*_m = m-th column of U†, phi_n = n-th column of U^T
    phi_star_m = u.conj().T[:, m]
    phi_n = u.T[:, n]
    return complex(phi_n.conj() @ x @ phi_star_m)


def event_amplitude(state: TwoPhotonState, u: ModeUnitary, ev) -> complex:
    """Probability amplitude of ``ev``; bunched events carry the 1/√2 of the double-occupancy norm."""
    ev = as_event(ev).check(u.dim)
    pi = pi_map(state, u.dim)
    m, n = ev.m - 1, ev.n - 1
    val = _bracket(u.matrix, pi, n, m)
    return val / math.sqrt(2) if ev.bunched else val


def event_probability(state: TwoPhotonState, u: ModeUnitary, ev) -> float:
    ev = as_event(ev).check(u.dim)
    _check_dim(u.dim)
    m, n = ev.m - 1, ev.n - 1
    pi = pi_map(state, u.dim)
    if ev.bunched:
        p = 0.5 * abs(_bracket(u.matrix, pi, m, m)) ** 2
        # the symmetrized form must agree with 2|<phi_m|N|phi*_m>|^2
        p_direct = 2 * abs(_bracket(u.matrix, _n_matrix(state, u.dim), m, m)) ** 2
        if abs(p - p_direct) > 1e-12:
            raise ArithmeticError(f"bunched-event forms disagree: {p!r} vs {p_direct!r}")
        return p
    return abs(_bracket(u.matrix, pi, n, m)) ** 2


def outcome_distribution(state: TwoPhotonState, u: ModeUnitary) -> OutcomeDistribution:
    _check_dim(u.dim)
    probs = kernels.event_probabilities(u.matrix, state.coeffs[None, :, :])[0]
    return OutcomeDistribution.from_array(u.dim, probs)


def brute_force_distribution(state: TwoPhotonState, u: ModeUnitary) -> OutcomeDistribution:
    """Expand sum_jk a_jk a†_j a†_k with a†_j = sum_l U*_lj b†_l and square the coefficients."""
    _check_dim(u.dim)
    dim = u.dim
    mat = u.matrix.tolist()
    poly: dict[tuple[int, int], complex] = {}
    for j in range(2):
        for k in range(2, 4):
            alpha = complex(state.coeffs[j, k - 2])
            if alpha == 0:
                continue
            for l in range(dim):
                for m in range(dim):
                    key = (min(l, m), max(l, m))
                    term = alpha * mat[l][j].conjugate() * mat[m][k].conjugate()
                    poly[key] = poly.get(key, 0j) + term
    probs = {}
    for ev in events(dim):
        c = poly.get((ev.m - 1, ev.n - 1), 0j)
        # b†² |0> = √2 |2>
        amp = c * math.sqrt(2) if ev.bunched else c
        probs[ev] = abs(amp) ** 2
    return OutcomeDistribution(dim, probs)
