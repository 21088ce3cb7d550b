"""Two-photon dual-rail states and the Bell-like family.

A state is a superposition of one photon in modes {1, 2} and one photon in
modes {3, 4}; its four amplitudes are stored as a 2x2 array ``coeffs`` with
``coeffs[j, k]`` the amplitude of a†_{j+1} a†_{k+3}|0>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

NORM_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a normalization or range invariant."""


def _as_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    return complex(value)


def _pair(z: complex) -> list[float]:
    # + 0.0 turns -0.0 into 0.0
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(2, 2)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_amplitudes(cls, a13=0.0, a14=0.0, a23=0.0, a24=0.0) -> "TwoPhotonState":
        return cls(np.array([[a13, a14], [a23, a24]], dtype=complex))

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm ** 2 - 1.0) <= tol

    def validate(self, tol: float = NORM_TOL) -> "TwoPhotonState":
        if not self.is_normalized(tol):
            raise ValidationError(f"state norm^2 = {self.norm ** 2!r}, expected 1")
        return self

    def __mul__(self, scalar: complex) -> "TwoPhotonState":
        return TwoPhotonState(self.coeffs * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "TwoPhotonState") -> "TwoPhotonState":
        return TwoPhotonState(self.coeffs + other.coeffs)

    def to_json(self) -> dict:
        c = self.coeffs
        return {"a13": _pair(c[0, 0]), "a14": _pair(c[0, 1]),
                "a23": _pair(c[1, 0]), "a24": _pair(c[1, 1])}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TwoPhotonState":
        return cls.from_amplitudes(*(_as_complex(data.get(k, 0.0))
                                     for k in ("a13", "a14", "a23", "a24")))


@dataclass(frozen=True)
class BellLikeFamily:
    """Parameters (alpha1, beta1, alpha2, beta2) of the four Bell-like states.

    ``theta1``/``theta2`` are kept when the family was built from the real
    form, where alpha = sin(theta) and beta = cos(theta).
    """

    alpha1: complex
    beta1: complex
    alpha2: complex
    beta2: complex
    theta1: float | None = field(default=None, compare=False)
    theta2: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("alpha1", "beta1", "alpha2", "beta2"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for i, (a, b) in enumerate([(self.alpha1, self.beta1), (self.alpha2, self.beta2)], 1):
            n2 = abs(a) ** 2 + abs(b) ** 2
            if abs(n2 - 1.0) > NORM_TOL:
                raise ValidationError(f"|alpha{i}|^2 + |beta{i}|^2 = {n2!r}, expected 1")

    @classmethod
    def from_angles(cls, theta1: float, theta2: float) -> "BellLikeFamily":
        for name, t in (("theta1", theta1), ("theta2", theta2)):
            if not (0.0 <= t <= math.pi / 2) or not math.isfinite(t):
                raise ValidationError(f"{name}={t!r} outside [0, pi/2]")
        return cls(math.sin(theta1), math.cos(theta1), math.sin(theta2), math.cos(theta2),
                   theta1=float(theta1), theta2=float(theta2))

    @classmethod
    def bell(cls) -> "BellLikeFamily":
        return cls.from_angles(math.pi / 4, math.pi / 4)

    @property
    def is_real(self) -> bool:
        return all(z.imag == 0.0 for z in (self.alpha1, self.beta1, self.alpha2, self.beta2))

    @property
    def concurrences(self) -> tuple[float, float]:
        """(C1, C2): concurrence of the pair (Psi1, Psi2) and of (Psi3, Psi4)."""
        return (2 * abs(self.alpha1 * self.beta1), 2 * abs(self.alpha2 * self.beta2))

    def states(self) -> list[TwoPhotonState]:
        return bell_like_states(self)

    def to_json(self) -> dict:
        if self.theta1 is not None and self.theta2 is not None:
            return {"theta1": self.theta1, "theta2": self.theta2}
        return {"alpha1": _pair(self.alpha1), "beta1": _pair(self.beta1),
                "alpha2": _pair(self.alpha2), "beta2": _pair(self.beta2)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "BellLikeFamily":
        if "theta1" in data or "theta2" in data:
            return cls.from_angles(float(data["theta1"]), float(data["theta2"]))
        return cls(*(_as_complex(data[k]) for k in ("alpha1", "beta1", "alpha2", "beta2")))


def bell_like_states(family: BellLikeFamily) -> list[TwoPhotonState]:
    """Return [Psi1, Psi2, Psi3, Psi4] for ``family``.

    Psi1 = a1 a13 + b1 a24,   Psi2 = b1* a13 - a1* a24,
    Psi3 = a2 a14 + b2 a23,   Psi4 = b2* a14 - a2* a23.
    """
    a1, b1, a2, b2 = family.alpha1, family.beta1, family.alpha2, family.beta2
    mk = TwoPhotonState.from_amplitudes
    return [
        mk(a13=a1, a24=b1),
        mk(a13=b1.conjugate(), a24=-a1.conjugate()),
        mk(a14=a2, a23=b2),
        mk(a14=b2.conjugate(), a23=-a2.conjugate()),
    ]


def concurrence(state: TwoPhotonState) -> float:
    """Pure-state concurrence 2|a13 a24 - a14 a23|, in [0, 1]."""
    state.validate()
    c = state.coeffs
    return float(min(1.0, 2 * abs(c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0])))


def coefficient_matrix(state: TwoPhotonState) -> np.ndarray:
    """The 2x2 matrix [[a13, a14], [a23, a24]]."""
    return np.array(state.coeffs, dtype=complex)


def inner_product(a: TwoPhotonState, b: TwoPhotonState) -> complex:
    return complex(np.vdot(a.coeffs, b.coeffs))
