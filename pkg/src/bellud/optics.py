"""Mode unitaries: beam splitters, phase shifters, networks and the 4-mode mesh.

Convention: output creation operators are b†_i = sum_j U[i, j] a†_j, and mode
labels in the public API are 1-based like the optical diagrams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .states import BellLikeFamily, ValidationError, _pair

UNITARY_TOL = 1e-10

# Mode pairs of the triangular mesh, in the order the rotations act.
MESH_PAIRS: tuple[tuple[int, int], ...] = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    matrix: np.ndarray

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValidationError(f"mode unitary must be square, got shape {u.shape}")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> np.ndarray:
        return self.matrix.conj().T

    def unitarity_error(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u.conj().T @ u - np.eye(self.dim))))

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() <= tol

    def validate(self, tol: float = UNITARY_TOL) -> "ModeUnitary":
        err = self.unitarity_error()
        if err > tol:
            raise ValidationError(f"U^dagger U deviates from identity by {err:.3e}")
        return self

    def embed(self, dim: int) -> "ModeUnitary":
        """Pad with identity on extra (empty) modes."""
        if dim < self.dim:
            raise ValidationError(f"cannot embed dim {self.dim} into {dim}")
        out = np.eye(dim, dtype=complex)
        out[: self.dim, : self.dim] = self.matrix
        return ModeUnitary(out)

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return ModeUnitary(self.matrix @ other.matrix)

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "entries": [[_pair(z) for z in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ModeUnitary":
        entries = np.array(data["entries"], dtype=float)
        dim = int(data.get("dim", entries.shape[0]))
        if entries.shape != (dim, dim, 2):
            raise ValidationError(f"entries shape {entries.shape} does not match dim {dim}")
        return cls(entries[..., 0] + 1j * entries[..., 1])

    @classmethod
    def identity(cls, dim: int = 4) -> "ModeUnitary":
        return cls(np.eye(dim, dtype=complex))


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    eta: float
    phase: float = 0.0

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValidationError("beam splitter needs two distinct modes")
        if not (0.0 <= self.eta <= 1.0):
            raise ValidationError(f"eta={self.eta!r} outside [0, 1]")


@dataclass(frozen=True)
class NetworkParams:
    """Six rotation angles and six phases of the triangular mesh.

    Rotation k acts on ``MESH_PAIRS[k]``.  ``output_phases`` is a final
    diagonal layer on the detectors; it never changes detection statistics, so
    the optimizer leaves it at zero and only decompositions fill it in.
    """

    angles: tuple[float, ...] = (0.0,) * 6
    phases: tuple[float, ...] = (0.0,) * 6
    output_phases: tuple[float, ...] = field(default=(0.0,) * 4)

    def __post_init__(self):
        for name, n in (("angles", 6), ("phases", 6), ("output_phases", 4)):
            vals = tuple(float(x) for x in getattr(self, name))
            if len(vals) != n:
                raise ValidationError(f"{name} needs {n} entries, got {len(vals)}")
            object.__setattr__(self, name, vals)

    def as_vector(self) -> np.ndarray:
        return np.array(self.angles + self.phases)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "NetworkParams":
        x = [float(v) for v in x]
        if len(x) != 12:
            raise ValidationError(f"expected 12 mesh parameters, got {len(x)}")
        return cls(tuple(x[:6]), tuple(x[6:]))

    def to_json(self) -> dict:
        return {"angles": list(self.angles), "phases": list(self.phases),
                "output_phases": list(self.output_phases)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "NetworkParams":
        return cls(tuple(data["angles"]), tuple(data["phases"]),
                   tuple(data.get("output_phases", (0.0,) * 4)))


def _check_mode(mode: int, dim: int) -> None:
    if not (1 <= mode <= dim):
        raise ValidationError(f"mode {mode} out of range 1..{dim}")


def beam_splitter_unitary(bs: BeamSplitter, dim: int = 4) -> ModeUnitary:
    """Identity except [[eta, t e^{i phase}], [-t e^{-i phase}, eta]] on (mode_a, mode_b)."""
    _check_mode(bs.mode_a, dim)
    _check_mode(bs.mode_b, dim)
    a, b = bs.mode_a - 1, bs.mode_b - 1
    t = math.sqrt(max(0.0, 1.0 - bs.eta ** 2))
    u = np.eye(dim, dtype=complex)
    u[a, a] = bs.eta
    u[a, b] = t * np.exp(1j * bs.phase)
    u[b, a] = -t * np.exp(-1j * bs.phase)
    u[b, b] = bs.eta
    return ModeUnitary(u)


def phase_shifter(mode: int, phase: float, dim: int = 4) -> ModeUnitary:
    _check_mode(mode, dim)
    u = np.eye(dim, dtype=complex)
    u[mode - 1, mode - 1] = np.exp(1j * phase)
    return ModeUnitary(u)


def compose(elements: Iterable[ModeUnitary]) -> ModeUnitary:
    """Network of ``elements``; the first element acts first on the input modes."""
    elements = list(elements)
    if not elements:
        raise ValidationError("compose needs at least one element")
    dim = elements[0].dim
    out = np.eye(dim, dtype=complex)
    for el in elements:
        if el.dim != dim:
            raise ValidationError(f"dimension mismatch: {el.dim} vs {dim}")
        out = el.matrix @ out
    return ModeUnitary(out)


def two_splitter_network(eta1: float, phi: float, dim: int = 4) -> ModeUnitary:
    """Splitter eta1 on modes (1, 3) in parallel with eta2 = cos(phi) on (2, 4).

    The second block is filled from cos(phi) and sin(phi) directly; going through
    eta2 would lose sin(phi) near phi = 0 and the sign for phi outside [0, pi/2].
    """
    u = np.array(beam_splitter_unitary(BeamSplitter(1, 3, eta1), dim).matrix)
    u[np.ix_([1, 3], [1, 3])] = _rotation_block(phi, 0.0).real
    return ModeUnitary(u)


def optimal_discrimination_unitary(family: BellLikeFamily) -> ModeUnitary:
    """Network whose U† is the optimal matrix for the family's (alpha2, beta2).

    U† = [[1/√2, 0, -1/√2, 0], [0, β2, 0, -α2], [1/√2, 0, 1/√2, 0], [0, α2*, 0, β2*]]
    For real amplitudes this is ``two_splitter_network(1/√2, theta2)``.
    """
    r = 1 / math.sqrt(2)
    a2, b2 = family.alpha2, family.beta2
    u_dag = np.array([
        [r, 0, -r, 0],
        [0, b2, 0, -a2],
        [r, 0, r, 0],
        [0, a2.conjugate(), 0, b2.conjugate()],
    ], dtype=complex)
    return ModeUnitary(u_dag.conj().T)


def _rotation_block(theta: float, phi: float) -> np.ndarray:
    c, s, e = math.cos(theta), math.sin(theta), complex(math.cos(phi), math.sin(phi))
    return np.array([[e * c, s], [-e * s, c]])


def mesh_unitary(params: NetworkParams) -> ModeUnitary:
    """U = D · T6 ··· T1, with T_k a rotation on ``MESH_PAIRS[k]``.

    T(theta, phi) = [[e^{i phi} cos, sin], [-e^{i phi} sin, cos]], so phi = 0
    gives the beam splitter with eta = cos(theta).
    """
    u = np.eye(4, dtype=complex)
    for (a, b), theta, phi in zip(MESH_PAIRS, params.angles, params.phases):
        idx = [a - 1, b - 1]
        u[idx, :] = _rotation_block(theta, phi) @ u[idx, :]
    return ModeUnitary(np.exp(1j * np.array(params.output_phases))[:, None] * u)


def decompose_mesh(u: ModeUnitary) -> NetworkParams:
    """Inverse of :func:`mesh_unitary` for a 4x4 unitary.

    Right-multiplying by T_k^{-1} clears entry (a, b); following MESH_PAIRS this
    clears the strict upper triangle, which for a unitary leaves a diagonal.
    """
    if u.dim != 4:
        raise ValidationError("mesh decomposition is defined for 4 modes")
    w = np.array(u.matrix)
    angles, phases = [], []
    for a, b in MESH_PAIRS:
        i, j = a - 1, b - 1
        x, y = w[i, i], w[i, j]
        theta = math.atan2(abs(y), abs(x))
        phi = float(np.angle(x) - np.angle(y)) if abs(x) > 0 and abs(y) > 0 else 0.0
        phi = math.remainder(phi, 2 * math.pi)
        t_inv = _rotation_block(theta, phi).conj().T
        w[:, [i, j]] = w[:, [i, j]] @ t_inv
        angles.append(theta)
        phases.append(phi)
    return NetworkParams(tuple(angles), tuple(phases), tuple(np.angle(np.diag(w))))
