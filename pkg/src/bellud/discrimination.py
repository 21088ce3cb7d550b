"""Probability tables, Bayes confidences and unambiguous-event analysis."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .detection import (DetectionEvent, OutcomeDistribution, _bracket, as_event, events,
                        pi_map)
from .optics import ModeUnitary, two_splitter_network
from .states import BellLikeFamily, TwoPhotonState, ValidationError, bell_like_states

DEFAULT_EPSILON = 1e-9
# joint probability below this is treated as an event that cannot fire
UNDEFINED_FLOOR = 1e-20
FIRING_FLOOR = 1e-12
CONSTRAINT_TOL = 1e-10
UNIFORM = (0.25, 0.25, 0.25, 0.25)

# Event groups of the two-splitter network (splitters on (1,3) and (2,4)) that
# share one closed-form confidence.  (1,3) never fires for Bell-like inputs.
D1_EVENTS = tuple(DetectionEvent(*e) for e in ((1, 1), (2, 2), (3, 3), (4, 4), (2, 4)))
D2_EVENTS = (DetectionEvent(1, 2), DetectionEvent(1, 4))
D3_EVENTS = (DetectionEvent(2, 3), DetectionEvent(3, 4))


def _check_priors(priors: Sequence[float]) -> np.ndarray:
    p = np.asarray(priors, dtype=float)
    if p.shape != (4,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError(f"priors must be 4 non-negative numbers summing to 1, got {list(p)}")
    return p


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon <= 0.1):
        raise ValidationError(f"epsilon={epsilon!r} outside (0, 0.1]")


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Row i holds P(event | Psi_{i+1}) over ``events(dim)``."""

    matrix: np.ndarray
    priors: np.ndarray
    dim: int = 4

    @property
    def rows(self) -> list[OutcomeDistribution]:
        return [OutcomeDistribution.from_array(self.dim, r) for r in self.matrix]

    @property
    def events(self) -> list[DetectionEvent]:
        return events(self.dim)

    def column(self, ev) -> np.ndarray:
        return self.matrix[:, self.events.index(as_event(ev))]

    def validate(self, tol: float = 1e-10) -> "ProbabilityTable":
        for row in self.rows:
            row.validate(tol)
        _check_priors(self.priors)
        return self


def probability_table(family: BellLikeFamily, u: ModeUnitary,
                      priors: Sequence[float] = UNIFORM) -> ProbabilityTable:
    p = _check_priors(priors)
    coeffs = np.stack([s.coeffs for s in bell_like_states(family)])
    return ProbabilityTable(kernels.event_probabilities(u.matrix, coeffs), p, u.dim)


def _confidences(matrix: np.ndarray, priors: np.ndarray):
    joint = priors[:, None] * matrix
    denom = joint.sum(axis=0)
    best = joint.argmax(axis=0)
    top = joint[best, np.arange(joint.shape[1])]
    defined = denom > UNDEFINED_FLOOR
    conf = np.where(defined, top / np.where(defined, denom, 1.0), np.nan)
    return conf, best, defined


def confidence(table: ProbabilityTable, ev) -> tuple[float | None, int | None]:
    """Bayes confidence max_i P(Psi_i | ev) and the 0-based index of the maximizer.

    Returns ``(None, None)`` when the event cannot fire for any input.
    """
    col = table.column(ev)
    joint = table.priors * col
    denom = float(joint.sum())
    if denom <= UNDEFINED_FLOOR:
        return None, None
    i = int(np.argmax(joint))
    return float(joint[i] / denom), i


def confidence_report(table: ProbabilityTable, epsilon: float = DEFAULT_EPSILON) -> list[dict]:
    conf, best, defined = _confidences(table.matrix, table.priors)
    out = []
    for k, ev in enumerate(table.events):
        ok = bool(defined[k])
        d = float(conf[k]) if ok else None
        out.append({"event": ev, "confidence": d, "state": int(best[k]) if ok else None,
                    "unambiguous": ok and d >= 1 - epsilon
                    and table.matrix[best[k], k] >= FIRING_FLOOR})
    return out


def closed_form_confidences(c1: float, c2: float, phi: float) -> tuple[float, float, float]:
    """(D1, D2, D3) of the two-splitter network as functions of the concurrences and phi."""
    for name, c in (("c1", c1), ("c2", c2)):
        if not (0.0 <= c <= 1.0):
            raise ValidationError(f"{name}={c!r} outside [0, 1]")
    r1 = math.sqrt(max(0.0, 1 - c1 * c1))
    r2 = math.sqrt(max(0.0, 1 - c2 * c2))
    c, s = math.cos(2 * phi), math.sin(2 * phi)
    return ((1 + r1) / 2, (1 + abs(r2 * c + c2 * s)) / 2, (1 + abs(r2 * c - c2 * s)) / 2)


def unambiguous_mask(matrix: np.ndarray, priors: np.ndarray, epsilon: float):
    """Boolean mask of unambiguous events and the identified state per event."""
    conf, best, defined = _confidences(matrix, priors)
    fires = matrix[best, np.arange(matrix.shape[1])] >= FIRING_FLOOR
    mask = defined & fires & (np.nan_to_num(conf) >= 1 - epsilon)
    return mask, best


def success_from_matrix(matrix: np.ndarray, priors: np.ndarray, epsilon: float) -> float:
    mask, best = unambiguous_mask(matrix, priors, epsilon)
    cols = np.flatnonzero(mask)
    return float(np.sum(priors[best[cols]] * matrix[best[cols], cols]))


def unambiguous_events(table: ProbabilityTable,
                       epsilon: float = DEFAULT_EPSILON) -> list[tuple[DetectionEvent, int]]:
    _check_epsilon(epsilon)
    mask, best = unambiguous_mask(table.matrix, table.priors, epsilon)
    evs = table.events
    return [(evs[k], int(best[k])) for k in np.flatnonzero(mask)]


def success_probability(table: ProbabilityTable, epsilon: float = DEFAULT_EPSILON) -> float:
    _check_epsilon(epsilon)
    return success_from_matrix(table.matrix, table.priors, epsilon)


# --- constraints on the columns of U† ---------------------------------------------

@dataclass(frozen=True)
class ColumnDecomposition:
    """m-th column of U† split as u (modes 1-2) ⊕ v (modes 3-4) ⊕ w (the rest)."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def column(self) -> np.ndarray:
        return np.concatenate([self.u, self.v, self.w])


def column_decomposition(u: ModeUnitary, m: int) -> ColumnDecomposition:
    if u.dim < 4:
        raise ValidationError("column decomposition needs dim >= 4")
    if not (1 <= m <= u.dim):
        raise ValidationError(f"column {m} out of range 1..{u.dim}")
    col = u.dagger[:, m - 1]
    return ColumnDecomposition(col[:2].copy(), col[2:4].copy(), col[4:].copy())


def bracket_from_decomposition(state: TwoPhotonState, u: ModeUnitary, l: int, m: int) -> complex:
    """<phi_l| pi(e) |phi*_m> using pi(e)|phi*_m> = A v_m ⊕ A^T u_m ⊕ 0."""
    a = state.coeffs
    dl, dm = column_decomposition(u, l), column_decomposition(u, m)
    # phi_l is the complex conjugate of phi*_l, so the bra is a plain transpose of phi*_l
    return complex(dl.u @ (a @ dm.v) + dl.v @ (a.T @ dm.u))


_BASIS = {
    "00": TwoPhotonState.from_amplitudes(a13=1),
    "01": TwoPhotonState.from_amplitudes(a14=1),
    "10": TwoPhotonState.from_amplitudes(a23=1),
    "11": TwoPhotonState.from_amplitudes(a24=1),
}


@dataclass(frozen=True)
class ConstraintReport:
    """Residuals of the unambiguous-discrimination conditions for one event.

    ``residuals`` maps each non-target state index (0-based) to the magnitude of
    its detection amplitude, all of which must vanish; ``target_amplitude`` must
    not.  ``conditions`` names them: the two vanishing conditions on the other
    pair, the non-vanishing target condition, and the cross condition on the
    target's partner.
    """

    event: DetectionEvent
    target: int
    residuals: dict
    target_amplitude: float
    conditions: dict
    passed: bool


def check_unambiguous_constraints(u: ModeUnitary, family: BellLikeFamily, l: int, m: int,
                                  target: int, tol: float = CONSTRAINT_TOL) -> ConstraintReport:
    if target not in range(4):
        raise ValidationError(f"target index {target} outside 0..3")
    ev = DetectionEvent(l, m).check(u.dim)
    li, mi = ev.n - 1, ev.m - 1
    scale = 1 / math.sqrt(2) if ev.bunched else 1.0
    x = {b: _bracket(u.matrix, pi_map(s, u.dim), li, mi) * scale for b, s in _BASIS.items()}
    a1, b1, a2, b2 = family.alpha1, family.beta1, family.alpha2, family.beta2
    amps = [
        a1 * x["00"] + b1 * x["11"],
        b1.conjugate() * x["00"] - a1.conjugate() * x["11"],
        a2 * x["01"] + b2 * x["10"],
        b2.conjugate() * x["01"] - a2.conjugate() * x["10"],
    ]
    partner = target ^ 1
    others = [i for i in range(4) if i // 2 != target // 2]
    residuals = {i: abs(amps[i]) for i in range(4) if i != target}
    t_amp = abs(amps[target])
    conditions = {
        f"vanish_psi{others[0] + 1}": residuals[others[0]] <= tol,
        f"vanish_psi{others[1] + 1}": residuals[others[1]] <= tol,
        f"nonzero_psi{target + 1}": t_amp > tol,
        f"cross_psi{partner + 1}": residuals[partner] <= tol,
    }
    return ConstraintReport(ev, target, residuals, t_amp, conditions, all(conditions.values()))


# --- closed-form reference table for two splitters -----------------------------------------------

def reference_table(theta1: float, theta2: float, phi: float) -> dict[DetectionEvent, np.ndarray]:
    """Closed-form reference table for the two-splitter network, keyed by event."""
    c1, s1 = math.cos(theta1) ** 2, math.sin(theta1) ** 2
    s2p, c2p = math.sin(2 * phi) ** 2, math.cos(2 * phi) ** 2
    cm, sm = math.cos(theta2 - phi) ** 2, math.sin(theta2 - phi) ** 2
    cp, sp = math.cos(theta2 + phi) ** 2, math.sin(theta2 + phi) ** 2
    rows = [
        [c1 * s2p / 2, s1 / 2, c1 * s2p / 2, s1 / 2, 0, c1 * c2p, 0, 0, 0, 0],
        [s1 * s2p / 2, c1 / 2, s1 * s2p / 2, c1 / 2, 0, s1 * c2p, 0, 0, 0, 0],
        [0, 0, 0, 0, cm / 2, 0, cm / 2, sp / 2, 0, sp / 2],
        [0, 0, 0, 0, sm / 2, 0, sm / 2, cp / 2, 0, cp / 2],
    ]
    arr = np.array(rows)
    return {ev: arr[:, k] for k, ev in enumerate(events(4))}


@dataclass(frozen=True)
class TableComparison:
    relabeling: tuple[int, ...]
    mismatches: list
    reference_row_sums: np.ndarray

    @property
    def matched_cells(self) -> int:
        return 40 - len(self.mismatches)


def compare_reference_table(theta1: float, theta2: float, phi: float,
                          tol: float = 1e-10) -> TableComparison:
    """Best detector relabeling between the simulated and reference tables.

    ``relabeling[i]`` is the reference label of simulated detector i+1.  Cells that
    still disagree under the best relabeling are returned as
    ``(state, reference_event, simulated, reference)`` tuples.
    """
    sim = probability_table(BellLikeFamily.from_angles(theta1, theta2),
                            two_splitter_network(1 / math.sqrt(2), phi)).matrix
    ref = reference_table(theta1, theta2, phi)
    evs = events(4)
    best = None
    for perm in itertools.permutations(range(1, 5)):
        bad = []
        for k, ev in enumerate(evs):
            mapped = DetectionEvent(perm[ev.m - 1], perm[ev.n - 1])
            for s in range(4):
                if abs(sim[s, k] - ref[mapped][s]) > tol:
                    bad.append((s, mapped, float(sim[s, k]), float(ref[mapped][s])))
        if best is None or len(bad) < len(best[1]):
            best = (perm, bad)
    sums = np.sum([ref[ev] for ev in evs], axis=0)
    return TableComparison(best[0], sorted(best[1], key=lambda t: (t[0], t[1])), sums)
