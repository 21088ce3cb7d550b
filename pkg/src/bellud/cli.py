"""Command-line front end.

Every subcommand reads flags, optionally merged over a flat JSON config file
(``--config``; flags win), and writes CSV or JSON to ``--out`` or stdout.
Angles are radians unless ``--degrees`` is given.  If only one of
``--theta1``/``--theta2`` is given, the other takes the same value.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.stats import unitary_group

from .detection import brute_force_distribution, outcome_distribution
from .discrimination import (D1_EVENTS, D2_EVENTS, D3_EVENTS, DEFAULT_EPSILON, UNIFORM,
                             closed_form_confidences, confidence, probability_table,
                             success_probability, _check_epsilon, _check_priors)
from .optics import ModeUnitary, optimal_discrimination_unitary, two_splitter_network
from .optimizer import DEFAULT_RESTARTS, DEFAULT_SEED, maximize_success, sweep_families
from .states import BellLikeFamily, TwoPhotonState, ValidationError

PRINT_FLOOR = 1e-14
COMMANDS = ("probs", "table", "confidence-sweep", "optimal-unitary", "optimize", "sweep", "verify")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    theta1: float | None = None
    theta2: float | None = None
    family_file: str | None = None
    state_file: str | None = None
    unitary_source: str = "optimal"  # "optimal" | "file" | "splitters"
    unitary_file: str | None = None
    eta1: float = 1 / math.sqrt(2)
    phi: float = 0.0
    priors: tuple[float, ...] = UNIFORM
    epsilon: float = DEFAULT_EPSILON
    out: str | None = None
    seed: int = DEFAULT_SEED
    restarts: int = DEFAULT_RESTARTS
    grid_file: str | None = None
    c1: float | None = None
    c2_points: int = 11
    phi_points: int = 17
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def family(self) -> BellLikeFamily:
        if self.family_file:
            with open(self.family_file) as fh:
                return BellLikeFamily.from_json(json.load(fh))
        t1, t2 = self.theta1, self.theta2
        if t1 is None and t2 is None:
            raise UsageError("need --theta1 and/or --theta2 (or --family-file)")
        t1 = t2 if t1 is None else t1
        t2 = t1 if t2 is None else t2
        return BellLikeFamily.from_angles(t1, t2)

    def unitary(self, family: BellLikeFamily | None = None) -> ModeUnitary:
        if self.unitary_source == "file":
            with open(self.unitary_file) as fh:
                return ModeUnitary.from_json(json.load(fh)).validate()
        if self.unitary_source == "splitters":
            return two_splitter_network(self.eta1, self.phi)
        return optimal_discrimination_unitary(family if family is not None else self.family())


def fmt(x: float) -> str:
    if abs(x) < PRINT_FLOOR:
        x = 0.0
    return "%.15g" % x


def _csv(rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- subcommands --------------------------------------------------------------------

def cmd_probs(cfg: RunConfig) -> str:
    if not cfg.state_file:
        raise UsageError("probs needs --state <file>")
    with open(cfg.state_file) as fh:
        state = TwoPhotonState.from_json(json.load(fh)).validate()
    dist = outcome_distribution(state, cfg.unitary()).validate()
    rows = [("m", "n", "probability")]
    rows += [(ev.m, ev.n, dist[ev]) for ev in sorted(dist)]
    return _csv(rows)


def cmd_table(cfg: RunConfig) -> str:
    fam = cfg.family()
    table = probability_table(fam, cfg.unitary(fam), cfg.priors).validate()
    rows = [["state"] + [f"ev_{ev.label()}" for ev in table.events]]
    rows += [[i + 1] + [float(v) for v in row] for i, row in enumerate(table.matrix)]
    return _csv(rows)


def cmd_confidence_sweep(cfg: RunConfig) -> str:
    if cfg.c1 is not None:
        c1 = cfg.c1
    elif cfg.theta1 is not None:
        c1 = math.sin(2 * cfg.theta1)
    else:
        c1 = 1.0
    rows = [("c2", "phi", "D1", "D2", "D3")]
    for c2 in np.linspace(0.0, 1.0, cfg.c2_points):
        for phi in np.linspace(0.0, math.pi / 2, cfg.phi_points):
            rows.append((float(c2), float(phi), *closed_form_confidences(c1, float(c2), float(phi))))
    return _csv(rows)


def cmd_optimal_unitary(cfg: RunConfig) -> str:
    return _json(optimal_discrimination_unitary(cfg.family()).to_json())


def cmd_optimize(cfg: RunConfig) -> str:
    res = maximize_success(cfg.family(), cfg.restarts, cfg.seed, cfg.epsilon, cfg.priors,
                           workers=cfg.workers)
    return _json(res.to_json())


def _read_grid(path: str, degrees: bool) -> list[tuple[float, float]]:
    grid = []
    with open(path) as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                t1, t2 = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            if degrees:
                t1, t2 = math.radians(t1), math.radians(t2)
            grid.append((t1, t2))
    return grid


def cmd_sweep(cfg: RunConfig) -> str:
    if not cfg.grid_file:
        raise UsageError("sweep needs --grid-file")
    results = sweep_families(_read_grid(cfg.grid_file, cfg.extra.get("degrees", False)),
                             cfg.restarts, cfg.seed, cfg.epsilon, workers=cfg.workers)
    rows = [("theta1", "theta2", "c2", "best_success")]
    rows += [(fam.theta1, fam.theta2, fam.concurrences[1], best) for fam, best in results]
    return _csv(rows)


def _expected_success(fam: BellLikeFamily) -> float | None:
    c1, c2 = fam.concurrences
    tol = 1e-12
    if tol < c2 < 1 - tol:
        return 0.25
    if abs(c1 - 1) <= tol and abs(c2 - 1) <= tol:
        return 0.5
    if c1 <= tol and c2 <= tol:
        return 1.0
    return None


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    """Deterministic end-to-end checks for one family; returns (report, all_passed)."""
    fam = cfg.family()
    lines = []
    ok_all = True

    def record(name, ok, detail=""):
        nonlocal ok_all
        ok_all &= ok
        lines.append(" ".join(filter(None, (name, detail, "PASS" if ok else "FAIL"))))

    u_opt = optimal_discrimination_unitary(fam)
    record("unitarity", u_opt.is_unitary(), f"err={u_opt.unitarity_error():.1e}")

    rng = np.random.default_rng(cfg.seed)
    worst_oracle, worst_norm = 0.0, 0.0
    unitaries = [u_opt] + [ModeUnitary(unitary_group.rvs(4, random_state=rng)) for _ in range(8)]
    for u in unitaries:
        for s in fam.states():
            a = outcome_distribution(s, u).as_array()
            b = brute_force_distribution(s, u).as_array()
            worst_oracle = max(worst_oracle, float(np.max(np.abs(a - b))))
            worst_norm = max(worst_norm, abs(float(a.sum()) - 1.0))
    record("oracle", worst_oracle < 1e-12, f"max_diff={worst_oracle:.1e}")
    record("normalization", worst_norm < 1e-10, f"max_dev={worst_norm:.1e}")

    if fam.is_real and fam.theta2 is not None and fam.theta2 <= math.pi / 4:
        c1, c2 = fam.concurrences
        worst = 0.0
        for phi in np.linspace(0, math.pi / 2, 9):
            table = probability_table(fam, two_splitter_network(1 / math.sqrt(2), phi))
            closed = closed_form_confidences(min(c1, 1.0), min(c2, 1.0), phi)
            for group, d in zip((D1_EVENTS, D2_EVENTS, D3_EVENTS), closed):
                for ev in group:
                    val, _ = confidence(table, ev)
                    if val is not None:
                        worst = max(worst, abs(val - d))
        record("closed_form_confidence", worst < 1e-10, f"max_diff={worst:.1e}")

    table = probability_table(fam, cfg.unitary(fam), cfg.priors)
    success = success_probability(table, cfg.epsilon)
    expected = _expected_success(fam) if cfg.unitary_source == "optimal" else None
    if expected is None:
        lines.append(f"success={success:.6f} INFO")
    else:
        record(f"success={success:.6f}", abs(success - expected) <= 1e-10)
    return "\n".join(lines) + "\n", ok_all


# --- argument handling --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellud", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat JSON object of option defaults")
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    p.add_argument("--family-file")
    p.add_argument("--state", dest="state_file")
    p.add_argument("--unitary-file", "--unitary", dest="unitary_file")
    p.add_argument("--eta1", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--priors")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--grid-file")
    p.add_argument("--c1", type=float)
    p.add_argument("--c2-points", type=int)
    p.add_argument("--phi-points", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--degrees", action="store_true", default=None)
    return p


_KEYS = ("theta1", "theta2", "family_file", "state_file", "unitary_file", "eta1", "phi",
         "priors", "epsilon", "out", "seed", "restarts", "grid_file", "c1", "c2_points",
         "phi_points", "workers", "degrees")


def make_config(args: argparse.Namespace) -> RunConfig:
    merged: dict[str, Any] = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
            raise UsageError("config file must be a flat JSON object")
        merged.update({k.replace("-", "_"): v for k, v in data.items()})
        if "unitary" in merged:
            merged.setdefault("unitary_file", merged.pop("unitary"))
        if "state" in merged:
            merged.setdefault("state_file", merged.pop("state"))
    for k in _KEYS:
        v = getattr(args, k)
        if v is not None:
            merged[k] = v
    unknown = set(merged) - set(_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")

    degrees = bool(merged.pop("degrees", False))
    for k in ("theta1", "theta2", "phi"):
        if degrees and merged.get(k) is not None:
            merged[k] = math.radians(float(merged[k]))

    sources = [s for s, present in (("file", merged.get("unitary_file") is not None),
                                    ("splitters", merged.get("eta1") is not None
                                     or merged.get("phi") is not None)) if present]
    if len(sources) > 1:
        raise UsageError("give exactly one unitary source: --unitary-file or splitter flags")
    priors = merged.pop("priors", None)
    if isinstance(priors, str):
        try:
            priors = tuple(float(x) for x in priors.split(","))
        except ValueError:
            raise UsageError(f"cannot parse --priors {priors!r}")
    cfg = RunConfig(command=args.command, unitary_source=sources[0] if sources else "optimal",
                    extra={"degrees": degrees})
    for k, v in merged.items():
        if v is not None:
            setattr(cfg, k, v)
    if priors is not None:
        cfg.priors = tuple(priors)
    _check_priors(cfg.priors)
    _check_epsilon(cfg.epsilon)
    if cfg.restarts < 1:
        raise ValidationError("restarts must be >= 1")
    return cfg


def run(cfg: RunConfig) -> int:
    handlers = {
        "probs": cmd_probs, "table": cmd_table, "confidence-sweep": cmd_confidence_sweep,
        "optimal-unitary": cmd_optimal_unitary, "optimize": cmd_optimize, "sweep": cmd_sweep,
    }
    status = 0
    if cfg.command == "verify":
        text, ok = cmd_verify(cfg)
        status = 0 if ok else 1
    else:
        text = handlers[cfg.command](cfg)
    if cfg.out:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        return run(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bellud: error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ArithmeticError) as exc:
        print(f"bellud: invariant violated: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
