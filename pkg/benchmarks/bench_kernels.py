"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from bellud import BellLikeFamily, _kernels_py
from bellud.optimizer import DEFAULT_POWERS

try:
    from bellud import _kernels as _compiled
except ImportError:
    _compiled = None


def cases():
    rng = np.random.default_rng(0)
    coeffs = np.stack([s.coeffs for s in BellLikeFamily.from_angles(0.5, 0.4).states()])
    priors = np.full(4, 0.25)
    x = rng.uniform(0, 2 * np.pi, 12)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    return {
        "event_probabilities (dim 6)": (lambda k: k.event_probabilities(q, coeffs), 2000),
        "mesh_event_probabilities": (lambda k: k.mesh_event_probabilities(x, coeffs), 2000),
        "surrogate": (lambda k: k.surrogate(x, coeffs, priors, 64.0), 2000),
        "anneal (1 restart)": (lambda k: k.anneal(x, coeffs, priors, DEFAULT_POWERS), 1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    print(f"{'kernel':32s}" + "".join(f"{name:>14s}" for name, _ in backends) + "   speedup")
    for label, (fn, number) in cases().items():
        per_call = []
        for _, mod in backends:
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat))
            per_call.append(best / number)
        cells = "".join(f"{t * 1e6:12.1f}us" for t in per_call)
        speed = f"{per_call[0] / per_call[1]:8.1f}x" if len(per_call) > 1 else ""
        print(f"{label:32s}{cells}   {speed}")
    if _compiled is None:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
