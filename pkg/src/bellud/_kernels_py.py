"""Pure numpy implementations of the hot kernels.

Signatures mirror ``_kernels.pyx`` exactly; ``bellud.kernels`` picks one.
Events are ordered same-mode first ((0,0), (1,1), ...) then distinct pairs in
lexicographic order, all 0-based here.
"""
import math

import numpy as np

SQRT2 = math.sqrt(2.0)
_MESH_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_EVENT_CACHE = {}


def _event_index(dim):
    idx = _EVENT_CACHE.get(dim)
    if idx is None:
        diag = np.arange(dim)
        iu, ju = np.triu_indices(dim, 1)
        idx = (diag, iu, ju)
        _EVENT_CACHE[dim] = idx
    return idx


def event_probabilities(u, coeffs):
    """Detection probabilities, shape (n_states, n_events).

    ``u`` is the (dim, dim) mode unitary, ``coeffs`` a (n_states, 2, 2) stack of
    amplitude matrices.
    """
    u = np.asarray(u, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    v = u.conj()
    # m[s, l, n] = sum_jk v[l, j] A_s[j, k] v[n, k]
    m = np.einsum("lj,sjk,nk->sln", v[:, :2], coeffs, v[:, 2:4])
    diag, iu, ju = _event_index(u.shape[0])
    same = SQRT2 * m[:, diag, diag]
    cross = m[:, iu, ju] + m[:, ju, iu]
    amps = np.concatenate([same, cross], axis=1)
    return amps.real ** 2 + amps.imag ** 2


def mesh_matrix(x):
    """4x4 mesh unitary from 6 angles followed by 6 phases (no output phases)."""
    u = np.eye(4, dtype=complex)
    for k, (a, b) in enumerate(_MESH_PAIRS):
        c, s = math.cos(x[k]), math.sin(x[k])
        e = complex(math.cos(x[6 + k]), math.sin(x[6 + k]))
        ra, rb = u[a].copy(), u[b]
        u[a] = e * c * ra + s * rb
        u[b] = -e * s * ra + c * rb
    return u


def mesh_event_probabilities(x, coeffs):
    return event_probabilities(mesh_matrix(x), coeffs)


def surrogate(x, coeffs, priors, power):
    """Negated confidence-weighted success: -sum_e top_e * (top_e / total_e)**power."""
    q = np.asarray(priors)[:, None] * mesh_event_probabilities(x, coeffs)
    top = q.max(axis=0)
    den = q.sum(axis=0)
    ok = den > 1e-300
    return -float(np.sum(top[ok] * (top[ok] / den[ok]) ** power))


def _nelder_mead(x0, fun, xatol, fatol, maxfev):
    n = len(x0)
    rho, chi, psi, sigma = 1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n
    sim = np.tile(np.asarray(x0, dtype=float), (n + 1, 1))
    for i in range(n):
        sim[i + 1, i] = 1.05 * x0[i] if x0[i] != 0.0 else 0.00025
    fsim = np.array([fun(v) for v in sim])
    nfev = n + 1
    order = np.argsort(fsim, kind="stable")
    sim, fsim = sim[order], fsim[order]
    converged = False
    while nfev < maxfev:
        if (np.max(np.abs(sim[1:] - sim[0])) <= xatol
                and np.max(np.abs(fsim[1:] - fsim[0])) <= fatol):
            converged = True
            break
        xbar = sim[:-1].sum(axis=0) / n
        xr = (1 + rho) * xbar - rho * sim[-1]
        fxr = fun(xr)
        nfev += 1
        shrink = False
        if fxr < fsim[0]:
            xe = (1 + rho * chi) * xbar - rho * chi * sim[-1]
            fxe = fun(xe)
            nfev += 1
            if fxe < fxr:
                sim[-1], fsim[-1] = xe, fxe
            else:
                sim[-1], fsim[-1] = xr, fxr
        elif fxr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fxr
        else:
            if fxr < fsim[-1]:
                xc = (1 + psi * rho) * xbar - psi * rho * sim[-1]
                fxc = fun(xc)
                nfev += 1
                if fxc <= fxr:
                    sim[-1], fsim[-1] = xc, fxc
                else:
                    shrink = True
            else:
                xcc = (1 - psi) * xbar + psi * sim[-1]
                fxcc = fun(xcc)
                nfev += 1
                if fxcc < fsim[-1]:
                    sim[-1], fsim[-1] = xcc, fxcc
                else:
                    shrink = True
            if shrink:
                for j in range(1, n + 1):
                    sim[j] = sim[0] + sigma * (sim[j] - sim[0])
                    fsim[j] = fun(sim[j])
                nfev += n
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
    return sim[0].copy(), nfev, converged


def anneal(x0, coeffs, priors, powers, xatol=1e-7, fatol=1e-15, maxfev=20000):
    """Run one Nelder-Mead refinement per power in ``powers``, each from the last.

    Returns (x_per_stage, nfev_per_stage, converged_per_stage).
    """
    x = np.asarray(x0, dtype=float).copy()
    xs, nfs, convs = [], [], []
    for power in powers:
        x, nf, conv = _nelder_mead(x, lambda v: surrogate(v, coeffs, priors, power),
                                   xatol, fatol, maxfev)
        xs.append(x)
        nfs.append(nf)
        convs.append(conv)
    return np.array(xs), np.array(nfs, dtype=np.int64), np.array(convs)
