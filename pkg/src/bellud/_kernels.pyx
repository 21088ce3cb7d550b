# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see _kernels_py.py for the reference semantics."""
import numpy as np
from libc.math cimport cos, fabs, pow, sin, sqrt


cdef int[6] _PA = [0, 0, 0, 1, 1, 2]
cdef int[6] _PB = [1, 2, 3, 2, 3, 3]


cdef void _probs(const double complex[:, :] u, const double complex[:, :, :] coeffs,
                 double[:, :] out) noexcept nogil:
    cdef Py_ssize_t dim = u.shape[0]
    cdef Py_ssize_t ns = coeffs.shape[0]
    cdef Py_ssize_t s, l, n, j, k, e
    cdef double complex amp, vl_j, vn_j
    cdef double sqrt2 = sqrt(2.0)
    for s in range(ns):
        e = 0
        for l in range(dim):
            amp = 0
            for j in range(2):
                vl_j = u[l, j].conjugate()
                for k in range(2):
                    amp = amp + vl_j * coeffs[s, j, k] * u[l, 2 + k].conjugate()
            amp = amp * sqrt2
            out[s, e] = amp.real * amp.real + amp.imag * amp.imag
            e += 1
        for l in range(dim):
            for n in range(l + 1, dim):
                amp = 0
                for j in range(2):
                    vl_j = u[l, j].conjugate()
                    vn_j = u[n, j].conjugate()
                    for k in range(2):
                        amp = amp + coeffs[s, j, k] * (vl_j * u[n, 2 + k].conjugate()
                                                       + vn_j * u[l, 2 + k].conjugate())
                out[s, e] = amp.real * amp.real + amp.imag * amp.imag
                e += 1


cdef void _mesh(const double[:] x, double complex[:, :] u) noexcept nogil:
    cdef int k, c, a, b
    cdef double co, si
    cdef double complex ph, ra, rb
    for a in range(4):
        for b in range(4):
            u[a, b] = 1.0 if a == b else 0.0
    for k in range(6):
        a = _PA[k]
        b = _PB[k]
        co = cos(x[k])
        si = sin(x[k])
        ph = cos(x[6 + k]) + 1j * sin(x[6 + k])
        for c in range(4):
            ra = u[a, c]
            rb = u[b, c]
            u[a, c] = ph * co * ra + si * rb
            u[b, c] = -ph * si * ra + co * rb


def event_probabilities(u, coeffs):
    cdef const double complex[:, :] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef const double complex[:, :, :] cv = np.ascontiguousarray(coeffs, dtype=np.complex128)
    dim = uv.shape[0]
    out = np.empty((cv.shape[0], dim * (dim + 1) // 2))
    cdef double[:, :] ov = out
    with nogil:
        _probs(uv, cv, ov)
    return out


def mesh_matrix(x):
    cdef const double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((4, 4), dtype=np.complex128)
    cdef double complex[:, :] uv = out
    with nogil:
        _mesh(xv, uv)
    return out


def mesh_event_probabilities(x, coeffs):
    cdef const double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double complex[:, :, :] cv = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef double complex[:, :] uv = np.empty((4, 4), dtype=np.complex128)
    out = np.empty((cv.shape[0], 10))
    cdef double[:, :] ov = out
    with nogil:
        _mesh(xv, uv)
        _probs(uv, cv, ov)
    return out


# --- annealed Nelder-Mead on the confidence-weighted surrogate -------------------

DEF NP = 12
DEF NV = 13
DEF MAXS = 8

cdef double _surrogate(const double[:] x, const double complex[:, :, :] coeffs,
                       const double[:] priors, double power,
                       double complex[:, :] u, double[:, :] probs) noexcept nogil:
    cdef Py_ssize_t s, e, ns = coeffs.shape[0]
    cdef double q, top, den, total = 0.0
    _mesh(x, u)
    _probs(u, coeffs, probs)
    for e in range(10):
        top = 0.0
        den = 0.0
        for s in range(ns):
            q = priors[s] * probs[s, e]
            den += q
            if q > top:
                top = q
        if den > 1e-300:
            total += top * pow(top / den, power)
    return -total


cdef double _fx(double* x, const double complex[:, :, :] coeffs, const double[:] priors,
                double power, double complex[:, :] u, double[:, :] probs,
                double[:] xbuf) noexcept nogil:
    cdef int i
    for i in range(NP):
        xbuf[i] = x[i]
    return _surrogate(xbuf, coeffs, priors, power, u, probs)


cdef void _sort(double (*sim)[NP], double* fsim) noexcept nogil:
    # stable insertion sort of the simplex by objective
    cdef int i, j, k
    cdef double fv
    cdef double row[NP]
    for i in range(1, NV):
        fv = fsim[i]
        for k in range(NP):
            row[k] = sim[i][k]
        j = i - 1
        while j >= 0 and fsim[j] > fv:
            fsim[j + 1] = fsim[j]
            for k in range(NP):
                sim[j + 1][k] = sim[j][k]
            j -= 1
        fsim[j + 1] = fv
        for k in range(NP):
            sim[j + 1][k] = row[k]


cdef int _nelder_mead(double* x0, const double complex[:, :, :] coeffs, const double[:] priors,
                      double power, double xatol, double fatol, int maxfev,
                      double complex[:, :] u, double[:, :] probs, double[:] xbuf,
                      int* converged) noexcept nogil:
    cdef double rho = 1.0, chi = 1.0 + 2.0 / NP
    cdef double psi = 0.75 - 1.0 / (2.0 * NP), sigma = 1.0 - 1.0 / NP
    cdef double sim[NV][NP]
    cdef double fsim[NV]
    cdef double xbar[NP]
    cdef double xr[NP]
    cdef double xe[NP]
    cdef double xc[NP]
    cdef double fxr, fxe, fxc, dx, df
    cdef int i, j, k, nfev = 0, shrink
    for k in range(NP):
        sim[0][k] = x0[k]
    for i in range(NP):
        for k in range(NP):
            sim[i + 1][k] = x0[k]
        if x0[i] != 0.0:
            sim[i + 1][i] = 1.05 * x0[i]
        else:
            sim[i + 1][i] = 0.00025
    for i in range(NV):
        fsim[i] = _fx(sim[i], coeffs, priors, power, u, probs, xbuf)
    nfev = NV
    _sort(sim, fsim)
    converged[0] = 0
    while nfev < maxfev:
        dx = 0.0
        df = 0.0
        for i in range(1, NV):
            df = max(df, fabs(fsim[i] - fsim[0]))
            for k in range(NP):
                dx = max(dx, fabs(sim[i][k] - sim[0][k]))
        if dx <= xatol and df <= fatol:
            converged[0] = 1
            break
        for k in range(NP):
            xbar[k] = 0.0
            for i in range(NP):
                xbar[k] += sim[i][k]
            xbar[k] /= NP
            xr[k] = (1 + rho) * xbar[k] - rho * sim[NP][k]
        fxr = _fx(xr, coeffs, priors, power, u, probs, xbuf)
        nfev += 1
        shrink = 0
        if fxr < fsim[0]:
            for k in range(NP):
                xe[k] = (1 + rho * chi) * xbar[k] - rho * chi * sim[NP][k]
            fxe = _fx(xe, coeffs, priors, power, u, probs, xbuf)
            nfev += 1
            if fxe < fxr:
                for k in range(NP):
                    sim[NP][k] = xe[k]
                fsim[NP] = fxe
            else:
                for k in range(NP):
                    sim[NP][k] = xr[k]
                fsim[NP] = fxr
        elif fxr < fsim[NP - 1]:
            for k in range(NP):
                sim[NP][k] = xr[k]
            fsim[NP] = fxr
        else:
            if fxr < fsim[NP]:
                for k in range(NP):
                    xc[k] = (1 + psi * rho) * xbar[k] - psi * rho * sim[NP][k]
                fxc = _fx(xc, coeffs, priors, power, u, probs, xbuf)
                nfev += 1
                if fxc <= fxr:
                    for k in range(NP):
                        sim[NP][k] = xc[k]
                    fsim[NP] = fxc
                else:
                    shrink = 1
            else:
                for k in range(NP):
                    xc[k] = (1 - psi) * xbar[k] + psi * sim[NP][k]
                fxc = _fx(xc, coeffs, priors, power, u, probs, xbuf)
                nfev += 1
                if fxc < fsim[NP]:
                    for k in range(NP):
                        sim[NP][k] = xc[k]
                    fsim[NP] = fxc
                else:
                    shrink = 1
            if shrink:
                for j in range(1, NV):
                    for k in range(NP):
                        sim[j][k] = sim[0][k] + sigma * (sim[j][k] - sim[0][k])
                    fsim[j] = _fx(sim[j], coeffs, priors, power, u, probs, xbuf)
                nfev += NP
        _sort(sim, fsim)
    for k in range(NP):
        x0[k] = sim[0][k]
    return nfev


def surrogate(x, coeffs, priors, double power):
    cdef const double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double complex[:, :, :] cv = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[:] pv = np.ascontiguousarray(priors, dtype=np.float64)
    cdef double complex[:, :] uv = np.empty((4, 4), dtype=np.complex128)
    cdef double[:, :] ov = np.empty((cv.shape[0], 10))
    return _surrogate(xv, cv, pv, power, uv, ov)


def anneal(x0, coeffs, priors, powers, double xatol=1e-7, double fatol=1e-15, int maxfev=20000):
    """Run one Nelder-Mead refinement per power in ``powers``, each from the last.

    Returns (x_per_stage, nfev_per_stage, converged_per_stage).
    """
    cdef const double complex[:, :, :] cv = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[:] pv = np.ascontiguousarray(priors, dtype=np.float64)
    cdef double complex[:, :] uv = np.empty((4, 4), dtype=np.complex128)
    cdef double[:, :] ov = np.empty((cv.shape[0], 10))
    cdef double[:] xbuf = np.empty(NP)
    pw = np.ascontiguousarray(powers, dtype=np.float64)
    cdef const double[:] pwv = pw
    cdef int ns = pw.shape[0], st
    xs = np.empty((ns, NP))
    cdef double[:, :] xsv = xs
    nf = np.zeros(ns, dtype=np.int64)
    cv_flags = np.zeros(ns, dtype=np.int64)
    cdef long long[:] nfv = nf
    cdef long long[:] cfv = cv_flags
    cdef double x[NP]
    cdef int conv, k
    xin = np.ascontiguousarray(x0, dtype=np.float64)
    for k in range(NP):
        x[k] = xin[k]
    with nogil:
        for st in range(ns):
            nfv[st] = _nelder_mead(x, cv, pv, pwv[st], xatol, fatol, maxfev, uv, ov, xbuf, &conv)
            cfv[st] = conv
            for k in range(NP):
                xsv[st, k] = x[k]
    return xs, nf, cv_flags.astype(bool)
