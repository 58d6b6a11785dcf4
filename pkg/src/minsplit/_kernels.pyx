# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Hermitian eigenvalues (Householder tridiagonalization + Sturm bisection),
cyclic complex Jacobi for eigenvectors, and the max-likelihood contraction.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

BACKEND = "compiled"

cdef double EPS = 2.220446049250313e-16
cdef double SAFMIN = 2.2250738585072014e-308
cdef int BISECT_STEPS = 80


cdef void _tridiagonalize(double complex[:, ::1] a, double[::1] diag, double[::1] off,
                          double complex[::1] v, double complex[::1] p) noexcept nogil:
    """Householder reduction of a Hermitian matrix, in place.

    Leaves the real diagonal in ``diag`` and the moduli of the sub-diagonal in
    ``off`` (a diagonal unitary makes the sub-diagonal real without changing
    the spectrum).
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, i, j, m
    cdef double xnorm, x0abs, vnorm, kk
    cdef double complex alpha, ph, acc
    for k in range(n - 2):
        m = n - k - 1
        xnorm = 0.0
        for i in range(m):
            xnorm += a[k + 1 + i, k].real * a[k + 1 + i, k].real + a[k + 1 + i, k].imag * a[k + 1 + i, k].imag
        xnorm = sqrt(xnorm)
        if xnorm == 0.0:
            off[k] = 0.0
            continue
        x0abs = sqrt(a[k + 1, k].real * a[k + 1, k].real + a[k + 1, k].imag * a[k + 1, k].imag)
        if x0abs == 0.0:
            ph = 1.0
        else:
            ph = a[k + 1, k] / x0abs
        alpha = -ph * xnorm
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] = v[0] - alpha
        vnorm = 0.0
        for i in range(m):
            vnorm += v[i].real * v[i].real + v[i].imag * v[i].imag
        vnorm = sqrt(vnorm)
        for i in range(m):
            v[i] = v[i] / vnorm
        # p = A22 v, kk = v^H p (real for Hermitian A22)
        kk = 0.0
        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc = acc + a[k + 1 + i, k + 1 + j] * v[j]
            p[i] = acc
            kk += (v[i].conjugate() * acc).real
        # w = 2p - 2 kk v ; A22 <- A22 - v w^H - w v^H
        for i in range(m):
            p[i] = 2.0 * p[i] - 2.0 * kk * v[i]
        for i in range(m):
            for j in range(m):
                a[k + 1 + i, k + 1 + j] = (a[k + 1 + i, k + 1 + j]
                                           - v[i] * p[j].conjugate() - p[i] * v[j].conjugate())
        off[k] = xnorm
    for i in range(n):
        diag[i] = a[i, i].real
    if n >= 2:
        off[n - 2] = sqrt(a[n - 1, n - 2].real * a[n - 1, n - 2].real
                          + a[n - 1, n - 2].imag * a[n - 1, n - 2].imag)


cdef Py_ssize_t _sturm_count(double[::1] diag, double[::1] off2, double sigma,
                             double pivmin) noexcept nogil:
    """Number of eigenvalues of the tridiagonal matrix strictly below sigma."""
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef double q = diag[0] - sigma
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, n):
        q = diag[i] - sigma - off2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


cdef void _bisect_all(double[::1] diag, double[::1] off, double[::1] off2,
                      double[::1] out, Py_ssize_t count) noexcept nogil:
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i, k, it
    cdef double lo, hi, r, a, b, mid, scale, emax2 = 0.0, pivmin
    lo = diag[0]
    hi = diag[0]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += off[i - 1]
        if i < n - 1:
            r += off[i]
        if diag[i] - r < lo:
            lo = diag[i] - r
        if diag[i] + r > hi:
            hi = diag[i] + r
    for i in range(n - 1):
        off2[i] = off[i] * off[i]
        if off2[i] > emax2:
            emax2 = off2[i]
    pivmin = SAFMIN * (1.0 if emax2 < 1.0 else emax2)
    scale = fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)
    lo = lo - 2.0 * EPS * scale - pivmin
    hi = hi + 2.0 * EPS * scale + pivmin
    for k in range(count):
        a = lo
        b = hi
        for it in range(BISECT_STEPS):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _sturm_count(diag, off2, mid, pivmin) > k:
                b = mid
            else:
                a = mid
        out[k] = 0.5 * (a + b)


cdef int _jacobi(double complex[:, ::1] a, double complex[:, ::1] v,
                 bint want_vectors, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double off, fro, mag, alpha, gamma, tau, t, c, s
    cdef double complex apq, ph, phc, x, y
    cdef int sweep
    fro = 0.0
    for p in range(n):
        for q in range(n):
            fro += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    if fro == 0.0:
        return 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if off <= EPS * EPS * fro:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if mag == 0.0:
                    continue
                alpha = a[p, p].real
                gamma = a[q, q].real
                ph = apq / mag
                phc = ph.conjugate()
                tau = (gamma - alpha) / (2.0 * mag)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # A <- A U with U = [[c, s], [-s conj(ph), c conj(ph)]]
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * phc * y
                    a[k, q] = s * x + c * phc * y
                # A <- U^H A
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * ph * y
                    a[q, k] = s * x + c * ph * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        x = v[k, p]
                        y = v[k, q]
                        v[k, p] = c * x - s * phc * y
                        v[k, q] = s * x + c * phc * y
    return -1


def hermitian_eigvalsh_batch(stack, lowest=None):
    """Ascending eigenvalues of a stack of Hermitian matrices, shape (B, n, n).

    With ``lowest`` set, only that many of the smallest eigenvalues are found.
    """
    src = np.ascontiguousarray(stack, dtype=np.complex128)
    cdef Py_ssize_t nb = src.shape[0]
    cdef Py_ssize_t n = src.shape[1]
    cdef Py_ssize_t b
    cdef Py_ssize_t count = n if lowest is None else min(int(lowest), n)
    out_arr = np.empty((nb, count), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    work_arr = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] work = work_arr
    cdef double[::1] diag = np.empty(n, dtype=np.float64)
    cdef double[::1] off = np.zeros(max(n - 1, 1), dtype=np.float64)
    cdef double[::1] off2 = np.zeros(max(n - 1, 1), dtype=np.float64)
    cdef double complex[::1] v = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] p = np.empty(n, dtype=np.complex128)
    cdef const double complex[:, :, ::1] sv = src
    if n == 0:
        return out_arr
    with nogil:
        for b in range(nb):
            work[:, :] = sv[b]
            _tridiagonalize(work, diag, off, v, p)
            _bisect_all(diag, off, off2, out[b], count)
    return out_arr


def jacobi_eigh_batch(stack, bint want_vectors=True, int max_sweeps=60):
    """Eigen-decompose a stack of Hermitian matrices, shape (B, n, n).

    Returns ``(w, V, sweeps)`` with ascending eigenvalues; ``V`` is None when
    vectors are not requested.  ``sweeps`` holds -1 for unconverged entries.
    """
    src = np.ascontiguousarray(stack, dtype=np.complex128)
    cdef Py_ssize_t nb = src.shape[0]
    cdef Py_ssize_t n = src.shape[1]
    cdef Py_ssize_t b, i
    cdef double complex[:, ::1] a
    cdef double complex[:, ::1] v
    w = np.empty((nb, n), dtype=np.float64)
    vecs = np.empty((nb, n, n), dtype=np.complex128) if want_vectors else None
    sweeps = np.empty(nb, dtype=np.int64)
    dummy = np.zeros((1, 1), dtype=np.complex128)
    for b in range(nb):
        work = src[b].copy()
        a = work
        if want_vectors:
            vb = np.eye(n, dtype=np.complex128)
        else:
            vb = dummy
        v = vb
        with nogil:
            i = _jacobi(a, v, want_vectors, max_sweeps)
        sweeps[b] = i
        d = np.real(np.diagonal(work))
        order = np.argsort(d, kind="stable")
        w[b] = d[order]
        if want_vectors:
            vecs[b] = vb[:, order]
    return w, vecs, sweeps


def branch_ml_value(weights, overlaps):
    """Max-likelihood success of guessing the leading index.

    ``weights[g, o]`` is the joint prior of (guessed value, other value) and
    ``overlaps[g, o, j]`` the probability of outcome ``j`` for that pair.  Each
    outcome is assigned the guess with the largest joint mass, lowest index on
    ties.  Returns ``(value, decisions)``.
    """
    cdef const double[:, ::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, :, ::1] tv = np.ascontiguousarray(overlaps, dtype=np.float64)
    cdef Py_ssize_t ng = tv.shape[0]
    cdef Py_ssize_t no = tv.shape[1]
    cdef Py_ssize_t nj = tv.shape[2]
    if wv.shape[0] != ng or wv.shape[1] != no:
        raise ValueError("weights and overlaps disagree in shape")
    joint_arr = np.zeros((ng, nj), dtype=np.float64)
    cdef double[:, ::1] joint = joint_arr
    decisions = np.zeros(nj, dtype=np.int64)
    cdef long long[::1] dec = decisions
    cdef Py_ssize_t g, o, j
    cdef double wgo, best, total = 0.0
    with nogil:
        for g in range(ng):
            for o in range(no):
                wgo = wv[g, o]
                if wgo == 0.0:
                    continue
                for j in range(nj):
                    joint[g, j] += wgo * tv[g, o, j]
        for j in range(nj):
            best = joint[0, j]
            dec[j] = 0
            for g in range(1, ng):
                if joint[g, j] > best:
                    best = joint[g, j]
                    dec[j] = g
            total += best
    return total, decisions
