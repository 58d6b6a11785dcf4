"""Pure-Python (numpy) versions of the compiled kernels.

Same algorithms as the extension, vectorized over the batch instead of looped:
Householder tridiagonalization with Sturm-count bisection for eigenvalues, and
cyclic Jacobi in round-robin ("parallel") ordering for eigenvectors, where the
n/2 disjoint rotations of one round are applied as a few array updates.
"""

from functools import lru_cache

import numpy as np

BACKEND = "python"

_EPS = np.finfo(np.float64).eps
_SAFMIN = np.finfo(np.float64).tiny
_BISECT_STEPS = 80


def _tridiagonalize(a):
    """Householder reduction of a (B, n, n) Hermitian stack; returns (diag, |offdiag|)."""
    a = a.copy()
    nb, n, _ = a.shape
    off = np.zeros((nb, max(n - 1, 0)))
    for k in range(n - 2):
        x = a[:, k + 1:, k]
        xnorm = np.linalg.norm(x, axis=1)
        x0 = x[:, 0]
        x0abs = np.abs(x0)
        ph = np.where(x0abs > 0, x0 / np.where(x0abs > 0, x0abs, 1.0), 1.0)
        v = x.copy()
        v[:, 0] += ph * xnorm
        vnorm = np.linalg.norm(v, axis=1)
        live = xnorm > 0
        v = np.where(live[:, None], v / np.where(live, vnorm, 1.0)[:, None], 0.0)
        a22 = a[:, k + 1:, k + 1:]
        p = np.einsum("bij,bj->bi", a22, v)
        kk = np.einsum("bi,bi->b", v.conj(), p).real
        w = 2.0 * p - 2.0 * kk[:, None] * v
        a[:, k + 1:, k + 1:] = (a22 - v[:, :, None] * w.conj()[:, None, :]
                                - w[:, :, None] * v.conj()[:, None, :])
        off[:, k] = xnorm
    diag = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    if n >= 2:
        off[:, n - 2] = np.abs(a[:, n - 1, n - 2])
    return diag, off


def hermitian_eigvalsh_batch(stack, lowest=None):
    """Same contract as the compiled ``hermitian_eigvalsh_batch``."""
    a = np.asarray(stack, dtype=np.complex128)
    nb, n, _ = a.shape
    count = n if lowest is None else min(int(lowest), n)
    if n == 0:
        return np.empty((nb, 0))
    diag, off = _tridiagonalize(a)
    off2 = off * off
    radius = np.zeros_like(diag)
    if n > 1:
        radius[:, 1:] += off
        radius[:, :-1] += off
    lo = np.min(diag - radius, axis=1)
    hi = np.max(diag + radius, axis=1)
    emax2 = off2.max(axis=1) if n > 1 else np.zeros(nb)
    pivmin = _SAFMIN * np.maximum(1.0, emax2)
    scale = np.maximum(np.abs(lo), np.abs(hi))
    lo = lo - 2.0 * _EPS * scale - pivmin
    hi = hi + 2.0 * _EPS * scale + pivmin
    # one bracket per (matrix, eigenvalue index)
    a_lo = np.repeat(lo[:, None], count, axis=1)
    b_hi = np.repeat(hi[:, None], count, axis=1)
    k_idx = np.arange(count)[None, :]
    piv = pivmin[:, None]
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (a_lo + b_hi)
        q = diag[:, :1] - mid
        q = np.where(np.abs(q) < piv, -piv, q)
        count = (q < 0).astype(np.int64)
        for i in range(1, n):
            q = diag[:, i:i + 1] - mid - off2[:, i - 1:i] / q
            q = np.where(np.abs(q) < piv, -piv, q)
            count += q < 0
        above = count > k_idx
        b_hi = np.where(above, mid, b_hi)
        a_lo = np.where(above, a_lo, mid)
    return 0.5 * (a_lo + b_hi)


@lru_cache(maxsize=None)
def _round_robin(n):
    """Rounds of disjoint (p, q) pairs, p < q, covering every pair once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        if pairs:
            arr = np.array(pairs, dtype=np.intp)
            rounds.append((arr[:, 0].copy(), arr[:, 1].copy()))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm2(a):
    iu = np.triu_indices(a.shape[-1], k=1)
    return np.sum(np.abs(a[:, iu[0], iu[1]]) ** 2, axis=1)


def jacobi_eigh_batch(stack, want_vectors=True, max_sweeps=60):
    """Same contract as the compiled ``jacobi_eigh_batch``."""
    a = np.array(stack, dtype=np.complex128, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("expected a stack of square matrices")
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy() if want_vectors else None
    fro = np.sum(np.abs(a) ** 2, axis=(1, 2))
    sweeps = np.full(nb, -1, dtype=np.int64)
    active = np.ones(nb, dtype=bool)
    rounds = _round_robin(n) if n > 1 else ()
    for sweep in range(max_sweeps + 1):
        done = active & (_off_norm2(a) <= _EPS * _EPS * fro)
        sweeps[done] = sweep
        active &= ~done
        if not active.any() or sweep == max_sweeps:
            break
        idx = np.flatnonzero(active)
        sub = a[idx]
        vsub = v[idx] if want_vectors else None
        for P, Q in rounds:
            apq = sub[:, P, Q]
            mag = np.abs(apq)
            nz = mag > 0
            safe = np.where(nz, mag, 1.0)
            ph = np.where(nz, apq / safe, 1.0)
            alpha = sub[:, P, P].real
            gamma = sub[:, Q, Q].real
            tau = (gamma - alpha) / (2.0 * safe)
            sgn = np.where(tau >= 0, 1.0, -1.0)
            t = np.where(nz, sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            phc = ph.conj()
            # columns: A <- A U
            x = sub[:, :, P]
            y = sub[:, :, Q]
            cc, ss, pc = c[:, None, :], s[:, None, :], phc[:, None, :]
            sub[:, :, P] = cc * x - ss * pc * y
            sub[:, :, Q] = ss * x + cc * pc * y
            # rows: A <- U^H A
            x = sub[:, P, :]
            y = sub[:, Q, :]
            cr, sr, pr = c[:, :, None], s[:, :, None], ph[:, :, None]
            sub[:, P, :] = cr * x - sr * pr * y
            sub[:, Q, :] = sr * x + cr * pr * y
            sub[:, P, Q] = 0.0
            sub[:, Q, P] = 0.0
            sub[:, P, P] = sub[:, P, P].real
            sub[:, Q, Q] = sub[:, Q, Q].real
            if want_vectors:
                x = vsub[:, :, P]
                y = vsub[:, :, Q]
                vsub[:, :, P] = cc * x - ss * pc * y
                vsub[:, :, Q] = ss * x + cc * pc * y
        a[idx] = sub
        if want_vectors:
            v[idx] = vsub
    d = np.real(np.diagonal(a, axis1=1, axis2=2))
    order = np.argsort(d, axis=1, kind="stable")
    w = np.take_along_axis(d, order, axis=1)
    vecs = np.take_along_axis(v, order[:, None, :], axis=2) if want_vectors else None
    return w, vecs, sweeps


def branch_ml_value(weights, overlaps):
    """Same contract as the compiled ``branch_ml_value``."""
    weights = np.asarray(weights, dtype=np.float64)
    overlaps = np.asarray(overlaps, dtype=np.float64)
    if weights.shape != overlaps.shape[:2]:
        raise ValueError("weights and overlaps disagree in shape")
    joint = np.einsum("go,goj->gj", weights, overlaps)
    decisions = np.argmax(joint, axis=0)
    return float(joint[decisions, np.arange(joint.shape[1])].sum()), decisions.astype(np.int64)
