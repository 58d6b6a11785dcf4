"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
``use_backend`` switches at runtime (tests and the benchmark exercise both).
"""

from contextlib import contextmanager

import numpy as np

from . import _fallback
from .errors import NotSquare

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _compiled if _compiled is not None else _fallback


def available_backends():
    return tuple(sorted(_BACKENDS))


def backend():
    """Name of the active backend, ``"compiled"`` or ``"python"``."""
    return _active.BACKEND


def set_backend(name):
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None


@contextmanager
def use_backend(name):
    previous = backend()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def _hermitian_stack(stack):
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise NotSquare(f"expected a (B, n, n) stack, got shape {stack.shape}")
    return 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))


def eigh_batch(stack, want_vectors=True):
    """Hermitian eigen-decomposition of a (B, n, n) stack by cyclic Jacobi."""
    herm = _hermitian_stack(stack)
    w, v, _ = _active.jacobi_eigh_batch(herm, want_vectors)
    return w, v


def eigvalsh_batch(stack, lowest=None):
    """Ascending eigenvalues of a (B, n, n) Hermitian stack (tridiagonal bisection).

    ``lowest=k`` returns only the k smallest, which is all a PSD check needs.
    """
    herm = _hermitian_stack(stack)
    return _active.hermitian_eigvalsh_batch(herm, lowest)


def min_eigvals_batch(stack):
    return eigvalsh_batch(stack, lowest=1)[:, 0]


def eigh(a):
    w, v = eigh_batch(np.asarray(a)[None], want_vectors=True)
    return w[0], v[0]


def eigvalsh(a):
    return eigvalsh_batch(np.asarray(a)[None])[0]


def branch_ml_value(weights, overlaps):
    return _active.branch_ml_value(weights, overlaps)
