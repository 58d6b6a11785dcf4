"""Dense complex linear algebra on C^d with Hermitian-aware validation.

Matrices are plain ``numpy.complex128`` arrays marked read-only; every
operation returns a new array.  The value types below validate their
invariants on construction and are frozen afterwards.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionMismatch, NotHermitian, NotSquare, ValidationError

DEFAULT_TOL = 1e-9
STRICT_TOL = 1e-12


def _frozen(a):
    a.flags.writeable = False
    return a


def cmatrix(entries, rows=None, cols=None):
    """Build an immutable complex matrix.

    ``entries`` is either a nested sequence / 2-D array, or a flat row-major
    sequence together with ``rows`` and ``cols``.
    """
    a = np.array(entries, dtype=np.complex128)
    if rows is not None or cols is not None:
        if rows is None or cols is None or a.size != rows * cols:
            raise ValidationError("flat entries need rows*cols values")
        a = a.reshape(rows, cols)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValidationError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return _frozen(a)


def identity(n):
    return _frozen(np.eye(n, dtype=np.complex128))


def dagger(m):
    """Conjugate transpose."""
    return _frozen(np.ascontiguousarray(np.conj(np.asarray(m, dtype=np.complex128)).T))


def proj(psi):
    """Rank-one projector |psi><psi|."""
    v = np.asarray(psi.amplitudes if isinstance(psi, PureState) else psi, dtype=np.complex128)
    return _frozen(np.outer(v, v.conj()))


def hermiticity_defect(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - np.conj(m.T)))) if m.size else 0.0


def _require_square(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return m


def min_eigenvalue_hermitian(m, tol=DEFAULT_TOL):
    """Smallest eigenvalue of a Hermitian matrix.

    Raises NotHermitian when an entry of ``m - m^H`` exceeds ``tol``.
    """
    m = _require_square(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    return float(kernels.min_eigvals_batch(m[None])[0])


def eigvalsh(m, tol=DEFAULT_TOL):
    m = _require_square(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    return kernels.eigvalsh(m)


def psd_sqrt_inv(m, floor=1e-14):
    """Inverse square root of a PSD matrix on its support (pseudo-inverse)."""
    w, v = kernels.eigh(_require_square(m))
    scale = max(float(np.max(np.abs(w))), 1.0) * floor
    inv = np.where(w > scale, 1.0 / np.sqrt(np.where(w > scale, w, 1.0)), 0.0)
    return (v * inv) @ v.conj().T


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if a.size < 1 or not np.all(np.isfinite(a)):
            raise ValidationError("state needs finite amplitudes")
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > STRICT_TOL:
            raise ValidationError(f"state norm^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def dim(self):
        return self.amplitudes.size

    def density(self):
        return DensityOp(proj(self))


@dataclass(frozen=True)
class DensityOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = _require_square(cmatrix(self.matrix))
        if hermiticity_defect(m) > STRICT_TOL:
            raise NotHermitian("density operator is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-10:
            raise ValidationError(f"density operator has trace {tr}")
        lo = float(kernels.min_eigvals_batch(m[None])[0])
        if lo < -1e-10:
            raise ValidationError(f"density operator has eigenvalue {lo:.3e} < 0")
        object.__setattr__(self, "matrix", _frozen(np.array(m)))

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ProbDist:
    """Finite distribution; ``support`` holds hashable labels."""

    support: tuple
    weights: np.ndarray

    def __post_init__(self):
        support = tuple(self.support)
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if len(support) != w.size:
            raise DimensionMismatch("support and weights differ in length")
        if len(set(support)) != len(support):
            raise ValidationError("duplicate labels in support")
        if np.any(w < -1e-15) or not np.all(np.isfinite(w)):
            raise ValidationError("negative or non-finite weight")
        if abs(float(w.sum()) - 1.0) > STRICT_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", _frozen(w))

    def __len__(self):
        return len(self.support)

    def prob(self, label):
        try:
            return float(self.weights[self.support.index(label)])
        except ValueError:
            return 0.0

    def items(self):
        return zip(self.support, self.weights.tolist())


@dataclass(frozen=True)
class Povm:
    """Measurement operators stacked as ``elements[k]`` with outcome ``labels[k]``.

    Construction checks shapes only; positivity and completeness are checked
    by :func:`validate_povm`.
    """

    elements: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        els = np.array(self.elements, dtype=np.complex128)
        if els.ndim != 3 or els.shape[1] != els.shape[2] or els.shape[0] < 1:
            raise DimensionMismatch(f"POVM elements must be square and of one size, got {els.shape}")
        if not np.all(np.isfinite(els)):
            raise ValidationError("POVM has non-finite entries")
        labels = tuple(range(els.shape[0])) if self.labels is None else tuple(self.labels)
        if len(labels) != els.shape[0]:
            raise DimensionMismatch("one label per POVM element is required")
        object.__setattr__(self, "elements", _frozen(els))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self):
        return self.elements.shape[1]

    def __len__(self):
        return self.elements.shape[0]


@dataclass(frozen=True)
class PovmReport:
    min_eigenvalues: np.ndarray
    hermiticity_defect: float
    completeness_defect: float
    tol: float

    @property
    def passed(self):
        return (self.hermiticity_defect <= self.tol
                and float(np.min(self.min_eigenvalues)) >= -self.tol
                and self.completeness_defect <= self.tol)

    @property
    def worst_min_eigenvalue(self):
        return float(np.min(self.min_eigenvalues))


def validate_povm(p, tol=DEFAULT_TOL):
    """Check positivity of every element and completeness of the sum."""
    if not isinstance(p, Povm):
        p = Povm(p)
    els = p.elements
    herm = float(np.max(np.abs(els - np.conj(np.swapaxes(els, 1, 2)))))
    mins = kernels.min_eigvals_batch(els)
    defect = float(np.max(np.abs(els.sum(axis=0) - np.eye(p.dim))))
    return PovmReport(_frozen(np.asarray(mins)), herm, defect, tol)
