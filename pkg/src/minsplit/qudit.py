"""Weyl-Heisenberg operators and the Fourier transform over Z_d.

Composite d is allowed here; the encoding layer insists on primes.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IndexOutOfRange, NotPrime, ValidationError


def is_prime(n):
    """Deterministic trial division (the dimensions used here are small)."""
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_upto(n):
    return [p for p in range(2, int(n) + 1) if is_prime(p)]


@dataclass(frozen=True)
class QuditDim:
    d: int
    prime_checked: bool = False

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValidationError(f"qudit dimension must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if self.prime_checked and not is_prime(self.d):
            raise NotPrime(self.d)

    @classmethod
    def prime(cls, d):
        return cls(d.d if isinstance(d, QuditDim) else d, prime_checked=True)

    def __int__(self):
        return self.d

    def __index__(self):
        return self.d


def _dim(d):
    return QuditDim(d).d if not isinstance(d, QuditDim) else d.d


def omega(d):
    """exp(2 pi i / d)."""
    d = _dim(d)
    return complex(np.exp(2j * np.pi / d))


@lru_cache(maxsize=None)
def _roots(d):
    # each root from its own reduced exponent: no accumulated drift
    r = np.exp(2j * np.pi * np.arange(d) / d)
    r.flags.writeable = False
    return r


def _frozen(a):
    a.flags.writeable = False
    return a


def pauli_x(d):
    """Cyclic shift X|k> = |k+1 mod d>."""
    return weyl(d, 1, 0)


def pauli_z(d):
    """Phase Z|k> = omega^k |k>."""
    return weyl(d, 0, 1)


@lru_cache(maxsize=None)
def _fourier(d):
    j = np.arange(d)
    f = _roots(d)[np.outer(j, j) % d] / np.sqrt(d)
    return _frozen(f)


def fourier(d):
    """F[j, k] = omega^(jk) / sqrt(d)."""
    return _fourier(_dim(d))


def weyl(d, a, b):
    """X^a Z^b, with both exponents reduced exactly in index space."""
    d = _dim(d)
    if not (0 <= a < d and 0 <= b < d):
        raise IndexOutOfRange(f"Weyl exponents must lie in [0, {d}), got ({a}, {b})")
    k = np.arange(d)
    m = np.zeros((d, d), dtype=np.complex128)
    # (X^a Z^b)|k> = omega^(b k) |k + a>
    m[(k + a) % d, k] = _roots(d)[(b * k) % d]
    return _frozen(m)


def weyl_apply(d, a, b, vec):
    """X^a Z^b applied to a vector without forming the matrix."""
    d = _dim(d)
    v = np.asarray(vec, dtype=np.complex128)
    phased = _roots(d)[(b * np.arange(d)) % d] * v
    return np.roll(phased, a)
