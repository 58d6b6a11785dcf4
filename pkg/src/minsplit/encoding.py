"""Two dits in one qudit: the Fourier-invariant fiducial, its Weyl orbit, and the source ensemble."""

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, ValidationError, ZeroMass
from .linalg import DensityOp, ProbDist, PureState
from .qudit import QuditDim, fourier, weyl_apply

FIDUCIAL_TOL = 1e-10


def part_overlap(d):
    """Overlap of each codeword with the basis vector of its own part: 1/2 + 1/(2 sqrt d)."""
    return 0.5 + 0.5 / np.sqrt(d)


@dataclass(frozen=True)
class FiducialState:
    d: QuditDim
    state: PureState

    def __post_init__(self):
        f = fourier(self.d.d)
        if np.linalg.norm(f @ self.state.amplitudes - self.state.amplitudes) > FIDUCIAL_TOL:
            raise ValidationError("fiducial state is not Fourier-invariant")

    @property
    def amplitudes(self):
        return self.state.amplitudes


@lru_cache(maxsize=None)
def _fiducial(d):
    e0 = np.zeros(d, dtype=np.complex128)
    e0[0] = 1.0
    amps = (e0 + fourier(d) @ e0) / np.sqrt(2.0 * (1.0 + 1.0 / np.sqrt(d)))
    return FiducialState(QuditDim.prime(d), PureState(amps))


def fiducial(d):
    """(|0> + F|0>) / sqrt(2 (1 + 1/sqrt d)) for prime d."""
    return _fiducial(QuditDim.prime(d).d)


def codeword(d, y0, y1):
    """|Psi_{y0 y1}> = X^y0 Z^y1 |Psi>."""
    d = QuditDim.prime(d).d
    if not (0 <= y0 < d and 0 <= y1 < d):
        raise IndexOutOfRange(f"dits must lie in [0, {d}), got ({y0}, {y1})")
    return PureState(weyl_apply(d, y0, y1, fiducial(d).amplitudes))


@lru_cache(maxsize=None)
def codeword_array(d):
    """All codewords stacked as ``array[y0, y1, :]`` (read-only)."""
    d = QuditDim.prime(d).d
    psi = fiducial(d).amplitudes
    out = np.empty((d, d, d), dtype=np.complex128)
    for y0 in range(d):
        for y1 in range(d):
            out[y0, y1] = weyl_apply(d, y0, y1, psi)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class CodewordEnsemble:
    """Prior over dit pairs with one pure codeword per pair."""

    d: QuditDim
    prior: ProbDist
    codewords: dict

    def __post_init__(self):
        d = self.d.d
        pairs = [(a, b) for a in range(d) for b in range(d)]
        if set(self.codewords) != set(pairs):
            raise DimensionMismatch("need one codeword for every pair")
        if any(lbl not in self.codewords for lbl in self.prior.support):
            raise DimensionMismatch("prior support outside the pair alphabet")
        for y, cw in self.codewords.items():
            if cw.dim != d:
                raise DimensionMismatch(f"codeword {y} has dimension {cw.dim}")

    @property
    def dim(self):
        return self.d.d

    def prior_matrix(self):
        """Prior as a (d, d) array indexed [y0, y1]."""
        d = self.dim
        p = np.zeros((d, d))
        for (a, b), w in self.prior.items():
            p[a, b] = w
        return p

    def states(self):
        """Codewords as an array[y0, y1, :]."""
        d = self.dim
        out = np.empty((d, d, d), dtype=np.complex128)
        for (a, b), cw in self.codewords.items():
            out[a, b] = cw.amplitudes
        return out

    def average_state(self):
        p = self.prior_matrix()
        s = self.states()
        return np.einsum("ab,abi,abj->ij", p, s, s.conj())

    def to_json(self):
        d = self.dim
        prior = [[a, b, w] for (a, b), w in self.prior.items()]
        cws = [[a, b, [[float(z.real), float(z.imag)] for z in self.codewords[(a, b)].amplitudes]]
               for a in range(d) for b in range(d)]
        return json.dumps({"d": d, "prior": prior, "codewords": cws})

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        d = QuditDim.prime(doc["d"])
        prior = ProbDist([(int(a), int(b)) for a, b, _ in doc["prior"]], [w for _, _, w in doc["prior"]])
        cws = {(int(a), int(b)): PureState([complex(re, im) for re, im in amps])
               for a, b, amps in doc["codewords"]}
        return cls(d, prior, cws)


def ensemble(d, prior):
    """Codeword ensemble with an arbitrary prior, given as a (d, d) array or ProbDist."""
    qd = QuditDim.prime(d)
    d = qd.d
    if not isinstance(prior, ProbDist):
        p = np.asarray(prior, dtype=np.float64)
        if p.shape != (d, d):
            raise DimensionMismatch(f"prior must have shape ({d}, {d})")
        prior = ProbDist([(a, b) for a in range(d) for b in range(d)], p.reshape(-1))
    arr = codeword_array(d)
    cws = {(a, b): PureState(arr[a, b]) for a in range(d) for b in range(d)}
    return CodewordEnsemble(qd, prior, cws)


def uniform_ensemble(d):
    """Pairs drawn uniformly; the source state of the violation experiment."""
    d = QuditDim.prime(d).d
    return ensemble(d, np.full((d, d), 1.0 / d ** 2))


def marginal_sigma(e, part, value):
    """State of E conditioned on one part taking ``value`` (normalized)."""
    if part not in (0, 1):
        raise ValueError("part must be 0 or 1")
    p = e.prior_matrix()
    w = p[value, :] if part == 0 else p[:, value]
    mass = float(w.sum())
    if mass <= 0:
        raise ZeroMass(f"part {part} never takes value {value}")
    s = e.states()
    vecs = s[value, :, :] if part == 0 else s[:, value, :]
    rho = np.einsum("k,ki,kj->ij", w / mass, vecs, vecs.conj())
    return DensityOp(0.5 * (rho + rho.conj().T))
