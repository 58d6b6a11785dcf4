"""Pointer adversaries against the qudit encoding, and the classical-vs-quantum gap.

A binary classical register C correlated with the source pair is fully
described by ``q[y0, y1] = Pr[C = 0 | y0, y1]``: each codeword is pure, so
anything correlated with the pair can only be correlated through the pair.
Given C = c, the holder of E guesses part c: part 0 by reading the
computational basis, part 1 by reading the Fourier basis.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, ValidationError, ZeroMass
from .guessing import part_overlaps
from .linalg import ProbDist
from .qudit import QuditDim, is_prime


def part_bound(d):
    """1/2 + 1/(2 sqrt d): the guaranteed success for the part C names."""
    return 0.5 + 0.5 / math.sqrt(d)


def classical_bound_bits(d, m_bits=0):
    """(log2 d)/2 - 1 - m: what any NC-HV model must leave in Y_C."""
    return math.log2(d) / 2.0 - 1.0 - m_bits


def quantum_bits_upper(d):
    return -math.log2(part_bound(d))


@dataclass(frozen=True)
class AdversaryC:
    d: QuditDim
    q: np.ndarray
    label: str = ""

    def __post_init__(self):
        d = QuditDim.prime(self.d)
        q = np.array(self.q, dtype=np.float64)
        if q.shape != (d.d, d.d):
            raise ValidationError(f"q must have shape ({d.d}, {d.d}), got {q.shape}")
        if not np.all(np.isfinite(q)) or q.min() < 0.0 or q.max() > 1.0:
            raise ValidationError("q values must lie in [0, 1]")
        q.flags.writeable = False
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "q", q)

    @property
    def dim(self):
        return self.d.d

    def branch_weights(self):
        """Unnormalized P(y0, y1, C = c) for c = 0, 1 under the uniform source."""
        w = np.full(self.q.shape, 1.0 / self.dim ** 2)
        return w * self.q, w * (1.0 - self.q)

    def pr_c(self, c):
        return float(self.branch_weights()[c].sum())

    def to_dict(self):
        return {"label": self.label, "d": self.dim, "q": self.q.tolist()}


def _posterior_matrix(a, c):
    if c not in (0, 1):
        raise ValueError("c must be 0 or 1")
    w = a.branch_weights()[c]
    mass = float(w.sum())
    if mass <= 0.0:
        raise ZeroMass(f"C = {c} never occurs for this adversary")
    return w / mass


def posterior_prior(a, c):
    """P(y0, y1 | C = c) as a ProbDist over pairs."""
    p = _posterior_matrix(a, c)
    d = a.dim
    return ProbDist([(y0, y1) for y0 in range(d) for y1 in range(d)], p.reshape(-1) / p.sum())


def part_guess_given_c(a, c):
    """Success probability for guessing Y_c from E, knowing C = c.

    Basis measurement for part c, each outcome relabelled to the most
    likely value under the posterior (lowest index on ties).
    """
    p = _posterior_matrix(a, c)
    weights = p if c == 0 else p.T  # [guessed, other]
    value, _ = kernels.branch_ml_value(np.ascontiguousarray(weights), part_overlaps(a.dim, c))
    return float(value)


def average_part_guess(a):
    """sum_c Pr[C = c] part_guess_given_c(a, c) over branches with mass."""
    total = 0.0
    for c in (0, 1):
        pc = a.pr_c(c)
        if pc > 0:
            total += pc * part_guess_given_c(a, c)
    return total


def corner_adversaries(d, seed):
    """Deterministic adversaries tried before any random ones.

    d = 2: all 16 maps into {0, 1}.  Larger d: constants 0, 1/2, 1; the
    indicator of y0 = k and of y1 = k for every k, with complements; eight
    seeded random 0/1 maps.
    """
    d = QuditDim.prime(d).d
    if d == 2:
        for bits in range(16):
            q = np.array([(bits >> i) & 1 for i in range(4)], dtype=float).reshape(2, 2)
            yield AdversaryC(d, q, f"corner:{bits:04b}")
        return
    for v in (0.0, 0.5, 1.0):
        yield AdversaryC(d, np.full((d, d), v), f"const:{v:g}")
    idx = np.arange(d)
    for k in range(d):
        row = (idx == k).astype(float)
        for name, q in (("y0", np.repeat(row[:, None], d, axis=1)), ("y1", np.repeat(row[None, :], d, axis=0))):
            yield AdversaryC(d, q, f"{name}=={k}")
            yield AdversaryC(d, 1.0 - q, f"{name}!={k}")
    for j in range(8):
        rng = np.random.default_rng([seed, 1, j])
        yield AdversaryC(d, rng.integers(0, 2, size=(d, d)).astype(float), f"binary#{j}")


def random_adversary(d, seed, index):
    """q drawn iid uniform on [0, 1] from ``default_rng([seed, 0, index])``."""
    rng = np.random.default_rng([seed, 0, index])
    return AdversaryC(d, rng.random((d, d)), f"random#{index}")


@dataclass(frozen=True)
class ViolationReport:
    d: int
    samples: int
    corners: int
    seed: int
    min_part_guess: float
    min_average_guess: float
    worst_adversary: AdversaryC
    worst_branch: int
    worst_per_c: tuple
    tol: float = 1e-9

    @property
    def bound(self):
        return part_bound(self.d)

    @property
    def classical_bound_bits(self):
        return classical_bound_bits(self.d)

    @property
    def quantum_bits_upper(self):
        return -math.log2(self.min_part_guess)

    @property
    def passed(self):
        return self.min_part_guess >= self.bound - self.tol

    @property
    def violated(self):
        return self.classical_bound_bits > self.quantum_bits_upper

    def to_dict(self):
        return {
            "d": self.d,
            "samples": self.samples,
            "corners": self.corners,
            "seed": self.seed,
            "bound": self.bound,
            "min_part_guess": self.min_part_guess,
            "min_average_guess": self.min_average_guess,
            "classical_bound_bits": self.classical_bound_bits,
            "quantum_bits_upper": self.quantum_bits_upper,
            "violated": self.violated,
            "passed": self.passed,
            "worst_branch": self.worst_branch,
            "worst_per_c": list(self.worst_per_c),
            "worst_adversary": self.worst_adversary.to_dict(),
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)


def adversary_scan(d, n, seed, corners=True, tol=1e-9):
    """Minimum part-guessing value over corner and ``n`` random adversaries."""
    d = QuditDim.prime(d).d
    if n < 0:
        raise DomainError("n must be >= 0")
    advs = list(corner_adversaries(d, seed)) if corners else []
    n_corners = len(advs)
    advs.extend(random_adversary(d, seed, i) for i in range(n))
    if not advs:
        raise DomainError("nothing to scan: n = 0 and corners disabled")
    best = None
    best_avg = math.inf
    for a in advs:
        per_c = []
        avg = 0.0
        for c in (0, 1):
            pc = a.pr_c(c)
            if pc <= 0:
                per_c.append(None)
                continue
            v = part_guess_given_c(a, c)
            per_c.append(v)
            avg += pc * v
        best_avg = min(best_avg, avg)
        for c, v in enumerate(per_c):
            if v is not None and (best is None or v < best[0]):
                best = (v, a, c, tuple(per_c))
    return ViolationReport(d, n, n_corners, int(seed), best[0], best_avg, best[1], best[2], best[3], tol)


@dataclass(frozen=True)
class CurveRow:
    d: int
    classical_bits: float
    quantum_bits_upper: float

    @property
    def gap_bits(self):
        return self.classical_bits - self.quantum_bits_upper


def violation_curve(d_list, m_bits=0):
    rows = []
    for d in d_list:
        d = QuditDim.prime(d).d
        rows.append(CurveRow(d, classical_bound_bits(d, m_bits), quantum_bits_upper(d)))
    return rows


CSV_HEADER = ("d", "classical_bits", "quantum_bits_upper", "gap_bits")


def curve_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.d, f"{r.classical_bits:.10f}", f"{r.quantum_bits_upper:.10f}", f"{r.gap_bits:.10f}"])
    return buf.getvalue()


@dataclass(frozen=True)
class LeakageReport:
    d: int
    m_bits: int
    classical_bits: float
    quantum_bits_upper: float

    @property
    def violated(self):
        return self.classical_bits > self.quantum_bits_upper

    def to_dict(self):
        return {"d": self.d, "m_bits": self.m_bits, "classical_bits": self.classical_bits,
                "quantum_bits_upper": self.quantum_bits_upper, "violated": self.violated}


def leakage_robust_violation(d, m_bits):
    """Leaky classical bound (log2 d)/2 - 1 - m against the quantum part entropy."""
    d = QuditDim.prime(d).d
    if m_bits < 0:
        raise DomainError("m_bits must be >= 0")
    return LeakageReport(d, int(m_bits), classical_bound_bits(d, m_bits), quantum_bits_upper(d))


def _primes(limit):
    return (p for p in range(2, limit + 1) if is_prime(p))


def smallest_violating_prime(m_bits, method="arithmetic", limit=100_000, n=16, seed=0):
    """Smallest prime d whose leaky classical bound beats the quantum part entropy.

    ``method="arithmetic"`` walks the closed-form curve.  ``method="scan"``
    takes the quantum side from an adversary scan at each prime instead.
    """
    if m_bits < 0:
        raise DomainError("m_bits must be >= 0")
    for d in _primes(limit):
        if method == "arithmetic":
            row = violation_curve([d], m_bits)[0]
            if row.gap_bits > 0:
                return d
        elif method == "scan":
            rep = adversary_scan(d, n, seed)
            if rep.classical_bound_bits - m_bits > rep.quantum_bits_upper:
                return d
        else:
            raise ValueError(f"unknown method {method!r}")
    return None
