"""Guessing probabilities, min-entropy, and duality certificates.

All entropies are in bits.  A guessing probability ``p`` over a d-symbol
alphabet that equals ``1/d`` is ``log2 d`` bits, i.e. one dit.
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .encoding import codeword_array, part_overlap, uniform_ensemble
from .errors import DimensionMismatch, DomainError, IncompleteLabeling, NoConvergence
from .linalg import DEFAULT_TOL, DensityOp, Povm, ProbDist, validate_povm
from .qudit import QuditDim, fourier


@dataclass(frozen=True, order=True)
class EntropyValue:
    bits: float
    base: int = 2

    def __float__(self):
        return self.bits


def min_entropy(p):
    """-log2 p for a guessing probability in (0, 1]."""
    if not (0.0 < p <= 1.0 + 1e-12):
        raise DomainError(f"guessing probability must lie in (0, 1], got {p}")
    return EntropyValue(-math.log2(min(p, 1.0)))


def smooth_bounds(p, eps):
    """Sandwich for the eps-smooth min-entropy of a variable with guessing probability p.

    Lower end is the plain min-entropy, upper end ``-log2(p - eps)``.
    """
    if not (0.0 < p <= 1.0 + 1e-12):
        raise DomainError(f"guessing probability must lie in (0, 1], got {p}")
    if not (0.0 <= eps < p):
        raise DomainError(f"need 0 <= eps < p, got eps={eps}, p={p}")
    return min_entropy(p), EntropyValue(-math.log2(min(p, 1.0) - eps))


def pguess_eval(e, m, labeling=None):
    """Success probability of measurement ``m`` on ensemble ``e``.

    ``labeling`` maps each outcome label of ``m`` to the guessed pair; by
    default the outcome labels themselves are the guesses.
    """
    d = e.dim
    if m.dim != d:
        raise DimensionMismatch(f"measurement acts on dimension {m.dim}, ensemble on {d}")
    if labeling is None:
        guesses = list(m.labels)
    else:
        missing = [lbl for lbl in m.labels if lbl not in labeling]
        if missing:
            raise IncompleteLabeling(f"no guess for outcomes {missing[:5]}")
        guesses = [labeling[lbl] for lbl in m.labels]
    prior = e.prior_matrix()
    states = e.states()
    total = 0.0
    for k, guess in enumerate(guesses):
        try:
            a, b = guess
        except (TypeError, ValueError):
            raise IncompleteLabeling(f"outcome {m.labels[k]!r} is not labelled by a pair") from None
        if not (0 <= a < d and 0 <= b < d):
            raise IncompleteLabeling(f"guess {guess} outside the alphabet")
        if prior[a, b] == 0.0:
            continue
        psi = states[a, b]
        total += prior[a, b] * float(np.vdot(psi, m.elements[k] @ psi).real)
    return total


@dataclass(frozen=True)
class GuessCertificate:
    """Primal measurement plus dual operator bounding a guessing probability."""

    povm: Povm
    dual_op: np.ndarray
    primal_value: float
    dual_value: float
    povm_defect: float
    povm_min_eigenvalue: float
    dual_slacks: np.ndarray

    @property
    def gap(self):
        return self.dual_value - self.primal_value

    @property
    def worst_dual_slack(self):
        return float(np.min(self.dual_slacks))

    def is_valid(self, tol=DEFAULT_TOL):
        return (self.gap >= -tol and self.worst_dual_slack >= -tol
                and self.povm_min_eigenvalue >= -tol and self.povm_defect <= tol)

    def to_dict(self):
        return {
            "d": self.povm.dim,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "povm_defect": self.povm_defect,
            "worst_dual_slack": self.worst_dual_slack,
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def dual_slacks(prior_weights, states, q):
    """Smallest eigenvalue of ``Q - p_y rho_y`` for every hypothesis y.

    ``states`` is a (N, n, n) stack of density matrices.
    """
    q = np.asarray(q, dtype=np.complex128)
    q = 0.5 * (q + q.conj().T)
    diffs = q[None, :, :] - np.asarray(prior_weights)[:, None, None] * np.asarray(states)
    return kernels.min_eigvals_batch(diffs)


def whole_string_certificate(d):
    """Optimality certificate for guessing both dits of the uniform source.

    Primal: the pretty-good measurement |Psi_y><Psi_y| / d.  Dual: I / d^2.
    """
    d = QuditDim.prime(d).d
    e = uniform_ensemble(d)
    cw = codeword_array(d).reshape(d * d, d)
    projectors = np.einsum("ki,kj->kij", cw, cw.conj())
    labels = [(a, b) for a in range(d) for b in range(d)]
    povm = Povm(projectors / d, labels)
    report = validate_povm(povm)
    primal = pguess_eval(e, povm)
    q = np.eye(d, dtype=np.complex128) / d ** 2
    slacks = dual_slacks(np.full(d * d, 1.0 / d ** 2), projectors, q)
    return GuessCertificate(
        povm=povm,
        dual_op=q,
        primal_value=primal,
        dual_value=float(np.trace(q).real),
        povm_defect=report.completeness_defect,
        povm_min_eigenvalue=report.worst_min_eigenvalue,
        dual_slacks=slacks,
    )


def part_overlaps(d, part):
    """Outcome probabilities of the basis measurement for ``part``.

    Returns array[g, o, j]: probability of outcome j on the codeword whose
    guessed part is g and other part is o.  Part 0 is read in the
    computational basis, part 1 in the Fourier basis.
    """
    if part not in (0, 1):
        raise ValueError("part must be 0 or 1")
    return _part_overlaps(QuditDim.prime(d).d, part)


@lru_cache(maxsize=64)
def _part_overlaps(d, part):
    cw = codeword_array(d)
    if part == 0:
        out = np.abs(cw) ** 2  # [y0, y1, j] = |<j|Psi>|^2
    else:
        amps = cw @ fourier(d).conj()  # <j|F^H|Psi> = sum_k conj(F[k, j]) Psi[k]
        out = np.ascontiguousarray(np.swapaxes(np.abs(amps) ** 2, 0, 1))  # [y1, y0, j]
    out.flags.writeable = False
    return out


def part_basis_value(e, part, decision="identity"):
    """Success probability of reading one part in its natural basis.

    ``decision="identity"`` guesses the outcome itself; ``"ml"`` relabels
    each outcome by maximum likelihood under the prior (lowest index on ties),
    which can only do better.
    """
    d = e.dim
    overlaps = part_overlaps(d, part)
    prior = e.prior_matrix()
    weights = prior if part == 0 else prior.T  # [guessed, other]
    if decision == "identity":
        g = np.arange(d)
        return float(np.einsum("go,go->", weights, overlaps[g, :, g]))
    if decision == "ml":
        return kernels.branch_ml_value(weights, overlaps)[0]
    raise ValueError(f"unknown decision rule {decision!r}")


@dataclass(frozen=True)
class OracleResult:
    povm: Povm
    value: float
    certified_gap: float
    worst_slack: float
    dual_op: np.ndarray
    iterations: int

    def __iter__(self):
        return iter((self.povm, self.value, self.certified_gap))


def _as_density_stack(states):
    mats = [s.matrix if isinstance(s, DensityOp) else np.asarray(s, dtype=np.complex128) for s in states]
    if not mats:
        raise DimensionMismatch("no states given")
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise DimensionMismatch("states must share one dimension")
    return np.stack(mats)


def _certify(weighted, povm_stack):
    n = weighted.shape[1]
    value = float(np.einsum("kij,kji->", weighted, povm_stack).real)
    q = np.einsum("kij,kjl->il", weighted, povm_stack)
    q = 0.5 * (q + q.conj().T)
    slacks = kernels.min_eigvals_batch(q[None] - weighted)
    worst = float(np.min(slacks))
    shift = max(0.0, -worst)
    q_cert = q + shift * np.eye(n)
    gap = float(np.trace(q_cert).real) - value
    return value, max(gap, 0.0), worst, q_cert


def _inv_sqrt(g):
    w, v = kernels.eigh(g)
    scale = max(float(np.max(np.abs(w))), 1e-300) * 1e-13
    keep = w > scale
    inv = np.where(keep, 1.0 / np.sqrt(np.where(keep, w, 1.0)), 0.0)
    support = (v * keep) @ v.conj().T
    return (v * inv) @ v.conj().T, support


def discriminate_oracle(prior, states, tol=DEFAULT_TOL, max_iter=2000, labels=None):
    """Minimum-error discrimination by fixed-point iteration, certified post hoc.

    Iterates M_y <- G^{-1/2} (p_y rho_y) M_y (p_y rho_y) G^{-1/2}, with
    G = sum_y (p_y rho_y) M_y (p_y rho_y), which keeps every iterate a POVM.
    Each iterate is certified by the dual operator Q = Herm(sum_y p_y rho_y M_y)
    shifted by the worst slack so that Q >= p_y rho_y for all y; the
    certified gap tr(Q) - value bounds the distance to the optimum.
    """
    rhos = _as_density_stack(states)
    weights = np.asarray(prior.weights if isinstance(prior, ProbDist) else prior, dtype=np.float64)
    if weights.shape != (rhos.shape[0],):
        raise DimensionMismatch("prior and states differ in length")
    if labels is None:
        labels = tuple(prior.support) if isinstance(prior, ProbDist) else tuple(range(len(weights)))
    n_hyp, n, _ = rhos.shape
    weighted = weights[:, None, None] * rhos
    m = np.broadcast_to(np.eye(n, dtype=np.complex128) / n_hyp, rhos.shape).copy()
    best = None
    for it in range(max_iter + 1):
        value, gap, worst, q_cert = _certify(weighted, m)
        if best is None or gap < best.certified_gap:
            best = OracleResult(Povm(m, labels), value, gap, worst, q_cert, it)
        if gap <= tol:
            return best
        if it == max_iter:
            break
        g = np.einsum("kij,kjl,klm->im", weighted, m, weighted)
        g = 0.5 * (g + g.conj().T)
        s, support = _inv_sqrt(g)
        m = np.einsum("ij,kjl,klm,kmn,np->kip", s, weighted, m, weighted, s)
        m = 0.5 * (m + np.conj(np.swapaxes(m, 1, 2)))
        # directions no hypothesis reaches go to the first outcome
        m[0] += np.eye(n) - support
    raise NoConvergence(max_iter, best=best, gap=best.certified_gap)
