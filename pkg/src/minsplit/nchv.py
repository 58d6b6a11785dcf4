"""Deterministic non-contextual hidden-variable models and min-entropy splitting.

A model is stored as two arrays: ``prior[y0, y1]`` and
``preparations[y0, y1, k] = p(lambda_k | P_{y0 y1})``.  Every guessing
probability below is an exhaustive sum over the hidden variables, so all
results are exact up to floating-point rounding.

Side information E is the hidden variable itself.  Deterministic effects
partition the hidden variables, so reading lambda and deciding by maximum
likelihood is optimal among all measurements.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError, IncompleteLabeling, ValidationError

TARGETS = ("whole", "part0", "part1")
NORM_TOL = 1e-12


def _frozen(a):
    a.flags.writeable = False
    return a


def _hashable(label):
    if isinstance(label, list):
        return tuple(_hashable(x) for x in label)
    return label


def _jsonable(label):
    if isinstance(label, tuple):
        return [_jsonable(x) for x in label]
    if isinstance(label, np.integer):
        return int(label)
    return label


def _target_joint(joint, target):
    """Collapse a (d, d, ...) joint onto the guessed variable: shape (values, ...)."""
    if target == "whole":
        return joint.reshape((-1,) + joint.shape[2:])
    if target == "part0":
        return joint.sum(axis=1)
    if target == "part1":
        return joint.sum(axis=0)
    raise ValueError(f"target must be one of {TARGETS}, got {target!r}")


def _bits(p):
    return 0.0 - math.log2(min(max(p, 1e-300), 1.0))


@dataclass(frozen=True)
class HiddenVarModel:
    """Preparations of every dit pair as distributions over a finite Lambda."""

    d: int
    lambdas: tuple
    preparations: np.ndarray  # [y0, y1, k]
    prior: np.ndarray  # [y0, y1]

    def __post_init__(self):
        d = int(self.d)
        if d < 2:
            raise ValidationError(f"alphabet size must be >= 2, got {self.d}")
        lambdas = tuple(_hashable(x) for x in self.lambdas)
        if not lambdas:
            raise ValidationError("need at least one hidden variable")
        if len(set(lambdas)) != len(lambdas):
            raise ValidationError("duplicate hidden-variable labels")
        prep = np.array(self.preparations, dtype=np.float64)
        prior = np.array(self.prior, dtype=np.float64)
        if prep.shape != (d, d, len(lambdas)):
            raise DimensionMismatch(f"preparations must have shape ({d}, {d}, {len(lambdas)}), got {prep.shape}")
        if prior.shape != (d, d):
            raise DimensionMismatch(f"prior must have shape ({d}, {d}), got {prior.shape}")
        for name, arr in (("preparation", prep), ("prior", prior)):
            if not np.all(np.isfinite(arr)) or np.any(arr < -1e-15):
                raise ValidationError(f"{name} has negative or non-finite weights")
        rows = prep.sum(axis=2)
        if np.max(np.abs(rows - 1.0)) > NORM_TOL:
            raise ValidationError(f"preparation sums off by {np.max(np.abs(rows - 1.0)):.2e}")
        if abs(prior.sum() - 1.0) > NORM_TOL:
            raise ValidationError(f"prior sums to {prior.sum()!r}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "preparations", _frozen(np.clip(prep, 0.0, None)))
        object.__setattr__(self, "prior", _frozen(np.clip(prior, 0.0, None)))

    @classmethod
    def from_maps(cls, d, lambdas, preparations, prior):
        """Build from ``{(y0, y1): ProbDist over lambdas}`` and a ProbDist over pairs."""
        lambdas = tuple(_hashable(x) for x in lambdas)
        index = {lam: k for k, lam in enumerate(lambdas)}
        prep = np.zeros((d, d, len(lambdas)))
        for (y0, y1), dist in preparations.items():
            for lam, w in dist.items():
                if lam not in index:
                    raise DimensionMismatch(f"preparation mentions unknown hidden variable {lam!r}")
                prep[y0, y1, index[lam]] += w
        pr = np.zeros((d, d))
        for (y0, y1), w in prior.items():
            pr[y0, y1] += w
        return cls(d, lambdas, prep, pr)

    @property
    def n_lambda(self):
        return len(self.lambdas)

    def joint(self):
        """p(y0, y1, lambda) as a (d, d, L) array."""
        return self.prior[:, :, None] * self.preparations

    def p_lambda(self):
        """p(lambda) = sum_y p(P_y) p(lambda | P_y)."""
        return self.joint().sum(axis=(0, 1))

    def to_dict(self):
        d = self.d
        return {
            "d": d,
            "lambdas": [_jsonable(x) for x in self.lambdas],
            "prior": [[a, b, float(self.prior[a, b])] for a in range(d) for b in range(d)],
            "preparations": [[a, b, self.preparations[a, b].tolist()] for a in range(d) for b in range(d)],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text) if isinstance(text, str) else text
        d = int(doc["d"])
        lambdas = tuple(_hashable(x) for x in doc["lambdas"])
        prep = np.zeros((d, d, len(lambdas)))
        prior = np.zeros((d, d))
        for a, b, p in doc["prior"]:
            prior[a, b] = p
        for a, b, row in doc["preparations"]:
            prep[a, b] = row
        return cls(d, lambdas, prep, prior)


@dataclass(frozen=True)
class DetMeasurement:
    """Deterministic measurement: every hidden variable answers one outcome."""

    assignment: dict

    def outcomes_for(self, model):
        missing = [lam for lam in model.lambdas if lam not in self.assignment]
        if missing:
            raise IncompleteLabeling(f"no outcome for hidden variables {missing[:5]}")
        return [self.assignment[lam] for lam in model.lambdas]


def finest_measurement(model):
    """The measurement that reads lambda itself."""
    return DetMeasurement({lam: k for k, lam in enumerate(model.lambdas)})


def measurement_value(model, meas, target="whole"):
    """Success probability of ``meas`` followed by the best decision per outcome."""
    tj = _target_joint(model.joint(), target)
    outcomes = meas.outcomes_for(model)
    groups = {}
    for k, o in enumerate(outcomes):
        groups.setdefault(o, []).append(k)
    return float(sum(tj[:, ks].sum(axis=1).max() for ks in groups.values()))


def pguess_classical(model, target="whole"):
    """sum_lambda max_t p(t, lambda): the optimal guessing probability of ``target``."""
    return float(_target_joint(model.joint(), target).max(axis=0).sum())


def hmin_classical(model, target="whole"):
    return _bits(pguess_classical(model, target))


# --- splitting ---------------------------------------------------------------


@dataclass(frozen=True)
class SplitModel:
    """Extension of a model by a binary pointer C.

    ``branch[y0, y1, k]`` is True when hidden variable k under pair y is
    routed to C = 1.  The extended hidden variables are ``(lambda, c)``;
    preparation P_{y c} lives on the copies tagged c.  ``targets[c]`` is the
    part the pointer names when C = c.
    """

    base: HiddenVarModel
    branch: np.ndarray
    alpha: float
    threshold: float
    targets: tuple = (1, 0)

    def __post_init__(self):
        b = np.array(self.branch, dtype=bool)
        if b.shape != self.base.preparations.shape:
            raise DimensionMismatch("branch mask must match the preparations array")
        if tuple(self.targets) not in ((1, 0), (0, 1)):
            raise ValidationError("targets must name one part per branch")
        object.__setattr__(self, "branch", _frozen(b))
        object.__setattr__(self, "targets", tuple(self.targets))

    @property
    def extended_lambdas(self):
        return tuple((lam, c) for c in (0, 1) for lam in self.base.lambdas)

    def branch_weights(self):
        """q[y0, y1, c]: probability that pair y is routed to branch c."""
        prep = self.base.preparations
        q1 = (prep * self.branch).sum(axis=2)
        return np.stack([1.0 - q1, q1], axis=-1)

    def branch_preparations(self):
        """p((lambda, c) | P_{y c}) as [y0, y1, c, k]; all zeros for an empty branch."""
        prep = self.base.preparations
        masks = np.stack([~self.branch, self.branch], axis=2)
        raw = prep[:, :, None, :] * masks
        mass = raw.sum(axis=3, keepdims=True)
        return np.divide(raw, mass, out=np.zeros_like(raw), where=mass > 0)

    def extended_preparations(self):
        """p(lambda' | P_{y c}) over the full extended set, shape [y0, y1, c, 2L]."""
        d, L = self.base.d, self.base.n_lambda
        out = np.zeros((d, d, 2, 2 * L))
        bp = self.branch_preparations()
        out[:, :, 0, :L] = bp[:, :, 0]
        out[:, :, 1, L:] = bp[:, :, 1]
        return out

    def extended_prior(self):
        """p(P_{y c}) = q_c p(P_y), shape [y0, y1, c]."""
        return self.base.prior[:, :, None] * self.branch_weights()

    def extension_defect(self):
        """Largest deviation of the C-marginal of the extension from the base preparations."""
        L = self.base.n_lambda
        mix = np.einsum("abc,abck->abk", self.branch_weights(), self.extended_preparations())
        folded = mix[:, :, :L] + mix[:, :, L:]
        return float(np.max(np.abs(folded - self.base.preparations)))

    def extended_joint(self):
        """p(y0, y1, c, lambda, c') with lambda' = (lambda, c') unfolded: [y0, y1, c, L, 2]."""
        L = self.base.n_lambda
        ext = self.extended_prior()[:, :, :, None] * self.extended_preparations()
        return np.stack([ext[..., :L], ext[..., L:]], axis=-1)


def _threshold_split(model):
    joint = model.joint()
    p_whole = float(joint.max(axis=(0, 1)).sum())
    alpha = _bits(p_whole)
    t = 2.0 ** (-alpha / 2.0)
    pl = joint.sum(axis=(0, 1))
    post1 = np.divide(joint.sum(axis=0), pl, out=np.zeros((model.d, model.n_lambda)), where=pl > 0)
    # ties (up to rounding) go to C = 1
    ind = post1 >= t - 1e-12  # [y1, k]
    branch = np.broadcast_to(ind[None, :, :], joint.shape)
    return alpha, t, branch


def split(model):
    """Extend ``model`` by the threshold pointer.

    With alpha the min-entropy of the pair and t = 2^(-alpha/2), every
    (y1, lambda) whose posterior sum_y0 p(P_{y0 y1} | lambda) reaches t is
    routed to C = 1, which then names Y0.  The rest go to C = 0, naming Y1.
    Hidden variables of zero probability have posterior 0 and go to C = 0.
    """
    alpha, t, branch = _threshold_split(model)
    return SplitModel(model, branch, alpha, t, targets=(1, 0))


@dataclass(frozen=True)
class SplitReport:
    alpha_bits: float
    threshold: float
    hyc_c_bits: float
    hyc_given_c_bits: float
    extension_defect: float
    branch0_posterior_max: float
    branch0_extended_posterior_max: float
    tol: float = 1e-9
    case: str = ""
    seed: object = None

    @property
    def hidden_c_bound(self):
        return self.alpha_bits / 2.0

    @property
    def given_c_bound(self):
        return self.alpha_bits / 2.0 - 1.0

    @property
    def hidden_c_slack(self):
        return self.hyc_c_bits - self.hidden_c_bound

    @property
    def given_c_slack(self):
        return self.hyc_given_c_bits - self.given_c_bound

    @property
    def hidden_c_pass(self):
        return self.hidden_c_slack >= -self.tol

    @property
    def given_c_pass(self):
        return self.given_c_slack >= -self.tol

    @property
    def passed(self):
        return self.hidden_c_pass and self.given_c_pass

    def to_dict(self):
        return {
            "case": self.case,
            "seed": self.seed,
            "alpha_bits": self.alpha_bits,
            "threshold": self.threshold,
            "hyc_c_bits": self.hyc_c_bits,
            "hyc_given_c_bits": self.hyc_given_c_bits,
            "hidden_c_bound_bits": self.hidden_c_bound,
            "given_c_bound_bits": self.given_c_bound,
            "hidden_c_slack": self.hidden_c_slack,
            "given_c_slack": self.given_c_slack,
            "hidden_c_pass": self.hidden_c_pass,
            "given_c_pass": self.given_c_pass,
            "extension_defect": self.extension_defect,
            "branch0_posterior_max": self.branch0_posterior_max,
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def verify_split(s, tol=1e-9, case="", seed=None):
    """Evaluate both splitting inequalities on the extended model by exhaustive sums.

    H(Y_C C | E): E reads the original hidden variable but not the C tag, and
    must name both C and the value of the part C points to.
    H(Y_C | E C): C is handed over as well.
    """
    xj = s.extended_joint()  # [y0, y1, c, k, c']
    per_branch = []
    for c in (0, 1):
        part = "part0" if s.targets[c] == 0 else "part1"
        per_branch.append(_target_joint(xj[:, :, c], part))  # [v, k, c']
    hidden_tag = np.stack([pb.sum(axis=2) for pb in per_branch])  # [c, v, k]
    p_cc = float(hidden_tag.max(axis=(0, 1)).sum())
    with_tag = np.stack([pb for pb in per_branch])  # [c, v, k, c']
    p_given_c = float(with_tag.max(axis=1).sum())

    joint = s.base.joint()
    pl = joint.sum(axis=(0, 1))
    j0 = (joint * ~s.branch).sum(axis=0)  # [y1, k]
    post_base = np.divide(j0, pl, out=np.zeros_like(j0), where=pl > 0)
    p0 = (joint * ~s.branch).sum(axis=(0, 1))
    post_ext = np.divide(j0, p0, out=np.zeros_like(j0), where=p0 > 0)
    return SplitReport(
        alpha_bits=s.alpha,
        threshold=s.threshold,
        hyc_c_bits=_bits(p_cc),
        hyc_given_c_bits=_bits(p_given_c),
        extension_defect=s.extension_defect(),
        branch0_posterior_max=float(post_base.max()),
        branch0_extended_posterior_max=float(post_ext.max()),
        tol=tol,
        case=case,
        seed=seed,
    )


# --- entropy identities and leakage ---------------------------------------------


def _z_table(model, z_alphabet, z, rng):
    d, L = model.d, model.n_lambda
    if z is None:
        if rng is None:
            raise ValueError("a random Z channel needs an rng")
        return rng.dirichlet(np.ones(z_alphabet), size=(d, d, L))
    if callable(z):
        table = np.zeros((d, d, L, z_alphabet))
        for a in range(d):
            for b in range(d):
                for k, lam in enumerate(model.lambdas):
                    v = int(z(a, b, lam))
                    if not 0 <= v < z_alphabet:
                        raise DomainError(f"Z value {v} outside [0, {z_alphabet})")
                    table[a, b, k, v] = 1.0
        return table
    table = np.asarray(z, dtype=np.float64)
    if table.shape != (d, d, L, z_alphabet):
        raise DimensionMismatch(f"Z channel must have shape {(d, d, L, z_alphabet)}")
    return table


@dataclass(frozen=True)
class IdentityReport:
    z_alphabet: int
    h_y_bits: float
    h_yz_bits: float
    h_y_given_z_bits: float

    @property
    def monotonicity_slack(self):
        """H(YZ|E) - H(Y|E)."""
        return self.h_yz_bits - self.h_y_bits

    @property
    def chain_slack(self):
        """H(Y|EZ) - (H(YZ|E) - log2 |Z|)."""
        return self.h_y_given_z_bits - (self.h_yz_bits - math.log2(self.z_alphabet))

    def passed(self, tol=1e-9):
        return self.monotonicity_slack >= -tol and self.chain_slack >= -tol


def entropy_identities_check(model, z_alphabet, z=None, rng=None, target="whole"):
    """Check monotonicity and the chain rule for an extra classical Z.

    ``z`` is a channel array ``[y0, y1, k, z]``, a function ``(y0, y1, lambda) -> z``,
    or None for a channel drawn from ``rng``.
    """
    if z_alphabet < 1:
        raise DomainError("Z needs at least one symbol")
    table = _z_table(model, z_alphabet, z, rng)
    full = model.joint()[..., None] * table  # [y0, y1, k, z]
    tj = _target_joint(full, target)  # [t, k, z]
    p_y = float(tj.sum(axis=2).max(axis=0).sum())
    p_yz = float(tj.max(axis=(0, 2)).sum())
    p_y_z = float(tj.max(axis=0).sum())
    return IdentityReport(z_alphabet, _bits(p_y), _bits(p_yz), _bits(p_y_z))


def leak(model, leak_fn, bits):
    """Model whose side information is the pair (lambda, leak_fn(y0, y1, lambda)).

    ``leak_fn`` is a callable ``(y0, y1, lambda) -> int`` or an integer array
    of shape (d, d, L).  A leak that depends on lambda alone tells nothing new.
    """
    if bits < 0:
        raise DomainError("number of leaked bits must be >= 0")
    d, L = model.d, model.n_lambda
    size = 2 ** int(bits)
    if callable(leak_fn):
        vals = np.array([[[int(leak_fn(a, b, lam)) for lam in model.lambdas] for b in range(d)]
                         for a in range(d)], dtype=np.int64).reshape(d, d, L)
    else:
        vals = np.broadcast_to(np.asarray(leak_fn, dtype=np.int64), (d, d, L))
    if vals.min() < 0 or vals.max() >= size:
        raise DomainError(f"leak values must lie in [0, {size})")
    onehot = vals[..., None] == np.arange(size)
    prep = (model.preparations[..., None] * onehot).reshape(d, d, L * size)
    labels = [(lam, a) for lam in model.lambdas for a in range(size)]
    used = onehot.any(axis=(0, 1)).reshape(-1)
    return HiddenVarModel(d, tuple(lbl for lbl, u in zip(labels, used) if u), prep[:, :, used], model.prior)


# --- model constructors ----------------------------------------------------------


def coin_model(d):
    """E reveals Y0 or Y1, each with probability 1/2; Y uniform.

    Hidden variable (v, w): the revealed value v and which part w it belongs to.
    """
    lambdas = tuple((v, w) for w in (0, 1) for v in range(d))
    prep = np.zeros((d, d, 2 * d))
    for a in range(d):
        for b in range(d):
            prep[a, b, a] += 0.5
            prep[a, b, d + b] += 0.5
    return HiddenVarModel(d, lambdas, prep, np.full((d, d), 1.0 / d ** 2))


def pointer_split(d):
    """The coin model with C pointing at the part E did not reveal."""
    m = coin_model(d)
    reveals_y1 = np.array([w == 1 for _, w in m.lambdas])
    branch = np.broadcast_to(reveals_y1, m.preparations.shape)
    alpha = hmin_classical(m, "whole")
    return SplitModel(m, branch, alpha, 2.0 ** (-alpha / 2.0), targets=(1, 0))


def no_side_info_model(d):
    """A single hidden variable: E is useless."""
    return HiddenVarModel(d, ("*",), np.ones((d, d, 1)), np.full((d, d), 1.0 / d ** 2))


def deterministic_model(d):
    """Each pair prepared as a point mass on its own hidden variable."""
    lambdas = tuple((a, b) for a in range(d) for b in range(d))
    prep = np.eye(d * d).reshape(d, d, d * d)
    return HiddenVarModel(d, lambdas, prep, np.full((d, d), 1.0 / d ** 2))


def random_model(rng, d, n_lambda=None, prior="uniform"):
    """Flat-Dirichlet preparations over |Lambda| drawn uniformly from [2, 64]."""
    if n_lambda is None:
        n_lambda = int(rng.integers(2, 65))
    prep = rng.dirichlet(np.ones(n_lambda), size=(d, d))
    if prior == "uniform":
        pr = np.full((d, d), 1.0 / d ** 2)
    elif prior == "random":
        pr = rng.dirichlet(np.ones(d * d)).reshape(d, d)
    else:
        raise ValueError(f"unknown prior kind {prior!r}")
    # renormalize rows so the sums are exact to within rounding
    prep /= prep.sum(axis=2, keepdims=True)
    pr /= pr.sum()
    return HiddenVarModel(d, tuple(range(n_lambda)), prep, pr)


def random_corpus(n, seed, d=None):
    """``n`` seeded random models; case i uses ``default_rng([seed, i])``.

    With ``d=None`` the alphabet cycles through 2, 3, 4.  Odd cases draw a
    random prior, even cases keep it uniform.
    """
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        di = d if d is not None else 2 + i % 3
        yield i, random_model(rng, di, prior="random" if i % 2 else "uniform")


def split_stress_model(d=50):
    """Two hidden variables on which the threshold pointer scores below alpha/2.

    Variable "A" (weight 1 - f) hides y0 completely and leaves three values
    of y1; variable "B" (weight f) pins y0 = 0 and leaves y1 in {0, 1}.
    With f = 1/2 - 1/d the pointer routes all of A to C = 0 and all of B to
    C = 1, and an adversary who only sees lambda names (C, Y_C) too often.
    The variant with C given still clears alpha/2 - 1.
    """
    if d < 4:
        raise DomainError("the construction needs d >= 4")
    f = 0.5 - 1.0 / d
    joint = np.zeros((d, d, 2))
    joint[:, :3, 0] = (1.0 - f) / (3 * d)
    joint[0, :2, 1] += f / 2.0
    prior = joint.sum(axis=2)
    prep = np.zeros_like(joint)
    mass = prior > 0
    prep[mass] = joint[mass] / prior[mass][:, None]
    prep[~mass, 0] = 1.0
    return HiddenVarModel(d, ("A", "B"), prep, prior)
