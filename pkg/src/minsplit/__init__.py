"""Min-entropy splitting: NC-HV models on one side, a qudit encoding that beats them on the other."""

from . import kernels
from .encoding import (CodewordEnsemble, FiducialState, codeword, codeword_array, ensemble, fiducial,
                       marginal_sigma, part_overlap, uniform_ensemble)
from .errors import (DimensionMismatch, DomainError, IncompleteLabeling, IndexOutOfRange, MinsplitError,
                     NoConvergence, NotHermitian, NotPrime, NotSquare, ValidationError, ZeroMass)
from .guessing import (EntropyValue, GuessCertificate, OracleResult, discriminate_oracle, min_entropy,
                       part_basis_value, pguess_eval, smooth_bounds, whole_string_certificate)
from .linalg import (DensityOp, Povm, ProbDist, PureState, cmatrix, dagger, identity,
                     min_eigenvalue_hermitian, proj, validate_povm)
from .nchv import (DetMeasurement, HiddenVarModel, SplitModel, SplitReport, coin_model, entropy_identities_check,
                   leak, pguess_classical, pointer_split, random_model, split, verify_split)
from .qudit import QuditDim, fourier, is_prime, omega, pauli_x, pauli_z, weyl
from .violation import (AdversaryC, ViolationReport, adversary_scan, leakage_robust_violation,
                        part_guess_given_c, posterior_prior, smallest_violating_prime, violation_curve)

__version__ = "0.1.0"
