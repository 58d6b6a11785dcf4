"""Command-line front end.

Exit codes: 0 success, 1 a numerical claim failed, 2 usage or validation error.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import nchv, violation
from .encoding import fiducial, uniform_ensemble
from .errors import MinsplitError, ValidationError
from .guessing import part_basis_value, whole_string_certificate
from .qudit import QuditDim, fourier
from .svg import line_chart

EXIT_OK, EXIT_CLAIM, EXIT_USAGE = 0, 1, 2
DEFAULT_CURVE = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 101)


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int = 2
    n_samples: int = 0
    seed: Optional[int] = None
    tolerance: float = 1e-9
    output_path: Optional[str] = None
    format: str = "json"
    d_list: tuple = DEFAULT_CURVE
    m_bits: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValidationError("--tol must be positive")
        if self.n_samples < 0:
            raise ValidationError("--n must be >= 0")
        if self.d < 2:
            raise ValidationError("--d must be >= 2")
        if self.seed is not None and self.seed < 0:
            raise ValidationError("--seed must be a non-negative integer")
        if self.m_bits < 0:
            raise ValidationError("--m must be >= 0")


class UsageError(Exception):
    pass


def _need_seed(cfg, why):
    if cfg.seed is None:
        raise UsageError(f"--seed is required {why}")


def _emit(cfg, text):
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc):
    return json.dumps(doc, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    return f"{x:.10f}"


def cmd_verify_encoding(cfg):
    d = QuditDim.prime(cfg.d).d
    amps = fiducial(d).amplitudes
    norm_defect = abs(float(np.vdot(amps, amps).real) - 1.0)
    f_defect = float(np.linalg.norm(fourier(d) @ amps - amps))
    cert = whole_string_certificate(d)
    e = uniform_ensemble(d)
    bound = violation.part_bound(d)
    parts = [part_basis_value(e, 0), part_basis_value(e, 1)]
    defects = {
        "fiducial_norm_defect": norm_defect,
        "fourier_invariance_defect": f_defect,
        "whole_string_value_defect": max(abs(cert.primal_value - 1.0 / d), abs(cert.dual_value - 1.0 / d)),
        "part0_defect": abs(parts[0] - bound),
        "part1_defect": abs(parts[1] - bound),
    }
    passed = cert.is_valid(cfg.tolerance) and cert.gap <= cfg.tolerance and all(
        v <= cfg.tolerance for v in defects.values())
    doc = {"d": d, "tolerance": cfg.tolerance, **defects, "certificate": cert.to_dict(),
           "part0_value": parts[0], "part1_value": parts[1], "part_bound": bound, "passed": passed}
    if cfg.format == "csv":
        flat = {k: v for k, v in doc.items() if k != "certificate"}
        flat.update({f"certificate_{k}": v for k, v in cert.to_dict().items() if k != "d"})
        _emit(cfg, _csv(("key", "value"), [(k, v) for k, v in flat.items()]))
    elif cfg.format == "json":
        _emit(cfg, _json(doc))
    else:
        raise UsageError("verify-encoding supports --format json or csv")
    return EXIT_OK if passed else EXIT_CLAIM


def cmd_splitting_demo(cfg):
    if cfg.n_samples > 0:
        _need_seed(cfg, "for a randomized corpus")
    reports = [nchv.verify_split(nchv.split(nchv.coin_model(cfg.d)), cfg.tolerance, case="coin")]
    pointer = nchv.verify_split(nchv.pointer_split(cfg.d), cfg.tolerance, case="pointer")
    for i, m in nchv.random_corpus(cfg.n_samples, cfg.seed if cfg.seed is not None else 0, d=cfg.d):
        reports.append(nchv.verify_split(nchv.split(m), cfg.tolerance, case=f"random#{i}", seed=[cfg.seed, i]))
    passed = all(r.passed for r in reports)
    if cfg.format == "csv":
        rows = [(r.case, _fmt(r.alpha_bits), _fmt(r.hyc_c_bits), _fmt(r.hidden_c_bound), str(r.passed).lower())
                for r in reports]
        _emit(cfg, _csv(("case", "alpha_bits", "hyc_c_bits", "bound_bits", "pass"), rows))
    elif cfg.format == "json":
        _emit(cfg, _json({
            "d": cfg.d, "n": cfg.n_samples, "seed": cfg.seed, "tolerance": cfg.tolerance,
            "cases": len(reports), "passed": passed,
            "worst_hidden_c_slack": min(r.hidden_c_slack for r in reports),
            "worst_given_c_slack": min(r.given_c_slack for r in reports),
            "pointer_hyc_given_c_bits": pointer.hyc_given_c_bits,
            "reports": [r.to_dict() for r in reports],
        }))
    else:
        raise UsageError("splitting-demo supports --format json or csv")
    return EXIT_OK if passed else EXIT_CLAIM


def cmd_violation_scan(cfg):
    d = QuditDim.prime(cfg.d).d
    if cfg.n_samples > 0 or d > 2:
        _need_seed(cfg, "for an adversary scan")
    rep = violation.adversary_scan(d, cfg.n_samples, cfg.seed or 0, tol=cfg.tolerance)
    if cfg.format == "json":
        _emit(cfg, _json(rep.to_dict()))
    elif cfg.format == "csv":
        doc = rep.to_dict()
        keys = ("d", "samples", "corners", "seed", "bound", "min_part_guess", "classical_bound_bits",
                "quantum_bits_upper", "violated", "passed")
        _emit(cfg, _csv(keys, [[doc[k] for k in keys]]))
    else:
        raise UsageError("violation-scan supports --format json or csv")
    return EXIT_OK if rep.passed else EXIT_CLAIM


def cmd_violation_curve(cfg):
    rows = violation.violation_curve(cfg.d_list, cfg.m_bits)
    if cfg.format == "csv":
        _emit(cfg, violation.curve_to_csv(rows))
    elif cfg.format == "json":
        _emit(cfg, _json({"m_bits": cfg.m_bits, "rows": [
            {"d": r.d, "classical_bits": r.classical_bits, "quantum_bits_upper": r.quantum_bits_upper,
             "gap_bits": r.gap_bits} for r in rows]}))
    else:
        title = "Y_C min-entropy: NC-HV bound vs quantum" + (f" (m = {cfg.m_bits})" if cfg.m_bits else "")
        _emit(cfg, line_chart(
            [r.d for r in rows],
            [("classical bound", [r.classical_bits for r in rows]),
             ("quantum upper", [r.quantum_bits_upper for r in rows])],
            title=title, xlabel="d", ylabel="bits"))
    return EXIT_OK


def cmd_leakage(cfg):
    if cfg.format != "json":
        raise UsageError("leakage supports --format json only")
    _need_seed(cfg, "for the scan-based search")
    arith = violation.smallest_violating_prime(cfg.m_bits, "arithmetic")
    scan = violation.smallest_violating_prime(cfg.m_bits, "scan", n=cfg.n_samples, seed=cfg.seed)
    doc = {"m_bits": cfg.m_bits, "seed": cfg.seed, "n": cfg.n_samples,
           "smallest_prime_arithmetic": arith, "smallest_prime_scan": scan, "consistent": arith == scan,
           "at_d": violation.leakage_robust_violation(cfg.d, cfg.m_bits).to_dict()}
    _emit(cfg, _json(doc))
    return EXIT_OK if arith == scan else EXIT_CLAIM


COMMANDS = {
    "verify-encoding": cmd_verify_encoding,
    "splitting-demo": cmd_splitting_demo,
    "violation-scan": cmd_violation_scan,
    "violation-curve": cmd_violation_curve,
    "leakage": cmd_leakage,
}


def _d_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=2, help="qudit dimension / alphabet size")
    common.add_argument("--n", type=int, default=0, help="number of random samples")
    common.add_argument("--seed", type=int, default=None, help="master seed (required when randomized)")
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance for pass/fail")
    common.add_argument("--format", choices=("json", "csv", "svg"), default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    p = argparse.ArgumentParser(prog="minsplit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-encoding", parents=[common], help="certificates for the qudit encoding")
    sub.add_parser("splitting-demo", parents=[common], help="split NC-HV models and check both bounds")
    sub.add_parser("violation-scan", parents=[common], help="search for pointer adversaries")
    c = sub.add_parser("violation-curve", parents=[common], help="classical bound vs quantum value over d")
    c.add_argument("--d-list", type=_d_list, default=DEFAULT_CURVE)
    c.add_argument("--m", type=int, default=0, help="bits leaked by the hidden-variable model")
    lk = sub.add_parser("leakage", parents=[common], help="smallest violating prime for m leaked bits")
    lk.add_argument("--m", type=int, default=1)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    fmt = args.format or ("csv" if args.command == "violation-curve" else "json")
    try:
        cfg = RunConfig(
            command=args.command, d=args.d,
            n_samples=args.n if not (args.command == "leakage" and args.n == 0) else 16,
            seed=args.seed, tolerance=args.tol, output_path=args.out, format=fmt,
            d_list=getattr(args, "d_list", DEFAULT_CURVE), m_bits=getattr(args, "m", 0))
        return COMMANDS[args.command](cfg)
    except (UsageError, ValidationError, OSError) as exc:
        print(f"minsplit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MinsplitError as exc:
        print(f"minsplit {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_CLAIM


if __name__ == "__main__":
    sys.exit(main())
