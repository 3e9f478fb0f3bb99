"""Command-line surface: wires configs to the library and writes JSON/CSV
artifacts.

Subcommands: polys, classify, deficiency, poisson, lambda, oracle,
paper-example.  Options may come from an INI config file (section [run])
with command-line flags taking precedence.  Exit codes: 0 success, 2
validation error, 3 numeric failure, 4 inconclusive under --strict."""
from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import os
import sys
import tempfile
from fractions import Fraction
from typing import Optional

import numpy as np

from .coefficients import CoefficientSequence
from .deficiency import (DeficiencyContext, DeficiencyElement, classify,
                         element_residual, element_max_abs)
from .errors import (ConvergenceFailure, DivergedSeries, InconclusiveSeries,
                     PatchTooLarge, RecurrenceOverflow, TreeJacobiError)
from .exactnum import exact_complex, as_complex
from .boundary import poisson_kernel, reproducing_check
from .lambda_tree import (build_eigenpairs, dimension_audit, eigen_residual,
                          spectrum_enumerate)
from .operator import JacobiOperator, moments
from .coefficients import TreeConfig
from .oracle import build_radial_block, dense_eigensolve
from .orthopoly import alpha_series, compute_polys, poly_roots
from .treecore import format_address, parse_address

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_INCONCLUSIVE = 4


class ValidationError(Exception):
    pass


def parse_coeffs(spec: str) -> CoefficientSequence:
    """Family spec strings:
    paper | constant:LAM[:BETA] | geometric:BASE:RATIO | power:BASE:EXP |
    explicit:l0,l1,...[:b0,b1,...]"""
    parts = spec.split(":")
    name = parts[0]
    try:
        if name == "paper":
            return CoefficientSequence.paper_example()
        if name == "constant":
            lam = Fraction(parts[1])
            beta = Fraction(parts[2]) if len(parts) > 2 else Fraction(0)
            return CoefficientSequence.constant(lam, beta)
        if name == "geometric":
            return CoefficientSequence.geometric(Fraction(parts[1]), Fraction(parts[2]))
        if name == "power":
            exp_text = parts[2]
            exp = int(exp_text) if "." not in exp_text else float(exp_text)
            return CoefficientSequence.power(Fraction(parts[1]), exp)
        if name == "explicit":
            lams = [Fraction(v) for v in parts[1].split(",")]
            betas = [Fraction(v) for v in parts[2].split(",")] if len(parts) > 2 else None
            return CoefficientSequence.explicit(lams, betas)
    except (IndexError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad coefficient spec {spec!r}: {exc}") from None
    raise ValidationError(f"unknown coefficient family {name!r}")


def parse_z(text: str, mode: str):
    try:
        re_text, im_text = text.split(",")
    except ValueError:
        raise ValidationError(f"z must be RE,IM, got {text!r}") from None
    if mode == "exact":
        try:
            return exact_complex(Fraction(re_text), Fraction(im_text))
        except ValueError as exc:
            raise ValidationError(f"bad exact z {text!r}: {exc}") from None
    try:
        return complex(float(re_text), float(im_text))
    except ValueError as exc:
        raise ValidationError(f"bad z {text!r}: {exc}") from None


def atomic_write(path: str, content: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-treejacobi-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, content: str) -> None:
    if args.out:
        atomic_write(args.out, content)
    else:
        sys.stdout.write(content)
        if not content.endswith("\n"):
            sys.stdout.write("\n")


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_polys(args) -> int:
    coeffs = parse_coeffs(args.coeffs)
    z = parse_z(args.z, args.mode)
    if args.mode == "exact":
        from .exactnum import exact_sqrt
        scale = exact_sqrt(args.d) if args.scale is None else exact_complex(Fraction(args.scale))
    else:
        scale = math.sqrt(args.d) if args.scale is None else float(Fraction(args.scale))
    table = compute_polys(coeffs, scale, z, args.n)
    buf = io.StringIO()
    table.to_csv(buf)
    emit(args, buf.getvalue())
    return EXIT_OK


def cmd_classify(args) -> int:
    coeffs = parse_coeffs(args.coeffs)
    z = parse_z(args.z, "float")
    scale = float(Fraction(args.scale)) if args.scale is not None else None
    report = classify(coeffs, args.d, z=z, tol=args.tol, n_max=args.n_max,
                      scale=scale)
    emit(args, dump_json(report.to_json_obj()))
    if args.strict and report.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_deficiency(args) -> int:
    coeffs = parse_coeffs(args.coeffs)
    z = parse_z(args.z, args.mode)
    ctx = DeficiencyContext(coeffs, args.d, z)
    anchor = parse_address(args.anchor) if args.anchor else None
    if anchor is None:
        elem = DeficiencyElement(None, (1.0,), z)
    else:
        coeff_vec = [0.0] * args.d
        coeff_vec[0], coeff_vec[1] = 1.0, -1.0
        elem = DeficiencyElement(anchor, tuple(coeff_vec), z)
    residual = element_residual([elem], ctx, args.depth)
    peak = element_max_abs([elem], ctx, args.depth)
    alpha = alpha_series(coeffs, args.d, as_complex(z), k_max=(len(anchor) + 1 if anchor else 0),
                         tol=args.tol, n_max=args.n_max)
    f = elem.materialize(ctx, min(args.depth, args.materialize_depth))
    obj = {
        "element": elem.to_json_obj(),
        "residual": residual,
        "max_abs": peak,
        "depth": args.depth,
        "alpha_status": alpha.status,
        "alphas": alpha.alphas,
        "values": f.to_json_obj(),
    }
    emit(args, dump_json(obj))
    return EXIT_OK


def cmd_poisson(args) -> int:
    coeffs = parse_coeffs(args.coeffs)
    z = parse_z(args.z, "float")
    y = parse_address(args.y)
    ctx = DeficiencyContext(coeffs, args.d, z)
    alpha = alpha_series(coeffs, args.d, z, k_max=len(y) + 1,
                         tol=args.tol, n_max=args.n_max)
    kernel = poisson_kernel(y, ctx, alpha)
    anchor = y[:-1] if y else None
    if anchor is not None:
        coeff_vec = [0.0] * args.d
        coeff_vec[0], coeff_vec[1] = 1.0, -1.0
        probe = DeficiencyElement(anchor, tuple(coeff_vec), z)
    else:
        probe = DeficiencyElement(None, (1.0,), z)
    check = reproducing_check(probe, y, ctx, alpha)
    obj = {
        "kernel": kernel.to_json_obj(),
        "reproducing_residual_plain": check.residual_plain,
        "reproducing_residual_conjugated": check.residual_conjugated,
        "matching_convention": check.matching_convention,
    }
    emit(args, dump_json(obj))
    return EXIT_OK


def cmd_lambda(args) -> int:
    coeffs = parse_coeffs(args.coeffs)
    pairs = build_eigenpairs(args.n, coeffs, args.d)
    audit = dimension_audit(args.n, args.d)
    spectrum = spectrum_enumerate(coeffs, args.d, args.n)
    obj = {
        "apex_level": args.n,
        "d": args.d,
        "count": len(pairs),
        "eigenpairs": [
            {"eigenvalue": p.eigenvalue,
             "branch": p.branch,
             "root_index": p.root_index,
             "residual": eigen_residual(p, coeffs, args.d),
             "values": p.eigenfunction.to_json_obj()}
            for p in pairs
        ],
        "dimension": {"dim_Mx": audit.dim_Mx, "dim_Vx": audit.dim_Vx,
                      "radial_count": audit.radial_count,
                      "identity_holds": audit.identity_holds},
        "spectrum_points": spectrum.points,
    }
    emit(args, dump_json(obj))
    return EXIT_OK


def cmd_oracle(args) -> int:
    coeffs = parse_coeffs(args.coeffs)
    block = build_radial_block(coeffs, args.d, 0, args.n)
    vals, _ = dense_eigensolve(block)
    roots = poly_roots(coeffs, math.sqrt(args.d), args.n)
    max_dev = float(np.max(np.abs(vals - roots)))
    J = JacobiOperator(coeffs, TreeConfig(args.d))
    m_matrix = moments(J, min(args.n, 10), route="matrix")
    m_tree = moments(J, min(args.n, 10), route="tree")
    obj = {
        "block_size": args.n,
        "roots": [float(t) for t in roots],
        "block_eigenvalues": [float(v) for v in vals],
        "max_root_deviation": max_dev,
        "moments_matrix": [str(m) for m in m_matrix],
        "moments_tree": [str(m) for m in m_tree],
        "moments_agree": m_matrix == m_tree,
    }
    emit(args, dump_json(obj))
    return EXIT_OK


def cmd_paper_example(args) -> int:
    """The worked example: degree 2, lam_n = 2^n, beta_n = lam_n + lam_{n-1}
    with beta_0 = lam_0.  The unscaled matrix is essentially selfadjoint
    (p_n(0) alternates between +1 and -1, so its square series diverges)
    while the sqrt(2)-scaled radial matrix is not (both series converge
    geometrically at z = i) — hence neither is the tree operator."""
    coeffs = CoefficientSequence.paper_example()
    checks = {}

    n_alt = min(200, args.n_max)
    table = compute_polys(coeffs, exact_complex(1), exact_complex(0), n_alt)
    alternating = all(
        table.p[n] == exact_complex((-1) ** n) for n in range(n_alt + 1))
    checks["exact_alternation"] = {
        "pass": bool(alternating), "n": n_alt,
        "detail": "p_n(0) = (-1)^n in exact arithmetic"}

    scaled = classify(coeffs, 2, z=1j, tol=args.tol, n_max=args.n_max)
    checks["scaled_series"] = {
        "pass": scaled.verdict == "not_essentially_selfadjoint",
        "series_p_status": scaled.series_p_status,
        "series_q_status": scaled.series_q_status,
        "verdict": scaled.verdict,
        "detail": "sqrt(2)-scaled matrix: both square series converge at z = i"}

    classical = classify(coeffs, 2, z=0.0 + 0.0j, tol=args.tol,
                         n_max=args.n_max, scale=1.0)
    checks["classical_series"] = {
        "pass": classical.verdict == "essentially_selfadjoint",
        "series_p_status": classical.series_p_status,
        "series_q_status": classical.series_q_status,
        "verdict": classical.verdict,
        "detail": "unscaled matrix: the p-series diverges at z = 0"}

    overall = all(c["pass"] for c in checks.values())
    inconclusive = any(
        c.get("verdict") == "inconclusive" for c in checks.values())
    obj = {"overall_pass": overall, "checks": checks}
    emit(args, dump_json(obj))
    if args.strict and inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if overall else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; flags override it")
    p.add_argument("--d", type=int, default=2, help="branching degree")
    p.add_argument("--coeffs", default="paper",
                   help="coefficient family spec (see parse_coeffs)")
    p.add_argument("--z", default="0,1", help="spectral parameter RE,IM")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--n-max", dest="n_max", type=int, default=100_000)
    p.add_argument("--mode", choices=["float", "exact"], default="float")
    p.add_argument("--out", help="output file (atomic write); stdout if absent")
    p.add_argument("--strict", action="store_true",
                   help="exit 4 when a verdict is inconclusive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treejacobi",
        description="Jacobi operators on homogeneous trees: selfadjointness, "
                    "deficiency spaces, boundary kernel, pure-point spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polys", help="tabulate p_n, q_n as CSV")
    _add_common(p)
    p.add_argument("--n", type=int, default=50, help="max index")
    p.add_argument("--scale", help="off-diagonal scale (default sqrt(d))")
    p.set_defaults(func=cmd_polys)

    p = sub.add_parser("classify", help="essential-selfadjointness verdict")
    _add_common(p)
    p.add_argument("--scale", help="off-diagonal scale (default sqrt(d))")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("deficiency", help="materialize a deficiency element")
    _add_common(p)
    p.add_argument("--anchor", default="", help="anchor address; empty = radial")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--materialize-depth", dest="materialize_depth",
                   type=int, default=8)
    p.set_defaults(func=cmd_deficiency)

    p = sub.add_parser("poisson", help="Poisson kernel at a vertex")
    _add_common(p)
    p.add_argument("--y", default="1.2", help="vertex address")
    p.set_defaults(func=cmd_poisson)

    p = sub.add_parser("lambda", help="one-ended tree eigenpairs and spectrum")
    _add_common(p)
    p.add_argument("--n", type=int, default=3, help="apex level")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("oracle", help="dense cross-checks")
    _add_common(p)
    p.add_argument("--n", type=int, default=6, help="block size")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("paper-example", help="one-command worked example")
    _add_common(p)
    p.set_defaults(func=cmd_paper_example)
    return parser


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser,
                  argv) -> argparse.Namespace:
    if not args.config:
        return args
    cp = configparser.ConfigParser()
    read = cp.read(args.config)
    if not read:
        raise ValidationError(f"config file {args.config!r} not found")
    if not cp.has_section("run"):
        raise ValidationError(f"config file {args.config!r} has no [run] section")
    overrides = {}
    for key, value in cp.items("run"):
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ValidationError(f"config key {key!r} is not a known option")
        overrides[dest] = value
    # flags win: re-parse to find which options were given explicitly
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=")[0].replace("-", "_"))
    for dest, value in overrides.items():
        if dest in explicit:
            continue
        current = getattr(args, dest)
        if isinstance(current, bool):
            setattr(args, dest, value.lower() in ("1", "true", "yes", "on"))
        elif isinstance(current, int):
            setattr(args, dest, int(value))
        elif isinstance(current, float):
            setattr(args, dest, float(value))
        else:
            setattr(args, dest, value)
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(args, parser, argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RecurrenceOverflow as exc:
        print(f"numeric failure: {exc}\nhint: try --mode exact", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConvergenceFailure, DivergedSeries, PatchTooLarge) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InconclusiveSeries as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except TreeJacobiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
