"""
Command-line front end.

Usage:
    pseudoanalytic verify cyl-f-r --res 17,33 --json cyl.json
    pseudoanalytic derive W.vfld f.vfld -o Wdot.vfld
    pseudoanalytic antiderive w.vfld f.vfld -o W.vfld --base 1,1,0
    pseudoanalytic conjugate W0.vfld f.vfld -o W.vfld --direction scalar-to-vector
    pseudoanalytic generate cyl-f-r -o psi.vfld --res 24

Exit codes: 0 every check passed, 1 a check or a numerical precondition failed,
2 usage, file, VFLD or scenario-file errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .antiderivative import (
    HarmonicGauge,
    PotentialPath,
    antiderivative,
    check_potential_size,
    conjugate_scalar,
    conjugate_vector,
)
from .checks import CheckResult, VerifyResult, verify
from .errors import PotentialTooLarge, PseudoanalyticError, ScenarioError, VfldFormatError
from .grid_calculus import BiquaternionField, ScalarField, VectorField
from .report import Report, render_text, write_report
from .scenarios import resolve_scenario, validate_references
from .settings import SETTINGS
from .symmetric_solutions import schrodinger_from_symmetry
from .vekua_ops import (
    bers_derivative,
    make_factorizer,
    schrodinger_residual,
    v1_residual,
    vekua_residual,
)
from .vfld import read_field, write_field

logger = logging.getLogger("pseudoanalytic")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _configure_logging(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else getattr(logging, SETTINGS.log_level, logging.INFO))
    if not logger.handlers:
        h = logging.StreamHandler(sys.stderr)
        h.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))
        logger.addHandler(h)


def _resolutions(raw: str) -> list[int]:
    try:
        values = [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from None
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"resolutions must be non-empty and strictly increasing, got {raw!r}")
    return values


def _point(raw: str) -> tuple[float, float, float]:
    try:
        values = tuple(float(v) for v in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {raw!r}") from None
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {raw!r}")
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", metavar="OUT", help="Also write the report as JSON.")
    p.add_argument(
        "--exclude-boundary",
        type=int,
        default=None,
        metavar="N",
        help=f"Boundary layers excluded from residual norms (default {SETTINGS.exclude_boundary}).",
    )


def _add_potential(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gauge", default="zero", help="'zero' or a VFLD scalar file holding the harmonic h.")
    p.add_argument("--base", type=_point, default=None, help="Base node x,y,z of the integration path.")
    p.add_argument("--force", action="store_true", help="Run the Newton potential above the size limit.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudoanalytic",
        description="Spatial pseudoanalytic functions: Vekua operators, derivatives, antiderivatives and checks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="Run the checks of a scenario.")
    p.add_argument("scenario", help="Shipped scenario name, FILE.ini or FILE.ini:NAME.")
    p.add_argument("--res", type=_resolutions, default=None, help="Refinement resolutions, e.g. 17,33.")
    p.add_argument("--tol-k", type=float, default=None, help="Constant K of the K*h^2 bound.")
    p.add_argument("--force", action="store_true", help="Run the Newton potential above the size limit.")
    _add_common(p)

    p = sub.add_parser("derive", help="Bers derivative of a Vekua solution.")
    p.add_argument("field", help="VFLD scalar, vector or biquaternion field W.")
    p.add_argument("f", help="VFLD scalar factorizing function.")
    p.add_argument("-o", "--out", required=True, help="Output VFLD vector field.")
    p.add_argument("--no-check", action="store_true", help="Skip the Vekua precondition.")
    _add_common(p)

    p = sub.add_parser("antiderive", help="Antiderivative of a successor-equation solution.")
    p.add_argument("field", help="VFLD vector field w.")
    p.add_argument("f", help="VFLD scalar factorizing function.")
    p.add_argument("-o", "--out", required=True, help="Output VFLD biquaternion field.")
    _add_potential(p)
    _add_common(p)

    p = sub.add_parser("conjugate", help="Complete a scalar or vector part to a Vekua solution.")
    p.add_argument("field", help="VFLD scalar W0 or vector field W.")
    p.add_argument("f", help="VFLD scalar factorizing function.")
    p.add_argument("-o", "--out", required=True, help="Output VFLD biquaternion field.")
    p.add_argument("--direction", choices=("scalar-to-vector", "vector-to-scalar"), default="scalar-to-vector")
    _add_potential(p)
    _add_common(p)

    p = sub.add_parser("generate", help="Exact Schrodinger solution of a scenario.")
    p.add_argument("scenario", help="Shipped scenario name, FILE.ini or FILE.ini:NAME.")
    p.add_argument("-o", "--out", required=True, help="Output VFLD scalar field psi.")
    p.add_argument("--res", type=int, default=None, help="Nodes per axis (default: finest scenario resolution).")
    p.add_argument("--base", type=_point, default=None, help="Base node x,y,z of the integration path.")
    p.add_argument("--tol-k", type=float, default=None, help="Constant K of the K*h^2 bound.")
    _add_common(p)
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _exclude(args: argparse.Namespace, default: int) -> int:
    return default if args.exclude_boundary is None else args.exclude_boundary


def _gauge(raw: str) -> HarmonicGauge:
    if raw == "zero":
        return HarmonicGauge.ZERO
    field = read_field(raw)
    if not isinstance(field, ScalarField):
        raise VfldFormatError(f"{raw}: gauge must be a scalar field")
    return HarmonicGauge.from_field(field)


def _read_factorizer(path: str):
    f = read_field(path)
    if not isinstance(f, ScalarField):
        raise VfldFormatError(f"{path}: f must be a scalar field")
    return make_factorizer(f)


def _single(name: str, label: str, residual: float, bound: float, t0: float) -> VerifyResult:
    result = VerifyResult(scenario=name, checks=[CheckResult(label, residual, bound, residual <= bound)])
    result.wall_time = time.perf_counter() - t0
    return result


def cmd_verify(args: argparse.Namespace) -> VerifyResult:
    scenario = resolve_scenario(args.scenario)
    validate_references(scenario)
    return verify(scenario, resolutions=args.res, tol_k=args.tol_k, exclude=args.exclude_boundary, force=args.force)


def cmd_derive(args: argparse.Namespace) -> VerifyResult:
    t0 = time.perf_counter()
    W = read_field(args.field)
    if not isinstance(W, ScalarField | VectorField | BiquaternionField):
        raise VfldFormatError(f"{args.field}: expected a 3D field")
    F = _read_factorizer(args.f)
    exclude = _exclude(args, SETTINGS.exclude_boundary)
    Wd = bers_derivative(W, F, exclude=exclude, check=not args.no_check)
    write_field(args.out, Wd)
    logger.info("Wrote derivative to %s", args.out)
    residual = v1_residual(Wd, F, exclude=exclude)
    return _single(Path(args.field).name, "derivative-successor", residual, SETTINGS.precondition_tol, t0)


def cmd_antiderive(args: argparse.Namespace) -> VerifyResult:
    t0 = time.perf_counter()
    w = read_field(args.field)
    if not isinstance(w, VectorField | BiquaternionField):
        raise VfldFormatError(f"{args.field}: antiderive needs a vector or biquaternion field")
    F = _read_factorizer(args.f)
    check_potential_size(F.domain, force=args.force)
    exclude = _exclude(args, SETTINGS.potential_exclude)
    W = antiderivative(w, F, _gauge(args.gauge), PotentialPath(base=args.base), exclude=exclude)
    write_field(args.out, W)
    logger.info("Wrote antiderivative to %s", args.out)
    residual = vekua_residual(W, F, exclude=exclude)
    return _single(Path(args.field).name, "antiderivative-vekua", residual, SETTINGS.precondition_tol, t0)


def cmd_conjugate(args: argparse.Namespace) -> VerifyResult:
    t0 = time.perf_counter()
    field = read_field(args.field)
    F = _read_factorizer(args.f)
    path = PotentialPath(base=args.base)
    if args.direction == "scalar-to-vector":
        if not isinstance(field, ScalarField):
            raise VfldFormatError(f"{args.field}: scalar-to-vector needs a scalar field")
        check_potential_size(F.domain, force=args.force)
        exclude = _exclude(args, SETTINGS.potential_exclude)
        W_vec = conjugate_vector(field, F, _gauge(args.gauge), path=path, exclude=exclude)
        W = BiquaternionField.from_parts(field, W_vec)
    else:
        if not isinstance(field, VectorField):
            raise VfldFormatError(f"{args.field}: vector-to-scalar needs a vector field")
        exclude = _exclude(args, SETTINGS.exclude_boundary)
        W = BiquaternionField.from_parts(conjugate_scalar(field, F, path, exclude=exclude), field)
    write_field(args.out, W)
    logger.info("Wrote conjugate solution to %s", args.out)
    residual = vekua_residual(W, F, exclude=exclude)
    return _single(Path(args.field).name, "conjugate-vekua", residual, SETTINGS.precondition_tol, t0)


def cmd_generate(args: argparse.Namespace) -> VerifyResult:
    t0 = time.perf_counter()
    scenario = resolve_scenario(args.scenario)
    validate_references(scenario)
    fixed = scenario.fixed_domain()
    domain = fixed if fixed is not None else scenario.domain(args.res or scenario.resolutions[-1])
    F = scenario.factorizer(domain)
    exclude = _exclude(args, SETTINGS.exclude_boundary)
    path = PotentialPath(base=args.base if args.base is not None else scenario.base)
    psi = schrodinger_from_symmetry(F, scenario.harmonic(), path, exclude=exclude)
    write_field(args.out, psi)
    logger.info("Wrote psi to %s", args.out)
    h = max(domain.spacing)
    tol_k = scenario.tol_k if args.tol_k is None else args.tol_k
    bound = max(tol_k * h * h, scenario.floor)
    residual = schrodinger_residual(psi, F.q, exclude=exclude)
    return _single(scenario.name, "generate-schrodinger", residual, bound, t0)


COMMANDS = {
    "verify": cmd_verify,
    "derive": cmd_derive,
    "antiderive": cmd_antiderive,
    "conjugate": cmd_conjugate,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        result = COMMANDS[args.command](args)
    except PotentialTooLarge as e:
        logger.warning("Refusing: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (VfldFormatError, ScenarioError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PseudoanalyticError as e:
        name = getattr(args, "scenario", None) or Path(getattr(args, "field", args.command)).name
        residual = getattr(e, "residual", float("nan"))
        tolerance = getattr(e, "tolerance", float("nan"))
        print(f"error: {e}", file=sys.stderr)
        result = VerifyResult(
            scenario=name,
            checks=[CheckResult(args.command, residual, tolerance, False, f"{type(e).__name__}: {e}")],
        )

    report = Report.from_result(result)
    print(render_text(report))
    if args.json:
        try:
            write_report(args.json, report)
        except OSError as e:
            print(f"error: cannot write {args.json}: {e}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
