"""Command-line driver.

Commands::

    hposhadow shadow    --system S.json --input hpo.json [--tol T] [--window N]
    hposhadow check     --system henon.json
    hposhadow conjugate --system S.json --system2 T.json --input orbit.json --homotopy NAME
    hposhadow code      --system circle.json --input orbit.json

Exit status: 0 on success, 1 for bad input, 2 when the window or iteration
budget runs out, 3 when a certificate fails.
"""

from __future__ import annotations

import argparse
import sys

from .associated import associated_expanding, associated_to_henon, classify_henon, henon_to_associated, AssociatedSystem
from .errors import BudgetError, CertificateError, ConvergenceError, InputError, ShadowError, UnsupportedError
from .expanding import half_rotation_hsc, induced_map_expanding, shadow_expanding
from .hyperbolic import CrossedSystem, check_bcc, check_occ, crossed_degree, make_henon_system, shadow_hyperbolic, induced_map_hyperbolic
from .mds import conjugacy_residuals, identity_hsc, shift_orbit
from .parallel import pmap
from .serialize import (
    dumps,
    henon_params_from_json,
    input_hpo,
    input_orbit,
    load_system,
    orbit_to_csv,
    orbit_to_json,
    paired_csv,
    read_json,
    trace_to_json,
)
from .symbolic import MarkovPartition, code_orbit

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_CERTIFICATE = 0, 1, 2, 3

HOMOTOPIES = ("identity", "half-rotation", "associated-h", "associated-k")


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (BudgetError, ConvergenceError)):
        return EXIT_BUDGET
    if isinstance(exc, CertificateError):
        return EXIT_CERTIFICATE
    return EXIT_INPUT


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _trace_path(out: str | None) -> str | None:
    if out is None or out == "-":
        return None
    stem = out[:-4] if out.endswith(".csv") else out
    return stem + ".trace.csv"


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")


def run_shadow(args) -> int:
    _require(args, "system", "input")
    system = load_system(args.system)
    hpo = input_hpo(system, read_json(args.input), args.window)
    if isinstance(system, CrossedSystem):
        result = shadow_hyperbolic(system, hpo, args.tol) if args.tol else shadow_hyperbolic(system, hpo)
    else:
        result = shadow_expanding(system, hpo, args.tol)
    orbit, trace = result.orbit, result.trace
    if args.format == "csv":
        _write(args.out, orbit_to_csv(system.X1, orbit))
        trace_out = _trace_path(args.out)
        if trace_out is not None:
            _write(trace_out, trace.to_csv())
    else:
        _write(args.out, dumps({"orbit": orbit_to_json(system.X1, orbit), "trace": trace_to_json(trace)}))
    return EXIT_OK


def run_check(args) -> int:
    _require(args, "system")
    params, metric = henon_params_from_json(read_json(args.system))
    if params.b == 0:
        raise InputError("b = 0 is degenerate: the map is not invertible")
    kind, model = classify_henon(params.c, params.b)
    report = {
        "bcc": list(check_bcc(params)),
        "occ": check_occ(params),
        "degree": None,
        "lambda": None,
        "classification": kind,
        "model": model,
        "metric": metric,
    }
    code = EXIT_OK
    try:
        system = make_henon_system(params, metric)
        report["degree"] = crossed_degree(system)
        report["lambda"] = system.lam
        report["C"] = system.C
    except CertificateError as exc:
        report["error"] = str(exc)
        code = EXIT_CERTIFICATE
    _write(args.out, dumps(report))
    if code:
        print(f"error: {report['error']}", file=sys.stderr)
    return code


def _homotopy(name: str, source, target):
    if name == "identity":
        if target is not None and target.params != source.params:
            raise InputError("the identity homotopy needs the same system on both sides")
        return identity_hsc(source)
    if name == "half-rotation":
        return half_rotation_hsc(source)
    if name == "associated-h":
        if not isinstance(source, CrossedSystem):
            raise InputError("associated-h starts from a Hénon system")
        Y = target if isinstance(target, AssociatedSystem) else associated_expanding(source, 0)
        return henon_to_associated(source, Y)
    if name == "associated-k":
        if not isinstance(source, AssociatedSystem):
            raise InputError("associated-k starts from an associated system")
        return associated_to_henon(source, source.parent)
    raise InputError(f"unknown homotopy {name!r}; choose from {', '.join(HOMOTOPIES)}")


def run_conjugate(args) -> int:
    _require(args, "system", "input", "homotopy")
    source = load_system(args.system)
    target = load_system(args.system2) if args.system2 else None
    h = _homotopy(args.homotopy, source, target)
    orbit = input_orbit(source, read_json(args.input), args.window)
    tol = args.tol
    if isinstance(h.target, CrossedSystem):
        tol = tol or 1e-9

        def induce(o):
            return induced_map_hyperbolic(h, o, tol)

    else:

        def induce(o):
            return induced_map_expanding(h, o, tol)

    image, shifted = pmap(induce, [orbit, shift_orbit(orbit)])
    residual = conjugacy_residuals(h.target.X1, image, shifted)
    worst = max(residual.values(), default=0.0)
    limit = 2 * (tol if tol else image.defect_tol)
    if args.format == "json":
        _write(args.out, dumps({
            "homotopy": h.name,
            "source": orbit_to_json(source.X1, orbit),
            "image": orbit_to_json(h.target.X1, image),
            "residual": {str(i): r for i, r in residual.items()},
            "max_residual": worst,
        }))
    else:
        _write(args.out, paired_csv(source.X1, h.target.X1, orbit, image, residual))
    if worst > limit:
        print(f"error: conjugacy residual {worst:.3e} exceeds {limit:.1e}", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def run_code(args) -> int:
    _require(args, "system", "input")
    system = load_system(args.system)
    if system.family != "circle-linear":
        raise UnsupportedError("coding is implemented for linear circle maps")
    orbit = input_orbit(system, read_json(args.input), args.window)
    symbols = code_orbit(system, MarkovPartition(system.params["degree"]), orbit)
    _write(args.out, dumps({"start": orbit.start, "symbols": symbols}))
    return EXIT_OK


COMMANDS = {"shadow": run_shadow, "check": run_check, "conjugate": run_conjugate, "code": run_code}


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hposhadow", description="Shadow homotopy pseudo-orbits and compute induced conjugacies.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--system", help="system definition (JSON)")
    parser.add_argument("--system2", help="target system for conjugate (JSON)")
    parser.add_argument("--input", help="hpo or orbit file (JSON)")
    parser.add_argument("--tol", type=_positive_float, help="shadowing tolerance")
    parser.add_argument("--window", type=_positive_int, help="window N: indices [-N, N], or [0, N] for one-sided input")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--homotopy", choices=HOMOTOPIES, help="named semi-conjugacy for conjugate")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ShadowError as exc:
        message = str(exc)
        if isinstance(exc, BudgetError) and exc.required_window is not None and "required" not in message:
            message += f" (required window N >= {exc.required_window})"
        print(f"error: {message}", file=sys.stderr)
        return exit_code(exc)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
