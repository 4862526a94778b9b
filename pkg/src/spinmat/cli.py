"""Command-line entry point: ``spinmat {generate,diagonalize,classify,selftest}``.

Exit codes: 0 success, 2 usage error, 3 recovery failed, 4 selftest failed.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from spinmat import diagonalizer as dz
from spinmat.amplitudes import ANGLE_NAMES, ParameterPoint
from spinmat.generator import Spectrum, classify, eigenvectors, generate, predict_family
from spinmat.oracle import eig5, match_spectra
from spinmat.sampling import SPECTRUM_KINDS, random_point, random_spectrum, rng_for
from spinmat.selftest import DEFAULT_TOLERANCES, run_selftest
from spinmat.serialization import (
    MatrixFileError,
    complex_pair,
    dump_records_csv,
    dumps,
    matrix_record,
    read_matrix,
)

EXIT_OK, EXIT_USAGE, EXIT_RECOVERY, EXIT_SELFTEST = 0, 2, 3, 4

TOLERANCES = dict(DEFAULT_TOLERANCES, refine=1e-8, denominator=1e-10)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    output_path: Optional[str] = None
    format: str = "json"

    def tol(self, name: str) -> float:
        return self.tolerances[name]


def parse_complex(text: str, what: str = "value") -> complex:
    """Parse ``re``, ``re+imi``, ``re-imi``, ``imi`` or ``re,im``."""
    s = text.strip().replace(" ", "")
    try:
        if "," in s:
            re_part, im_part = s.split(",")
            z = complex(float(re_part), float(im_part))
        else:
            z = complex(s.replace("i", "j")) if s.endswith(("i", "j")) else complex(float(s), 0.0)
    except ValueError:
        raise UsageError(f"{what} ({text!r}) is not a number") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise UsageError(f"{what} ({text!r}) is not finite")
    return z


def parse_real(text: str, what: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise UsageError(f"{what} ({text!r}) is not a number") from None
    if not math.isfinite(x):
        raise UsageError(f"{what} ({text!r}) is not finite")
    return x


_ARITY = {"--angles": 4, "--spectrum": 5, "--bracket": 2}
_SEP = "\x1f"


def _join_numeric_options(argv):
    # argparse would read values such as "-1-2i" as option names
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok in _ARITY:
            n = _ARITY[tok]
            values = argv[k + 1 : k + 1 + n]
            if len(values) != n or any(v.startswith("--") for v in values):
                raise UsageError(f"{tok} needs {n} values")
            out.append(f"{tok}={_SEP.join(values)}")
            k += n + 1
        else:
            out.append(tok)
            k += 1
    return out


def _values(joined: Optional[str]):
    return None if joined is None else joined.split(_SEP)


def _split_tolerances(argv):
    rest, overrides = [], {}
    it = iter(argv)
    for tok in it:
        if tok.startswith("--tol."):
            name, _, value = tok[len("--tol."):].partition("=")
            if not value:
                value = next(it, None)
                if value is None:
                    raise UsageError(f"--tol.{name} needs a value")
            if name not in TOLERANCES:
                raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(sorted(TOLERANCES))}")
            overrides[name] = parse_real(value, f"--tol.{name}")
        else:
            rest.append(tok)
    return rest, overrides


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--degrees", action="store_true", help="angles are given in degrees")

    p = argparse.ArgumentParser(
        prog="spinmat",
        description="Generate and diagonalize 5x5 matrices built from spin-2 amplitudes. "
        "Tolerances are overridden with --tol.NAME VALUE.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="build a matrix with a given spectrum")
    g.add_argument("--angles", metavar="THETA PHI THETA_P PHI_P", type=_values)
    g.add_argument("--spectrum", metavar="L1 L2 L3 L4 L5", type=_values,
                   help="complex values as re, re+imi, re-imi or re,im")
    g.add_argument(
        "--random",
        choices=SPECTRUM_KINDS,
        help="draw whatever was not given (angles, spectrum of this kind) from --seed",
    )

    d = sub.add_parser("diagonalize", parents=[common], help="recover angles and eigen-data")
    d.add_argument("matrix_file")
    d.add_argument("--mode", choices=("bisect", "multistart"), default="bisect")
    d.add_argument("--free", choices=ANGLE_NAMES, default="theta")
    d.add_argument("--angles", metavar="THETA PHI THETA_P PHI_P", type=_values,
                   help="known angles for bisect mode (the free one is ignored); "
                   "defaults to the file's provenance")
    d.add_argument("--bracket", metavar="LO HI", type=_values)
    d.add_argument("--grid", type=int, default=12, help="multistart grid points per axis")

    c = sub.add_parser("classify", parents=[common], help="structural family of a matrix")
    c.add_argument("matrix_file")

    s = sub.add_parser("selftest", parents=[common], help="run the property checks")
    s.add_argument("--trials", type=int, default=100)
    return p


def _angles(values, degrees: bool, what: str = "angle") -> list[float]:
    out = [parse_real(v, f"{what} {k}") for k, v in enumerate(values, 1)]
    return [math.radians(a) for a in out] if degrees else out


def _pairs(values) -> list:
    return [complex_pair(v) for v in values]


def _emit(record: dict, config: RunConfig) -> None:
    text = dumps(record) if config.format == "json" else dump_records_csv(record)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args, config: RunConfig) -> int:
    rng = rng_for(config.seed)
    if args.angles is not None:
        point = ParameterPoint.from_angles(*_angles(args.angles, args.degrees))
    elif args.random:
        point = random_point(rng)
    else:
        raise UsageError("give --angles or --random")
    if args.spectrum is not None:
        spectrum = Spectrum(tuple(parse_complex(v, f"spectrum value {k}") for k, v in enumerate(args.spectrum, 1)))
    elif args.random:
        spectrum = random_spectrum(rng, args.random)
    else:
        raise UsageError("give --spectrum or --random")

    gm = generate(point, spectrum)
    vectors = eigenvectors(point)
    tol = config.tol("classify")
    record = matrix_record(gm.entries, point, spectrum)
    record["eigenvectors"] = [_pairs(v.vector) for v in vectors]
    record["family"] = {
        "predicted": predict_family(point, spectrum).as_dict(),
        "measured": classify(gm.entries, tol, vectors=vectors).as_dict(),
    }
    _emit(record, config)
    return EXIT_OK


def _load(path):
    try:
        return read_matrix(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except MatrixFileError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _oracle_check(A, result, tol) -> dict:
    try:
        match = match_spectra(eig5(A), result.spectrum, [p.vector for p in result.pairs], tol=math.inf)
    except ArithmeticError as exc:
        return {"matched": False, "error": str(exc)}
    return {
        "matched": match.max_value_error <= tol,
        "permutation": list(match.permutation),
        "max_value_error": match.max_value_error,
        "max_vector_error": match.max_vector_angle_error,
    }


def cmd_diagonalize(args, config: RunConfig) -> int:
    A, prov_point, _ = _load(args.matrix_file)
    verify_tol = config.tol("verify")
    threshold = config.tol("denominator")
    try:
        if args.mode == "bisect":
            if args.angles is not None:
                known = ParameterPoint.from_angles(*_angles(args.angles, args.degrees))
            elif prov_point is not None:
                known = prov_point
            else:
                raise UsageError("bisect mode needs --angles or a file with provenance")
            bracket = _angles(args.bracket, args.degrees, "bracket end") if args.bracket else None
            point = dz.bisect_recover(
                A, known, args.free, bracket=bracket, tol=config.tol("bisect"),
                root_tol=config.tol("root"), verify_tol=verify_tol, threshold=threshold,
            )
        else:
            if args.grid < 2:
                raise UsageError("--grid must be at least 2")
            point = dz.multistart_recover(
                A, grid_density=args.grid, refine_tol=config.tol("refine"),
                verify_tol=verify_tol, threshold=threshold,
            )
    except dz.RecoveryError as exc:
        _emit(
            {
                "status": "failed",
                "mode": args.mode,
                "error": type(exc).__name__,
                "message": str(exc),
                "diagnostics": exc.diagnostics,
            },
            config,
        )
        return EXIT_RECOVERY

    report = dz.verify_recovery(A, point, verify_tol, threshold)
    result = report.result
    consistency = [
        [None if np.isnan(z) else complex_pair(z) for z in row] for row in result.consistency
    ]
    record = {
        "status": "recovered",
        "mode": args.mode,
        "point": dict(zip(ANGLE_NAMES, point.angles)),
        "residual": complex_pair(dz.residual(A, point).value),
        "spectrum": _pairs(result.spectrum),
        "eigenvectors": [_pairs(p.vector) for p in result.pairs],
        "consistency": consistency,
        "skipped_rows": [list(x) for x in result.skipped_rows],
        "max_spread": result.max_spread,
        "verified": report.passed,
        "oracle": _oracle_check(A, result, config.tol("spectral") * max(1.0, float(np.max(np.abs(A))))),
    }
    _emit(record, config)
    return EXIT_OK if report.passed else EXIT_RECOVERY


def cmd_classify(args, config: RunConfig) -> int:
    A, point, spectrum = _load(args.matrix_file)
    tol = config.tol("classify")
    record = {"measured": classify(A, tol).as_dict()}
    if point is not None:
        record["measured"] = classify(A, tol, vectors=eigenvectors(point)).as_dict()
        if spectrum is not None:
            record["predicted"] = predict_family(point, spectrum).as_dict()
    _emit(record, config)
    return EXIT_OK


def cmd_selftest(args, config: RunConfig) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    overrides = {k: v for k, v in config.tolerances.items() if k in DEFAULT_TOLERANCES}
    report = run_selftest(config.seed, args.trials, overrides)
    _emit(report, config)
    return EXIT_OK if report["passed"] else EXIT_SELFTEST


COMMANDS = {
    "generate": cmd_generate,
    "diagonalize": cmd_diagonalize,
    "classify": cmd_classify,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, overrides = _split_tolerances(_join_numeric_options(argv))
    except UsageError as exc:
        print(f"spinmat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    config = RunConfig(seed=args.seed, output_path=args.output, format=args.format)
    config.tolerances.update(overrides)
    try:
        return COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"spinmat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
