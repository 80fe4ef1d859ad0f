"""Command line front end.

Each subcommand reads JSON inputs, runs one pipeline stage and writes JSON
outputs.  Exit codes: 0 success, 1 validation failure, 2 numerical failure,
3 I/O or format error.  Failures print a JSON diagnostic on stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io
from .cubature import reduce
from .dilation import (
    FiniteXSet,
    finite_hull_membership,
    normal_m_dilation,
    sampled_spectral_check,
    verify_m_dilation,
)
from .errors import DilationError, NumericalError, ValidationError
from .interp import LowerToeplitz, toeplitz_contraction_test
from .linalg import DEFAULT_TOL, operator_norm
from .naimark import naimark
from .povm import MomentBasis, poisson_povm, validate
from .spectrum import joint_spectrum, koszul_exactness

SEED_ENV = "DILATION_FORGE_SEED"
RANDOMIZED = {"check"}

TOL_FLAGS = {
    "eig_floor": "--tol-eig-floor",
    "null_sigma": "--tol-null-sigma",
    "moment_tol": "--tol-moment",
    "cluster_tol": "--tol-cluster",
    "unitary_tol": "--tol-unitary",
    "commute_tol": "--tol-commute",
}


class UsageError(ValidationError):
    pass


@dataclass
class RunManifest:
    """Everything that determines a run; equal manifests give equal bytes."""

    command: str
    inputs: list
    seed: int | None = None
    seed_source: str = "default"
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    report: str | None = None
    options: dict = field(default_factory=dict)


def _emit(obj, path, compact=False):
    text = io.dumps(obj, compact)
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        io.write_json(obj, path, compact)


def _header(man: RunManifest, tol) -> dict:
    return {
        "command": man.command,
        "seed": man.seed,
        "seed_source": man.seed_source,
        "tolerances": tol.to_dict(),
    }


def _cmd_spectrum(man, tol):
    T = io.tuple_from_json(io.read_json(man.inputs[0]), tol)
    seed = man.seed if man.seed is not None else 0
    spec = joint_spectrum(T, tol, seed)
    table = []
    for p in spec.points:
        stages = koszul_exactness(T, p, tol)
        table.append(
            {
                "point": io.array_to_json(p),
                "koszul_singular": not all(s["exact"] for s in stages),
                "stages": stages,
            }
        )
    report = _header(man, tol)
    report.update(
        {
            "n": T.n,
            "d": T.d,
            "commutation_residual": T.commutation_residual,
            "points": io.array_to_json(spec.points),
            "koszul": table,
            "agreement": all(row["koszul_singular"] for row in table),
        }
    )
    _emit(report, man.output)
    return 0


def _cmd_poisson(man, tol):
    T = io.tuple_from_json(io.read_json(man.inputs[0]), tol)
    if T.n != 1:
        raise UsageError(f"poisson expects a single matrix, got a tuple of {T.n}")
    povm = poisson_povm(T[0], man.options["resolution"], tol)
    _emit(io.povm_to_json(povm), man.output, compact=True)
    return 0


def _cmd_reduce(man, tol):
    povm = io.read_povm(man.inputs[0])
    basis = MomentBasis(povm.n, man.options["degree"])
    out, rep = reduce(povm, basis, tol, report=True)
    _emit(io.povm_to_json(out), man.output, compact=True)
    report = _header(man, tol)
    report.update(rep.to_dict())
    _emit(report, man.report)
    return 0 if rep.moments_preserved else 2


def _cmd_naimark(man, tol):
    povm = io.read_povm(man.inputs[0])
    validate(povm, tol)
    nd = naimark(povm.weights, tol)
    _emit(io.naimark_to_json(nd), man.output, compact=True)
    report = _header(man, tol)
    report.update({"M": nd.M, "d": nd.d, "D": nd.D, "residuals": nd.residuals()})
    _emit(report, man.report)
    return 0


def _verification(man, tol, T, dil):
    seed = man.seed if man.seed is not None else 0
    rep = verify_m_dilation(T, dil, man.options["degree"], tol, seed)
    report = _header(man, tol)
    report.update(rep.to_dict())
    report["passed"] = rep.passed()
    return rep, report


def _cmd_dilate(man, tol):
    T = io.tuple_from_json(io.read_json(man.inputs[0]), tol)
    povm = io.read_povm(man.inputs[1])
    seed = man.seed if man.seed is not None else 0
    dil = normal_m_dilation(T, povm, man.options["degree"], tol, seed)
    _emit(io.mdilation_to_json(dil), man.output, compact=True)
    _, report = _verification(man, tol, T, dil)
    _emit(report, man.report)
    return 0


def _cmd_verify(man, tol):
    T = io.tuple_from_json(io.read_json(man.inputs[0]), tol)
    dil = io.mdilation_from_json(io.read_json(man.inputs[1]))
    rep, report = _verification(man, tol, T, dil)
    _emit(report, man.output)
    return 0 if rep.passed() else 2


def _cmd_hull(man, tol):
    X = FiniteXSet(io.points_from_json(io.read_json(man.inputs[0])))
    zobj = io.read_json(man.inputs[1])
    try:
        z = io.array_from_json(zobj["point"]).reshape(-1)
    except (KeyError, TypeError) as exc:
        raise io.InputFormatError(f"malformed point file: {exc}") from exc
    inside, cert = finite_hull_membership(X, z, tol)
    report = _header(man, tol)
    report["inside"] = inside
    report["certificate"] = None
    if cert is not None:
        value = abs(cert(z[None])[0])
        report["certificate"] = cert.to_dict()
        report["value_at_point"] = float(value)
        report["max_on_set"] = float(np.max(np.abs(cert(X.points))))
        report["margin"] = report["value_at_point"] - report["max_on_set"]
    _emit(report, man.output)
    return 0


def _cmd_toeplitz(man, tol):
    obj = io.read_json(man.inputs[0])
    try:
        coeffs = io.array_from_json(obj["coeffs"]).reshape(-1)
    except (KeyError, TypeError) as exc:
        raise io.InputFormatError(f"malformed coefficient file: {exc}") from exc
    A = LowerToeplitz(coeffs)
    report = _header(man, tol)
    report.update(
        {
            "d": A.d,
            "norm": operator_norm(A.matrix()),
            "contraction": toeplitz_contraction_test(A, man.options.get("tol", 1e-12)),
        }
    )
    _emit(report, man.output)
    return 0


def _cmd_check(man, tol):
    T = io.tuple_from_json(io.read_json(man.inputs[0]), tol)
    xobj = io.read_json(man.inputs[1])
    pts = io.points_from_json(xobj)
    X = FiniteXSet(pts) if xobj.get("finite", False) else pts
    rep = sampled_spectral_check(
        T, X, man.options["degree"], man.options["trials"], man.seed, tol
    )
    report = _header(man, tol)
    report.update(rep.to_dict())
    _emit(report, man.output)
    return 0 if rep.ok else 1


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "poisson": _cmd_poisson,
    "reduce": _cmd_reduce,
    "naimark": _cmd_naimark,
    "dilate": _cmd_dilate,
    "verify": _cmd_verify,
    "hull": _cmd_hull,
    "toeplitz": _cmd_toeplitz,
    "check": _cmd_check,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (io.InputFormatError, OSError)):
        return 3
    if isinstance(exc, NumericalError):
        return 2
    if isinstance(exc, (ValidationError, ValueError)):
        return 1
    return 2


def run(man: RunManifest) -> int:
    """Execute one manifest; returns the process exit code."""
    try:
        tol = DEFAULT_TOL.override(**man.tolerances)
        if man.command in RANDOMIZED and man.seed is None:
            raise UsageError(f"'{man.command}' is randomized: pass --seed or set {SEED_ENV}")
        return COMMANDS[man.command](man, tol)
    except (DilationError, OSError, ValueError) as exc:
        code = exit_code_for(exc)
        diag = exc.to_dict() if isinstance(exc, DilationError) else {
            "error": type(exc).__name__,
            "message": str(exc),
        }
        diag.update({"command": man.command, "exit_code": code})
        sys.stderr.write(io.dumps(diag) + "\n")
        return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="main output file (default: stdout)")
    common.add_argument("--seed", type=int, help=f"random seed (falls back to ${SEED_ENV})")
    for name, flag in TOL_FLAGS.items():
        common.add_argument(flag, dest=f"tol_{name}", type=float, metavar="X", help=f"override {name}")

    parser = argparse.ArgumentParser(
        prog="dilation-forge",
        description="Finite-dimensional normal dilations of commuting matrix tuples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="joint spectrum with Koszul cross-check")
    p.add_argument("tuple")

    p = sub.add_parser("poisson", parents=[common], help="Poisson-kernel POVM of a strict contraction")
    p.add_argument("matrix")
    p.add_argument("--resolution", type=int, required=True)

    p = sub.add_parser("reduce", parents=[common], help="Caratheodory reduction of a POVM")
    p.add_argument("povm")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--report", help="moment report file (default: stdout)")

    p = sub.add_parser("naimark", parents=[common], help="Naimark dilation of a POVM")
    p.add_argument("povm")
    p.add_argument("--report", help="residual report file (default: stdout)")

    p = sub.add_parser("dilate", parents=[common], help="normal m-dilation of a tuple")
    p.add_argument("tuple")
    p.add_argument("povm")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--report", help="verification report file (default: stdout)")

    p = sub.add_parser("verify", parents=[common], help="verify a dilation file")
    p.add_argument("tuple")
    p.add_argument("dilation")
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("hull", parents=[common], help="finite polynomial hull membership")
    p.add_argument("X")
    p.add_argument("z")

    p = sub.add_parser("toeplitz", parents=[common], help="lower triangular Toeplitz contraction test")
    p.add_argument("coeffs")
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("check", parents=[common], help="sampled polynomial spectral-set check")
    p.add_argument("tuple")
    p.add_argument("X")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    return parser


INPUT_ARGS = {
    "spectrum": ["tuple"],
    "poisson": ["matrix"],
    "reduce": ["povm"],
    "naimark": ["povm"],
    "dilate": ["tuple", "povm"],
    "verify": ["tuple", "dilation"],
    "hull": ["X", "z"],
    "toeplitz": ["coeffs"],
    "check": ["tuple", "X"],
}


def manifest_from_args(args, environ=None) -> RunManifest:
    environ = os.environ if environ is None else environ
    seed, source = args.seed, "flag"
    if seed is None and environ.get(SEED_ENV):
        seed, source = int(environ[SEED_ENV]), "env"
    if seed is None:
        source = "default"
    opts = {}
    for key in ("resolution", "degree", "trials", "tol"):
        if hasattr(args, key):
            opts[key] = getattr(args, key)
    return RunManifest(
        command=args.command,
        inputs=[getattr(args, a) for a in INPUT_ARGS[args.command]],
        seed=seed,
        seed_source=source,
        tolerances={k: getattr(args, f"tol_{k}") for k in TOL_FLAGS if getattr(args, f"tol_{k}") is not None},
        output=args.output,
        report=getattr(args, "report", None),
        options=opts,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        man = manifest_from_args(args)
    except ValueError as exc:
        sys.stderr.write(io.dumps({"error": "UsageError", "message": str(exc), "exit_code": 1}) + "\n")
        return 1
    return run(man)


if __name__ == "__main__":
    sys.exit(main())
