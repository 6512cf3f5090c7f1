"""Command-line interface for the two-photon-absorption metrology engine.

Exposes state evolution, quantum/classical Fisher information, Wigner
functions, analytic reference formulas, parameter sweeps and scaling
exponents.  Exit codes: 0 success, 1 numerical failure (the message names
the failing gate), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .closed_forms import (
    CrossSectionInputs,
    cfi_quad_coherent,
    cfi_quad_squeezed,
    cross_section,
    dvar_photon_coherent,
    dvar_photon_squeezed,
    mean_photon_first_order,
    qfi_coherent_exact,
    shg_qfi,
)
from .dynamics import LossGenerator, propagate
from .exceptions import EngineError
from .fisher import (
    DEFAULT_CUTOFF,
    cfi_tpa,
    exponent_via_step,
    qfi_tpa,
    sensitivity_mean_photon,
)
from .fock import FockBasisConfig, StateSpec, default_dim, make_state
from .phase_space import (
    QuadratureGrid,
    default_grid,
    field_to_binary,
    field_to_csv,
    negativity_volume,
    wigner,
)
from .sweep import (
    PRESETS,
    export_csv,
    export_json,
    preset_config,
    run_sweep,
)

__all__ = ["main"]


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--state",
        choices=["coherent", "squeezed", "fock"],
        required=True,
        help="input state family",
    )
    p.add_argument("--alpha", type=float, default=None, help="coherent amplitude alpha (dimensionless)")
    p.add_argument("--r", type=float, default=None, help="squeezing parameter r (dimensionless)")
    p.add_argument("--phi", type=float, default=0.0, help="squeezing phase phi in radians (default 0)")
    p.add_argument("--n", type=int, default=None, help="Fock level for --state fock")
    p.add_argument("--dim", type=int, default=None, help="Fock-space dimension (default: auto from tail tolerance)")
    p.add_argument("--tail-tol", type=float, default=1e-6, help="truncation tail tolerance (default 1e-6)")


def _spec_from_args(args) -> StateSpec:
    if args.state == "coherent":
        if args.alpha is None:
            raise UsageError("--state coherent requires --alpha")
        return StateSpec.coherent(args.alpha)
    if args.state == "squeezed":
        if args.r is None:
            raise UsageError("--state squeezed requires --r")
        return StateSpec.squeezed(args.r, args.phi)
    if args.n is None:
        raise UsageError("--state fock requires --n")
    return StateSpec.fock(args.n)


class UsageError(Exception):
    pass


def _emit(payload: dict, args) -> None:
    fmt = getattr(args, "format", "table")
    out = getattr(args, "out", None)
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        width = max(len(k) for k in payload)
        lines = []
        for key, val in payload.items():
            if isinstance(val, float):
                val = f"{val:.12g}"
            lines.append(f"{key.ljust(width)}  {val}")
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_evolve(args) -> int:
    spec = _spec_from_args(args)
    dim = args.dim if args.dim is not None else default_dim(spec, args.tail_tol)
    basis = FockBasisConfig(dim, args.tail_tol)
    gen = LossGenerator(args.kind, basis)
    rho = propagate(gen, make_state(spec, basis), args.epsilon)
    _emit(
        {
            "family": spec.family,
            "epsilon": args.epsilon,
            "dim": dim,
            "trace": rho.trace().real,
            "mean_photon": rho.mean_photon(),
            "photon_variance": rho.photon_variance(),
            "purity": rho.purity(),
            "tail_population": rho.tail_population(),
        },
        args,
    )
    return 0


def _cmd_qfi(args) -> int:
    spec = _spec_from_args(args)
    rec = qfi_tpa(spec, args.epsilon, cutoff=args.cutoff, dim=args.dim, tail_tol=args.tail_tol)
    _emit(
        {
            "family": spec.family,
            "epsilon": rec.epsilon,
            "qfi": rec.value,
            "dim": rec.dim,
            "rank_cutoff": rec.diagnostics["rank_cutoff"],
            "dropped_weight": rec.diagnostics["dropped_weight"],
        },
        args,
    )
    return 0


def _cmd_cfi(args) -> int:
    spec = _spec_from_args(args)
    rec = cfi_tpa(
        spec,
        args.epsilon,
        measurement=args.measure,
        theta=args.theta,
        dim=args.dim,
        tail_tol=args.tail_tol,
    )
    payload = {
        "family": spec.family,
        "epsilon": rec.epsilon,
        "measurement": rec.measurement,
        "cfi": rec.value,
        "dim": rec.dim,
    }
    if args.measure == "quadrature":
        payload["theta"] = args.theta
    _emit(payload, args)
    return 0


def _cmd_wigner(args) -> int:
    spec = _spec_from_args(args)
    dim = args.dim if args.dim is not None else default_dim(spec, args.tail_tol)
    basis = FockBasisConfig(dim, args.tail_tol)
    gen = LossGenerator("tpa", basis)
    rho = propagate(gen, make_state(spec, basis), args.epsilon)
    if args.half_width is not None:
        grid = QuadratureGrid(-args.half_width, args.half_width, args.points)
    else:
        grid = default_grid(rho.mean_photon(), points=args.points)
    field = wigner(rho, grid, grid)
    if args.out:
        if args.format == "bin":
            field_to_binary(field, args.out)
        else:
            field_to_csv(field, args.out)
    sys.stdout.write(f"negativity    {negativity_volume(field):.12g}\n")
    if args.out:
        sys.stdout.write(f"wrote {args.out} ({args.points}x{args.points} grid)\n")
    return 0


def _cmd_analytic(args) -> int:
    name = args.formula
    if name == "qfi_coherent":
        value = qfi_coherent_exact(args.nbar)
    elif name == "dvar_squeezed":
        value = dvar_photon_squeezed(args.nbar)
    elif name == "dvar_coherent":
        value = dvar_photon_coherent(args.nbar)
    elif name == "cfi_quad_squeezed":
        value = cfi_quad_squeezed(args.r if args.r is not None else 1.0, args.which or "squeezed_q")
    elif name == "cfi_quad_coherent":
        value = cfi_quad_coherent(args.nbar, args.which or "aligned")
    elif name == "shg":
        spec = StateSpec.squeezed(args.r) if args.r is not None else StateSpec.coherent(math.sqrt(args.nbar))
        value = shg_qfi(spec, args.g)
    elif name == "cross_section":
        value = cross_section(CrossSectionInputs(args.epsilon, args.density, args.length))
    elif name == "mean_photon":
        spec = StateSpec.squeezed(args.r) if args.r is not None else StateSpec.coherent(math.sqrt(args.nbar))
        value = mean_photon_first_order(spec, args.epsilon)
    else:  # pragma: no cover - argparse choices guard this
        raise UsageError(f"unknown formula {name!r}")
    _emit({"formula": name, "value": value}, args)
    return 0


def _cmd_sensitivity(args) -> int:
    spec = _spec_from_args(args)
    value = sensitivity_mean_photon(spec, args.epsilon, dim=args.dim, tail_tol=args.tail_tol)
    _emit({"family": spec.family, "epsilon": args.epsilon, "sensitivity": value}, args)
    return 0


def _cmd_sweep(args) -> int:
    config = preset_config(
        args.preset,
        n_points=args.n_points,
        eps_points=args.eps_points,
        heatmap_points=args.heatmap_points,
        nbar_max=args.nbar_max,
    )
    result = run_sweep(config)
    if args.format == "json":
        export_json(result, args.out)
    else:
        export_csv(result, args.out)
    ok = sum(1 for r in result.records if r.status == "ok")
    sys.stdout.write(
        f"wrote {args.out}: {len(result.records)} cells ({ok} ok, "
        f"{len(result.records) - ok} tagged)\n"
    )
    return 0


def _cmd_exponent(args) -> int:
    spec = _spec_from_args(args)

    def fi_of_n(nbar: float) -> float:
        if spec.family == "coherent":
            s = StateSpec.coherent(math.sqrt(nbar))
        else:
            s = StateSpec.squeezed(math.asinh(math.sqrt(nbar)), spec.phi)
        return cfi_tpa(s, args.epsilon, measurement=args.measure, theta=args.theta, tail_tol=args.tail_tol).value

    gamma = exponent_via_step(fi_of_n, spec.mean_photon(), dex=args.dex)
    _emit(
        {
            "family": spec.family,
            "mean_photon": spec.mean_photon(),
            "epsilon": args.epsilon,
            "measurement": args.measure,
            "exponent": gamma,
        },
        args,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpa",
        description="Fisher-information analysis of two-photon-absorption measurements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p, formats=("table", "json")):
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        p.add_argument("--format", choices=list(formats), default=formats[0], help="output format")

    p = sub.add_parser("evolve", help="propagate a state through two-photon loss")
    _add_state_flags(p)
    p.add_argument("--epsilon", type=float, required=True, help="absorbance epsilon = gamma_TPA * t (dimensionless, >= 0)")
    p.add_argument("--kind", choices=["tpa", "single_photon"], default="tpa", help="loss channel (default tpa)")
    output_flags(p)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("qfi", help="quantum Fisher information about the absorbance")
    _add_state_flags(p)
    p.add_argument("--epsilon", type=float, required=True, help="absorbance (dimensionless)")
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF, help=f"eigenvalue-sum rank cutoff (default {DEFAULT_CUTOFF})")
    output_flags(p)
    p.set_defaults(func=_cmd_qfi)

    p = sub.add_parser("cfi", help="classical Fisher information of a detector")
    _add_state_flags(p)
    p.add_argument("--epsilon", type=float, required=True, help="absorbance (dimensionless)")
    p.add_argument("--measure", choices=["photon_number", "quadrature"], default="photon_number", help="detector model")
    p.add_argument("--theta", type=float, default=0.0, help="homodyne angle in radians (default 0 = squeezed q axis)")
    output_flags(p)
    p.set_defaults(func=_cmd_cfi)

    p = sub.add_parser("wigner", help="Wigner function and its negativity after loss")
    _add_state_flags(p)
    p.add_argument("--epsilon", type=float, default=0.0, help="absorbance (dimensionless, default 0)")
    p.add_argument("--points", type=int, default=201, help="grid points per axis (odd, default 201)")
    p.add_argument("--half-width", type=float, default=None, help="phase-space half width (default: auto from mean photon number)")
    p.add_argument("--out", default=None, help="write the field to this file")
    p.add_argument("--format", choices=["csv", "bin"], default="csv", help="field file format")
    p.set_defaults(func=_cmd_wigner)

    p = sub.add_parser("analytic", help="closed-form reference values")
    p.add_argument(
        "--formula",
        required=True,
        choices=[
            "qfi_coherent",
            "dvar_squeezed",
            "dvar_coherent",
            "cfi_quad_squeezed",
            "cfi_quad_coherent",
            "shg",
            "cross_section",
            "mean_photon",
        ],
        help="which closed form to evaluate",
    )
    p.add_argument("--nbar", type=float, default=0.0, help="mean photon number")
    p.add_argument("--r", type=float, default=None, help="squeezing parameter (selects the squeezed family where relevant)")
    p.add_argument("--which", default=None, help="branch: squeezed_q/antisqueezed_p or aligned/orthogonal")
    p.add_argument("--g", type=float, default=1.0, help="SHG coupling strength (default 1)")
    p.add_argument("--epsilon", type=float, default=0.0, help="absorbance (dimensionless)")
    p.add_argument("--density", type=float, default=1.0, help="absorber number density (cross_section)")
    p.add_argument("--length", type=float, default=1.0, help="medium length (cross_section)")
    output_flags(p)
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("sensitivity", help="error-propagation sensitivity of the mean photon number")
    _add_state_flags(p)
    p.add_argument("--epsilon", type=float, required=True, help="absorbance (dimensionless)")
    output_flags(p)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("sweep", help="run a preset parameter sweep and export it")
    p.add_argument("--preset", required=True, choices=list(PRESETS), help="figure grid to evaluate")
    p.add_argument("--out", required=True, help="output file path")
    p.add_argument("--format", choices=["csv", "json"], default="csv", help="export format (default csv)")
    p.add_argument("--n-points", type=int, default=13, help="photon-number grid points (default 13)")
    p.add_argument("--eps-points", type=int, default=17, help="absorbance grid points (default 17)")
    p.add_argument("--heatmap-points", type=int, default=25, help="heatmap grid points per axis (default 25)")
    p.add_argument("--nbar-max", type=float, default=50.0, help="top of the mean-photon-number range (default 50)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("exponent", help="local log-log scaling exponent of a classical measurement")
    _add_state_flags(p)
    p.add_argument("--epsilon", type=float, required=True, help="absorbance (dimensionless)")
    p.add_argument("--measure", choices=["photon_number", "quadrature"], default="quadrature", help="detector model")
    p.add_argument("--theta", type=float, default=0.0, help="homodyne angle in radians")
    p.add_argument("--dex", type=float, default=0.05, help="half step in log10 photon number (default 0.05)")
    output_flags(p)
    p.set_defaults(func=_cmd_exponent)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with code 2
    except EngineError as exc:
        sys.stderr.write(f"error ({type(exc).__name__}): {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
