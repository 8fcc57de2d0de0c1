"""Command-line front end: ``ultragabor <subcommand> [long flags]``.

Every subcommand writes exactly one UTF-8 JSON document (to ``--out`` or
stdout) carrying ``schema`` and ``generated_at`` fields.  Exit status:

* 0: every checked condition holds (or, with ``--expect-fail``, at least one does not);
* 1: a check failed, or a computation refused its inputs;
* 2: usage error, including lattice parameters outside their admissible range;
* 3: configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import grids, reports, systems, weights
from .config import eval_fraction, load_suite
from .errors import ConfigError, InvalidLatticeParameter, UltraGaborError
from .lab import OMEGAS, RUNNERS, WINDOWS, ExperimentReport, ExperimentSpec, run_suite
from .testfunctions import SeminormParams, gs_seminorm
from .timefreq import l2_norm
from .verdict import ConditionVerdict

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 3

SEQUENCE_FAMILIES = ("gevrey", "log_power", "exp_square", "constant_quotient")
SYSTEM_FAMILIES = ("power", "log_power", "gevrey", "constant", "saturating")

SEQUENCE_CHECKS = ("M.2'", "M.2", "M.2*", "non-quasianalytic", "omega-seq")
SYSTEM_CHECKS = ("DN", "ooOmega", "wM", "M", "N", "square", "discrete-l1")
GRID_CHECKS = ("Q", "wQ")

DEFAULT_S = 2.0
DEFAULT_R = 1.0
DEFAULT_PMAX = weights.DEFAULT_PMAX
DEFAULT_RADIUS = systems.DEFAULT_RADIUS
DEFAULT_H = 1.0
DEFAULT_WINDOW_STEP = 1.0 / 64


class UsageError(Exception):
    """Flag values outside their documented ranges."""


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _positive(text: str) -> float:
    try:
        value = eval_fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _non_negative(text: str) -> float:
    try:
        value = eval_fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value >= 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return value


def _pmax(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 20 <= value <= 100_000:
        raise argparse.ArgumentTypeError("--pmax must lie in [20, 100000]")
    return value


def _help(p: argparse.ArgumentParser) -> None:
    p.add_argument("--help", action="help", help="show this message and exit")


def _conditions(p: argparse.ArgumentParser, names: Sequence[str]) -> None:
    p.add_argument("--conditions", metavar="LIST",
                   help=f"comma-separated subset of {', '.join(names)} (default: all)")


def _common(p: argparse.ArgumentParser) -> None:
    _help(p)
    p.add_argument("--out", metavar="PATH",
                   help="write the JSON document here (default: stdout; '-' also means stdout)")
    p.add_argument("--expect-fail", action="store_true",
                   help="succeed only if some check fails (for negative fixtures)")
    p.add_argument("--verbose", action="store_true", help="progress messages on stderr")


def _family_flags(p: argparse.ArgumentParser, families: Sequence[str], default: str) -> None:
    p.add_argument("--family", choices=families, default=default, help=f"family name (default: {default})")
    p.add_argument("--s", type=_positive, default=DEFAULT_S, metavar="S",
                   help=f"family exponent s (default: {DEFAULT_S:g}; fractions like 1/2 accepted)")
    p.add_argument("--pmax", type=_pmax, default=DEFAULT_PMAX,
                   help=f"tabulation length of weight sequences (default: {DEFAULT_PMAX})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultragabor",
        description="Weight conditions, Gabor frame identities and estimate experiments.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="exit status: 0 all checks as expected, 1 check failure, 2 usage error, 3 config error",
        allow_abbrev=False, add_help=False,
    )
    _help(parser)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    p = sub.add_parser("check-sequence", help="conditions of a weight sequence M_p", allow_abbrev=False, add_help=False,
                       description="Families: gevrey M_p = p!^s; log_power M_p = log(p+e)^(s p); "
                                   "exp_square M_p = exp(p^2); constant_quotient M_p = s^p.")
    _family_flags(p, SEQUENCE_FAMILIES, "gevrey")
    _conditions(p, SEQUENCE_CHECKS)
    _common(p)

    p = sub.add_parser("check-system", help="conditions of a weight system v_lambda", allow_abbrev=False, add_help=False,
                       description="Families: power exp(t^r/lambda); log_power exp(log(t)^s/lambda); "
                                   "gevrey the associated function of p!^s; constant v = 1; "
                                   "saturating exponents (2 - lambda/(1+lambda)) t^r.")
    _family_flags(p, SYSTEM_FAMILIES, "power")
    p.add_argument("--r", type=_positive, default=DEFAULT_R, metavar="R",
                   help=f"power r of the weight function t^r (default: {DEFAULT_R:g})")
    p.add_argument("--radius", type=_positive, default=DEFAULT_RADIUS,
                   help=f"sampling radius (default: {DEFAULT_RADIUS:g})")
    p.add_argument("--direction", choices=(systems.BEURLING, systems.ROUMIEU), default=systems.BEURLING,
                   help="quantifier direction of the one-system conditions (default: beurling)")
    p.add_argument("--lattice-a", type=_positive, default=1.0,
                   help="spacing of the lattice for the discrete l1 condition (default: 1)")
    _conditions(p, SYSTEM_CHECKS)
    _common(p)

    p = sub.add_parser("check-grid", help="conditions (Q) and (wQ) of a weight grid", allow_abbrev=False, add_help=False,
                       description="--family is beurling:<system>, roumieu:<system> or constant, where "
                                   "<system> is a check-system family; the t-part is omega(t) = t.")
    p.add_argument("--family", default="beurling:power", help="grid family (default: beurling:power)")
    p.add_argument("--s", type=_positive, default=DEFAULT_S, help=f"system exponent s (default: {DEFAULT_S:g})")
    p.add_argument("--r", type=_positive, default=DEFAULT_R, help=f"system power r (default: {DEFAULT_R:g})")
    p.add_argument("--pmax", type=_pmax, default=DEFAULT_PMAX, help=f"sequence length (default: {DEFAULT_PMAX})")
    p.add_argument("--radius", type=_positive, default=DEFAULT_RADIUS,
                   help=f"sampling radius in x (default: {DEFAULT_RADIUS:g})")
    p.add_argument("--lattice-a", type=_positive, help="restrict t to (1/a)Z (default: continuum)")
    p.add_argument("--lattice-b", type=_positive, help="restrict x to (1/b)Z (default: continuum)")
    _conditions(p, GRID_CHECKS)
    _common(p)

    p = sub.add_parser("windows", help="the named window battery and its seminorms", allow_abbrev=False,
                       add_help=False)
    p.add_argument("--family", choices=sorted(OMEGAS), default="gevrey1",
                   help="weight function of the seminorm (default: gevrey1)")
    p.add_argument("--s", type=_positive, default=DEFAULT_H, metavar="H",
                   help=f"seminorm parameter h (default: {DEFAULT_H:g})")
    p.add_argument("--grid-step", type=_positive, default=DEFAULT_WINDOW_STEP,
                   help="sampling step of the tables and norms (default: 1/64)")
    p.add_argument("--radius", type=_positive, default=4.0, help="half-width of the CSV tables (default: 4)")
    p.add_argument("--windows", help="comma-separated subset (default: all)")
    _common(p)

    for name, text in (("verify", "run one experiment"), ("suite", "run a suite of experiments")):
        p = sub.add_parser(name, help=text, allow_abbrev=False, add_help=False)
        p.add_argument("--config", metavar="PATH", help="suite file (default: the shipped suite)")
        if name == "verify":
            p.add_argument("--experiment", required=True,
                           help="a suite identifier or an experiment kind: " + ", ".join(sorted(RUNNERS)))
            p.add_argument("--windows", help="comma-separated window names (override)")
            p.add_argument("--grid-step", type=_positive, help="quadrature step (override)")
            p.add_argument("--radius", type=_positive, help="time radius (override)")
            p.add_argument("--lattice-a", type=_positive, help="lattice a (override)")
            p.add_argument("--lattice-b", type=_positive, help="lattice b (override)")
            p.add_argument("--tolerance", type=_non_negative, help="identity tolerance (override)")
        _common(p)
    return parser


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def sequence_family(name: str, s: float, p_max: int) -> weights.WeightSequence:
    if name == "gevrey":
        return weights.gevrey(s, p_max)
    if name == "log_power":
        return weights.log_power(s, p_max)
    if name == "exp_square":
        return weights.exp_square(p_max)
    if name == "constant_quotient":
        if s <= 1:
            raise UsageError("constant_quotient needs --s > 1")
        return weights.constant_quotient(s, p_max)
    raise UsageError(f"unknown sequence family {name!r}")


def system_family(name: str, s: float, r: float, p_max: int) -> systems.WeightSystem:
    if name == "power":
        return systems.build_from_weight_function(weights.power_weight(r))
    if name == "log_power":
        return systems.build_from_weight_function(weights.log_power_weight(s))
    if name == "gevrey":
        return systems.build_from_weight_sequence(weights.gevrey(s, p_max))
    if name == "constant":
        return systems.constant_system()
    if name == "saturating":
        return systems.saturating_system(weights.power_weight(r))
    raise UsageError(f"unknown system family {name!r}; choose from {', '.join(SYSTEM_FAMILIES)}")


def grid_family(spec: str, s: float, r: float, p_max: int) -> grids.WeightGrid:
    if spec == "constant":
        return grids.constant_grid()
    kind, _, system = spec.partition(":")
    if kind not in (systems.BEURLING, systems.ROUMIEU) or not system:
        raise UsageError(f"grid family must be beurling:<system>, roumieu:<system> or constant, not {spec!r}")
    V = system_family(system, s, r, p_max)
    omega = weights.power_weight(1.0)
    return grids.build_beurling_grid(omega, V) if kind == systems.BEURLING else grids.build_roumieu_grid(V, omega)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _log(args, msg: str) -> None:
    if getattr(args, "verbose", False):
        print(msg, file=sys.stderr)


def _selected(args, names: Sequence[str]) -> list[str]:
    if not getattr(args, "conditions", None):
        return list(names)
    chosen = [c.strip() for c in args.conditions.split(",") if c.strip()]
    unknown = [c for c in chosen if c not in names]
    if unknown:
        raise UsageError(f"unknown conditions {unknown}; choose from {', '.join(names)}")
    return [c for c in names if c in chosen]


def _run_checks(args, label: str, checks: dict) -> list[ConditionVerdict]:
    verdicts = []
    for name in _selected(args, list(checks)):
        _log(args, f"{label}: {name}")
        verdicts.append(checks[name]())
    return verdicts


def _verdict_status(verdicts: Sequence[ConditionVerdict], expect_fail: bool) -> int:
    all_hold = all(v.holds for v in verdicts)
    return EXIT_OK if all_hold != expect_fail else EXIT_FAIL


def cmd_check_sequence(args) -> tuple[dict, int]:
    M = sequence_family(args.family, args.s, args.pmax)
    fns = (weights.check_M2prime, weights.check_M2, weights.check_M2star,
           weights.check_nonquasianalytic, weights.check_omega_seq)
    verdicts = _run_checks(args, M.label, {n: (lambda f=f: f(M)) for n, f in zip(SEQUENCE_CHECKS, fns)})
    body = {"family": args.family, "s": args.s, "p_max": args.pmax, "label": M.label,
            "verdicts": [v.to_dict() for v in verdicts]}
    return reports.document("check-sequence", body), _verdict_status(verdicts, args.expect_fail)


def cmd_check_system(args) -> tuple[dict, int]:
    V = system_family(args.family, args.s, args.r, args.pmax)
    d, R = args.direction, args.radius
    verdicts = _run_checks(args, V.label, {
        "DN": lambda: systems.check_DN(V, radius=R),
        "ooOmega": lambda: systems.check_ooOmega(V, radius=R),
        "wM": lambda: systems.check_wM(V, d, radius=R),
        "M": lambda: systems.check_M(V, d, radius=R),
        "N": lambda: systems.check_N(V, d, radius=R),
        "square": lambda: systems.check_square(V, d, radius=R),
        "discrete-l1": lambda: systems.check_discrete_l1(V, args.lattice_a, d, radius=R),
    })
    body = {"family": args.family, "s": args.s, "r": args.r, "direction": d, "radius": R,
            "label": V.label, "verdicts": [v.to_dict() for v in verdicts]}
    return reports.document("check-system", body), _verdict_status(verdicts, args.expect_fail)


def cmd_check_grid(args) -> tuple[dict, int]:
    A = grid_family(args.family, args.s, args.r, args.pmax)
    if (args.lattice_a is None) != (args.lattice_b is None):
        raise UsageError("--lattice-a and --lattice-b must be given together")
    if args.lattice_a is not None:
        A = A.restrict(args.lattice_a, args.lattice_b, args.radius)
    elif args.radius != A.domain.radius:
        A = grids.WeightGrid(A.omega, A.system, A.kind, A.label, grids.Domain("box", radius=args.radius))
    verdicts = _run_checks(args, A.label, {"Q": lambda: grids.check_Q(A), "wQ": lambda: grids.check_wQ(A)})
    body = {"family": args.family, "label": A.label, "domain": A.domain.describe(),
            "verdicts": [v.to_dict() for v in verdicts]}
    return reports.document("check-grid", body), _verdict_status(verdicts, args.expect_fail)


def _window_names(text: str | None) -> list[str]:
    if not text:
        return sorted(WINDOWS)
    names = [w.strip() for w in text.split(",") if w.strip()]
    unknown = [w for w in names if w not in WINDOWS]
    if unknown:
        raise UsageError(f"unknown windows {unknown}; choose from {', '.join(sorted(WINDOWS))}")
    return names


def cmd_windows(args) -> tuple[dict, int]:
    omega = OMEGAS[args.family]()
    rows, errors = [], 0
    tables = []
    for name in _window_names(args.windows):
        _log(args, f"window {name}")
        f = WINDOWS[name]()
        sup = f.support
        row = {"name": name, "label": f.label, "support": {"kind": sup.kind, "lo": sup.lo, "hi": sup.hi},
               "l2_norm": l2_norm(f, args.grid_step), "value_at_zero": float(f(0.0).real)}
        try:
            sv = gs_seminorm(f, SeminormParams(omega, args.s, step=args.grid_step / 16), strict=False)
            row["seminorm"] = {"omega": args.family, "h": args.s, "value": sv.value, "log_value": sv.log_value,
                               "alpha": sv.alpha, "x": sv.x, "interior": sv.interior}
        except UltraGaborError as exc:
            row["seminorm"] = {"error": f"{type(exc).__name__}: {exc}"}
            errors += 1
        rows.append(row)
        n = int(round(args.radius / args.grid_step))
        tables.append((name, np.arange(-n, n + 1) * args.grid_step, f))
    if args.out and args.out != "-":
        folder = _table_dir(args.out)
        for name, t, f in tables:
            reports.samples_csv(t, f(t), folder / f"{name}.csv")
    body = {"omega": args.family, "h": args.s, "step": args.grid_step, "windows": rows}
    # an inventory: "interior" is reported, only computation errors fail
    status = EXIT_OK if (errors == 0) != args.expect_fail else EXIT_FAIL
    return reports.document("windows", body), status


def _table_dir(out: str) -> Path:
    p = Path(out)
    folder = p.with_name(p.stem + "_tables")
    folder.mkdir(parents=True, exist_ok=True)
    return folder


def select_spec(specs: Sequence[ExperimentSpec], experiment: str, windows: Sequence[str] | None) -> ExperimentSpec:
    """A suite member by identifier, else the first member of that kind
    (matching ``windows`` when given), else a fresh default spec."""
    for s in specs:
        if s.identifier == experiment:
            return replace(s, windows=tuple(windows)) if windows else s
    if experiment not in RUNNERS:
        raise UsageError(f"unknown experiment {experiment!r}; kinds: {', '.join(sorted(RUNNERS))}")
    kind = [s for s in specs if s.experiment == experiment and s.expected == "pass"]
    if windows:
        for s in kind:
            if s.windows[: len(windows)] == tuple(windows):
                return s
        base = kind[0] if kind else ExperimentSpec(experiment, experiment)
        return replace(base, identifier=f"{experiment}_{'_'.join(windows)}", windows=tuple(windows))
    return kind[0] if kind else ExperimentSpec(experiment, experiment)


def _suite_status(reps: Sequence[ExperimentReport], expect_fail: bool) -> int:
    all_ok = all(r.ok for r in reps)
    return EXIT_OK if all_ok != expect_fail else EXIT_FAIL


def _write_tables(reps: Sequence[ExperimentReport], out: str | None) -> None:
    if not out or out == "-":
        return
    folder = _table_dir(out)
    for r in reps:
        reports.table_csv(r, folder / f"{r.identifier}.csv")


def cmd_verify(args) -> tuple[dict, int]:
    specs = load_suite(args.config)
    windows = _window_names(args.windows) if args.windows else None
    spec = select_spec(specs, args.experiment, windows)
    overrides = {"step": args.grid_step, "radius": args.radius, "a": args.lattice_a, "b": args.lattice_b,
                 "tolerance": args.tolerance}
    spec = replace(spec, **{k: v for k, v in overrides.items() if v is not None})
    if args.expect_fail:
        spec = replace(spec, expected="expected-fail")
    _log(args, f"running {spec.identifier}")
    reps = run_suite([spec])
    _write_tables(reps, args.out)
    body = {"spec": _spec_dict(spec), "experiments": [r.to_dict() for r in reps]}
    return reports.document("verify", body), _suite_status(reps, False)


def _spec_dict(spec: ExperimentSpec) -> dict:
    d = {k: getattr(spec, k) for k in spec.__dataclass_fields__}
    d["params"] = dict(spec.params)
    return d


def cmd_suite(args) -> tuple[dict, int]:
    specs = load_suite(args.config)
    _log(args, f"running {len(specs)} experiments")
    reps = run_suite(specs)
    _write_tables(reps, args.out)
    counts = {k: sum(r.status == k for r in reps) for k in ("pass", "fail", "expected-fail")}
    body = {"config": args.config or "default", "counts": counts, "all_ok": all(r.ok for r in reps),
            "experiments": [r.to_dict() for r in reps]}
    return reports.document("suite", body), _suite_status(reps, args.expect_fail)


COMMANDS = {
    "check-sequence": cmd_check_sequence,
    "check-system": cmd_check_system,
    "check-grid": cmd_check_grid,
    "windows": cmd_windows,
    "verify": cmd_verify,
    "suite": cmd_suite,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help exits 0, bad flags exit 2
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        doc, status = COMMANDS[args.command](args)
    except (UsageError, InvalidLatticeParameter) as exc:
        print(f"ultragabor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"ultragabor: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UltraGaborError as exc:
        # the computation itself refused to produce a result
        print(f"ultragabor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        reports.write_json(doc, args.out)
    except BrokenPipeError:
        sys.stderr.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
