"""Command-line front end.

Subcommands build the process zoo as machine files, compute measure reports,
run parameter sweeps to CSV, reproduce the standard comparison curves, run
the state-splitting construction, apply similarity maps, and emit the
discrete Wigner machine.  All numeric CSV output uses 12 significant digits
and is byte-deterministic for a fixed configuration and seed.

Exit codes: 0 success, 2 input validation, 3 unsupported measure, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import measures as ms
from . import nmachine as nm
from . import processes as procs
from . import quantum as qm
from . import transforms as tf
from .errors import (
    DegenerateFixedSpace,
    DegenerateParameter,
    EnumerationCapExceeded,
    InvalidAlpha,
    IsometryViolated,
    MachineFormatError,
    NegativeConditional,
    NegativeEntriesUnsupportedOrder,
    NegativeRadicand,
    NoFeasiblePoint,
    NonPSD,
    NotConverged,
    NoUnitEigenvalue,
    PropertyViolated,
    QuasiMachineUnsupported,
    SingularMatrix,
    SpecMismatch,
    StationaryMismatch,
    TruncationTooCoarse,
    UnknownSymbol,
    UnsupportedProcess,
    ZeroBaseline,
    ZeroEntryWithQuasiOrder,
)
from .machine import Machine, load_machine

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNSUPPORTED = 3
EXIT_NUMERICAL = 4

_VALIDATION_ERRORS = (
    MachineFormatError,
    DegenerateParameter,
    SpecMismatch,
    UnknownSymbol,
    UnsupportedProcess,
    TruncationTooCoarse,
    StationaryMismatch,
    tf.DimensionMismatch,
    ValueError,
    OSError,
)
_UNSUPPORTED_ERRORS = (
    QuasiMachineUnsupported,
    NegativeEntriesUnsupportedOrder,
    ZeroEntryWithQuasiOrder,
    NegativeConditional,
    InvalidAlpha,
    ZeroBaseline,
)
_NUMERICAL_ERRORS = (
    NoUnitEigenvalue,
    DegenerateFixedSpace,
    SingularMatrix,
    NonPSD,
    NotConverged,
    IsometryViolated,
    NegativeRadicand,
    NoFeasiblePoint,
    PropertyViolated,
    EnumerationCapExceeded,
)

SWEEP_COLUMNS = (
    "p",
    "C_mu2",
    "C_g2",
    "C_q2",
    "C_n2",
    "E_half",
    "negativity",
    "mana",
    "advantage",
)

PROCESS_COLUMNS = {
    "perturbed-coin": SWEEP_COLUMNS,
    "sns": SWEEP_COLUMNS,
    "golden-mean": ("p", "C_mu2", "C_q2", "E_half"),
}


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "NaN"
    return format(float(value), ".12g")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2) + "\n", out)


# --- machine factories -----------------------------------------------------------


def _build_zoo_machine(args) -> Machine:
    name = args.process
    if name == "perturbed-coin":
        return procs.perturbed_coin_epsilon(_require_p(args))
    if name == "perturbed-coin-rjmc":
        return procs.perturbed_coin_rjmc(_require_p(args))
    if name == "golden-mean":
        return procs.golden_mean_epsilon(_require_p(args))
    if name == "sns-g":
        return procs.sns_g_machine(_require_p(args))
    if name == "sns-epsilon":
        return procs.sns_epsilon_truncated(_require_p(args), args.truncation)
    if name == "even":
        return procs.even_process_epsilon()
    if name == "unbiased-coin":
        return procs.unbiased_coin()
    raise UnsupportedProcess(f"unknown process {name!r}")


def _require_p(args) -> float:
    if args.p is None:
        raise ValueError(f"process {args.process!r} requires --p")
    return args.p


def cmd_make_machine(args) -> int:
    machine = _build_zoo_machine(args)
    _emit(json.dumps(machine.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


# --- measures --------------------------------------------------------------------

MEASURE_CHOICES = (
    "c-mu2",
    "c-mu1",
    "c-mu0",
    "c-q2",
    "c-q-von-neumann",
    "excess-half",
    "excess-shannon",
    "negativity",
    "mana",
)

_CLASSICAL_ONLY = {"c-q2", "c-q-von-neumann", "excess-half", "excess-shannon"}


def _one_measure(machine: Machine, name: str, horizon: int) -> ms.MeasureReport:
    pi = machine.stationary
    if name == "c-mu2":
        return ms.MeasureReport("C_mu2", ms.renyi_entropy(pi, 2), {"alpha": 2})
    if name == "c-mu1":
        return ms.MeasureReport("C_mu1", ms.renyi_entropy(pi, 1), {"alpha": 1})
    if name == "c-mu0":
        return ms.MeasureReport("C_mu0", ms.renyi_entropy(pi, 0), {"alpha": 0})
    if name == "c-q2":
        gram = qm.gram_from_machine(machine, horizon)
        return ms.MeasureReport(
            "C_q2", qm.quantum_complexity(gram, qm.RENYI2),
            {"horizon": horizon}, gram.residual,
        )
    if name == "c-q-von-neumann":
        gram = qm.gram_from_machine(machine, horizon)
        return ms.MeasureReport(
            "C_q_vN", qm.quantum_complexity(gram, qm.VON_NEUMANN),
            {"horizon": horizon}, gram.residual,
        )
    if name == "excess-half":
        return ms.excess_entropy_half(machine, horizon)
    if name == "excess-shannon":
        return ms.excess_entropy_shannon(machine, horizon)
    if name == "negativity":
        return ms.MeasureReport("negativity", ms.negativity(pi))
    if name == "mana":
        return ms.MeasureReport("mana", ms.mana(pi))
    raise InvalidAlpha(f"unknown measure {name!r}")


def cmd_measures(args) -> int:
    machine = load_machine(args.machine, tol=args.tol)
    if args.all:
        names = list(MEASURE_CHOICES)
        if not machine.classify().classical:
            names = [n for n in names if n not in _CLASSICAL_ONLY]
    elif args.measure:
        names = list(args.measure)
    else:
        raise ValueError("pass --all or at least one --measure")
    reports = [_one_measure(machine, name, args.horizon) for name in names]
    _emit_json(
        {"machine": str(args.machine), "reports": [r.to_json_dict() for r in reports]},
        args.out,
    )
    return EXIT_OK


# --- sweeps ----------------------------------------------------------------------


def _perturbed_coin_row(p: float, horizon: int, truncation=None) -> dict[str, float]:
    machine = procs.perturbed_coin_epsilon(p)
    c_mu2 = ms.renyi_entropy(machine.stationary, 2)
    c_g2 = ms.renyi_entropy(procs.perturbed_coin_rjmc(p).stationary, 2)
    c_q2 = qm.quantum_complexity(qm.gram_from_machine(machine, horizon))
    e_half = ms.perturbed_coin_excess_half(p)
    q1, q2 = nm.perturbed_coin_ideal_params(p, nm.BRANCH_PLUS)
    built = nm.build_split_machine(
        machine, nm.perturbed_coin_split_spec(p), {"q1": q1, "q2": q2}
    )
    result = nm.assess_split_machine(built, {"q1": q1, "q2": q2}, e_half, c_mu2)
    return {
        "p": p, "C_mu2": c_mu2, "C_g2": c_g2, "C_q2": c_q2, "C_n2": result.c_n2,
        "E_half": e_half, "negativity": result.negativity, "mana": result.mana,
        "advantage": result.advantage,
    }


def _sns_row(p: float, horizon: int, truncation=None) -> dict[str, float]:
    data = procs.sns_renewal_data(p, truncation)
    weights = data.stationary_weights()
    c_mu2 = ms.renyi_entropy(weights / weights.sum(), 2)
    c_g2 = ms.renyi_entropy(procs.sns_g_machine(p).stationary, 2)
    c_q2 = qm.quantum_complexity(qm.sns_gram_ensemble(p, truncation))
    e_half, _ = ms.sns_excess_entropy_half(p, truncation)
    gamma, eta = nm.sns_ideal_params(p, truncation, nm.BRANCH_PLUS)
    built = nm.build_split_machine(
        procs.sns_g_machine(p), nm.sns_split_spec(p), {"gamma": gamma, "eta": eta}
    )
    result = nm.assess_split_machine(built, {"gamma": gamma, "eta": eta}, e_half, c_mu2)
    return {
        "p": p, "C_mu2": c_mu2, "C_g2": c_g2, "C_q2": c_q2, "C_n2": result.c_n2,
        "E_half": e_half, "negativity": result.negativity, "mana": result.mana,
        "advantage": result.advantage,
    }


def _golden_mean_row(p: float, horizon: int, truncation=None) -> dict[str, float]:
    machine = procs.golden_mean_epsilon(p)
    return {
        "p": p,
        "C_mu2": ms.renyi_entropy(machine.stationary, 2),
        "C_q2": qm.quantum_complexity(qm.gram_from_machine(machine, horizon)),
        "E_half": ms.excess_entropy_half(machine, horizon).value,
    }


_ROW_BUILDERS = {
    "perturbed-coin": _perturbed_coin_row,
    "sns": _sns_row,
    "golden-mean": _golden_mean_row,
}


def _check_grid(process: str, grid: list[float]) -> list[float]:
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be strictly increasing")
    if process in ("perturbed-coin",) and any(p == 0.5 for p in grid):
        raise ValueError("p grid must exclude 0.5 for the perturbed-coin process")
    if any(not 0.0 < p < 1.0 for p in grid):
        raise ValueError("p grid values must lie strictly between 0 and 1")
    return grid


def _sweep_to_csv(
    process: str,
    grid: list[float],
    horizon: int,
    truncation,
    columns,
    out: str | None,
) -> int:
    builder = _ROW_BUILDERS[process]
    available = PROCESS_COLUMNS[process]
    columns = list(columns) if columns else list(available)
    unknown = [c for c in columns if c not in available]
    if unknown:
        raise ValueError(f"columns {unknown} not available for process {process!r}")

    lines = [",".join(columns)]
    failures: list[str] = []
    for p in grid:
        try:
            row = builder(p, horizon, truncation)
        except _NUMERICAL_ERRORS + _VALIDATION_ERRORS as exc:
            row = {"p": p}
            failures.append(f"p={_fmt(p)}: {type(exc).__name__}: {exc}")
        lines.append(",".join(_fmt(row.get(c, float("nan"))) for c in columns))
    _emit("\n".join(lines) + "\n", out)
    if failures:
        log = "\n".join(failures) + "\n"
        if out:
            Path(str(out) + ".errors.log").write_text(log)
        else:
            sys.stderr.write(log)
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def cmd_sweep(args) -> int:
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        process = doc.get("process", "perturbed-coin")
        grid = [float(p) for p in doc["p_grid"]]
        horizon = int(doc.get("horizon", args.horizon))
        truncation = doc.get("truncation")
        columns = doc.get("outputs")
        out = doc.get("output_path", args.out)
    else:
        process = args.process
        if args.p_grid is not None:
            grid = _parse_grid(args.p_grid)
        else:
            grid = list(np.arange(args.p_min, args.p_max + 1e-12, args.p_step).round(12))
            grid = [p for p in grid if abs(p - 0.5) > 1e-12 or process != "perturbed-coin"]
        horizon = args.horizon
        truncation = args.truncation
        columns = None
        out = args.out
    if process not in _ROW_BUILDERS:
        raise UnsupportedProcess(f"unknown sweep process {process!r}")
    _check_grid(process, grid)
    return _sweep_to_csv(process, grid, horizon, truncation, columns, out)


_FIGURES = {
    "fig5": ("perturbed-coin", ("p", "C_mu2", "C_g2", "C_q2", "E_half")),
    "fig7": ("perturbed-coin", ("p", "negativity_minus_1", "advantage")),
    "fig9": ("sns", ("p", "C_mu2", "C_g2", "C_q2", "E_half")),
    "fig10": ("sns", ("p", "negativity_minus_1", "advantage")),
}


def default_grid(process: str) -> list[float]:
    grid = [round(0.05 * k, 2) for k in range(1, 20)]
    if process == "perturbed-coin":
        grid = [p for p in grid if p != 0.5]
    return grid


def cmd_reproduce(args) -> int:
    process, columns = _FIGURES[args.figure]
    grid = default_grid(process)
    builder = _ROW_BUILDERS[process]
    lines = [",".join(columns)]
    for p in grid:
        row = builder(p, args.horizon, args.truncation)
        row["negativity_minus_1"] = row.get("negativity", float("nan")) - 1.0
        lines.append(",".join(_fmt(row.get(c, float("nan"))) for c in columns))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# --- construction, transforms, Wigner ----------------------------------------------


def _parse_params(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        name, _, value = token.partition("=")
        if not _:
            raise ValueError(f"parameter {token!r} is not of the form name=value")
        out[name.strip()] = float(value)
    return out


def cmd_construct_nmachine(args) -> int:
    process = args.process
    horizon = args.horizon
    truncation = args.truncation
    if process == "perturbed-coin":
        source = procs.perturbed_coin_epsilon(args.p)
        spec = nm.perturbed_coin_split_spec(args.p)
        e_half = ms.perturbed_coin_excess_half(args.p)
        c_mu2 = ms.renyi_entropy(source.stationary, 2)
        default_params = dict(
            zip(("q1", "q2"), nm.perturbed_coin_ideal_params(args.p, args.branch))
        )
    elif process == "sns":
        source = procs.sns_g_machine(args.p)
        spec = nm.sns_split_spec(args.p)
        e_half, _ = ms.sns_excess_entropy_half(args.p, truncation)
        data = procs.sns_renewal_data(args.p, truncation)
        weights = data.stationary_weights()
        c_mu2 = ms.renyi_entropy(weights / weights.sum(), 2)
        default_params = dict(
            zip(("gamma", "eta"), nm.sns_ideal_params(args.p, truncation, args.branch))
        )
    elif process == "golden-mean-bad":
        source = procs.golden_mean_epsilon(args.p)
        spec = nm.golden_mean_bad_split_spec(args.p)
        e_half = ms.excess_entropy_half(source, horizon).value
        c_mu2 = ms.renyi_entropy(source.stationary, 2)
        default_params = {"q": -0.2}
    else:
        raise UnsupportedProcess(f"unknown construction process {process!r}")

    if args.split:
        counts = tuple(int(tok) for tok in args.split.split(","))
        spec = nm.generic_split_spec(source, counts)
        default_params = {name: 0.0 for name in spec.param_names}

    if args.optimize:
        opts = nm.OptimizeOptions(seed=args.seed)
        result = nm.optimize_ideal(source, spec, e_half, opts, c_mu2=c_mu2)
    else:
        params = default_params if args.params is None else _parse_params(args.params)
        built = nm.build_split_machine(source, spec, params)
        result = nm.assess_split_machine(built, params, e_half, c_mu2)

    checks = nm.verify_nmachine_properties(source, result.machine, horizon=min(horizon, 8))
    doc = result.to_json_dict()
    doc["checks"] = {"worst_residual": checks.worst(), "passed": checks.passed()}
    if args.out:
        result.machine.save(args.out)
        doc["machine_file"] = str(args.out)
    else:
        doc["machine"] = result.machine.to_json_dict()
    _emit_json(doc, None)
    return EXIT_OK


def cmd_transform(args) -> int:
    machine = load_machine(args.machine, tol=args.tol)
    mapped = tf.apply_map(machine, tf.two_state_map(args.a, args.b))
    _emit(json.dumps(mapped.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_wigner(args) -> int:
    rep = qm.wigner_qubit_representation(args.p)
    machine = qm.wigner_as_machine(rep)
    _emit(json.dumps(machine.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="structural tolerance")
    common.add_argument("--horizon", type=int, default=12, help="estimation horizon")
    common.add_argument("--seed", type=int, default=0, help="seed for seeded searches")
    common.add_argument("--out", help="output path (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="quasihmm",
        description="Classical, quantum, and quasiprobabilistic models of "
        "stationary processes with Renyi memory measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_make = sub.add_parser("make-machine", parents=[common], help="emit a zoo machine as JSON")
    p_make.add_argument(
        "--process",
        required=True,
        choices=(
            "perturbed-coin", "perturbed-coin-rjmc", "golden-mean",
            "sns-g", "sns-epsilon", "even", "unbiased-coin",
        ),
    )
    p_make.add_argument("--p", type=float)
    p_make.add_argument("--truncation", type=int)
    p_make.set_defaults(handler=cmd_make_machine)

    p_meas = sub.add_parser("measures", parents=[common], help="measure reports for a machine file")
    p_meas.add_argument("machine")
    p_meas.add_argument("--measure", action="append", choices=MEASURE_CHOICES)
    p_meas.add_argument("--all", action="store_true")
    p_meas.set_defaults(handler=cmd_measures)

    p_sweep = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    p_sweep.add_argument("--config", help="JSON sweep configuration file")
    p_sweep.add_argument("--process", choices=tuple(_ROW_BUILDERS), default="perturbed-coin")
    p_sweep.add_argument("--p-grid", help="comma-separated grid values")
    p_sweep.add_argument("--p-min", type=float, default=0.1)
    p_sweep.add_argument("--p-max", type=float, default=0.9)
    p_sweep.add_argument("--p-step", type=float, default=0.1)
    p_sweep.add_argument("--truncation", type=int)
    p_sweep.set_defaults(handler=cmd_sweep)

    p_rep = sub.add_parser("reproduce", parents=[common], help="canned comparison sweeps")
    p_rep.add_argument("figure", choices=tuple(_FIGURES))
    p_rep.add_argument("--truncation", type=int)
    p_rep.set_defaults(handler=cmd_reproduce)

    p_nm = sub.add_parser(
        "construct-nmachine", parents=[common], help="build a state-split machine"
    )
    p_nm.add_argument("--process", required=True,
                      choices=("perturbed-coin", "sns", "golden-mean-bad"))
    p_nm.add_argument("--p", type=float, required=True)
    p_nm.add_argument("--split", help="copy counts per source state, e.g. 2,1")
    p_nm.add_argument("--params", help="comma-separated name=value pairs")
    p_nm.add_argument("--optimize", action="store_true")
    p_nm.add_argument("--branch", choices=(nm.BRANCH_PLUS, nm.BRANCH_MINUS),
                      default=nm.BRANCH_PLUS)
    p_nm.add_argument("--truncation", type=int)
    p_nm.set_defaults(handler=cmd_construct_nmachine)

    p_tf = sub.add_parser("transform", parents=[common], help="apply a 2x2 similarity map")
    p_tf.add_argument("--machine", required=True)
    p_tf.add_argument("--a", type=float, required=True)
    p_tf.add_argument("--b", type=float, required=True)
    p_tf.set_defaults(handler=cmd_transform)

    p_wig = sub.add_parser("wigner", parents=[common],
                           help="discrete Wigner machine of the Perturbed Coin quantum model")
    p_wig.add_argument("--p", type=float, required=True)
    p_wig.set_defaults(handler=cmd_wigner)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _UNSUPPORTED_ERRORS as exc:
        _print_error(exc)
        return EXIT_UNSUPPORTED
    except _NUMERICAL_ERRORS as exc:
        _print_error(exc)
        return EXIT_NUMERICAL
    except _VALIDATION_ERRORS as exc:
        # includes json.JSONDecodeError via ValueError
        _print_error(exc)
        return EXIT_VALIDATION


def _print_error(exc: Exception) -> None:
    sys.stderr.write(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
    )


if __name__ == "__main__":
    sys.exit(main())
