"""Command-line front end.

Subcommands: solve, verify, prep, compare, pulse, spectrum.  Every command
accepts ``--json`` (emit the full machine-readable report), ``--tolerance``,
``--bit-order {msb-v1,lsb-v1}`` (assignment rendering; lsb-v1 reverses the
bit order, matching the transcription used by the tabulated measured data),
and ``--params`` (spin-system parameter file).  Output is deterministic:
floats are fixed at 12 significant digits and reports serialize with sorted
keys.  The exit code is 0 exactly when every requested check passes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .formula import (
    FormulaParseError,
    assignment_bits,
    conflicts,
    parse_formula,
    reverse_bits,
    solutions,
)
from .hogg import (
    gamma_matrix,
    measure_distribution,
    mixing_matrix,
    phase_matrix,
    run_pipeline,
    verify_wgw,
    walsh_hadamard,
)
from .linalg import is_unitary, phase_aligned_error
from .pulse import (
    NotTensorFactorable,
    PulseParseError,
    compile_diagonal,
    parse_pulse_sequence,
    prep_pulse_program,
    program_unitary,
    sequence_to_unitary,
    verify_table_sequence,
)
from .spin_sim import (
    ALANINE,
    SchemeParseError,
    SpinSystemParseError,
    builtin_prep_scheme,
    error_metrics,
    experiment_unitary,
    format_z_terms,
    ideal_population_vector,
    lint_scheme,
    parse_measured_vector,
    parse_prep_scheme,
    parse_spin_system,
    run_experiment,
    run_prep_scheme,
    significant_terms,
    stick_spectrum,
    target_pseudo_pure,
    thermal_state,
    z_product_decomposition,
    zero_off_diagonal,
)

DEFAULT_TOLERANCES = {
    "verify": 1e-10,
    "prep": 1e-12,
    "pulse": 1e-8,
    "solve": 1e-12,
}


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _round12(value: float) -> float:
    return float(f"{value:.12g}")


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"im": _round12(obj.imag), "re": _round12(obj.real)}
    if isinstance(obj, (float, np.floating)):
        return _round12(float(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _emit(report: dict, lines: list[str], as_json: bool) -> None:
    if as_json:
        print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _display_bits(assignment: int, n: int, bit_order: str) -> str:
    if bit_order == "lsb-v1":
        assignment = reverse_bits(assignment, n)
    return assignment_bits(assignment, n)


def _base_report(args, command: str) -> dict:
    return {
        "tool": {"name": "hoggsat", "version": __version__},
        "command": command,
        "bit_order": args.bit_order,
    }


def _load_params(args):
    if args.params:
        return parse_spin_system(Path(args.params).read_text())
    return None


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    f = parse_formula(args.formula, n=args.n)
    psi = run_pipeline(f)
    probs = measure_distribution(psi)
    top = int(np.argmax(probs))
    top_conflicts = conflicts(f, top)
    verdict = "SAT" if top_conflicts == 0 else "UNSAT"
    tol = args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCES["solve"]
    support = [
        {"assignment": _display_bits(a, f.n, args.bit_order), "probability": float(p)}
        for a, p in enumerate(probs) if p > tol
    ]
    report = _base_report(args, "solve")
    report.update({
        "formula": str(f),
        "n": f.n,
        "m": f.m,
        "distribution": support,
        "top_assignment": _display_bits(top, f.n, args.bit_order),
        "top_probability": float(probs[top]),
        "top_conflicts": top_conflicts,
        "verdict": verdict,
        "brute_force_solutions": [_display_bits(a, f.n, args.bit_order) for a in sorted(solutions(f))],
    })
    lines = [
        f"formula: {f}   (n={f.n}, m={f.m})",
        "distribution (assignment : probability):",
    ]
    lines += [f"  {row['assignment']} : {row['probability']:.12f}" for row in support]
    lines += [
        f"top assignment: {report['top_assignment']}   probability {probs[top]:.12f}",
        f"conflicts of top assignment: {top_conflicts}",
        f"verdict: {verdict}",
    ]
    _emit(report, lines, args.json)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_pair(n: int, m: int, tol: float) -> dict:
    wgw = verify_wgw(n, m, tol)
    mixing_ok = is_unitary(mixing_matrix(n, m), tol)
    gamma_mod = float(np.abs(np.abs(gamma_matrix(n, m)) - 1.0).max())
    w = walsh_hadamard(n)
    involution = float(np.abs(w @ w - np.eye(2**n)).max())
    passed = wgw.passed and mixing_ok and gamma_mod <= tol and involution <= tol
    return {
        "n": n,
        "m": m,
        "wgw_error": wgw.max_abs_error,
        "wgw_phase": wgw.global_phase,
        "mixing_unitary": mixing_ok,
        "gamma_modulus_error": gamma_mod,
        "walsh_involution_error": involution,
        "passed": passed,
    }


def _cmd_verify(args) -> int:
    tol = args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCES["verify"]
    if args.all:
        pairs = [(n, m) for n in range(1, args.max_n + 1) for m in range(1, n + 1)]
    else:
        if args.n is None or args.m is None:
            raise SystemExit("verify: give N and M, or --all")
        pairs = [(args.n, args.m)]
    checks = [_verify_pair(n, m, tol) for n, m in pairs]
    all_passed = all(c["passed"] for c in checks)
    worst = max(max(c["wgw_error"], c["gamma_modulus_error"], c["walsh_involution_error"])
                for c in checks)
    report = _base_report(args, "verify")
    report.update({"tolerance": tol, "checks": checks, "all_passed": all_passed, "max_error": worst})
    lines = []
    for c in checks:
        status = "pass" if c["passed"] else "FAIL"
        lines.append(
            f"n={c['n']} m={c['m']}  factorization error {_fmt(c['wgw_error'])}  "
            f"mixing unitary {'ok' if c['mixing_unitary'] else 'BAD'}  "
            f"gamma modulus error {_fmt(c['gamma_modulus_error'])}  "
            f"W^2=I error {_fmt(c['walsh_involution_error'])}  -> {status}"
        )
    lines.append(f"{len(checks)} check(s), max error {_fmt(worst)}: "
                 + ("all passed" if all_passed else "FAILURES present"))
    _emit(report, lines, args.json)
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# prep
# ---------------------------------------------------------------------------

def _cmd_prep(args) -> int:
    tol = args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCES["prep"]
    if args.scheme:
        scheme = parse_prep_scheme(Path(args.scheme).read_text())
        scheme_label = args.scheme
    else:
        scheme = builtin_prep_scheme(args.n)
        scheme_label = f"built-in {args.n}-spin temporal averaging"
    n = args.n
    target = target_pseudo_pure(n)
    experiments = []
    for idx, experiment in enumerate(scheme.experiments, start=1):
        rho = run_experiment(experiment, n)
        if scheme.gradient:
            rho = zero_off_diagonal(rho)
        coeffs, z_residual = z_product_decomposition(rho)
        gate_names = " ".join(str(g) for g in experiment.gates) or "E"
        if experiment.tip_spins:
            gate_names += "".join(f" TIP{s}" for s in experiment.tip_spins)
        experiments.append({
            "index": idx,
            "gates": gate_names,
            "terms": format_z_terms(coeffs),
            "coefficients": {"".join(map(str, k)): v for k, v in significant_terms(coeffs).items()},
            "non_z_residual": z_residual,
        })
    total = run_prep_scheme(scheme, n)
    residual = float(np.abs(total - target).max())
    off_diag = float(np.abs(total - np.diag(np.diagonal(total))).max())
    params = _load_params(args)
    if params is None and n == ALANINE.n:
        params = ALANINE
    lint_ran = params is not None
    warnings = lint_scheme(scheme, params) if lint_ran else []
    passed = residual <= tol
    report = _base_report(args, "prep")
    report.update({
        "scheme": scheme_label,
        "n": n,
        "gradient": scheme.gradient,
        "experiments": experiments,
        "sum_diagonal": [float(x) for x in np.real(np.diagonal(total))],
        "sum_off_diagonal_max": off_diag,
        "target_diagonal": [float(x) for x in np.real(np.diagonal(target))],
        "max_residual": residual,
        "tolerance": tol,
        "passed": passed,
        "lint_ran": lint_ran,
        "lint_warnings": warnings,
    })
    lines = [f"scheme: {scheme_label} ({len(scheme.experiments)} experiments, "
             f"gradient {'on' if scheme.gradient else 'off'})"]
    for e in experiments:
        lines.append(f"experiment {e['index']} ({e['gates']}): {e['terms']}")
    lines.append("sum diagonal:    " + " ".join(_fmt(x) for x in report["sum_diagonal"]))
    if off_diag > 1e-15:
        lines.append(f"sum off-diagonal content: max |entry| {_fmt(off_diag)}")
    lines.append("target diagonal: " + " ".join(_fmt(x) for x in report["target_diagonal"]))
    lines.append(f"max residual vs pseudo-pure target: {_fmt(residual)} "
                 f"({'pass' if passed else 'FAIL'} at tolerance {_fmt(tol)})")
    for w in warnings:
        lines.append(f"lint: {w}")
    if not warnings:
        lines.append("lint: no warnings" if lint_ran else "lint: skipped (no spin-system parameters)")
    _emit(report, lines, args.json)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def _cmd_compare(args) -> int:
    measured = parse_measured_vector(Path(args.measured).read_text())
    n = measured.size.bit_length() - 1
    if args.ideal_file:
        ideal = parse_measured_vector(Path(args.ideal_file).read_text())
        ideal_label = f"vector from {args.ideal_file}"
    elif args.ideal_index is not None:
        token = args.ideal_index
        index = int(token, 2) if set(token) <= {"0", "1"} and len(token) == n else int(token)
        if args.bit_order == "lsb-v1":
            index = reverse_bits(index, n)
        ideal = ideal_population_vector(n, index)
        ideal_label = f"population on assignment {_display_bits(index, n, args.bit_order)}"
    elif args.ideal_formula:
        f = parse_formula(args.ideal_formula, n=n)
        sols = sorted(solutions(f))
        if len(sols) != 1:
            raise SystemExit(f"compare: formula {f} has {len(sols)} solutions; "
                             "an ideal population vector needs exactly one")
        index = sols[0] if args.bit_order == "msb-v1" else reverse_bits(sols[0], n)
        ideal = ideal_population_vector(n, index)
        ideal_label = (f"solution of {f} at vector index {index} "
                       f"(bit order {args.bit_order})")
    else:
        raise SystemExit("compare: give --ideal-file, --ideal-index or --ideal-formula")
    metrics = error_metrics(measured, ideal)
    report = _base_report(args, "compare")
    threshold = args.threshold
    passed = metrics.max_abs_dev <= threshold if threshold is not None else True
    report.update({
        "measured_file": args.measured,
        "entries": int(measured.size),
        "ideal": ideal_label,
        "per_entry": list(metrics.per_entry),
        "max_abs_dev": metrics.max_abs_dev,
        "threshold": threshold,
        "passed": passed,
    })
    lines = [
        f"measured: {measured.size} entries from {args.measured}",
        f"ideal: {ideal_label}",
        "per-entry |measured - ideal|: " + " ".join(_fmt(v) for v in metrics.per_entry),
        f"max deviation: {_fmt(metrics.max_abs_dev)}",
    ]
    if threshold is not None:
        lines.append(f"threshold {_fmt(threshold)}: {'PASS' if passed else 'FAIL'}")
    _emit(report, lines, args.json)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# pulse
# ---------------------------------------------------------------------------

def _cmd_pulse(args) -> int:
    tol = args.tolerance if args.tolerance is not None else DEFAULT_TOLERANCES["pulse"]
    report = _base_report(args, f"pulse {args.pulse_command}")
    if args.pulse_command == "verify":
        f = parse_formula(args.formula)
        seq = parse_pulse_sequence(args.sequence)
        result = verify_table_sequence(f, seq, tol)
        report.update({"verification": result})
        lines = [
            f"formula: {result.formula}",
            f"sequence: {result.sequence or '(empty)'}",
            f"action on |{'0' * f.n}>: "
            + ("equivalent" if result.state_equivalent else "NOT equivalent")
            + f" (max error {_fmt(result.state_max_error)}, "
              f"global phase {_fmt(result.state_global_phase.real)}{result.state_global_phase.imag:+.12g}i)",
            "full unitary: "
            + ("equivalent" if result.full_equivalent else "not equivalent")
            + f" (max error {_fmt(result.full_max_error)})",
        ]
        _emit(report, lines, args.json)
        return 0 if result.state_equivalent else 1
    if args.pulse_command in ("compile-r", "compile-gamma"):
        if args.pulse_command == "compile-r":
            f = parse_formula(args.formula)
            diag = phase_matrix(f)
            label = f"conflict-phase diagonal of {f}"
            n = f.n
        else:
            n = args.n
            diag = gamma_matrix(n, args.m)
            label = f"mixing-phase diagonal for n={n}, m={args.m}"
        try:
            seq = compile_diagonal(diag)
        except NotTensorFactorable as exc:
            report.update({"target": label, "compiled": None, "error": str(exc)})
            _emit(report, [f"target: {label}", f"not tensor-factorable: {exc}",
                           "fall back to dense simulation"], args.json)
            return 1
        err, phase = phase_aligned_error(sequence_to_unitary(seq, n), np.diag(diag))
        report.update({"target": label, "compiled": seq.to_text() or "(empty)",
                       "round_trip_error": err, "global_phase": phase})
        _emit(report, [f"target: {label}",
                       f"compiled sequence: {seq.to_text() or '(empty)'}",
                       f"round-trip error (up to global phase): {_fmt(err)}"], args.json)
        return 0
    if args.pulse_command == "lower":
        programs = prep_pulse_program(args.n)
        scheme = builtin_prep_scheme(args.n)
        rows = []
        all_ok = True
        for program, experiment in zip(programs, scheme.experiments):
            target = experiment_unitary(experiment, args.n)
            err, _ = phase_aligned_error(program_unitary(program, args.n), target)
            ok = err <= 1e-10
            all_ok &= ok
            rows.append({"label": program.label, "timeline": program.describe(),
                         "gate_chain_error": err, "passed": ok})
        report.update({"programs": rows, "all_passed": all_ok})
        lines = []
        for r in rows:
            lines.append(f"{r['label']}")
            lines.append(f"  timeline: {r['timeline']}")
            lines.append(f"  matches gate chain up to global phase: error {_fmt(r['gate_chain_error'])} "
                         f"({'pass' if r['passed'] else 'FAIL'})")
        _emit(report, lines, args.json)
        return 0 if all_ok else 1
    raise SystemExit(f"unknown pulse subcommand {args.pulse_command!r}")


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _cmd_spectrum(args) -> int:
    params = _load_params(args) or ALANINE
    n = params.n
    if args.state == "pseudo-pure":
        rho = target_pseudo_pure(n)
    elif args.state == "thermal":
        rho = thermal_state(n)
    else:
        rho = run_prep_scheme(builtin_prep_scheme(n), n)
    lines_data = stick_spectrum(rho, args.spin, params)
    report = _base_report(args, "spectrum")
    report.update({
        "state": args.state,
        "spin": args.spin,
        "n": n,
        "lines": [{"frequency_hz": l.frequency_hz, "amplitude": l.amplitude} for l in lines_data],
    })
    lines = [f"spin {args.spin} of {args.state} state (n={n})",
             "frequency (Hz)      amplitude"]
    for l in lines_data:
        lines.append(f"{l.frequency_hz:>14.4f}  {l.amplitude:>16.12f}")
    if not lines_data:
        lines.append("(no lines)")
    _emit(report, lines, args.json)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override the command's pass/fail tolerance")
    common.add_argument("--bit-order", choices=("msb-v1", "lsb-v1"), default="msb-v1",
                        help="assignment bit order for display and ingestion")
    common.add_argument("--params", default=None, help="spin-system parameter file")

    parser = argparse.ArgumentParser(
        prog="hoggsat",
        description="Single-step structured search over 1-SAT and its NMR-ensemble emulation.",
    )
    parser.add_argument("--version", action="version", version=f"hoggsat {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("solve", parents=[common], help="run the search pipeline on a formula")
    p.add_argument("formula", help='formula text, e.g. "v1 & !v2 & v3"')
    p.add_argument("--n", type=int, default=None, help="variable count (default: largest index used)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", parents=[common],
                       help="check the mixing-operator factorization and unitarity")
    p.add_argument("n", nargs="?", type=int, default=None)
    p.add_argument("m", nargs="?", type=int, default=None)
    p.add_argument("--all", action="store_true", help="sweep all 1 <= m <= n <= max-n")
    p.add_argument("--max-n", type=int, default=6)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("prep", parents=[common], help="run a pseudo-pure preparation scheme")
    p.add_argument("n", type=int)
    p.add_argument("--scheme", default=None, help="scheme file (default: built-in scheme for n)")
    p.set_defaults(func=_cmd_prep)

    p = sub.add_parser("compare", parents=[common],
                       help="compare a measured diagonal against an ideal one")
    p.add_argument("measured", help="CSV/text vector, one real per line or comma separated")
    p.add_argument("--ideal-file", default=None)
    p.add_argument("--ideal-index", default=None,
                   help="basis index (integer or bit string) carrying the ideal population")
    p.add_argument("--ideal-formula", default=None,
                   help="single-solution formula defining the ideal population")
    p.add_argument("--threshold", type=float, default=None, help="pass/fail bound on the max deviation")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("pulse", parents=[common], help="pulse-sequence tools")
    psub = p.add_subparsers(dest="pulse_command", required=True)
    q = psub.add_parser("verify", parents=[common], help="verify a sequence against U R W")
    q.add_argument("formula")
    q.add_argument("sequence")
    q.set_defaults(func=_cmd_pulse)
    q = psub.add_parser("compile-r", parents=[common], aliases=["compile-R"],
                        help="compile a formula's conflict-phase diagonal to z-rotations")
    q.add_argument("formula")
    q.set_defaults(func=_cmd_pulse, pulse_command="compile-r")
    q = psub.add_parser("compile-gamma", parents=[common],
                        help="compile the mixing-phase diagonal to z-rotations")
    q.add_argument("m", type=int)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=_cmd_pulse, pulse_command="compile-gamma")
    q = psub.add_parser("lower", parents=[common],
                        help="lower the built-in preparation scheme to pulse programs")
    q.add_argument("--n", type=int, default=3)
    q.set_defaults(func=_cmd_pulse, pulse_command="lower")

    p = sub.add_parser("spectrum", parents=[common], help="first-order stick spectrum of a state")
    p.add_argument("state", choices=("pseudo-pure", "thermal", "prep"))
    p.add_argument("--spin", type=int, required=True)
    p.set_defaults(func=_cmd_spectrum)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormulaParseError, PulseParseError, SchemeParseError, SpinSystemParseError,
            NotTensorFactorable, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # usage errors raised inside commands
        if isinstance(exc.code, str):
            print(f"error: {exc.code}", file=sys.stderr)
            return 2
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
