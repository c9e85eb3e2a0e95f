"""Command-line interface.

Every command exits 0 on success. Argument, zero-overlap and
degenerate-input failures print one machine-readable JSON object to
stderr ({"error": {"type": ..., "message": ...}}) and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from . import analysis, enhanced, hybrid, nmr, reference
from .datasets import dataset
from .direct import SuperpositionSpec, run_direct
from .errors import ArgumentError, ToolkitError
from .linalg import QubitParams, StateVector, basis_state, make_qubit


class _CliArgumentError(Exception):
    """Raised by the parser so main() can emit the JSON error envelope."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliArgumentError(message)


def _parse_angles(text: str, what: str) -> QubitParams:
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise ArgumentError(f"{what} expects 'theta,phi[,gamma]', got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ArgumentError(f"{what}: {exc}") from exc
    gamma = values[2] if len(values) == 3 else 0.0
    return QubitParams(
        values[0], values[1] % (2.0 * math.pi), gamma % (2.0 * math.pi)
    )


def _parse_weight(text: str, what: str) -> complex:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ArgumentError(f"{what} expects 'RE[,IM]', got {text!r}")
    try:
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError as exc:
        raise ArgumentError(f"{what}: {exc}") from exc
    return complex(re, im)


def _parse_weight_list(text: str) -> list[complex]:
    try:
        return [complex(p) for p in text.split(",")]
    except ValueError as exc:
        raise ArgumentError(f"--weights: {exc}") from exc


def _load_json(path: str) -> object:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ArgumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"{path} is not valid JSON: {exc}") from exc


def _spec_from_args(args) -> SuperpositionSpec:
    return SuperpositionSpec(
        weight_a=args.a,
        weight_b=args.b,
        psi1=args.psi1,
        psi2=args.psi2,
        chi=args.chi if args.chi is not None else QubitParams(0.0, 0.0, 0.0),
    )


def _add_state_flags(parser: _Parser) -> None:
    parser.add_argument(
        "--psi1",
        required=True,
        type=lambda s: _parse_angles(s, "--psi1"),
        help="first input state as theta,phi[,gamma]",
    )
    parser.add_argument(
        "--psi2",
        required=True,
        type=lambda s: _parse_angles(s, "--psi2"),
        help="second input state as theta,phi[,gamma]",
    )
    parser.add_argument(
        "--a", required=True, type=lambda s: _parse_weight(s, "--a"),
        help="weight a as RE[,IM]",
    )
    parser.add_argument(
        "--b", required=True, type=lambda s: _parse_weight(s, "--b"),
        help="weight b as RE[,IM]",
    )
    parser.add_argument(
        "--chi",
        type=lambda s: _parse_angles(s, "--chi"),
        default=None,
        help="referential state as theta,phi (default |0>)",
    )


def _result_csv(result) -> str:
    amps = result.final_state.amps
    header = ["success_prob", "norm_sq", "fidelity"]
    values = [
        analysis.fmt9(result.success_prob),
        analysis.fmt9(result.norm_sq),
        analysis.fmt9(result.fidelity_to_target),
    ]
    for k, amp in enumerate(amps):
        header += [f"final{k}_re", f"final{k}_im"]
        values += [analysis.fmt9(amp.real), analysis.fmt9(amp.imag)]
    return ",".join(header) + "\n" + ",".join(values) + "\n"


def _emit_result(result, args) -> None:
    if getattr(args, "csv", False):
        sys.stdout.write(_result_csv(result))
    else:
        json.dump(result.to_json(), sys.stdout)
        sys.stdout.write("\n")


def _cmd_run_direct(args) -> int:
    _emit_result(run_direct(_spec_from_args(args)), args)
    return 0


def _cmd_run_reference(args) -> int:
    chi = make_qubit(args.chi if args.chi is not None else QubitParams(0.0, 0.0, 0.0))
    psi1 = make_qubit(args.psi1)
    psi2 = make_qubit(args.psi2)
    if args.mode == "three-qubit":
        result = reference.run_three_qubit(args.a, args.b, psi1, psi2, chi)
    else:
        result = reference.run_two_qubit_reduced(args.a, args.b, psi1, psi2, chi)
    _emit_result(result, args)
    return 0


def _cmd_qudit(args) -> int:
    raw = _load_json(args.states)
    if not isinstance(raw, list):
        raise ArgumentError(f"{args.states} must hold a JSON array of states")
    states = tuple(StateVector.from_json(obj) for obj in raw)
    weights = tuple(_parse_weight_list(args.weights))
    if args.chi is not None:
        chi = StateVector.from_json(_load_json(args.chi))
    else:
        chi = basis_state(args.d, args.chi_index)
    spec = reference.ReferenceSpec(
        n=args.n, d=args.d, weights=weights, states=states, chi=chi
    )
    result = hybrid.run_hybrid(spec)
    json.dump(result.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_enhanced(args) -> int:
    chi = make_qubit(args.chi if args.chi is not None else QubitParams(0.0, 0.0, 0.0))
    psi1 = make_qubit(args.psi1)
    psi2 = make_qubit(args.psi2)
    result = enhanced.run_enhanced(args.a, args.b, psi1, psi2, chi)
    payload = result.to_json()
    if args.geometry_report:
        payload["geometry_report"] = {
            "geometry": result.geometry,
            "harvest_purity": result.harvest_purity,
            "p1_closed_form": enhanced.closed_form_p1(args.a, args.b, psi1, psi2, chi),
            "p2_closed_form": enhanced.closed_form_p2(args.a, args.b, psi1, psi2, chi),
        }
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_pulse(args) -> int:
    sys_params = nmr.SpinSystem(j_coupling=2.0 * math.pi * args.j)
    if args.sequence is not None:
        seq = nmr.PulseSequence.from_json(_load_json(args.sequence))
    else:
        seq = nmr.compile_sequence(dataset(args.dataset).spec(), sys_params)
    checkpoints = nmr.run_sequence(seq, sys_params, epsilon=args.epsilon)
    if args.checkpoint not in checkpoints:
        raise ArgumentError(
            f"the sequence has no checkpoint {args.checkpoint!r}"
        )
    rho = checkpoints[args.checkpoint]
    payload = {
        "dataset": args.dataset,
        "checkpoint": args.checkpoint,
        "rho": rho.to_json(),
        "sequence": seq.to_json(),
    }
    if args.checkpoint == "iv":
        qubit_state, norm = nmr.partial_tomography(rho)
        payload["qubit_state"] = qubit_state.to_json()
        payload["normalization"] = norm
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_sweep_rp(args) -> int:
    if args.rc_steps < 1:
        raise ArgumentError("--rc-steps must be at least 1")
    if args.rc_steps == 1:
        r_c_values = [args.rc_min]
    else:
        step = (args.rc_max - args.rc_min) / (args.rc_steps - 1)
        r_c_values = [args.rc_min + k * step for k in range(args.rc_steps)]
    try:
        b_sq_values = [float(p) for p in args.bsq.split(",")]
    except ValueError as exc:
        raise ArgumentError(f"--bsq: {exc}") from exc
    grid = analysis.SweepGrid(tuple(r_c_values), tuple(b_sq_values))
    text = analysis.sweep_csv(analysis.sweep_rp(grid))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return 0


def _cmd_table1(args) -> int:
    rows = analysis.reproduce_table1(args.mode)
    text = analysis.table1_csv(rows)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return 0


def _cmd_verify(args) -> int:
    report = analysis.verify_probability_formulas(args.trials, args.seed)
    json.dump(report.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return 0 if report.ok else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="qsuperpose", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-direct", help="gate-level two-qubit protocol")
    _add_state_flags(p)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV output")
    p.set_defaults(func=_cmd_run_direct)

    p = sub.add_parser("run-reference", help="reference-projection protocols")
    p.add_argument("--mode", required=True, choices=("three-qubit", "reduced"))
    _add_state_flags(p)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_run_reference)

    p = sub.add_parser("qudit", help="hybrid qunit-qudit protocol")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--d", required=True, type=int)
    p.add_argument("--states", required=True, help="JSON file with n states")
    p.add_argument("--weights", required=True, help="comma list of complex weights")
    chi = p.add_mutually_exclusive_group(required=True)
    chi.add_argument("--chi-index", type=int, help="basis index of the reference")
    chi.add_argument("--chi", help="JSON file with the reference state")
    p.set_defaults(func=_cmd_qudit)

    p = sub.add_parser("enhanced", help="dual-outcome enhanced protocol")
    _add_state_flags(p)
    p.add_argument("--geometry-report", action="store_true")
    p.set_defaults(func=_cmd_enhanced)

    p = sub.add_parser("pulse", help="NMR pulse-level pipeline on a dataset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dataset", type=int, help="built-in dataset 1..11")
    src.add_argument("--sequence", help="JSON file with a pulse sequence to run")
    p.add_argument("--checkpoint", default="iv", choices=nmr.CHECKPOINT_LABELS)
    p.add_argument("--j", type=float, default=215.0, help="scalar coupling in Hz")
    p.add_argument("--epsilon", type=float, default=1.0, help="pseudo-pure purity")
    p.set_defaults(func=_cmd_pulse)

    p = sub.add_parser("sweep-rp", help="P2/P3 ratio sweep to CSV")
    p.add_argument("--rc-min", required=True, type=float)
    p.add_argument("--rc-max", required=True, type=float)
    p.add_argument("--rc-steps", required=True, type=int)
    p.add_argument("--bsq", required=True, help="comma list of |b|^2 values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep_rp)

    p = sub.add_parser("table1", help="reproduce the experiment table to CSV")
    p.add_argument("--mode", required=True, choices=("gate", "pulse", "both"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("verify", help="randomized closed-form verification")
    p.add_argument("--trials", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.set_defaults(func=_cmd_verify)
    return parser


def _emit_error(kind: str, message: str) -> None:
    json.dump({"error": {"type": kind, "message": message}}, sys.stderr)
    sys.stderr.write("\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliArgumentError as exc:
        _emit_error("argument", str(exc))
        return 2
    except ToolkitError as exc:
        _emit_error(exc.kind, str(exc))
        return 1
    except OSError as exc:
        _emit_error("argument", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
