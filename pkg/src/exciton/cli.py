"""Command-line interface: spectra, trajectories, figure data, validation.

Exit codes: 0 success, 1 failed validation, 2 invalid flags or initial-state
specs, 3 numerical failure (degenerate propagation, exponential overflow,
integrator step rejection), 4 I/O failure.

All data output is deterministic: numbers are serialized with 12
significant digits, files end lines with LF, and no timestamps are
embedded.  Files are written atomically (temp file, then rename).
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import linalg, oracle, spectral, validate
from .dynamics import (
    BlockedDensity,
    DEFAULT_ALPHA,
    DEFAULT_DT,
    DEFAULT_T_MAX,
    DRESSED_PRESETS,
    MethodUnavailable,
    PRESET_EXCITATION,
    SUPERPOSITION_PRESETS,
    TimeSeries,
    evolve,
    initial_dressed,
    initial_fock,
    initial_superposition,
    time_grid,
)
from .liouville import CANONICAL, MODES, PRINTED, BlockIndex
from .model import InvalidExcitation, ModelParams

# Emitted trajectories must satisfy these before anything is written.
TRACE_TOL = 1e-8
HERM_TOL = 1e-8


class UsageError(ValueError):
    """Bad flag value or malformed initial-state spec (exit code 2)."""


def _f(x) -> float:
    """Round-trip a float through 12 significant digits."""
    return float(f"{float(x):.12g}")


def _complex_doc(z):
    return {"re": _f(z.real), "im": _f(z.imag)}


def _matrix_doc(mat):
    mat = np.asarray(mat)
    return {"re": [[_f(v) for v in row] for row in mat.real],
            "im": [[_f(v) for v in row] for row in mat.imag]}


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-exciton-")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        # mkstemp creates 0600; restore ordinary umask-governed permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        _write_atomic(output, text)


def _params_from(args) -> ModelParams:
    try:
        return ModelParams(delta=args.delta, g=args.g,
                           gamma0=args.gamma0, gamma1=args.gamma1)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params_doc(p: ModelParams):
    return {"delta": _f(p.delta), "g": _f(p.g), "gamma0": _f(p.gamma0),
            "gamma1": _f(p.gamma1), "gamma_sum": _f(p.gamma_sum)}


def _parse_fields(text, spec_name):
    fields = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"malformed {spec_name} field {item!r}")
        fields[key.strip()] = value.strip()
    return fields


def blocked_from_doc(doc) -> BlockedDensity:
    """Blocked state from the JSON interchange format
    {"blocks": [{"n": ..., "m": ..., "re": [[...]], "im": [[...]]}]}."""
    try:
        blocks = {}
        for entry in doc["blocks"]:
            mat = np.asarray(entry["re"], dtype=float) + 1j * np.asarray(entry["im"], dtype=float)
            blocks[(int(entry["n"]), int(entry["m"]))] = mat
        return BlockedDensity(blocks)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed blocked-density document: {exc}") from exc


def blocked_to_doc(state: BlockedDensity) -> dict:
    return {"blocks": [{"n": int(i.n), "m": int(i.m), **_matrix_doc(mat)}
                       for i, mat in sorted(state.items())]}


def parse_initial(spec) -> BlockedDensity:
    """Initial-state spec strings: dressed:n=2, superposition:n=2,alpha=0.785,
    fock:photons=1,atom=0, or file:<path> in the JSON interchange format."""
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise UsageError(f"initial-state spec {spec!r} lacks a ':'")
    try:
        if kind == "dressed":
            fields = _parse_fields(rest, "dressed")
            return initial_dressed(int(fields["n"]))
        if kind == "superposition":
            fields = _parse_fields(rest, "superposition")
            alpha = float(fields.get("alpha", DEFAULT_ALPHA))
            return initial_superposition(int(fields["n"]), alpha)
        if kind == "fock":
            fields = _parse_fields(rest, "fock")
            return initial_fock(int(fields["photons"]), int(fields["atom"]))
        if kind == "file":
            with open(rest) as handle:
                return blocked_from_doc(json.load(handle))
    except (KeyError, ValueError, InvalidExcitation) as exc:
        raise UsageError(f"bad initial-state spec {spec!r}: {exc}") from exc
    except OSError as exc:
        raise UsageError(f"cannot read initial state file: {exc}") from exc
    raise UsageError(f"unknown initial-state kind {kind!r}")


def _sorted_decomposition_doc(dec):
    order = linalg.sort_key(dec.eigenvalues)
    return {
        "source": dec.source,
        "degenerate": bool(dec.degenerate),
        "eigenvalues": [_complex_doc(dec.eigenvalues[i]) for i in order],
        "right_eigenmatrices": [_matrix_doc(dec.right[i]) for i in order],
        "left_eigenmatrices": [_matrix_doc(dec.left[i]) for i in order],
    }


def cmd_spectrum(args) -> int:
    p = _params_from(args)
    if args.n < 0 or args.m < 0:
        raise UsageError("--n and --m must be >= 0")
    index = BlockIndex(args.n, args.m)

    try:
        if args.source == "both":
            closed = spectral.spectral_decomposition(index, p, args.mode,
                                                     spectral.CLOSED_FORM)
            numeric = spectral.spectral_decomposition(index, p, args.mode,
                                                      spectral.NUMERICAL)
            doc_core = _sorted_decomposition_doc(closed)
            matched = spectral.match_eigenvalues(closed.eigenvalues,
                                                 numeric.eigenvalues)
            doc_core["comparison"] = {
                "numerical_eigenvalues": [
                    _complex_doc(v) for v in numeric.eigenvalues],
                "max_eigenvalue_distance": _f(
                    np.abs(matched - closed.eigenvalues).max()),
            }
        else:
            dec = spectral.spectral_decomposition(index, p, args.mode, args.source)
            doc_core = _sorted_decomposition_doc(dec)
    except (spectral.PreconditionViolated, spectral.FallbackRequired) as exc:
        raise UsageError(f"requested source unavailable here: {exc}") from exc

    if p.delta == 0.0 and p.g == 1.0 and index.n >= 1 and index.m >= 1:
        report = spectral.trace_consistency_report(index, p)
        trace_doc = {name: {"eigenvalue_sum": _complex_doc(r["eigenvalue_sum"]),
                            "matrix_trace": _complex_doc(r["matrix_trace"]),
                            "mismatch": _f(r["mismatch"])}
                     for name, r in report.items()}
    else:
        trace_doc = None

    doc = {"command": "spectrum", "n": index.n, "m": index.m,
           "params": _params_doc(p), "mode": args.mode, **doc_core,
           "trace_consistency": trace_doc}
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


def _series_or_fail(result) -> TimeSeries:
    for state in result:
        if abs(state.trace() - 1.0) > TRACE_TOL:
            raise ArithmeticError(
                f"trajectory lost trace normalization: {state.trace()}")
        if state.hermiticity_defect() > HERM_TOL:
            raise ArithmeticError("trajectory lost hermiticity")
    return TimeSeries.from_evolution(result)


def cmd_evolve(args) -> int:
    p = _params_from(args)
    rho0 = parse_initial(args.initial)
    if args.t_max <= 0 or args.dt <= 0:
        raise UsageError("--t-max and --dt must be positive")
    times = time_grid(args.t_max, args.dt)
    try:
        result = evolve(rho0, p, times, method=args.method, mode=args.mode,
                        n_max=args.n_max)
        series = _series_or_fail(result)
    except MethodUnavailable as exc:
        raise UsageError(str(exc)) from exc

    buf = io.StringIO()
    series.write_csv(buf)
    _emit(buf.getvalue(), args.output)
    return 0


def _figure_runs(alpha):
    yield ("figure1", "dressed", initial_dressed(PRESET_EXCITATION),
           DRESSED_PRESETS, None)
    yield ("figure2", "superposition",
           initial_superposition(PRESET_EXCITATION, alpha),
           SUPERPOSITION_PRESETS, alpha)


def cmd_figures(args) -> int:
    if args.t_max <= 0 or args.dt <= 0:
        raise UsageError("--t-max and --dt must be positive")
    times = time_grid(args.t_max, args.dt)
    os.makedirs(args.outdir, exist_ok=True)

    manifest = {"command": "figures", "mode": PRINTED,
                "t_max": _f(args.t_max), "dt": _f(args.dt)}
    for fig_name, scenario, rho0, presets, alpha in _figure_runs(args.alpha):
        fig_index = fig_name[-1]
        curves = {}
        for curve, (g0, g1) in presets.items():
            p = ModelParams(gamma0=g0, gamma1=g1)
            printed_run = evolve(rho0, p, times, method="spectral", mode=PRINTED)
            series = _series_or_fail(printed_run)
            canonical_run = evolve(rho0, p, times, method="spectral",
                                   mode=CANONICAL)
            twin = TimeSeries.from_evolution(canonical_run)

            filename = f"fig{fig_index}_{curve}.csv"
            buf = io.StringIO()
            series.write_csv(buf)
            _write_atomic(os.path.join(args.outdir, filename), buf.getvalue())
            curves[curve] = {
                "gamma0": _f(g0), "gamma1": _f(g1), "file": filename,
                "max_deviation_from_canonical": {
                    "W": _f(np.abs(series.w - twin.w).max()),
                    "P": _f(np.abs(series.p - twin.p).max()),
                },
            }
        entry = {"scenario": scenario, "excitation": PRESET_EXCITATION,
                 "curves": curves}
        if alpha is not None:
            entry["alpha"] = _f(alpha)
        manifest[fig_name] = entry

    _write_atomic(os.path.join(args.outdir, "manifest.json"),
                  json.dumps(manifest, indent=2) + "\n")
    return 0


def cmd_validate(args) -> int:
    results = validate.run_validation()
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"[{r.status}] {r.name:<{width}}  {r.detail}")
    failed = sum(r.failed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed"
          + (f", {failed} FAILED" if failed else ""))
    return 1 if failed else 0


def _add_param_flags(sub):
    sub.add_argument("--delta", type=float, default=0.0,
                     help="detuning, units of g (default 0)")
    sub.add_argument("--g", type=float, default=1.0,
                     help="coupling strength (default 1)")
    sub.add_argument("--gamma0", type=float, default=0.0,
                     help="rate of the atom-decay/photon-add jump (default 0)")
    sub.add_argument("--gamma1", type=float, default=0.0,
                     help="rate of the photon-remove/atom-excite jump (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exciton",
        description="Excitation-conserving dissipative Jaynes-Cummings dynamics")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="eigensystem of one sector generator")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    _add_param_flags(sp)
    sp.add_argument("--mode", choices=MODES, default=PRINTED)
    sp.add_argument("--source",
                    choices=["auto", spectral.CLOSED_FORM, spectral.NUMERICAL,
                             "both"],
                    default="auto")
    sp.add_argument("--output", default=None, help="write JSON here (default stdout)")
    sp.set_defaults(func=cmd_spectrum)

    ev = sub.add_parser("evolve", help="propagate an initial state, emit CSV")
    ev.add_argument("--initial", required=True,
                    help="dressed:n=2 | superposition:n=2,alpha=0.785 | "
                         "fock:photons=1,atom=0 | file:state.json")
    _add_param_flags(ev)
    ev.add_argument("--method", choices=["spectral", "expm", "ode"],
                    default="spectral")
    ev.add_argument("--mode", choices=MODES, default=CANONICAL)
    ev.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)
    ev.add_argument("--dt", type=float, default=DEFAULT_DT)
    ev.add_argument("--n-max", type=int, default=None,
                    help="photon cutoff for --method ode (default 8)")
    ev.add_argument("--output", default=None, help="write CSV here (default stdout)")
    ev.set_defaults(func=cmd_evolve)

    fg = sub.add_parser("figures",
                        help="emit the demonstration-scenario CSV files")
    fg.add_argument("--outdir", required=True)
    fg.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)
    fg.add_argument("--dt", type=float, default=DEFAULT_DT)
    fg.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                    help="superposition angle for the second scenario")
    fg.set_defaults(func=cmd_figures)

    va = sub.add_parser("validate", help="run the invariant suite")
    va.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (spectral.DegenerateBlock, linalg.ExpmOverflow, linalg.SingularMatrix,
            oracle.StepTooLarge, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
