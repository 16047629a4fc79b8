"""Command-line entry point.

Data goes to standard output; progress and diagnostics go to standard error.

Exit codes:
    0  success (analyze: at least one DFS found; verify: every record passed)
    1  input error (unreadable or invalid model/report, unknown gallery name)
    2  numerical failure (including the propagator's step cap)
    3  analyze found no DFS
    4  verify found a failing record
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import Tolerances, default_tolerances
from .engine import find_all_dfs
from .errors import DfsError, ModelFileError, StepCapExceeded
from .gallery import GALLERY
from .model import evolution_hamiltonian
from .oracle import default_t_final, propagate, verify_dfs_record
from .serialize import dump_model, dump_report, load_model, load_report

log = logging.getLogger("dfsfinder")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NONE, EXIT_FAIL = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _parse_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float, complex):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _parse_assignments(items, what: str) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"{what} must look like key=value, got {item!r}")
        out[key] = _parse_value(value)
    return out


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text)
        log.info("wrote %s", path)


def _load_model(path: str):
    model, file_tols = load_model(_read_text(path))
    return model, file_tols


def _tolerances(file_tols: dict, cli_items) -> Tolerances:
    overrides = dict(file_tols)
    overrides.update(_parse_assignments(cli_items, "--tol"))
    try:
        return Tolerances.from_mapping(overrides, default_tolerances())
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"tolerances: {exc}") from None


def _fmt_c(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


def format_table(report) -> str:
    lines = [f"model: {report.model_label or '(unlabelled)'}"]
    lines.append(f"tuples examined: {report.tuples_examined}   DFS found: {len(report.records)}")
    if report.records:
        lines.append(f"{'#':>3}  {'dim':>4}  {'class':<10}  {'g':>12}  {'witness':>10}  eigenvalues")
        for k, rec in enumerate(report.records):
            g = "-" if rec.gamma_eigenvalue is None else _fmt_c(rec.gamma_eigenvalue)
            cs = ", ".join(_fmt_c(c) for c in rec.eigenvalues) or "(none)"
            lines.append(
                f"{k:>3}  {rec.dim:>4}  {rec.classification:<10}  {g:>12}  {rec.witness:>10.3e}  ({cs})"
            )
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


# --- subcommands --------------------------------------------------------------


def cmd_analyze(args) -> int:
    model, file_tols = _load_model(args.model)
    tol = _tolerances(file_tols, args.tol)
    report = find_all_dfs(model, tol, workers=args.workers)
    for d in report.diagnostics:
        log.debug("diagnostic: %s", d)
    if args.out:
        _write_text(args.out, dump_report(report, model.dim))
    if args.json:
        _write_text(None, dump_report(report, model.dim))
    else:
        sys.stdout.write(format_table(report))
    return EXIT_OK if report.records else EXIT_NONE


def cmd_verify(args) -> int:
    model, _ = _load_model(args.model)
    report, dim, _ = load_report(_read_text(args.report))
    if dim != model.dim:
        raise InputError(f"report dimension {dim} does not match model dimension {model.dim}")
    if report.model_label != model.label:
        raise InputError(f"report is for model {report.model_label!r}, not {model.label!r}")
    t_final = args.t_final if args.t_final is not None else default_t_final(model)
    all_ok = True
    summary = []
    for k, rec in enumerate(report.records):
        res = verify_dfs_record(model, rec, trials=args.trials, t_final=t_final, seed=args.seed + k)
        all_ok &= res.passed
        summary.append(
            {
                "record": k,
                "passed": res.passed,
                "max_purity_drift": res.max_purity_drift,
                "min_unitary_fidelity": res.min_unitary_fidelity,
            }
        )
        status = "PASS" if res.passed else "FAIL"
        sys.stdout.write(
            f"record {k} ({rec.classification}, dim {rec.dim}): {status}  "
            f"max purity drift {res.max_purity_drift:.3e}  "
            f"min fidelity {res.min_unitary_fidelity:.12f}\n"
        )
    if not report.records:
        sys.stdout.write("report contains no records\n")
    if args.out:
        doc = {"model_label": model.label, "trials": args.trials, "t_final": t_final,
               "seed": args.seed, "passed": bool(all_ok), "records": summary}
        _write_text(args.out, json.dumps(doc, indent=1))
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_gallery(args) -> int:
    if args.action == "list":
        for name, entry in GALLERY.items():
            params = ", ".join(f"{k}={v!r}" for k, v in entry.params.items())
            sys.stdout.write(f"{name}({params})\n")
        return EXIT_OK
    if args.name is None:
        raise InputError("gallery emit needs a model name")
    if args.name not in GALLERY:
        raise InputError(f"unknown gallery model {args.name!r}; try 'dfsfinder gallery list'")
    params = _parse_assignments(args.param, "--param")
    try:
        model = GALLERY[args.name].build(**params)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    except (TypeError, ValueError, DfsError) as exc:
        raise InputError(f"{args.name}: {exc}") from None
    _write_text(args.out, dump_model(model))
    return EXIT_OK


def _initial_state(model, spec: str, tol):
    """Return ``(rho0, reference_hamiltonian)`` for a ``--state`` argument."""
    if spec.startswith("dfs:"):
        try:
            idx = int(spec[4:])
        except ValueError:
            raise InputError(f"bad DFS index in {spec!r}") from None
        report = find_all_dfs(model, tol)
        if not 0 <= idx < len(report.records):
            raise InputError(f"model has {len(report.records)} DFS record(s); index {idx} is out of range")
        rec = report.records[idx]
        psi = rec.subspace.vectors()[0]
        h_ref = evolution_hamiltonian(model, rec.eigenvalues) if model.n_jumps else model.h_eff
        return np.outer(psi, psi.conj()), h_ref
    if spec.startswith("basis:"):
        try:
            idx = int(spec[6:])
        except ValueError:
            raise InputError(f"bad basis index in {spec!r}") from None
        if not 0 <= idx < model.dim:
            raise InputError(f"basis index {idx} out of range for dimension {model.dim}")
        rho = np.zeros((model.dim, model.dim), dtype=complex)
        rho[idx, idx] = 1.0
        return rho, None
    try:
        doc = json.loads(_read_text(spec))
    except json.JSONDecodeError as exc:
        raise InputError(f"{spec}: {exc.msg}") from None
    raw = doc.get("state") if isinstance(doc, dict) else doc
    try:
        arr = np.array([complex(*p) if isinstance(p, list) else complex(p) for p in raw], dtype=complex)
    except (TypeError, ValueError):
        raise InputError(f"{spec}: 'state' must be a list of [re, im] pairs") from None
    n = model.dim
    if arr.size == n:
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > 1e-8:
            raise InputError(f"{spec}: state vector has norm {norm:.6g}, expected 1")
        return np.outer(arr, arr.conj()), None
    if arr.size == n * n:
        return arr.reshape(n, n), None
    raise InputError(f"{spec}: expected {n} or {n * n} entries, got {arr.size}")


def cmd_propagate(args) -> int:
    model, file_tols = _load_model(args.model)
    tol = _tolerances(file_tols, args.tol)
    rho0, h_ref = _initial_state(model, args.state, tol)
    res = propagate(model, rho0, t_final=args.t_final, steps=args.steps, reference_hamiltonian=h_ref)
    log.info("integrated with %d RK4 steps", res.steps)
    rows = ["time\tpurity\tfidelity"]
    rows += [f"{t:.10g}\t{p:.15g}\t{f:.15g}" for t, p, f in zip(res.times, res.purities, res.fidelity_to_unitary)]
    _write_text(args.out, "\n".join(rows) + "\n")
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def _error(message: str) -> None:
    print(f"dfsfinder: error: {message}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfsfinder", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="enumerate and classify every DFS of a model")
    p.add_argument("model", help="model file (JSON)")
    p.add_argument("--out", help="write the report file here")
    p.add_argument("--json", action="store_true", help="print the report instead of the table")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance")
    p.add_argument("--workers", type=int, default=1, help="analyze eigenvalue tuples in parallel")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="check a report by direct propagation")
    p.add_argument("model")
    p.add_argument("report")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--t-final", type=float, default=None, help="default: 10 / largest rate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write a JSON verification summary here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gallery", help="list or emit built-in models")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("name", nargs="?")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("propagate", help="integrate the master equation and report purity")
    p.add_argument("model")
    p.add_argument("--state", required=True, help="dfs:K, basis:I, or a JSON state file")
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--steps", type=int, default=64, help="minimum RK4 step count")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", help="output table (default stdout)")
    p.set_defaults(func=cmd_propagate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ModelFileError, InputError) as exc:
        _error(str(exc))
        return EXIT_INPUT
    except StepCapExceeded as exc:
        _error(f"step cap exceeded: {exc}")
        return EXIT_NUMERIC
    except (DfsError, np.linalg.LinAlgError, FloatingPointError) as exc:
        _error(f"numerical failure: {exc}")
        return EXIT_NUMERIC

if __name__ == "__main__":
    sys.exit(main())
