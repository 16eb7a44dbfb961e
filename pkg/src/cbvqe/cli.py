"""Command-line front end: ``cbvqe analyze | validate | sweep``.

Exit codes: 0 success, 1 input error (unreadable or malformed file, qubit
cap exceeded), 2 numerical failure (degenerate ground state, ill-conditioned
subspace) or a failed validation check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

from .analysis import CSV_COLUMNS, DEFAULT_EPSILON, AnalysisReport, analyze
from .errors import CBVQEError, DimensionError, HamiltonianParseError, NumericalError
from .pauli import PauliSum, load_hamiltonian, parse_bitstring
from .statevec import max_qubits

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

VALIDATE_MAX_QUBITS = 12
SWEEP_COLUMNS = ("label", "n_qubits", "alpha", "speedup", "asymptotic_ratio")


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str) -> PauliSum:
    try:
        H = load_hamiltonian(path)
    except OSError as exc:
        raise _Failure(EXIT_INPUT, f"{path}: cannot read ({exc.strerror or exc})") from exc
    except HamiltonianParseError as exc:
        raise _Failure(EXIT_INPUT, f"{path}: {exc}") from exc
    cap = max_qubits()
    if H.n_qubits > cap:
        raise _Failure(EXIT_INPUT, f"{path}: {H.n_qubits} qubits exceeds the cap of {cap}")
    return H


def _guarded(fn: Callable, path: str):
    try:
        return fn()
    except _Failure:
        raise
    except (DimensionError, HamiltonianParseError) as exc:
        raise _Failure(EXIT_INPUT, f"{path}: {exc}") from exc
    except NumericalError as exc:
        raise _Failure(EXIT_NUMERICAL, f"{path}: {exc}") from exc
    except CBVQEError as exc:
        raise _Failure(EXIT_INPUT, f"{path}: {exc}") from exc


def _run_all(paths: Sequence[str], work: Callable[[str], object], jobs: int) -> list:
    """Apply ``work`` to every path; results (or _Failure) come back in input order."""

    def safe(path):
        try:
            return work(path)
        except _Failure as exc:
            return exc

    if jobs <= 1 or len(paths) <= 1:
        return [safe(p) for p in paths]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(safe, paths))


def _exit_code(failures: list[_Failure]) -> int:
    if not failures:
        return EXIT_OK
    return EXIT_INPUT if any(f.code == EXIT_INPUT for f in failures) else EXIT_NUMERICAL


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def _csv_text(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def format_table(reports: list[AnalysisReport]) -> str:
    head = (
        f"{'label':<18}{'qubits':>7}{'alpha':>10}{'E_exact':>16}"
        f"{'M_vqe':>14}{'M_hfvqe':>14}{'speedup':>11}{'asym':>11}{'ratio':>9}  status"
    )
    lines = [head]
    for r in reports:
        lines.append(
            f"{r.label:<18}{r.n_qubits:>7d}{r.alpha:>10.5f}{r.E_exact:>16.10f}"
            f"{r.M_vqe:>14.3e}{r.M_hfvqe:>14.3e}{r.speedup:>11.2f}{r.asymptotic_speedup:>11.2f}"
            f"{r.asymptotic_ratio:>9.4f}  {r.status}"
        )
    return "\n".join(lines) + "\n"


def _default_jobs(n_files: int) -> int:
    return max(1, min(n_files, os.cpu_count() or 1))


def _analyze_paths(args) -> tuple[list[AnalysisReport], list[_Failure]]:
    hf_state = None
    if args.hf_state is not None:
        try:
            hf_state = parse_bitstring(args.hf_state)
        except ValueError as exc:
            raise _Failure(EXIT_INPUT, f"--hf-state: {exc}") from exc

    def work(path):
        H = _load(path)
        if hf_state is not None and hf_state >= 1 << H.n_qubits:
            raise _Failure(EXIT_INPUT, f"{path}: --hf-state has more qubits than the Hamiltonian")
        return _guarded(lambda: analyze(H, args.epsilon, hf_state), path)

    jobs = args.jobs or _default_jobs(len(args.files))
    results = _run_all(args.files, work, jobs)
    reports = [r for r in results if isinstance(r, AnalysisReport)]
    failures = [r for r in results if isinstance(r, _Failure)]
    return reports, failures


def _report_failures(failures: list[_Failure]) -> None:
    for f in failures:
        print(f"error: {f}", file=sys.stderr)


def cmd_analyze(args) -> int:
    reports, failures = _analyze_paths(args)
    _report_failures(failures)
    if reports:
        sys.stdout.write(format_table(reports))
    rows = [r.as_dict() for r in reports]
    if args.csv:
        _write(args.csv, _csv_text(rows, CSV_COLUMNS))
    if args.json:
        doc = [{k: _json_safe(v) for k, v in row.items()} for row in rows]
        _write(args.json, json.dumps(doc, indent=2) + "\n")
    return _exit_code(failures)


def cmd_sweep(args) -> int:
    args.hf_state = None
    reports, failures = _analyze_paths(args)
    _report_failures(failures)
    rows = sorted((r.as_dict() for r in reports), key=lambda row: row["n_qubits"])
    text = _csv_text(rows, SWEEP_COLUMNS)
    _write(args.csv or "-", text)
    return _exit_code(failures)


def cmd_validate(args) -> int:
    from .validation import validate

    try:
        H = _load(args.file)
        if H.n_qubits > VALIDATE_MAX_QUBITS:
            raise _Failure(
                EXIT_INPUT, f"{args.file}: validate is limited to {VALIDATE_MAX_QUBITS} qubits"
            )
        if args.shots < 1 or args.replicas < 1:
            raise _Failure(EXIT_INPUT, "--shots and --replicas must be positive")
        try:
            hf_state = parse_bitstring(args.hf_state) if args.hf_state else None
        except ValueError as exc:
            raise _Failure(EXIT_INPUT, f"--hf-state: {exc}") from exc
        if hf_state is not None and hf_state >= 1 << H.n_qubits:
            raise _Failure(EXIT_INPUT, f"{args.file}: --hf-state has more qubits than the Hamiltonian")
        summary = _guarded(
            lambda: validate(H, args.shots, args.replicas, args.seed, hf_state, sampling=args.sampling),
            args.file,
        )
    except _Failure as exc:
        _report_failures([exc])
        return exc.code
    sys.stdout.write(summary.format())
    return EXIT_NUMERICAL if summary.all_passed is False else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbvqe",
        description="Measurement-cost analysis for single-determinant boosted VQE.",
        epilog="The qubit cap is read from the CBVQE_MAX_QUBITS environment variable.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compare HF-VQE and VQE shot counts")
    a.add_argument("files", nargs="+", metavar="FILE")
    a.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="target precision in Hartree")
    a.add_argument("--hf-state", metavar="BITSTRING", help="boosting determinant, highest qubit first")
    a.add_argument("--csv", metavar="PATH", help="write CSV ('-' for stdout)")
    a.add_argument("--json", metavar="PATH", help="write JSON ('-' for stdout)")
    a.add_argument("--jobs", type=int, default=0, help="worker threads (default: one per file, up to CPU count)")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("validate", help="Monte Carlo check of the variance model")
    v.add_argument("file", metavar="FILE")
    v.add_argument("--shots", type=int, default=100_000)
    v.add_argument("--replicas", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--hf-state", metavar="BITSTRING")
    v.add_argument(
        "--sampling", choices=("independent", "joint"), default="independent",
        help="draw Pauli terms independently or as shared bitstrings per group",
    )
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sweep", help="CSV of speedup data ordered by qubit count")
    s.add_argument("files", nargs="+", metavar="FILE")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--csv", metavar="PATH", help="output path (default stdout)")
    s.add_argument("--jobs", type=int, default=0)
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "epsilon", 1.0) <= 0:
        parser.error("--epsilon must be positive")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
