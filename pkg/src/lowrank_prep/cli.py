"""Command-line front end.

Exit codes: 0 success, 2 input/IO error, 3 invalid argument.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import baa
from .circuit import simulate
from .errors import InvalidInput, ParseError
from .linalg import Bipartition, random_state
from .measures import fidelity, measure_report
from .qasm import emit_qasm, parse_qasm
from .sampling import mae, simulate_noisy
from .synthesis import LrspConfig, lrsp, sweep_rows

log = logging.getLogger("lowrank_prep")

EXIT_OK, EXIT_INPUT, EXIT_ARG = 0, 2, 3
SCHEMA = "v1"
CSV_FIELDS = ["m", "cnots", "depth", "predicted_loss", "model_estimate"]


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def load_state_file(path: str | Path) -> tuple[np.ndarray, str]:
    """Read ``{"n": int, "amplitudes": [[re, im], ...]}``; returns the state and a sha256 digest."""
    try:
        raw = Path(path).read_bytes()
        obj = json.loads(raw)
        n = int(obj["n"])
        amps = np.array([complex(re, im) for re, im in obj["amplitudes"]])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INPUT, f"cannot read state file {path}: {exc}") from exc
    if n < 1 or amps.size != 2**n:
        raise CliError(EXIT_INPUT, f"state file declares n={n} but holds {amps.size} amplitudes")
    norm = float(np.linalg.norm(amps))
    dev = abs(norm**2 - 1.0)
    if dev > 1e-3 or not np.isfinite(norm):
        raise CliError(EXIT_INPUT, f"state is not normalized (|psi|^2 = {norm**2:.6g})")
    if dev > 1e-6:
        log.warning("state norm^2 off by %.3g; renormalizing", dev)
    return amps / norm, hashlib.sha256(raw).hexdigest()


def dump_state_file(psi, path: str | Path) -> None:
    psi = np.asarray(psi, dtype=complex)
    obj = {"n": int(psi.size).bit_length() - 1, "amplitudes": [[z.real, z.imag] for z in psi]}
    Path(path).write_text(json.dumps(obj))


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot write {path}: {exc}") from exc


def _report(command: str, digest: str | None, payload: dict, seed=None, started=None) -> dict:
    out = {"schema": SCHEMA, "command": command, "input_sha256": digest, "seed": seed}
    out.update(payload)
    if started is not None:
        out["elapsed_s"] = round(time.perf_counter() - started, 6)
    return out


def cmd_measure(args) -> dict:
    psi, digest = load_state_file(args.statefile)
    n = int(psi.size).bit_length() - 1
    bp = None
    if args.subset_a:
        try:
            bp = Bipartition.from_subset(n, [int(x) for x in args.subset_a.split(",")])
        except (ValueError, InvalidInput) as exc:
            raise CliError(EXIT_ARG, f"bad --subset-a: {exc}") from exc
    if n < 2:
        raise CliError(EXIT_INPUT, "measures need at least two qubits")
    rep = measure_report(psi, bp)
    return _report("measure", digest, rep.to_dict())


def cmd_synth(args) -> dict:
    started = time.perf_counter()
    if args.rank is not None and args.rank < 1:
        raise CliError(EXIT_ARG, f"--rank must be >= 1, got {args.rank}")
    psi, digest = load_state_file(args.statefile)
    circuit, rep = lrsp(psi, LrspConfig(r=args.rank))
    _write(args.out, emit_qasm(circuit))
    report = _report("synth", digest, {"synthesis": rep.to_dict()}, started=started)
    _write(args.report, json.dumps(report, indent=2))
    return report


def cmd_baa(args) -> dict:
    started = time.perf_counter()
    if not 0.0 <= args.max_loss <= 1.0:
        raise CliError(EXIT_ARG, f"--max-loss must lie in [0, 1], got {args.max_loss}")
    psi, digest = load_state_file(args.statefile)
    plan = baa.baa_search(psi, args.max_loss, baa.CostFn(args.cost))
    circuit = baa.synth_plan(plan)
    _write(args.out, emit_qasm(circuit))
    payload = {"plan": plan.to_json(), "cnots": circuit.cnot_count(), "depth": circuit.depth()}
    report = _report("baa", digest, payload, started=started)
    _write(args.plan, json.dumps(report, indent=2))
    return report


def cmd_simulate(args) -> dict:
    started = time.perf_counter()
    if args.shots < 1:
        raise CliError(EXIT_ARG, f"--shots must be >= 1, got {args.shots}")
    if not 0.0 <= args.noise_cnot <= 1.0:
        raise CliError(EXIT_ARG, f"--noise-cnot must lie in [0, 1], got {args.noise_cnot}")
    try:
        text = Path(args.qasmfile).read_text()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {args.qasmfile}: {exc}") from exc
    try:
        circuit = parse_qasm(text)
    except ParseError as exc:
        raise CliError(EXIT_INPUT, f"{args.qasmfile}: {exc}") from exc
    counts = simulate_noisy(circuit, args.noise_cnot, args.shots, args.seed)
    payload = {"histogram": counts.to_json(), "noise_cnot": args.noise_cnot}
    digest = hashlib.sha256(text.encode()).hexdigest()
    if args.target:
        target, _ = load_state_file(args.target)
        if target.size != 2**circuit.width:
            raise CliError(EXIT_INPUT, "target state does not match the circuit width")
        payload["mae"] = mae(counts, target)
        if args.noise_cnot == 0.0:
            payload["fidelity"] = fidelity(simulate(circuit), target)
    report = _report("simulate", digest, payload, seed=args.seed, started=started)
    _write(args.out, json.dumps(report, indent=2))
    return report


def cmd_sweep(args) -> dict:
    if args.random is not None:
        n, seed = args.random
        if n < 2:
            raise CliError(EXIT_ARG, "--random needs n >= 2")
        psi, digest = random_state(n, seed), None
    elif args.statefile:
        psi, digest = load_state_file(args.statefile)
        seed = None
    else:
        raise CliError(EXIT_ARG, "give a state file or --random N SEED")
    if psi.size < 4:
        raise CliError(EXIT_INPUT, "sweep needs at least two qubits")
    rows = sweep_rows(psi)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
                writer.writeheader()
                writer.writerows(rows)
        except OSError as exc:
            raise CliError(EXIT_INPUT, f"cannot write {args.out}: {exc}") from exc
    return _report("sweep", digest, {"rows": rows}, seed=seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lowrank-prep", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("measure", help="entanglement measures of a state")
    s.add_argument("statefile")
    s.add_argument("--subset-a", help="comma-separated qubits on side A (default: first n//2)")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("synth", help="low-rank state preparation")
    s.add_argument("statefile")
    s.add_argument("--rank", type=int, help="maximum Schmidt rank kept")
    s.add_argument("--out", help="QASM output path")
    s.add_argument("--report", help="JSON report path")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("baa", help="bounded-loss product approximation")
    s.add_argument("statefile")
    s.add_argument("--max-loss", type=float, required=True)
    s.add_argument("--cost", choices=[c.value for c in baa.CostFn], default="model")
    s.add_argument("--out", help="QASM output path")
    s.add_argument("--plan", help="JSON plan output path")
    s.set_defaults(func=cmd_baa)

    s = sub.add_parser("simulate", help="sample a QASM circuit")
    s.add_argument("qasmfile")
    s.add_argument("--shots", type=int, default=8192)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise-cnot", type=float, default=0.0)
    s.add_argument("--target", help="state file to compare against")
    s.add_argument("--out", help="JSON output path")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="synthesis cost for every m")
    s.add_argument("statefile", nargs="?")
    s.add_argument("--random", nargs=2, type=int, metavar=("N", "SEED"))
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        report = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
