"""Command-line front end.

Exit codes: 0 ok, 1 verify mismatch, 2 bad device or arguments, 3 parse or
compile error, 4 resource cap exceeded, 5 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import random
import sys
import time
from pathlib import Path

import numpy as np

from .blockade import basis_index, check_size, product_state
from .device import FIXTURE_DIR, Device, build_conveyor, build_ladder, validate
from .errors import CompileError, ParseError, ResourceLimitError
from .exact import MAX_EXACT_SITES, ToleranceError, blockade_error_sweep
from .rotor import Rotation
from .synth import verify_sequence

EXIT_OK, EXIT_MISMATCH, EXIT_BAD_ARGS, EXIT_COMPILE, EXIT_RESOURCE, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5
FIDELITY_THRESHOLD = 1 - 1e-6

log = logging.getLogger("zzpulse")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _resolve(path: str) -> Path:
    """A file path, or the name of a bundled fixture."""
    p = Path(path)
    if p.exists():
        return p
    for cand in (FIXTURE_DIR / path, FIXTURE_DIR / f"{path}.json", FIXTURE_DIR / f"{path}.gqc"):
        if cand.exists():
            return cand
    raise CliError(f"no such file or fixture: {path}", EXIT_BAD_ARGS)


def _read(path: str) -> tuple[str, str]:
    p = _resolve(path)
    data = p.read_bytes()
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def _load_device(path: str) -> tuple[Device, str]:
    text, digest = _read(path)
    try:
        d = Device.from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"invalid device file {path}: {exc}", EXIT_BAD_ARGS) from None
    report = validate(d)
    if not report.ok:
        raise CliError(f"device {path} fails validation: {'; '.join(report.violations)}", EXIT_BAD_ARGS)
    return d, digest


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_build(args) -> int:
    try:
        d = build_conveyor(args.n, args.zeta) if args.arch == "conveyor" else build_ladder(args.n, args.zeta)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_BAD_ARGS) from None
    _emit(d.to_json() + "\n", args.out)
    log.info("built %s n=%d with %d sites", args.arch, args.n, d.num_sites)
    return EXIT_OK


def _schedule_csv(sched) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["species", "theta", "phi"])
    for step in sched.to_dict()["steps"]:
        w.writerow([step["species"], repr(step["theta"]), repr(step["phi"])])
    return buf.getvalue()


def _ancilla_ground_probability(d: Device, psi: np.ndarray, placement) -> float:
    """Weight of the final state on basis states whose non-register sites match the background."""
    m = d.num_sites
    register = set(placement.sites)
    others = [k for k in range(m) if k not in register]
    want = basis_index(m, placement.background)
    mask = sum(1 << k for k in others)
    idx = np.arange(1 << m)
    ok = (idx & mask) == (want & mask)
    return float(np.sum(np.abs(psi[ok]) ** 2))


def cmd_compile(args) -> int:
    from .compiler import compile_circuit, run_schedule
    from .compiler.circuit import parse_circuit

    d, dev_digest = _load_device(args.device)
    text, circ_digest = _read(args.circuit)
    try:
        circuit = parse_circuit(text)
    except ParseError as exc:
        raise CliError(f"parse error at line {exc.line}: {exc}", EXIT_COMPILE) from None
    t0 = time.perf_counter()
    try:
        sched, start, end = compile_circuit(circuit, d)
    except CompileError as exc:
        raise CliError(f"compile error at gate {exc.gate_index}: {exc}", EXIT_COMPILE) from None
    except ResourceLimitError as exc:
        raise CliError(str(exc), EXIT_COMPILE) from None
    sched.device_ref = dev_digest
    body = sched.to_json() + "\n" if args.format == "json" else _schedule_csv(sched)
    if not args.run:
        _emit(body, args.out)
        return EXIT_OK
    if args.out:
        Path(args.out).write_text(body)

    initial = args.initial
    if initial == "random":
        rng = random.Random(args.seed)
        initial = "".join(rng.choice("01") for _ in range(circuit.n))
    try:
        check_size(d.num_sites)
        result = run_schedule(circuit, d, sched, start, end, initial)
    except ResourceLimitError as exc:
        raise CliError(str(exc), EXIT_RESOURCE) from None
    overlap = complex(np.vdot(result.expected, result.final_state))
    report = {
        "inputs": {"device_sha256": dev_digest, "circuit_sha256": circ_digest, "initial": initial or "0" * circuit.n},
        "device": {
            "architecture": d.architecture,
            "n": d.n,
            "sites": d.num_sites,
            "edges": len(d.edges),
        },
        "schedule_length": len(sched.steps),
        "fidelity": result.fidelity,
        "phase_ledger": {"re": sched.phase.real, "im": sched.phase.imag},
        "phase_consistent": abs(overlap - 1) < 1e-6,
        "ancilla_restored_probability": _ancilla_ground_probability(d, result.final_state, end),
        "final_positions": sched.final_positions,
    }
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - t0
    _emit(_dump(report), args.report)
    return EXIT_OK if result.fidelity >= FIDELITY_THRESHOLD else EXIT_INTERNAL


def _parse_etas(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(f"malformed --etas {text!r}", EXIT_BAD_ARGS) from None


def cmd_sweep(args) -> int:
    from .compiler.schedule import Schedule

    d, _ = _load_device(args.device)
    if d.num_sites > MAX_EXACT_SITES:
        raise CliError(f"exact simulation is limited to {MAX_EXACT_SITES} sites, device has {d.num_sites}", EXIT_RESOURCE)
    sched_text, _ = _read(args.schedule)
    sched = Schedule.from_json(sched_text)
    etas = _parse_etas(args.etas)
    excite = [int(k) for k in args.excite.split(",")] if args.excite else []
    if any(not 0 <= k < d.num_sites for k in excite):
        raise CliError("--excite names a site outside the device", EXIT_BAD_ARGS)
    state = product_state(d.num_sites, excite)
    try:
        rows = blockade_error_sweep(d, sched.steps, etas, args.tol, state=state, sort=False, jobs=args.jobs)
    except ToleranceError as exc:
        raise CliError(str(exc), EXIT_BAD_ARGS) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_BAD_ARGS) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta", "infidelity"])
    for eta, inf in rows:
        w.writerow([repr(eta), repr(inf)])
    _emit(buf.getvalue(), args.out)
    if args.json:
        Path(args.json).write_text(_dump([{"eta": e, "infidelity": v} for e, v in rows]))
    return EXIT_OK


def _load_targets(path: str) -> list[Rotation]:
    text, _ = _read(path)
    try:
        return [Rotation(float(t["theta"]), tuple(t["axis"])) for t in json.loads(text)]
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"invalid targets file {path}: {exc}", EXIT_BAD_ARGS) from None


def cmd_verify(args) -> int:
    from .compiler.schedule import Schedule

    sched = Schedule.from_json(_read(args.schedule)[0])
    targets = _load_targets(args.targets)
    species = {s.species for s in sched.steps}
    if len(species) > 1:
        raise CliError("verify needs a single-species schedule", EXIT_BAD_ARGS)
    try:
        dist = verify_sequence([s.pulse for s in sched.steps], targets)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_BAD_ARGS) from None
    ok = dist <= args.tol
    sys.stdout.write(_dump({"distance": dist, "ok": ok, "subgroups": len(targets), "pulses": len(sched.steps)}))
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zzpulse", description="Global-pulse compiler for ZZ-coupled qubit arrays")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a device graph")
    b.add_argument("--arch", choices=("ladder", "conveyor"), required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--zeta", type=float, default=1.0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("compile", help="compile a circuit, optionally simulate it")
    c.add_argument("--device", required=True)
    c.add_argument("--circuit", required=True)
    c.add_argument("--run", action="store_true")
    c.add_argument("--out", help="schedule output (stdout if omitted and not --run)")
    c.add_argument("--report", help="run report output (stdout if omitted)")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--initial", help="logical input bitstring, or 'random'")
    c.add_argument("--seed", type=int, default=0, help="seed for --initial random")
    c.add_argument("--timing", action="store_true", help="add wall time to the report")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("sweep", help="exact-vs-blockade infidelity over eta")
    s.add_argument("--device", required=True)
    s.add_argument("--schedule", required=True)
    s.add_argument("--etas", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out")
    s.add_argument("--json", help="also write the rows as JSON")
    s.add_argument("--excite", help="comma-separated site ids excited in the input state")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="check a single-species schedule against per-subgroup targets")
    v.add_argument("--schedule", required=True)
    v.add_argument("--targets", required=True, help='JSON list of {"theta": t, "axis": [x, y, z]}')
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except Exception as exc:  # anything unexpected is a broken invariant
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
