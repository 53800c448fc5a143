"""Command-line front end.

Subcommands::

    ddgate sweep (--config FILE | --preset NAME) [--out FILE] [--seed N] [--format csv|json]
    ddgate verify-schedule FILE
    ddgate emit-schedule --sequence NAME --gate-duration-ns T [...]
    ddgate circuit --order {1,2} --m M [--crosstalk] [--shots N] [...]
    ddgate presets list | show NAME

Failures print a JSON object ``{"error": ..., "message": ...}`` on stderr
and exit with status 2. The number of sweep worker threads comes from the
``DDGATE_THREADS`` environment variable.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

from . import __version__, presets
from .circuits import (DEFAULT_SHOTS, NoiseModel, build_bare_stack, build_first_order_circuit,
                       build_second_order_circuit, verify_circuit_identity, simulate_noisy)
from .config import NS, ResolvedSweep, load, resolve
from .engine import sweep as run_sweep
from .engineering import TargetGate, engineer
from .errors import DDGateError
from .qasm import export_circuit
from .schedules import build_schedule
from .textio import plan_to_text, schedule_to_text, verify_text

# the "axis" column holds the swept value in SI units; the axis name is in the header
CSV_COLUMNS = ("axis", "sequence", "fidelity", "wall_duration_s", "status")


class CommandError(Exception):
    pass


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _provenance(resolved: ResolvedSweep) -> dict:
    return {
        "tool": "ddgate",
        "version": __version__,
        "config_sha256": resolved.hash,
        "seed": resolved.seed,
        "name": resolved.name,
        "axis": resolved.sweep.axis,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def render_rows(rows, provenance: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"provenance": provenance,
               "rows": [{"axis": r.axis, "value": r.value, "sequence": r.sequence,
                         "fidelity": None if math.isnan(r.fidelity) else r.fidelity,
                         "wall_duration_s": None if math.isnan(r.wall_duration) else r.wall_duration,
                         "status": r.status, "message": r.message} for r in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for key, value in provenance.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([repr(r.value), r.sequence, repr(r.fidelity),
                         repr(r.wall_duration), r.status])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if bool(args.config) == bool(args.preset):
        raise CommandError("give exactly one of --config or --preset")
    resolved = load(args.config, args.seed) if args.config else resolve(presets.get(args.preset), args.seed)
    rows = run_sweep(resolved.sweep)
    _write(render_rows(rows, _provenance(resolved), args.format), args.out)
    return 0


def cmd_verify_schedule(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    checks = verify_text(text)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print("overall:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_emit_schedule(args) -> int:
    tau = args.gate_duration_ns * NS / 4
    pulse = {}
    if args.pulse_width_ns:
        pulse = {"pulse_width": args.pulse_width_ns * NS, "placement": args.placement}
    sched = build_schedule(args.sequence, tau, args.qubits, **pulse)
    if args.target == "none":
        text = schedule_to_text(sched)
    else:
        if args.target == "xy":
            target = TargetGate.rotation(args.theta_rad, args.phi_rad)
        else:
            target = TargetGate.cross_resonance(args.theta_rad)
        text = plan_to_text(engineer(target, sched))
    _write(text, args.out)
    return 0


def cmd_circuit(args) -> int:
    if args.order == 1:
        if args.crosstalk:
            raise CommandError("crosstalk qubits are defined for the second-order circuit only")
        c = build_first_order_circuit(args.m)
    else:
        c = build_second_order_circuit(args.m, args.crosstalk)
    distance = verify_circuit_identity(c)
    text = export_circuit(c, measure=args.measure)
    report = {"circuit": c.name, "qubits": c.qubit_count, "two_qubit_gates": c.two_qubit_count,
              "identity_distance": distance, "identity_ok": distance <= 1e-12}
    if args.shots:
        noise = NoiseModel(args.p2q, args.p1q, args.readout, coherent_zx=args.coherent_zx)
        protected = simulate_noisy(c, noise, args.shots, args.seed)
        bare = simulate_noisy(build_bare_stack(c.two_qubit_count, args.crosstalk), noise,
                              args.shots, args.seed + 1)
        report["noisy"] = {
            "shots": args.shots, "seed": args.seed,
            "protected": {"counts": protected.counts, "fidelity": protected.amplitude_fidelity,
                          "probability_fidelity": protected.probability_fidelity,
                          "standard_error": protected.amplitude_error},
            "bare": {"counts": bare.counts, "fidelity": bare.amplitude_fidelity,
                     "probability_fidelity": bare.probability_fidelity,
                     "standard_error": bare.amplitude_error},
        }
    if args.out:
        _write(text, args.out)
    if args.format == "json":
        if not args.out:
            report["qasm"] = text
        print(json.dumps(report, indent=2))
    else:
        if not args.out:
            sys.stdout.write(text)
        print(f"// identity distance {distance:.3e} ({'ok' if report['identity_ok'] else 'FAILED'})")
        if "noisy" in report:
            n = report["noisy"]
            print(f"// fidelity protected {n['protected']['fidelity']:.5f} +- "
                  f"{n['protected']['standard_error']:.5f}, bare {n['bare']['fidelity']:.5f} +- "
                  f"{n['bare']['standard_error']:.5f}")
    return 0 if report["identity_ok"] else 1


def cmd_presets(args) -> int:
    if args.action == "list":
        for name in sorted(presets.PRESETS):
            print(f"{name}\t{presets.DESCRIPTIONS[name]}")
    else:
        if not args.name:
            raise CommandError("presets show needs a name")
        print(json.dumps(presets.get(args.name), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ddgate", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"ddgate {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="run a fidelity sweep")
    s.add_argument("--config", help="JSON sweep config file")
    s.add_argument("--preset", help="built-in preset name (see `presets list`)")
    s.add_argument("--out", help="output file (default: stdout)")
    s.add_argument("--seed", type=int, help="override the config seed")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify-schedule", help="check a schedule or plan text file")
    v.add_argument("file", help="schedule or plan text file")
    v.set_defaults(func=cmd_verify_schedule)

    e = sub.add_parser("emit-schedule", help="write a schedule (and engineered plan)")
    e.add_argument("--sequence", required=True,
                   help="none, pdd, cdd<L>, udd<n> (even n), or pdd+x / cdd2+x for two qubits")
    e.add_argument("--gate-duration-ns", type=float, required=True)
    e.add_argument("--qubits", type=int, choices=(1, 2), default=1)
    e.add_argument("--pulse-width-ns", type=float, default=0.0, help="0 means instantaneous pulses")
    e.add_argument("--placement", choices=("insert", "truncate"), default="insert")
    e.add_argument("--target", choices=("none", "xy", "cr"), default="none")
    e.add_argument("--theta-rad", type=float, default=math.pi)
    e.add_argument("--phi-rad", type=float, default=0.0)
    e.add_argument("--out", help="output file (default: stdout)")
    e.set_defaults(func=cmd_emit_schedule)

    c = sub.add_parser("circuit", help="build, verify and export a protected CNOT stack")
    c.add_argument("--order", type=int, choices=(1, 2), required=True)
    c.add_argument("--m", type=int, required=True, help="CNOTs per pulse interval")
    c.add_argument("--crosstalk", action="store_true", help="add two spectator qubits with CZ crosstalk (order 2)")
    c.add_argument("--measure", action="store_true", help="append measurements to the exported text")
    c.add_argument("--out", help="output file (default: stdout)")
    c.add_argument("--shots", type=int, nargs="?", const=DEFAULT_SHOTS, default=0,
                   help=f"run the noisy simulation (bare flag: {DEFAULT_SHOTS} shots)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--p2q", type=float, default=NoiseModel.two_qubit_depolarizing)
    c.add_argument("--p1q", type=float, default=NoiseModel.one_qubit_depolarizing)
    c.add_argument("--readout", type=float, default=NoiseModel.readout_flip)
    c.add_argument("--coherent-zx", type=float, default=0.0, help="ZX over-rotation angle per CNOT (rad)")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_circuit)

    pr = sub.add_parser("presets", help="list or show built-in sweep presets")
    pr.add_argument("action", choices=("list", "show"))
    pr.add_argument("name", nargs="?")
    pr.set_defaults(func=cmd_presets)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DDGateError, CommandError, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
