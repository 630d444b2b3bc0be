"""
==============================================================================
EXACT AMPM QUANTUM SEARCH - COMMAND LINE FRONT END
==============================================================================

Single entry point for computing schedules, simulating them, sweeping the
success landscape and exporting circuits.

WORKFLOW:
=========

    +-------------------+
    | lambda, l         |
    +-------------------+
            |
            v
    +-------------------+
    | SCHEDULE          |  <-- ampm_schedule.py
    | - l_min, delta    |
    | - phases phi/varphi
    +-------------------+
            |
      +-----+------------------+----------------------+
      |                        |                      |
      v                        v                      v
 +--------------+   +---------------------+   +------------------+
 | RUN          |   | SWEEP / COMPARE     |   | QASM             |
 | statevector_ |   | success_model.py    |   | circuit_builder  |
 | simulator.py |   | - P_L(lambda')      |   | qasm_io.py       |
 | - exact probs|   | - l_min vs l_G      |   | - .qasm file     |
 | - seeded shots   +---------------------+   +------------------+
 +--------------+
            |
            v
    +-------------------+
    | OUTPUT            |  <-- report_writer.py
    | table / json / csv|
    +-------------------+


USAGE:
======
    python main.py schedule --lambda 0.5 --l 2
    python main.py run --n 1 --targets 1 --l 1 --shots 1024 --seed 7
    python main.py sweep --lambda 0.5 --l 2 --grid 101 --format csv
    python main.py compare-iterations --grid 10000 --format csv --out iterations.csv
    python main.py qasm --n 1 --targets 1 --l 1 --out one_qubit.qasm
    python main.py fidelity theory.csv measured.csv

EXIT CODES:
===========
    0  success
    2  validation error (bad lambda, l < l_min, malformed file, ...)
    3  capability bound exceeded (qubit limits, QASM export arity)

==============================================================================
"""

import sys
import logging
import argparse

import numpy as np

# Fix Windows console encoding
if sys.platform == 'win32':
    sys.stdout.reconfigure(encoding='utf-8', errors='replace')
    sys.stderr.reconfigure(encoding='utf-8', errors='replace')

from ampm_config import get_settings
from ampm_errors import CapabilityError, ConfigurationError, ValidationError
from ampm_schedule import PhaseSchedule, build_schedule, l_min
from success_model import (
    Distribution,
    grover_iterations,
    statistical_fidelity,
    success_curve,
    success_probability,
)
from statevector_simulator import (
    SearchInstance,
    run_schedule,
    sample_counts,
    target_probability,
    to_distribution,
)
from circuit_builder import build_full, query_marginal, simulate_gates
from qasm_io import to_qasm
from report_writer import (
    FIDELITY_DECIMALS,
    FORMATS,
    PHASE_DECIMALS,
    RunReport,
    emit,
    fmt_fixed,
    fmt_float,
    load_distribution_values,
    render_csv,
    render_json,
    render_table,
)

logger = logging.getLogger("ampm")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CAPABILITY = 3

SWEEP_RANGE = (0.001, 0.999)
MEASURE_IMMEDIATELY = "lambda = 1: measure immediately"


# =============================================================================
# SHARED
# =============================================================================

def resolve_schedule(lam, l=None):
    """
    Schedule for a design lambda; l defaults to l_min(lambda).

    lambda = 1 gives the empty schedule.
    """
    if lam == 1:
        if l not in (None, 0):
            raise ValidationError("lambda = 1 needs no iterations; omit --l")
        return PhaseSchedule.empty(1.0)

    minimum = l_min(lam)
    if l is None:
        l = minimum
    if l < minimum:
        raise ValidationError(f"l={l} is below l_min={minimum} for lambda={lam}")
    return build_schedule(l, lam)


def parse_targets(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip() != ""]
    except ValueError:
        raise ValidationError(f"targets must be comma-separated integers, got {text!r}") from None


def _bitstring(index, n):
    return format(index, f"0{n}b")


def _schedule_summary(schedule):
    return {
        "l": schedule.l,
        "L": schedule.L,
        "design_lambda": schedule.design_lambda,
        "delta": round(schedule.delta, PHASE_DECIMALS),
        "gamma": round(schedule.gamma, PHASE_DECIMALS),
        "phi": [round(p, PHASE_DECIMALS) for p in schedule.phi],
        "varphi": [round(p, PHASE_DECIMALS) for p in schedule.varphi],
    }


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_schedule(lam, l=None):
    """Schedule parameters: l, delta, phi_j, varphi_j."""
    schedule = resolve_schedule(lam, l)
    payload = {"lambda": lam, "l_min": 0 if lam == 1 else l_min(lam)}
    payload.update(_schedule_summary(schedule))
    if schedule.is_empty:
        payload["note"] = MEASURE_IMMEDIATELY
    return schedule, payload


def render_schedule(schedule, payload, fmt):
    if fmt == "json":
        return render_json(payload)

    if fmt == "csv":
        rows = [
            [schedule.l, fmt_fixed(schedule.delta), j, fmt_fixed(phi), fmt_fixed(varphi)]
            for j, (phi, varphi) in enumerate(zip(schedule.phi, schedule.varphi), 1)
        ]
        return render_csv(["l", "delta", "j", "phi", "varphi"], rows)

    lines = [
        f"l = {schedule.l}   L = {schedule.L}   l_min = {payload['l_min']}",
        f"delta = {fmt_fixed(schedule.delta)}   gamma = {fmt_fixed(schedule.gamma)}",
    ]
    if schedule.is_empty:
        lines.append(MEASURE_IMMEDIATELY)
    else:
        lines.append(f"{'j':>3}  {'phi_j':>10}  {'varphi_j':>10}")
        for j, (phi, varphi) in enumerate(zip(schedule.phi, schedule.varphi), 1):
            lines.append(f"{j:>3}  {fmt_fixed(phi):>10}  {fmt_fixed(varphi):>10}")
    return render_table(f"AMPM SCHEDULE  lambda={payload['lambda']}", lines)


def cmd_run(n, targets, l=None, shots=None, seed=None, design_lambda=None):
    """
    Simulate the schedule on an explicit instance.

    Args:
        n: Query qubits
        targets: Marked basis indices
        l: Iterations (default l_min of the design lambda)
        shots: Optional number of sampled shots
        seed: Sampling seed (default from configuration)
        design_lambda: Build the schedule for this lambda instead of M/N

    Returns:
        RunReport
    """
    instance = SearchInstance(n, tuple(targets))
    design = instance.lam if design_lambda is None else design_lambda
    schedule = resolve_schedule(design, l)

    state = run_schedule(instance, schedule)
    distribution = to_distribution(state)
    report = RunReport(
        n=instance.n,
        targets=list(instance.targets),
        M=instance.M,
        lam=instance.lam,
        schedule=_schedule_summary(schedule),
        p_success=target_probability(state, instance),
        p_predicted=success_probability(schedule, instance.lam),
        distribution=list(distribution.probs),
    )

    if shots is not None:
        seed = get_settings().default_seed if seed is None else seed
        report.shots = shots
        report.seed = seed
        report.counts = sample_counts(distribution, shots, seed)
        report.sampled_fidelity = round(
            statistical_fidelity(distribution, Distribution.from_counts(report.counts)), FIDELITY_DECIMALS
        )

    logger.info("run n=%d M=%d l=%d p_success=%.12g", instance.n, instance.M, schedule.l, report.p_success)
    return report


def render_run(report, fmt):
    if fmt == "json":
        return render_json(report.to_dict())

    sampled = report.counts is not None
    if fmt == "csv":
        header = ["state", "probability"] + (["count"] if sampled else [])
        rows = []
        for index, p in enumerate(report.distribution):
            row = [_bitstring(index, report.n), fmt_float(p)]
            if sampled:
                row.append(report.counts[index])
            rows.append(row)
        return render_csv(header, rows)

    lines = [
        f"n = {report.n}   M = {report.M}   lambda = {report.lam}",
        f"targets = {report.targets}",
        f"l = {report.schedule['l']}   delta = {fmt_fixed(report.schedule['delta'])}",
        f"P(success) simulated = {report.p_success:.12f}",
        f"P(success) analytic  = {report.p_predicted:.12f}",
        "",
        f"{'state':>{max(5, report.n)}}  {'probability':>14}" + ("  count" if sampled else ""),
    ]
    for index, p in enumerate(report.distribution):
        line = f"{_bitstring(index, report.n):>{max(5, report.n)}}  {p:>14.10f}"
        if sampled:
            line += f"  {report.counts[index]:>5}"
        lines.append(line)
    if sampled:
        lines.append(f"shots = {report.shots}   seed = {report.seed}")
        lines.append(f"F(sampled, exact) = {report.sampled_fidelity:.4f}")
    return render_table("AMPM RUN", lines)


def cmd_sweep(lambda_design, l=None, grid=101):
    """P_L over a uniform grid of actual lambda in [0.001, 0.999]."""
    if grid < 2:
        raise ValidationError(f"grid needs at least 2 points, got {grid}")
    schedule = resolve_schedule(lambda_design, l)
    return success_curve(schedule, np.linspace(*SWEEP_RANGE, grid))


def render_sweep(curve, fmt):
    if fmt == "csv":
        return render_csv(
            ["lambda", "p_success"],
            [[fmt_float(lam), fmt_float(p)] for lam, p in curve.samples],
        )
    if fmt == "json":
        return render_json({
            "design_lambda": curve.schedule.design_lambda,
            "l": curve.schedule.l,
            "samples": [{"lambda": lam, "p_success": p} for lam, p in curve.samples],
        })

    lines = [f"{'lambda':>10}  {'p_success':>14}"]
    lines += [f"{lam:>10.6f}  {p:>14.10f}" for lam, p in curve.samples]
    return render_table(
        f"SUCCESS LANDSCAPE  design lambda={curve.schedule.design_lambda}  l={curve.schedule.l}", lines
    )


def cmd_compare_iterations(grid=1000):
    """Rows (lambda, l_min, l_G, diff) over lambda = k/grid, k = 1..grid."""
    if grid < 1:
        raise ValidationError(f"grid needs at least 1 point, got {grid}")
    rows = []
    for k in range(1, grid + 1):
        lam = k / grid
        minimum, grover = l_min(lam), grover_iterations(lam)
        rows.append((lam, minimum, grover, minimum - grover))
    return rows


def render_compare(rows, fmt):
    if fmt == "csv":
        return render_csv(["lambda", "l_min", "l_G", "diff"], [[fmt_float(r[0]), *r[1:]] for r in rows])
    if fmt == "json":
        return render_json({
            "rows": [{"lambda": lam, "l_min": a, "l_G": b, "diff": d} for lam, a, b, d in rows],
        })

    lines = [f"{'lambda':>10}  {'l_min':>6}  {'l_G':>6}  {'diff':>4}"]
    lines += [f"{lam:>10.6f}  {a:>6}  {b:>6}  {d:>4}" for lam, a, b, d in rows]
    return render_table("ITERATIONS: EXACT AMPM vs GROVER", lines)


def cmd_qasm(n, targets, l=None, out_path=None):
    """
    Write the full circuit as OpenQASM 2.0.

    Returns:
        (path, query distribution predicted by gate-level simulation)
    """
    instance = SearchInstance(n, tuple(targets))
    schedule = resolve_schedule(instance.lam, l)
    circuit = build_full(instance, schedule)
    text = to_qasm(circuit)

    path = emit(text, out_path or f"ampm_n{n}_l{schedule.l}.qasm")
    predicted = query_marginal(simulate_gates(circuit, 0), circuit)
    return path, [float(p) for p in predicted]


def render_qasm(path, predicted, n, fmt):
    if fmt == "json":
        return render_json({"qasm_file": str(path), "predicted": predicted})
    if fmt == "csv":
        return render_csv(["state", "probability"],
                          [[_bitstring(i, n), fmt_float(p)] for i, p in enumerate(predicted)])

    lines = [f"file: {path}", f"{'state':>{max(5, n)}}  {'probability':>14}"]
    lines += [f"{_bitstring(i, n):>{max(5, n)}}  {p:>14.10f}" for i, p in enumerate(predicted)]
    return render_table("QASM EXPORT", lines)


def cmd_fidelity(dist_a_path, dist_b_path):
    """Statistical fidelity between two distribution files."""
    first = Distribution.from_probs(load_distribution_values(dist_a_path))
    second = Distribution.from_probs(load_distribution_values(dist_b_path))
    return statistical_fidelity(first, second)


def render_fidelity(value, fmt):
    text = fmt_fixed(value, FIDELITY_DECIMALS)
    if fmt == "json":
        return render_json({"fidelity": round(value, FIDELITY_DECIMALS)})
    if fmt == "csv":
        return render_csv(["fidelity"], [[text]])
    return f"F = {text}\n"


# =============================================================================
# ARGUMENT PARSING
# =============================================================================

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default="table",
                        help='Output format (default: table)')
    common.add_argument('--out', default=None,
                        help='Write output to this path instead of stdout (qasm: the .qasm file)')

    parser = argparse.ArgumentParser(
        description='Exact quantum search with analytical multiphase matching',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py schedule --lambda 0.5 --l 2       two-iteration schedule
  python main.py run --n 1 --targets 0 --l 3       Single-qubit search, f(0)=1
  python main.py sweep --lambda 0.5 --l 2 --grid 5 --format csv
  python main.py compare-iterations --grid 10000 --format csv
  python main.py qasm --n 1 --targets 1 --l 1      Complete one-iteration circuit
  python main.py fidelity a.csv b.csv
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('schedule', parents=[common], help='Compute AMPM parameters')
    p.add_argument('--lambda', dest='lam', type=float, required=True, help='Target fraction M/N')
    p.add_argument('--l', type=int, default=None, help='Iterations (default: l_min)')

    p = sub.add_parser('run', parents=[common], help='Simulate the exact search')
    p.add_argument('--n', type=int, required=True, help='Query qubits')
    p.add_argument('--targets', required=True, help='Comma-separated marked indices')
    p.add_argument('--l', type=int, default=None, help='Iterations (default: l_min)')
    p.add_argument('--design-lambda', type=float, default=None,
                   help='Build the schedule for this lambda instead of M/N')
    p.add_argument('--shots', type=int, default=None, help='Add multinomial samples')
    p.add_argument('--seed', type=int, default=None, help='Sampling seed')

    p = sub.add_parser('sweep', parents=[common], help='Success probability over actual lambda')
    p.add_argument('--lambda', dest='lam', type=float, required=True, help='Design target fraction')
    p.add_argument('--l', type=int, default=None, help='Iterations (default: l_min)')
    p.add_argument('--grid', type=int, default=101, help='Number of lambda points')

    p = sub.add_parser('compare-iterations', parents=[common], help='l_min versus Grover l_G')
    p.add_argument('--grid', type=int, default=1000, help='Number of lambda points')

    p = sub.add_parser('qasm', parents=[common], help='Export the circuit as OpenQASM 2.0')
    p.add_argument('--n', type=int, required=True, help='Query qubits')
    p.add_argument('--targets', required=True, help='Comma-separated marked indices')
    p.add_argument('--l', type=int, default=None, help='Iterations (default: l_min)')

    p = sub.add_parser('fidelity', parents=[common], help='Statistical fidelity of two distributions')
    p.add_argument('dist_a', help='CSV or JSON distribution file')
    p.add_argument('dist_b', help='CSV or JSON distribution file')

    return parser


def dispatch(args):
    """Run one subcommand and return its rendered output"""
    fmt = args.format

    if args.command == 'schedule':
        return render_schedule(*cmd_schedule(args.lam, args.l), fmt)

    if args.command == 'run':
        report = cmd_run(args.n, parse_targets(args.targets), args.l, args.shots, args.seed,
                         args.design_lambda)
        return render_run(report, fmt)

    if args.command == 'sweep':
        return render_sweep(cmd_sweep(args.lam, args.l, args.grid), fmt)

    if args.command == 'compare-iterations':
        return render_compare(cmd_compare_iterations(args.grid), fmt)

    if args.command == 'qasm':
        path, predicted = cmd_qasm(args.n, parse_targets(args.targets), args.l, args.out)
        print(f"[OK] Wrote QASM: {path}", file=sys.stderr)
        return render_qasm(path, predicted, args.n, fmt)

    if args.command == 'fidelity':
        return render_fidelity(cmd_fidelity(args.dist_a, args.dist_b), fmt)

    raise ValidationError(f"unknown command: {args.command}")


def main(argv=None):
    """Main entry point with argument parsing"""
    args = build_parser().parse_args(argv)

    try:
        settings = get_settings()
        logging.basicConfig(level=settings.log_level, stream=sys.stderr,
                            format="[%(levelname)s] %(name)s: %(message)s")

        text = dispatch(args)

        # qasm already wrote its file; the summary goes to stdout
        out_path = None if args.command == 'qasm' else args.out
        emit(text, out_path, sys.stdout)
        if out_path:
            print(f"[OK] Wrote {out_path}", file=sys.stderr)
        return EXIT_OK

    except CapabilityError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (ValidationError, ConfigurationError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
