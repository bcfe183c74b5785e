"""Command-line experiments with JSON or text reports.

Examples::

    grover-machine grover --n 2 --seed 7
    grover-machine machine enumerate --network paper_n4.network --push C23
    grover-machine --format json compare --n 2 --network paper_n4.network --trials 100000 --seed 1
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import classical, histories, machine, quantum
from .errors import GroverMachineError

EXPECTED_TOL = 1e-4
FREQ_TOL = 0.01
MEAN_TOL = 0.02
TV_TOL = 0.02


class DomainFailure(Exception):
    def __init__(self, op: str, exc: BaseException):
        super().__init__(f"{op}: {exc}")
        self.op = op


def _call(op: str, fn: Callable, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (GroverMachineError, FileNotFoundError, ValueError) as exc:
        raise DomainFailure(op, exc) from exc


def _check(value: float, expected: float, tol: float) -> dict[str, Any]:
    return {"value": value, "expected": expected, "tolerance": tol, "pass": bool(abs(value - expected) <= tol)}


def _bound(value: float, limit: float) -> dict[str, Any]:
    return {"value": value, "limit": limit, "pass": bool(value < limit)}


def closed_form_success(N: int, iterations: int) -> float:
    return math.sin((2 * iterations + 1) * math.asin(1 / math.sqrt(N))) ** 2


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())


# --------------------------------------------------------------------------
# subcommands


def cmd_grover(args) -> dict:
    layout = _call("quantum_core.RegisterLayout", quantum.RegisterLayout, args.n)
    rng = np.random.default_rng(args.seed)
    r = quantum.grover_iterations(layout.N)
    if args.measure_k == "first":
        k_rec = _call("quantum_core.measure", quantum.measure, quantum.prepare_input(layout), "K", rng)
        state = quantum.grover_iterate(k_rec.state, r)
        k_rec = quantum.MeasurementRecord("K", k_rec.outcome, k_rec.probability, state)
        success = _call("quantum_core.success_probability", quantum.conditional_success, state, k_rec.outcome)
    else:
        state = _call("quantum_core.grover_run", quantum.grover_run, layout)
        k_rec = _call("quantum_core.measure", quantum.measure, state, "K", rng)
        success = _call("quantum_core.success_probability", quantum.success_probability, state)
    x_rec = _call("quantum_core.measure", quantum.measure, k_rec.state, "X", rng)
    return {
        "results": {
            "N": layout.N,
            "oracle_calls": state.oracle_calls,
            "success_probability": success,
            "measured_k": k_rec.outcome,
            "measured_k_probability": k_rec.probability,
            "measured_x": x_rec.outcome,
            "measured_x_probability": x_rec.probability,
            "found": x_rec.outcome == k_rec.outcome,
            "v_invariant": quantum.v_is_minus(x_rec.state),
        },
        "checks": {
            "oracle_calls": _check(state.oracle_calls, r, 0),
            "success_probability": _check(success, closed_form_success(layout.N, r), EXPECTED_TOL),
        },
    }


def _load_machine(args) -> machine.ConstraintMachine:
    net = _call("machine_core.parse_network", machine.load_network, args.network)
    return _call("machine_core.build_machine", machine.build_machine, net, args.chi)


def _movement_row(m: machine.MachineMovement) -> dict:
    return {"movers": [str(c) for c in m.movers], "assignment": dict(m.assignment)}


def cmd_machine_enumerate(args) -> dict:
    mach = _load_machine(args)
    moves = _call("machine_core.enumerate_movements", machine.enumerate_movements, mach, args.push)
    return {
        "results": {
            "n_movements": len(moves),
            "sum_equations": len(mach.sum_equations),
            "power_equations": len(mach.power_equations),
            "linking_equations": [str(eq) for eq in mach.linking_equations],
        },
        "tables": {"movements": [_movement_row(m) for m in moves]},
        "checks": {},
    }


def cmd_machine_sample(args) -> dict:
    mach = _load_machine(args)
    rng = np.random.default_rng(args.seed)
    moves, counts = _call(
        "machine_core.sample_movement", machine.sample_movement_counts, mach, args.push, rng, args.trials
    )
    freqs = counts / args.trials
    expected = 1.0 / len(moves)
    rows = [
        dict(_movement_row(m), count=int(c), frequency=float(f)) for m, c, f in zip(moves, counts, freqs)
    ]
    dev = float(np.max(np.abs(freqs - expected)))
    return {
        "results": {"n_movements": len(moves), "max_frequency_deviation": dev},
        "tables": {"movements": rows},
        "checks": {"uniform_frequencies": _bound(dev, FREQ_TOL)},
    }


def cmd_baseline(args) -> dict:
    if args.n < 1 or args.n > quantum.MAX_BITS:
        raise DomainFailure("classical_baseline.classical_search", ValueError(f"--n must be in [1, {quantum.MAX_BITS}]"))
    rng = np.random.default_rng(args.seed)
    N = 1 << args.n
    mean = _call("classical_baseline.classical_search", classical.monte_carlo_mean_queries, args.n, args.trials, rng)
    exact = classical.exact_mean_queries(N, exhaustive=False)
    worst = classical.worst_case_queries(N)
    grover = quantum.grover_iterations(N)
    return {
        "results": {
            "N": N,
            "mean_queries": mean,
            "exact_mean_queries": str(exact),
            "exact_mean_queries_float": float(exact),
            "worst_case_queries": worst,
            "grover_oracle_calls": grover,
        },
        "checks": {"mean_queries": _check(mean, float(exact), MEAN_TOL)},
    }


def cmd_histories(args) -> dict:
    N = 1 << args.n
    per_k = []
    for k in range(N):
        hs = _call("advanced_info.enumerate_histories", histories.enumerate_histories, args.n, k, args.orders)
        qs = [h.query_count for h in hs]
        per_k.append(
            {
                "k": format(k, f"0{args.n}b"),
                "histories": len(hs),
                "max_queries": max(qs),
                "mean_queries": sum(qs) / len(qs),
                "all_correct": all(h.transcript.answer == k for h in hs),
            }
        )
    dist = histories.history_outcome_distribution(args.n, args.orders)
    diag = np.full(N, 1.0 / N)
    worst = max(row["max_queries"] for row in per_k)
    return {
        "results": {
            "N": N,
            "residual_worst_case": worst,
            "grover_oracle_calls": quantum.grover_iterations(N),
            "distribution_diagonal_tv": total_variation(dist, np.diag(diag)),
        },
        "tables": {"per_k": per_k},
        "checks": {"residual_worst_case": _check(worst, math.isqrt(N) - 1, 0)},
    }


def cmd_compare(args) -> dict:
    if args.n != 2:
        raise DomainFailure("cli.compare", ValueError("compare supports --n 2 only (the bundled network is two-bit)"))
    q_seed, m_seed = np.random.SeedSequence(args.seed).spawn(2)
    layout = quantum.RegisterLayout(args.n)
    N = layout.N
    state = quantum.grover_run(layout)
    q_counts = quantum.sample_joint(state, args.trials, np.random.default_rng(q_seed))
    q_freq = q_counts / args.trials

    mach = _load_machine(args)
    moves, counts = _call(
        "machine_core.sample_movement", machine.sample_movement_counts, mach, "C23", np.random.default_rng(m_seed), args.trials
    )
    m_freq = np.zeros((N, N))
    for m, c in zip(moves, counts):
        k = _call("machine_core.movement_to_assignment", machine.register_value, m.assignment, "k", args.n)
        x = machine.register_value(m.assignment, "x", args.n)
        m_freq[k, x] += c / args.trials

    h_dist = histories.history_outcome_distribution(args.n)
    tv = {
        "quantum_vs_machine": total_variation(q_freq, m_freq),
        "quantum_vs_histories": total_variation(q_freq, h_dist),
        "machine_vs_histories": total_variation(m_freq, h_dist),
    }
    return {
        "results": {"total_variation": tv},
        "tables": {
            "joint": [
                {
                    "k": layout.bits(k),
                    "x": layout.bits(x),
                    "quantum": float(q_freq[k, x]),
                    "machine": float(m_freq[k, x]),
                    "histories": float(h_dist[k, x]),
                }
                for k in range(N)
                for x in range(N)
            ]
        },
        "checks": {name: _bound(v, TV_TOL) for name, v in tv.items()},
    }


# --------------------------------------------------------------------------
# parsing and output


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="grover-machine", description=__doc__.splitlines()[0], parents=[fmt])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grover", parents=[fmt], help="run Grover search and measure K and X")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--measure-k", choices=("first", "last"), default="last")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=cmd_grover)

    m = sub.add_parser("machine", parents=[fmt], help="constraint machine movements")
    msub = m.add_subparsers(dest="action", required=True)
    e = msub.add_parser("enumerate", parents=[fmt])
    e.add_argument("--network", required=True)
    e.add_argument("--push", default="Q")
    e.add_argument("--chi", type=float, default=2.0)
    e.set_defaults(handler=cmd_machine_enumerate)
    s = msub.add_parser("sample", parents=[fmt])
    s.add_argument("--network", required=True)
    s.add_argument("--push", required=True)
    s.add_argument("--trials", type=_positive, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--chi", type=float, default=2.0)
    s.set_defaults(handler=cmd_machine_sample)

    b = sub.add_parser("baseline", parents=[fmt], help="classical drawer-search query counts")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--trials", type=_positive, required=True)
    b.add_argument("--seed", type=int, required=True)
    b.set_defaults(handler=cmd_baseline)

    h = sub.add_parser("histories", parents=[fmt], help="half-known classical histories")
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--orders", choices=("all", "rotations"), default="all")
    h.set_defaults(handler=cmd_histories)

    c = sub.add_parser("compare", parents=[fmt], help="quantum vs machine vs histories")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--network", required=True)
    c.add_argument("--trials", type=_positive, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--chi", type=float, default=2.0)
    c.set_defaults(handler=cmd_compare)
    return parser


_CONFIG_KEYS = ("n", "measure_k", "seed", "trials", "chi", "network", "push", "orders")


def run_command(argv: Sequence[str]) -> tuple[int, dict | None]:
    """Parse ``argv`` and run it; returns (exit status, report or None)."""
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), None
    fmt = getattr(args, "format", "text")
    command = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
    config = {key: getattr(args, key) for key in _CONFIG_KEYS if hasattr(args, key)}
    config["format"] = fmt
    try:
        body = args.handler(args)
    except DomainFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, None
    report = {"command": command, "config": config, **body}
    report.setdefault("tables", {})
    report["pass"] = all(c["pass"] for c in report["checks"].values())
    return 0, report


def format_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def format_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    lines += [f"  {k} = {v}" for k, v in report["config"].items()]
    lines.append("results:")
    lines += [f"  {k} = {v}" for k, v in report["results"].items()]
    for name, rows in report["tables"].items():
        lines.append(f"{name}: ({len(rows)} rows)")
        lines += [f"  {row}" for row in rows[:64]]
    if report["checks"]:
        lines.append("checks:")
        for name, c in report["checks"].items():
            lines.append(f"  [{'PASS' if c['pass'] else 'FAIL'}] {name}: {c['value']}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    status, report = run_command(sys.argv[1:] if argv is None else argv)
    if report is not None:
        fmt = report["config"]["format"]
        sys.stdout.write(format_json(report) if fmt == "json" else format_text(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
