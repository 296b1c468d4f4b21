"""Command-line surface: simulate, validate, and bench subcommands.

Configs are JSON documents; see README for the schema.  Exit codes:
0 success, 1 validation mismatch, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .core import EPS, format_scalar
from .engine import STRATEGIES, OpLedger, Trajectory, oracle_lindley, simulate
from .measures import trajectory_sojourn, trajectory_waiting
from .models import ModelConfigError, TandemSpec
from .sources import ServiceTimeSource, SourceConfigError

MEASURES = ("departures", "sojourn", "waiting")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    spec: TandemSpec
    source: ServiceTimeSource
    strategy: str = "serial"
    processors: int = 1
    measures: tuple[str, ...] = ("departures",)
    count_ops: bool = False
    output_path: str = "departures.csv"


_TOP_KEYS = {
    "variant", "n", "K", "c", "b", "initial_state",
    "source", "strategy", "processors", "measures", "count_ops", "output",
}
_SOURCE_KEYS = {"kind", "value", "low", "high", "rate", "path", "seed", "integer_times"}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def parse_config(document: str) -> RunConfig:
    """Parse and fully validate a JSON run configuration."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "config root must be an object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    for key in ("variant", "n", "K", "source"):
        _require(key in doc, f"missing required key '{key}'")
    _require(isinstance(doc["n"], int), "'n' must be an integer")
    _require(isinstance(doc["K"], int), "'K' must be an integer")
    _require(isinstance(doc.get("c", 1), int), "'c' must be an integer")
    _require(isinstance(doc.get("b", 0), int), "'b' must be an integer")
    try:
        spec = TandemSpec(
            variant=doc["variant"],
            n=doc["n"],
            horizon=doc["K"],
            population=doc.get("c", 1),
            buffer_capacity=doc.get("b", 0),
            initial_state=doc.get("initial_state", "zero"),
        )
    except ModelConfigError as exc:
        raise ConfigError(str(exc)) from exc

    src = doc["source"]
    _require(isinstance(src, dict), "'source' must be an object")
    unknown = set(src) - _SOURCE_KEYS
    _require(not unknown, f"unknown keys under 'source': {sorted(unknown)}")
    _require("kind" in src, "missing required key 'source.kind'")
    try:
        source = ServiceTimeSource(
            kind=src["kind"],
            value=float(src.get("value", 1.0)),
            low=float(src.get("low", 0.0)),
            high=float(src.get("high", 1.0)),
            rate=float(src.get("rate", 1.0)),
            path=src.get("path"),
            seed=int(src.get("seed", 0)),
            integer_times=bool(src.get("integer_times", False)),
        )
    except (SourceConfigError, TypeError, ValueError) as exc:
        raise ConfigError(f"source: {exc}") from exc

    strategy = doc.get("strategy", "serial")
    _require(strategy in STRATEGIES, f"'strategy' must be one of {STRATEGIES}")
    processors = doc.get("processors", 1)
    _require(isinstance(processors, int) and processors >= 1, "'processors' must be >= 1")
    measures = tuple(doc.get("measures", ["departures"]))
    bad = set(measures) - set(MEASURES)
    _require(not bad, f"unknown measures: {sorted(bad)}")
    config = RunConfig(
        spec=spec,
        source=source,
        strategy=strategy,
        processors=processors,
        measures=measures,
        count_ops=bool(doc.get("count_ops", False)),
        output_path=doc.get("output", "departures.csv"),
    )
    _check_compat(config)
    return config


def _check_compat(config: RunConfig) -> None:
    spec = config.spec
    if config.strategy == "sparse-closed":
        _require(
            spec.variant == "closed" and spec.population == 1,
            "strategy 'sparse-closed' requires the closed variant with c = 1",
        )
    if spec.variant == "closed":
        _require(
            set(config.measures) <= {"departures"},
            "sojourn/waiting measures are defined for open variants only",
        )


def _csv_row(values) -> str:
    return ",".join(format_scalar(v) if isinstance(v, float) else str(v) for v in values)


def _write_departures(traj: Trajectory, path: Path) -> None:
    n = traj.spec.n
    with path.open("w") as fh:
        fh.write("k," + ",".join(f"d_{i}" for i in range(1, n + 1)) + "\n")
        dep = traj.departures()
        for k in range(1, traj.horizon + 1):
            fh.write(_csv_row([k, *map(float, dep[k - 1])]) + "\n")


def _write_measure(rows: np.ndarray, prefix: str, path: Path) -> None:
    n = rows.shape[1]
    with path.open("w") as fh:
        fh.write("k," + ",".join(f"{prefix}_{i}" for i in range(1, n + 1)) + "\n")
        for k in range(1, rows.shape[0] + 1):
            fh.write(_csv_row([k, *map(float, rows[k - 1])]) + "\n")


def op_report(traj: Trajectory, processors: int) -> str:
    """Counter dump plus the idealized operation-count formulas derived
    from them (the speedup figures are formula values, not timings)."""
    led = traj.ledger
    n = traj.spec.n
    K = traj.spec.horizon
    log2_fact = sum(math.log2(i) for i in range(1, n + 1))
    lines = [
        f"strategy: {traj.strategy}",
        f"steps: {led.steps}",
        f"scalar_oplus: {led.scalar_oplus}",
        f"scalar_otimes: {led.scalar_otimes}",
        f"vector_ops: {led.vector_ops}",
        f"parallel_ops: {led.parallel_ops}",
        f"batches: {led.batches}",
        f"memory_cells: {led.memory_cells}",
        "-- reference formulas (open-infinite tandem) --",
        f"serial per-step ops n(n+1)/2 + n^2: {n * (n + 1) // 2 + n * n}",
        f"serial total K(N1+N2): {K * (n * (n + 1) // 2 + n * n)}",
        f"serial memory n(n+5)/2: {n * (n + 5) // 2}",
        f"vector ideal reduction n + log2(n!): {n + log2_fact:.6f}",
        f"batched batches ceil(K/P): {-(-K // processors)}",
        f"batched ops L(n(n+1)/2 + 2Pn): "
        f"{-(-K // processors) * (n * (n + 1) // 2 + 2 * processors * n)}",
        f"speedup formula S_v = n(3n+1)/(log2(n!)/2 + n): "
        f"{n * (3 * n + 1) / (log2_fact / 2 + n):.6f}",
        f"speedup formula S_P = 3P/5: {3 * processors / 5:.6f}",
    ]
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> int:
    """Execute one simulation and write the requested artifacts."""
    tau = config.source.sample(config.spec.n, config.spec.horizon)
    traj = simulate(config.spec, tau, config.strategy, config.processors)
    out = Path(config.output_path)
    if "departures" in config.measures or not config.measures:
        _write_departures(traj, out)
    blocking = config.spec.variant in ("open_mfg", "open_comm")
    if "sojourn" in config.measures:
        s = trajectory_sojourn(traj.states, config.spec.n)
        _write_measure(s, "s", out.with_name(out.stem + "_sojourn.csv"))
    if "waiting" in config.measures:
        w = trajectory_waiting(traj.states, tau.tau, check_nonneg=not blocking)
        _write_measure(w, "w", out.with_name(out.stem + "_waiting.csv"))
    if config.count_ops:
        report = op_report(traj, config.processors)
        out.with_name(out.stem + "_ops.txt").write_text(report)
        sys.stdout.write(report)
    return 0


def validate(config: RunConfig, trials: int = 10) -> int:
    """Compare the matrix-recursion trajectory against the scalar
    oracle over several seeds; nonzero exit on the first mismatch."""
    for t in range(trials):
        source = config.source
        if source.kind != "trace":
            source = replace(source, seed=source.seed + t)
        tau = source.sample(config.spec.n, config.spec.horizon)
        traj = simulate(config.spec, tau, config.strategy, config.processors)
        oracle = oracle_lindley(config.spec, tau)
        got = traj.departures()
        want = oracle.departures()
        for k in range(1, config.spec.horizon + 1):
            for i in range(1, config.spec.n + 1):
                a, b = got[k - 1, i - 1], want[k - 1, i - 1]
                if a != b:
                    print(
                        f"mismatch at k={k} i={i}: matrix={format_scalar(a)} "
                        f"oracle={format_scalar(b)} (trial {t})"
                    )
                    return 1
        if source.kind == "trace":
            break
    print(f"validate: ok ({trials} trial(s), variant={config.spec.variant})")
    return 0


def bench(n_list, k_list, p_list, out=None) -> int:
    """Sweep (n, K, P) over the open-infinite model with unit service
    times and emit measured counters next to the formula values."""
    header = (
        "n,K,P,L,serial_ops,serial_formula,vector_build,vector_reduce,"
        "vector_reduce_ideal,batched_ops,batched_formula,sv_formula,sp_formula"
    )
    lines = [header]
    for n in n_list:
        log2_fact = sum(math.log2(i) for i in range(1, n + 1))
        for K in k_list:
            spec = TandemSpec(variant="open_infinite", n=n, horizon=K)
            tau = ServiceTimeSource(kind="constant", value=1.0).sample(n, K)
            serial = simulate(spec, tau, "serial").ledger
            vector = simulate(spec, tau, "vector").ledger
            for P in p_list:
                batched = simulate(spec, tau, "batched", P).ledger
                L = -(-K // P)
                formula = L * (n * (n + 1) // 2 + 2 * P * n)
                lines.append(
                    ",".join(
                        str(x)
                        for x in [
                            n, K, P, L,
                            serial.scalar_ops,
                            K * (n * (n + 1) // 2 + n * n),
                            vector.vector_build_ops,
                            vector.vector_reduce_ops,
                            f"{K * n + K * log2_fact:.3f}",
                            batched.parallel_ops,
                            formula,
                            f"{n * (3 * n + 1) / (log2_fact / 2 + n):.3f}",
                            f"{3 * P / 5:.3f}",
                        ]
                    )
                )
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_config(args) -> RunConfig:
    document = Path(args.config).read_text()
    config = parse_config(document)
    if getattr(args, "strategy", None):
        config = replace(config, strategy=args.strategy)
    if getattr(args, "processors", None):
        config = replace(config, processors=args.processors)
    if getattr(args, "measures", None):
        config = replace(config, measures=tuple(args.measures.split(",")))
    if getattr(args, "count_ops", False):
        config = replace(config, count_ops=True)
    if getattr(args, "out", None):
        config = replace(config, output_path=args.out)
    _check_compat(config)
    bad = set(config.measures) - set(MEASURES)
    if bad:
        raise ConfigError(f"unknown measures: {sorted(bad)}")
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tandemax", description="Max-plus tandem queueing simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out")
    sim.add_argument("--strategy", choices=STRATEGIES)
    sim.add_argument("--processors", type=int)
    sim.add_argument("--measures", help="comma list from: " + ",".join(MEASURES))
    sim.add_argument("--count-ops", action="store_true", dest="count_ops")

    val = sub.add_parser("validate", help="cross-check matrix path against the oracle")
    val.add_argument("--config", required=True)
    val.add_argument("--trials", type=int, default=10)

    ben = sub.add_parser("bench", help="operation-count sweep")
    ben.add_argument("--n-list", type=_int_list, required=True)
    ben.add_argument("--k-list", type=_int_list, required=True)
    ben.add_argument("--p-list", type=_int_list, required=True)
    ben.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return run(_load_config(args))
        if args.command == "validate":
            return validate(_load_config(args), trials=args.trials)
        return bench(args.n_list, args.k_list, args.p_list, args.out)
    except (ConfigError, ModelConfigError, SourceConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
