"""Command-line experiment runner.

    mdvne run --config exp.yaml [--seed N] [--algorithm lbhga|tga] [--out DIR] [--jobs N] [--events]
    mdvne dump-instance --config exp.yaml --seed N --out FILE

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import Config, ConfigError, load_config
from .instance import save_instance
from .sim import SimulationResult, run_simulation
from .topology import generate_substrate, generate_vnr_stream

log = logging.getLogger("mdvne")

METRICS = (
    "link_load_variance",
    "revenue",
    "cost",
    "revenue_cost_ratio",
    "acceptance_ratio",
    "avg_quotation",
    "accepted",
    "refused",
    "total_runtime_ms",
    "avg_runtime_ms",
)
CSV_HEADER = ("bucket_end", "algorithm", "seed") + METRICS
RUNTIME_COLUMNS = ("total_runtime_ms", "avg_runtime_ms")
SUMMARY_METRICS = METRICS + ("accept_refuse_ratio",)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def metrics_csv(result: SimulationResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in result.records:
        row = [rec.bucket_end, result.algorithm, result.seed] + [getattr(rec, m) for m in METRICS]
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def summary_csv(results: list[SimulationResult]) -> str:
    """Mean and sample standard deviation of every metric per algorithm and bucket."""
    groups = {}
    for res in results:
        for rec in res.records:
            groups.setdefault((res.algorithm, rec.bucket_end), []).append(rec)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["bucket_end", "algorithm", "runs"]
    for m in SUMMARY_METRICS:
        header += [f"{m}_mean", f"{m}_std"]
    writer.writerow(header)
    for (alg, end), recs in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        row = [end, alg, len(recs)]
        for m in SUMMARY_METRICS:
            values = [getattr(r, m) for r in recs if getattr(r, m) is not None]
            mean = statistics.fmean(values) if values else None
            std = statistics.stdev(values) if len(values) > 1 else (0.0 if values else None)
            row += [mean, std]
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def comparison_table(results: list[SimulationResult]) -> str:
    finals = {}
    for res in results:
        finals.setdefault(res.algorithm, []).append(res.records[-1])
    cols = ["metric"] + sorted(finals)
    rows = []
    for m in SUMMARY_METRICS:
        row = [m]
        for alg in cols[1:]:
            values = [getattr(r, m) for r in finals[alg] if getattr(r, m) is not None]
            row.append(f"{statistics.fmean(values):.4g}" if values else "n/a")
        rows.append(row)
    widths = [max(len(str(r[i])) for r in [cols] + rows) for i in range(len(cols))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)


def _write_atomic(path: Path, text: str, written: list) -> None:
    tmp = path.with_name(path.name + ".tmp")
    written.append(tmp)
    tmp.write_text(text)
    os.replace(tmp, path)
    written.remove(tmp)
    written.append(path)


def _run_one(cfg: Config, algorithm: str, seed: int) -> SimulationResult:
    result = run_simulation(cfg.substrate, cfg.stream, algorithm, cfg.params(algorithm), seed,
                            retry_limit=cfg.experiment.retry_limit, bucket=cfg.experiment.bucket)
    result.net = None
    return result


def run_experiment(cfg: Config, out_dir=None, events: bool = False, stream=sys.stdout) -> list[SimulationResult]:
    """Run every (algorithm, seed) pair and write metrics and summary CSVs.

    Files already written are removed if any run fails.
    """
    out = Path(out_dir or cfg.experiment.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(alg, seed) for alg in cfg.experiment.algorithms for seed in cfg.experiment.seeds]
    written: list[Path] = []
    try:
        if cfg.experiment.jobs > 1:
            with ProcessPoolExecutor(max_workers=cfg.experiment.jobs) as pool:
                futures = [pool.submit(_run_one, cfg, alg, seed) for alg, seed in jobs]
                results = [f.result() for f in futures]
        else:
            results = [_run_one(cfg, alg, seed) for alg, seed in jobs]
        for res in results:
            name = f"metrics_{res.algorithm}_seed{res.seed}"
            _write_atomic(out / f"{name}.csv", metrics_csv(res), written)
            if events:
                lines = "".join(json.dumps(e.to_dict()) + "\n" for e in res.events)
                _write_atomic(out / f"events_{res.algorithm}_seed{res.seed}.jsonl", lines, written)
        _write_atomic(out / "summary.csv", summary_csv(results), written)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    print(comparison_table(results), file=stream)
    return results


def dump_instance(cfg: Config, seed: int, out_path) -> Path:
    net = generate_substrate(cfg.substrate, seed)
    vnrs = generate_vnr_stream(cfg.stream, seed)
    save_instance(out_path, net, vnrs, seed)
    return Path(out_path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdvne", description="Multi-domain VNE experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate every configured (algorithm, seed) pair")
    run.add_argument("--config", required=True, help="YAML experiment configuration")
    run.add_argument("--seed", type=int, help="run only this seed")
    run.add_argument("--algorithm", choices=("lbhga", "tga"), help="run only this algorithm")
    run.add_argument("--out", help="output directory (overrides experiment.out_dir)")
    run.add_argument("--jobs", type=int, help="parallel worker processes")
    run.add_argument("--events", action="store_true", help="also write per-run event logs (JSON lines)")

    dump = sub.add_parser("dump-instance", help="write the generated substrate and request stream")
    dump.add_argument("--config", required=True)
    dump.add_argument("--seed", type=int, required=True)
    dump.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            if args.seed is not None:
                cfg.experiment.seeds = [args.seed]
            if args.algorithm is not None:
                cfg.experiment.algorithms = [args.algorithm]
            if args.jobs is not None:
                if args.jobs < 1:
                    raise ConfigError("--jobs", "must be >= 1")
                cfg.experiment.jobs = args.jobs
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return 1
    try:
        if args.command == "run":
            run_experiment(cfg, args.out, events=args.events)
        else:
            path = dump_instance(cfg, args.seed, args.out)
            log.info("wrote %s", path)
    except Exception as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
