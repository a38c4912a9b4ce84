"""Command line entry points: generate, analyze, serve.

Exit codes: 0 success, 1 pipeline failure (stage named on stderr), 2 usage.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from modescope.baseline import BaselineSpec
from modescope.ingest import parse_env_log, parse_hw_log, parse_job_log
from modescope.model import AnalysisError, ConfigError, MrDmdConfig
from modescope.pipeline import PipelineConfig, StageError, analyze
from modescope.store import dataset_hash, write_run
from modescope.synth import SCENARIOS, SynthSpec, generate_synthetic

RUNS_ENV_VAR = "MODESCOPE_RUNS"


def parse_baseline_arg(text: str) -> BaselineSpec:
    """Parse "system:temp=40..60,curr=8..12" or "user:<job_id>"."""
    kind, sep, rest = text.partition(":")
    if not sep or not rest:
        raise argparse.ArgumentTypeError(
            f"bad baseline {text!r}; use system:<sensor>=<lo>..<hi>[,...] or user:<job_id>"
        )
    if kind == "user":
        return BaselineSpec(kind="user", reference_job=rest)
    if kind != "system":
        raise argparse.ArgumentTypeError(f"baseline kind must be system or user, not {kind!r}")
    ranges = {}
    for part in rest.split(","):
        sensor, eq, span = part.partition("=")
        lo, dots, hi = span.partition("..")
        if not eq or not dots:
            raise argparse.ArgumentTypeError(
                f"bad range {part!r}; expected <sensor>=<lo>..<hi>"
            )
        try:
            ranges[sensor.strip()] = (float(lo), float(hi))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad bounds in {part!r}")
    try:
        return BaselineSpec(kind="system", ranges=ranges)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _int_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modescope",
        description="Multiresolution mode decomposition and baseline scoring "
        "for HPC telemetry logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset with ground truth")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--scenario", default="drift", choices=SCENARIOS)
    gen.add_argument("--nodes", type=int, default=64)
    gen.add_argument("--hours", type=float, default=24.0)
    gen.add_argument("--dt", type=float, default=10.0)
    gen.add_argument("--drift-nodes", type=_int_tuple, default=())
    gen.add_argument("--stall-nodes", type=_int_tuple, default=())

    ana = sub.add_parser("analyze", help="run the full pipeline and store a run")
    ana.add_argument("--env", required=True, help="telemetry CSV")
    ana.add_argument("--jobs", required=True, help="job log JSONL")
    ana.add_argument("--hw", required=True, help="hardware event log JSONL")
    ana.add_argument(
        "--baseline",
        required=True,
        type=parse_baseline_arg,
        help="system:<sensor>=<lo>..<hi>[,...] or user:<job_id>",
    )
    ana.add_argument("--out", default=None, help=f"runs root (default ${RUNS_ENV_VAR} or ./runs)")
    ana.add_argument("--seed", type=int, default=0)
    ana.add_argument("--resamples", type=int, default=1000)
    ana.add_argument("--workers", type=int, default=None)
    ana.add_argument("--no-job-split", action="store_true", help="midpoint splits at every level")
    ana.add_argument("--max-level", type=int, default=6)
    ana.add_argument("--min-snapshots", type=int, default=32)
    ana.add_argument("--rho", type=float, default=4.0, help="oscillation budget per window")
    ana.add_argument("--power-threshold", type=float, default=0.5)

    srv = sub.add_parser("serve", help="serve stored runs over HTTP")
    srv.add_argument("--runs", default=None, help=f"runs root (default ${RUNS_ENV_VAR} or ./runs)")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        scenario=args.scenario,
        n_nodes=args.nodes,
        hours=args.hours,
        dt=args.dt,
        drift_nodes=args.drift_nodes,
        stall_nodes=args.stall_nodes,
    )
    paths, truth = generate_synthetic(spec, args.seed, args.out)
    print(f"wrote {len(paths)} files to {args.out}")
    for name, path in sorted(paths.items()):
        print(f"  {name}: {path}")
    print(f"injected anomalies: {len(truth['injected'])}")
    return 0


def _runs_root(value: str | None) -> Path:
    return Path(value or os.environ.get(RUNS_ENV_VAR) or "runs")


def _cmd_analyze(args: argparse.Namespace) -> int:
    for flag, path in (("--env", args.env), ("--jobs", args.jobs), ("--hw", args.hw)):
        if not Path(path).exists():
            print(f"error: {flag} file not found: {path}", file=sys.stderr)
            return 2

    try:
        try:
            env = parse_env_log(args.env)
            jobs = parse_job_log(args.jobs)
            events = parse_hw_log(args.hw)
        except AnalysisError as exc:
            raise StageError("ingest", exc) from exc

        mr = MrDmdConfig(
            max_oscillations=args.rho,
            max_level=args.max_level,
            min_snapshots=args.min_snapshots,
            job_split_levels=frozenset() if args.no_job_split else frozenset({3}),
            power_threshold=args.power_threshold,
        )
        config = PipelineConfig(
            baseline=args.baseline,
            mrdmd=mr,
            n_resamples=args.resamples,
            seed=args.seed,
            n_workers=args.workers,
        )
        result = analyze(env, jobs, events, config)

        try:
            data_hash = dataset_hash([args.env, args.jobs, args.hw])
            run_id, run_dir = write_run(
                _runs_root(args.out),
                config={**config.to_dict(), "job_split": not args.no_job_split},
                data_hash=data_hash,
                env=env,
                jobs=jobs,
                events=events,
                tree=result.tree,
                bands=result.main_magnitudes,
                reports=result.reports,
                summary=result.summary,
            )
        except AnalysisError as exc:
            raise StageError("store", exc) from exc
    except StageError as exc:
        print(f"pipeline failed at stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return 1

    s = result.summary
    print(f"run {run_id} written to {run_dir}")
    print(f"levels: {s['levels']}")
    print(f"segments: {s['n_segments']}  retained modes: {s['n_retained_modes']}")
    print(f"bands: {s['n_bands']}  reports: {s['n_reports']}")
    hist = " ".join(f"[{b['lo']:+.0f},{b['hi']:+.0f}):{b['count']}" for b in s["z_histogram"])
    print(f"z histogram: {hist}")
    if s["validation_findings"]:
        print(f"validation findings: {s['validation_findings']}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from modescope.service import create_app

    root = _runs_root(args.runs)
    if not root.exists():
        print(f"error: runs root not found: {root}", file=sys.stderr)
        return 2
    app = create_app(root)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "generate":
        return _cmd_generate(args)
    if args.command == "analyze":
        return _cmd_analyze(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
