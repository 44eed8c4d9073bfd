"""Command-line entry points: serve | replay | synth | report.

Exit codes: 0 success, 2 configuration error, 3 input-format error,
4 runtime fault with --strict.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_FAULT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telefilter",
        description="Filtered delta-pose teleoperation of a simulated 6-DoF arm.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the websocket gateway until interrupted")
    p_serve.add_argument("--config", type=Path, default=None, help="gateway config JSON")
    p_serve.add_argument(
        "--log", type=Path, default=None, help="trajectory log output (overrides config log_path)"
    )

    p_replay = sub.add_parser(
        "replay", help="drive the simulator from a recorded hand-motion command log"
    )
    p_replay.add_argument("commands", type=Path, help="command log (JSON Lines)")
    p_replay.add_argument("--config", type=Path, default=None)
    mode = p_replay.add_mutually_exclusive_group()
    mode.add_argument(
        "--filtered", dest="filtered", action="store_true", default=True,
        help="run the two-stage filter pipeline (default)",
    )
    mode.add_argument(
        "--raw", dest="filtered", action="store_false",
        help="bypass the noise gate / speed cap (interpolation only)",
    )
    p_replay.add_argument("--out", type=Path, default=None, help="trajectory log output path")
    p_replay.add_argument("--task", default=None, help="task name for the metrics row")
    p_replay.add_argument("--duration", type=float, default=None, help="simulated seconds to run")
    p_replay.add_argument(
        "--strict", action="store_true", help="exit 4 if any fault trips during the run"
    )
    p_replay.add_argument(
        "--quiet", action="store_true", help="suppress the metrics table on stdout"
    )

    p_synth = sub.add_parser("synth", help="generate a synthetic operator hand trace")
    p_synth.add_argument(
        "--kind", default="jittery-pick-place",
        choices=["line", "arc", "jittery-pick-place", "noise-hold"],
    )
    p_synth.add_argument("--duration", type=float, default=60.0, help="seconds")
    p_synth.add_argument("--amplitude", type=float, default=0.25, help="path extent, meters")
    p_synth.add_argument("--jitter-std", type=float, default=0.0006, help="tracking jitter, meters")
    p_synth.add_argument(
        "--rot-jitter-std", type=float, default=0.0015, help="rotation jitter, radians"
    )
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--command-hz", type=float, default=20.0)
    p_synth.add_argument("--out", type=Path, required=True, help="command log output path")

    p_report = sub.add_parser("report", help="metrics table / CSV / plot data from trajectory logs")
    p_report.add_argument("logs", type=Path, nargs="+", help="trajectory log files")
    p_report.add_argument("--csv", type=Path, default=None, help="write metrics CSV here")
    p_report.add_argument(
        "--plot-data", type=Path, default=None, help="directory for per-log plot CSVs"
    )
    return parser


def _load_config(path: Path | None):
    from .config import GatewayConfig

    return GatewayConfig() if path is None else GatewayConfig.load(path)


def cmd_serve(args) -> int:
    from .config import ConfigError
    from .gateway import run_session

    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.log is not None:
        config.log_path = str(args.log)
    print(f"serving teleop gateway on ws://{config.host}:{config.port}{'/teleop'}")
    try:
        trajectory = run_session(config)
    except OSError as exc:
        print(f"startup error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"session ended after {len(trajectory)} ticks")
    return EXIT_OK


def cmd_replay(args) -> int:
    from .config import ConfigError
    from .metrics import log_metrics, render_report
    from .session import run_replay
    from .synth import CommandLogError, load_command_log

    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        commands, _header = load_command_log(args.commands)
    except CommandLogError as exc:
        print(f"command log error: {args.commands}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    trajectory, _session = run_replay(
        config, commands, apply_filter=args.filtered, duration_s=args.duration
    )
    out = args.out
    if out is None:
        suffix = "filtered" if args.filtered else "raw"
        out = args.commands.with_suffix(f".{suffix}.trajectory.jsonl")
    trajectory.save(out)
    task = args.task or args.commands.stem
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # all-idle logs are legitimate here
        report = log_metrics(trajectory, task)
    if len(commands) == 0:
        print("warning: empty command log; trajectory contains no motion", file=sys.stderr)
    if not args.quiet:
        print(render_report([report]), end="")
        print(f"\ntrajectory log: {out}")
    if args.strict and report.fault_count > 0:
        print(f"fault tripped during replay ({report.fault_count})", file=sys.stderr)
        return EXIT_FAULT
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synth import SyntheticTraceSpec, generate_trace, write_command_log

    try:
        spec = SyntheticTraceSpec(
            kind=args.kind,
            duration_s=args.duration,
            amplitude_m=args.amplitude,
            jitter_std_m=args.jitter_std,
            rot_jitter_std_rad=args.rot_jitter_std,
            seed=args.seed,
            command_hz=args.command_hz,
        )
    except ValueError as exc:
        print(f"invalid trace spec: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    commands = generate_trace(spec)
    write_command_log(args.out, commands, spec)
    print(f"wrote {len(commands)} commands to {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .metrics import export_plot_data, log_metrics, render_report, reports_to_csv
    from .trajlog import TrajectoryLog, TrajectoryLogError

    reports = []
    logs = []
    for path in args.logs:
        try:
            trajectory = TrajectoryLog.load(path)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                reports.append(log_metrics(trajectory, path.stem))
        except (TrajectoryLogError, ValueError) as exc:
            print(f"log error: {path}: {exc}", file=sys.stderr)
            return EXIT_INPUT
        logs.append((path, trajectory))
    print(render_report(reports), end="")
    if args.csv is not None:
        args.csv.write_text(reports_to_csv(reports), encoding="utf-8")
        print(f"metrics CSV: {args.csv}")
    if args.plot_data is not None:
        args.plot_data.mkdir(parents=True, exist_ok=True)
        for path, trajectory in logs:
            target = args.plot_data / f"{path.stem}.plot.csv"
            target.write_text(export_plot_data(trajectory), encoding="utf-8")
        print(f"plot data: {args.plot_data}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "replay": cmd_replay,
        "synth": cmd_synth,
        "report": cmd_report,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
