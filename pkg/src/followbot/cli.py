"""Command line interface: run / sweep / case-study / serve."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, report
from .runner import Simulation
from .scenario import ScenarioError, bundled_scenario_path, load_scenario
from .service import RemoteService


def _load(path: str | None, fallback: str):
    p = Path(path) if path else bundled_scenario_path(fallback)
    return load_scenario(p)


def _run_with_track(config, record_trace=False):
    """Run a scenario while sampling poses for the trajectory figure."""
    sim = Simulation(config, record_trace=record_trace)
    robot_track, wheelchair_track = [], []
    n_steps = round(config.duration / config.dt)
    for i in range(n_steps):
        if i % 5 == 0:
            robot_track.append((sim.world.robot.base.x, sim.world.robot.base.y))
            wheelchair_track.append((sim.world.wheelchair.pose.x,
                                     sim.world.wheelchair.pose.y))
        sim.step_once()
    return sim.finalize(), sim, robot_track, wheelchair_track


def cmd_run(args) -> int:
    config = _load(args.config, "behind_follow")
    if args.seed is not None:
        config.seed = args.seed
    outdir = Path(args.out)
    metrics, sim, robot_track, wheelchair_track = _run_with_track(
        config, record_trace=args.trace)
    harness.write_metrics(metrics, outdir, config)
    if args.trace:
        (outdir / "trace.json").write_text(
            harness.dump_json({"trace": sim.trace}))
    report.render_trajectory(sim, outdir / "trajectory.png",
                             robot_track, wheelchair_track)
    print(f"final state: {metrics.final_state}")
    print(f"follow success: {metrics.follow_success}")
    print(f"output: {outdir}")
    return 0


def cmd_sweep(args) -> int:
    template = None
    if args.template:
        template = json.loads(Path(args.template).read_text())
    result = harness.sweep_following(template=template, seeds=args.seeds,
                                    speeds=tuple(args.speeds))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "sweep.csv").write_text(result.to_csv())
    (outdir / "sweep.json").write_text(harness.dump_json(result.to_dict()))
    report.render_sweep(result, outdir / "sweep.png")
    print(result.to_csv())
    print(f"output: {outdir}")
    return 0


def cmd_case_study(args) -> int:
    config = _load(args.config, "case_study_chair")
    outdir = Path(args.out)
    rep, sim = harness.run_case_study(config, outdir=outdir,
                                      record_trace=args.trace)
    report.render_case_study(rep, outdir / "case_study.png")
    report.render_trajectory(sim, outdir / "trajectory.png")
    for phase in harness.CASE_STUDY_PHASES:
        print(f"  {phase}: {'pass' if rep.phases.get(phase) else 'FAIL'}")
    if rep.completion_time is not None:
        print(f"completion time: {rep.completion_time:.1f} s")
    print("result:", "PASS" if rep.passed else f"FAIL ({rep.failed_phase})")
    return 0 if rep.passed else 1


def cmd_serve(args) -> int:
    config = _load(args.config, "serve_default")
    tokens = set(args.token or [])
    if args.token_file:
        tokens |= {line.strip() for line in
                   Path(args.token_file).read_text().splitlines() if line.strip()}
    if not tokens:
        print("error: no auth tokens given (--token/--token-file)", file=sys.stderr)
        return 2
    sim = Simulation(config)
    service = RemoteService(sim, tokens, host=args.host, port=args.port,
                            broadcast_hz=args.rate)
    service.start()
    host, port = service.address
    print(f"serving on {host}:{port} (Ctrl-C to stop)", flush=True)
    try:
        while True:
            import time
            time.sleep(0.5)
    except KeyboardInterrupt:
        service.stop()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="followbot",
        description="2D shared-autonomy follower robot simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario headless")
    p.add_argument("--config", help="scenario JSON (default: bundled behind follow)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="out/run")
    p.add_argument("--trace", action="store_true", help="record a replay trace")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("sweep", help="follow success grid over speeds and modes")
    p.add_argument("--template", help="episode template JSON")
    p.add_argument("--seeds", type=int, default=harness.DEFAULT_SWEEP_SEEDS)
    p.add_argument("--speeds", type=float, nargs="+",
                   default=list(harness.SWEEP_SPEEDS))
    p.add_argument("--out", default="out/sweep")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("case-study", help="chair-moving end-to-end scenario")
    p.add_argument("--config", help="scenario JSON (default: bundled chair case)")
    p.add_argument("--out", default="out/case_study")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(fn=cmd_case_study)

    p = sub.add_parser("serve", help="expose a live scenario to operator clients")
    p.add_argument("--config", help="scenario JSON (default: idle serve scene)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--rate", type=float, default=10.0, help="state broadcast Hz")
    p.add_argument("--token", action="append", help="allowed auth token (repeatable)")
    p.add_argument("--token-file", help="file with one token per line")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
