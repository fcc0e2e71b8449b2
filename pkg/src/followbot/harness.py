"""Headless runs, the speed-sweep evaluation grid, and the chair-moving
case study, with deterministic JSON/CSV metric output."""
from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .runner import RunMetrics, Simulation
from .scenario import ScenarioConfig, bundled_scenario_path, load_scenario, parse_scenario
from .switching import FollowMode

SWEEP_SPEEDS = (0.1, 0.2, 0.3, 1.0)
SWEEP_MODE_ORDER = (FollowMode.BEHIND, FollowMode.RIGHT, FollowMode.LEFT)
DEFAULT_SWEEP_SEEDS = 20


def dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_metrics(metrics: RunMetrics, outdir: Path, config: ScenarioConfig,
                  stem: str = "metrics") -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    doc = metrics.to_dict()
    (outdir / f"{stem}.json").write_text(dump_json(doc))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key in sorted(doc):
        value = doc[key]
        if isinstance(value, (list, dict)):
            value = json.dumps(value, sort_keys=True)
        writer.writerow([key, value])
    (outdir / f"{stem}.csv").write_text(buf.getvalue())

    run_log = {
        "config": config.resolved(),
        "final_state": metrics.final_state,
        "transitions": metrics.transitions,
        "warnings": metrics.warnings,
    }
    (outdir / "run_log.json").write_text(dump_json(run_log))


def run_scenario(config: ScenarioConfig, outdir: Optional[Path] = None,
                 record_trace: bool = False,
                 trace: Optional[list] = None) -> tuple[RunMetrics, Simulation]:
    sim = Simulation(config, record_trace=record_trace, trace=trace)
    metrics = sim.run()
    if outdir is not None:
        write_metrics(metrics, Path(outdir), config)
        if record_trace:
            trace_doc = {"trace": sim.trace}
            (Path(outdir) / "trace.json").write_text(dump_json(trace_doc))
    return metrics, sim


def episode_config(template: dict, mode: FollowMode, speed: float,
                   seed: int) -> ScenarioConfig:
    """Instantiate one sweep episode from the template document."""
    doc = copy.deepcopy(template)
    duration = doc.get("duration", 40.0)
    doc["seed"] = seed
    doc["initial_mode"] = mode.value
    wc = doc.setdefault("wheelchair", {})
    wc["speed"] = speed
    if "path" not in wc:
        length = speed * duration + 5.0
        wc["path"] = [[0.0, 0.0], [length, 0.0]]
        wc["start"] = [0.0, 0.0, 0.0]
    doc.pop("robot", None)  # robot start derives from the mode target
    return parse_scenario(doc)


@dataclass
class SweepResult:
    speeds: tuple
    modes: tuple
    seeds: int
    # success rate per (speed, mode), in [0, 1]
    rates: dict = field(default_factory=dict)

    def rate(self, speed: float, mode: FollowMode) -> float:
        return self.rates[(speed, mode)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["speed_mps"] + [m.value for m in self.modes])
        for speed in self.speeds:
            row = [f"{speed:g}"]
            row += [f"{100.0 * self.rates[(speed, m)]:.0f}%" for m in self.modes]
            writer.writerow(row)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "modes": [m.value for m in self.modes],
            "rates": {f"{speed:g}/{mode.value}": self.rates[(speed, mode)]
                      for speed in self.speeds for mode in self.modes},
            "seeds": self.seeds,
            "speeds": list(self.speeds),
        }


def sweep_following(template: Optional[dict] = None,
                    speeds: Sequence[float] = SWEEP_SPEEDS,
                    modes: Sequence[FollowMode] = SWEEP_MODE_ORDER,
                    seeds: int = DEFAULT_SWEEP_SEEDS,
                    base_seed: int = 1000) -> SweepResult:
    """One follow episode per (speed, mode, seed); reports success rates in
    the same grid layout as the follow-evaluation table."""
    if not speeds:
        raise ValueError("speed list must be nonempty")
    if template is None:
        template = json.loads(bundled_scenario_path("sweep_template").read_text())
    result = SweepResult(tuple(speeds), tuple(modes), seeds)
    for speed in speeds:
        for mode in modes:
            wins = 0
            for k in range(seeds):
                cfg = episode_config(template, mode, speed, base_seed + k)
                metrics, _ = run_scenario(cfg)
                wins += int(metrics.follow_success)
            result.rates[(speed, mode)] = wins / seeds
    return result


CASE_STUDY_PHASES = ("following", "activation", "chair_moved", "release", "resumed")


@dataclass
class CaseStudyReport:
    phases: dict = field(default_factory=dict)     # phase -> bool
    failed_phase: Optional[str] = None
    completion_time: Optional[float] = None
    chair_offsets: dict = field(default_factory=dict)
    metrics: Optional[RunMetrics] = None

    @property
    def passed(self) -> bool:
        return self.failed_phase is None

    def to_dict(self) -> dict:
        return {
            "chair_offsets": {k: round(v, 9) for k, v in
                              sorted(self.chair_offsets.items())},
            "completion_time": self.completion_time,
            "failed_phase": self.failed_phase,
            "passed": self.passed,
            "phases": {k: self.phases.get(k, False) for k in CASE_STUDY_PHASES},
        }


CHAIR_CLEAR_DISTANCE = 0.5


def run_case_study(config: Optional[ScenarioConfig] = None,
                   outdir: Optional[Path] = None,
                   record_trace: bool = False) -> tuple[CaseStudyReport, Simulation]:
    """Chair-moving sequence: follow -> "help" -> remote assist moves the
    chair clear of the corridor -> release -> follow from behind."""
    if config is None:
        config = load_scenario(bundled_scenario_path("case_study_chair"))
    metrics, sim = run_scenario(config, record_trace=record_trace)

    report = CaseStudyReport(metrics=metrics,
                             chair_offsets=dict(metrics.chair_corridor_distances))
    transitions = metrics.transitions

    def saw(to_state: str, via: Optional[str] = None) -> bool:
        return any(t["to"] == to_state and (via is None or t["event"] == via)
                   for t in transitions)

    report.phases["following"] = (metrics.time_in_frame_fraction > 0.5
                                  and not metrics.target_lost)
    report.phases["activation"] = saw("remote_assist", "keyword_help")
    report.phases["chair_moved"] = any(
        d >= CHAIR_CLEAR_DISTANCE for d in metrics.chair_corridor_distances.values())
    report.phases["release"] = saw("following_behind", "RemoteRelease")
    report.phases["resumed"] = metrics.final_state == "following_behind"

    for phase in CASE_STUDY_PHASES:
        if not report.phases.get(phase, False):
            report.failed_phase = phase
            break
    report.completion_time = metrics.task_completion_time

    if outdir is not None:
        outdir = Path(outdir)
        write_metrics(metrics, outdir, config)
        (outdir / "case_study.json").write_text(dump_json(report.to_dict()))
        if record_trace:
            (outdir / "trace.json").write_text(dump_json({"trace": sim.trace}))
    return report, sim
