"""Figure rendering for run, sweep, and case-study reports.

Figures land next to the JSON/CSV output so a report directory is
self-contained.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .harness import CaseStudyReport, SweepResult  # noqa: E402
from .runner import Simulation  # noqa: E402

MODE_COLORS = {"behind": "tab:blue", "left": "tab:green", "right": "tab:red"}


def render_sweep(result: SweepResult, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for mode in result.modes:
        rates = [100.0 * result.rates[(s, mode)] for s in result.speeds]
        ax.plot(result.speeds, rates, marker="o", label=mode.value,
                color=MODE_COLORS.get(mode.value))
    ax.set_xlabel("wheelchair speed (m/s)")
    ax.set_ylabel("follow success rate (%)")
    ax.set_ylim(-5, 105)
    ax.set_title(f"Follow success by mode and speed ({result.seeds} seeds/cell)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_trajectory(sim: Simulation, path: Path,
                      robot_track: list | None = None,
                      wheelchair_track: list | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(7, 5))
    world = sim.world
    if wheelchair_track:
        xs, ys = zip(*wheelchair_track)
        ax.plot(xs, ys, "-", color="tab:orange", alpha=0.7, label="wheelchair")
    if robot_track:
        xs, ys = zip(*robot_track)
        ax.plot(xs, ys, "-", color="tab:blue", alpha=0.7, label="robot")
    wc = world.wheelchair
    ax.add_patch(plt.Circle((wc.pose.x, wc.pose.y), wc.radius,
                            color="tab:orange", alpha=0.6))
    ax.add_patch(plt.Circle((world.robot.base.x, world.robot.base.y), 0.17,
                            color="tab:blue", alpha=0.6))
    for chair in world.chairs:
        ax.add_patch(plt.Circle((chair.pose.x, chair.pose.y), chair.radius,
                                color="tab:gray", alpha=0.7))
        ax.annotate(chair.id, (chair.pose.x, chair.pose.y), fontsize=8)
    for person in world.persons:
        ax.add_patch(plt.Circle((person.pose.x, person.pose.y), person.radius,
                                color="tab:green", alpha=0.5))
    if sim.config.corridor:
        xs, ys = zip(*sim.config.corridor)
        ax.plot(xs, ys, "--", color="k", alpha=0.4, label="corridor")
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(f"Final world state, t={world.time:.1f} s")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_case_study(report: CaseStudyReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 3.2))
    metrics = report.metrics
    events = metrics.transitions if metrics else []
    times = [t["time"] for t in events]
    labels = [f'{t["to"]}\n({t["event"]})' for t in events]
    ax.hlines(0, 0, (metrics.duration if metrics else 1.0), color="k", alpha=0.3)
    for i, (t, lab) in enumerate(zip(times, labels)):
        ax.plot([t], [0], "o", color="tab:blue")
        ax.annotate(lab, (t, 0), textcoords="offset points",
                    xytext=(0, 12 + 14 * (i % 2)), ha="center", fontsize=7)
    status = "PASS" if report.passed else f"FAIL at {report.failed_phase}"
    when = (f", completed t={report.completion_time:.1f}s"
            if report.completion_time else "")
    ax.set_title(f"Chair-moving case study: {status}{when}")
    ax.set_xlabel("time (s)")
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
