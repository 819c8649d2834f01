"""Figure builders for veeswarm run artifacts.

Each builder returns a matplotlib Figure; ``render`` dispatches by kind and
``emit`` saves to disk. Figures are emitted files, never windows, and every
figure carries the scenario name and seed in its title for provenance.
"""

from __future__ import annotations

import itertools
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib import animation
from matplotlib.patches import Circle as CirclePatch
from matplotlib.patches import Polygon as PolygonPatch

from .io import InputError, load_run, per_uav

FIGURE_KINDS = (
    "trajectory", "distances", "error", "consecutive", "order", "activations",
)

_ALERT_LABEL = "alert radius r_a"


def _title(scenario, what: str) -> str:
    return f"{scenario['name']} (seed {scenario['sim']['seed']}) - {what}"


def _obstacle_patches(scenario):
    patches = []
    for entry in scenario["obstacles"]:
        if entry["type"] == "circle":
            patches.append(CirclePatch(tuple(entry["center"]), entry["radius"],
                                       facecolor="0.75", edgecolor="0.4", zorder=1))
        else:
            patches.append(PolygonPatch(np.asarray(entry["vertices"]),
                                        facecolor="0.75", edgecolor="0.4", zorder=1))
    return patches


def _snapshot_steps(requested, last_step):
    if requested:
        steps = sorted({min(max(s, 0), last_step) for s in requested})
    else:
        steps = sorted({0, last_step // 4, last_step // 2, (3 * last_step) // 4, last_step})
    return steps


def trajectory_figure(run, snapshots=None):
    scenario = run["scenario"]
    n = int(scenario["formation"]["n"])
    uavs = per_uav(run["trajectory"], n)
    fig, ax = plt.subplots(figsize=(11, 3.2))
    for patch in _obstacle_patches(scenario):
        ax.add_patch(patch)
    for k, u in enumerate(uavs):
        ax.plot(u["x_m"], u["y_m"], lw=0.8, label=f"R{k + 1}", zorder=2)
    last_step = int(run["metrics"]["step"][-1])
    for step in _snapshot_steps(snapshots, last_step):
        xs = [u["x_m"][step] for u in uavs]
        ys = [u["y_m"][step] for u in uavs]
        ax.plot(xs, ys, "k.-", ms=4, lw=1.0, alpha=0.8, zorder=3,
                label="formation snapshot" if step == 0 else None)
        ax.annotate(f"step {step}", (xs[n // 2], ys[n // 2]),
                    textcoords="offset points", xytext=(0, 10), fontsize=7)
    ax.plot(*scenario["start"], "g^", ms=9, label="start", zorder=4)
    ax.plot(*scenario["goal"], "r*", ms=12, label="goal", zorder=4)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    ax.legend(loc="upper left", fontsize=7, ncol=4)
    ax.set_title(_title(scenario, "UAV trajectories"))
    fig.tight_layout()
    return fig


def distances_figure(run):
    scenario = run["scenario"]
    n = int(scenario["formation"]["n"])
    uavs = per_uav(run["trajectory"], n)
    t = run["metrics"]["time_s"]
    fig, ax = plt.subplots(figsize=(7, 4))
    for a, b in itertools.combinations(range(n), 2):
        d = np.hypot(uavs[a]["x_m"] - uavs[b]["x_m"], uavs[a]["y_m"] - uavs[b]["y_m"])
        ax.plot(t, d, lw=0.8, label=f"R{a + 1}-R{b + 1}")
    ax.axhline(scenario["sim"]["r_a"], color="red", ls="--", lw=1.2, label=_ALERT_LABEL)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("pairwise distance [m]")
    ax.set_ylim(bottom=0.0)
    ax.legend(fontsize=7, ncol=3)
    ax.set_title(_title(scenario, "pairwise distances"))
    fig.tight_layout()
    return fig


def error_figure(run):
    scenario = run["scenario"]
    m = run["metrics"]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(m["time_s"], m["avg_error_m"], lw=1.0)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("avg formation error [m]")
    ax.set_ylim(bottom=0.0)
    ax.set_title(_title(scenario, "formation error"))
    fig.tight_layout()
    return fig


def consecutive_figure(run):
    scenario = run["scenario"]
    m = run["metrics"]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(m["time_s"], m["avg_consecutive_m"], lw=1.0)
    ax.axhline(scenario["formation"]["d"], color="gray", ls="--", lw=1.0,
               label="wing spacing d")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("avg consecutive distance [m]")
    ax.legend(fontsize=8)
    ax.set_title(_title(scenario, "consecutive distances"))
    fig.tight_layout()
    return fig


def order_figure(run):
    scenario = run["scenario"]
    m = run["metrics"]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(m["time_s"], m["phi"], lw=1.0)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("order metric")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(_title(scenario, "heading order"))
    fig.tight_layout()
    return fig


def activations_figure(run):
    scenario = run["scenario"]
    m = run["metrics"]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.step(m["time_s"], m["n_reconfig_active"], where="post", lw=1.0)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("UAVs reconfiguring")
    ax.set_ylim(-0.2, int(scenario["formation"]["n"]) + 0.2)
    ax.set_title(_title(scenario, "reconfiguration activations"))
    fig.tight_layout()
    return fig


_BUILDERS = {
    "trajectory": trajectory_figure,
    "distances": distances_figure,
    "error": error_figure,
    "consecutive": consecutive_figure,
    "order": order_figure,
    "activations": activations_figure,
}


def render(kind: str, run, snapshots=None):
    if kind not in _BUILDERS:
        raise InputError(f"unknown figure kind {kind!r}; choose from "
                         f"{', '.join(sorted(_BUILDERS))} or animation")
    if kind == "trajectory":
        return _BUILDERS[kind](run, snapshots=snapshots)
    return _BUILDERS[kind](run)


def emit(kind: str, run_dir, out_path, scenario_path=None, snapshots=None,
         dpi=150, frame_stride=25) -> Path:
    """Build one figure (or the animation) from a run directory and save it."""
    run = load_run(run_dir, scenario_path)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if kind == "animation":
        write_animation(run, out_path, frame_stride=frame_stride, dpi=dpi)
        return out_path
    fig = render(kind, run, snapshots=snapshots)
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path


def write_animation(run, out_path, frame_stride=25, dpi=80):
    """Render one frame every ``frame_stride`` steps to a video file.

    ``.mp4`` needs an ffmpeg binary; ``.gif`` uses the bundled Pillow writer
    and is the portable choice.
    """
    scenario = run["scenario"]
    n = int(scenario["formation"]["n"])
    uavs = per_uav(run["trajectory"], n)
    steps = np.arange(0, len(run["metrics"]["step"]), max(1, frame_stride))

    fig, ax = plt.subplots(figsize=(11, 3.2))
    for patch in _obstacle_patches(scenario):
        ax.add_patch(patch)
    ax.plot(*scenario["start"], "g^", ms=9)
    ax.plot(*scenario["goal"], "r*", ms=12)
    all_x = run["trajectory"]["x_m"]
    all_y = run["trajectory"]["y_m"]
    ax.set_xlim(all_x.min() - 1, all_x.max() + 1)
    ax.set_ylim(all_y.min() - 1, all_y.max() + 1)
    ax.set_aspect("equal")
    ax.set_title(_title(scenario, "flight"))
    dots, = ax.plot([], [], "ko", ms=4)
    chain, = ax.plot([], [], "k-", lw=0.8, alpha=0.6)
    clock = ax.annotate("", (0.02, 0.92), xycoords="axes fraction", fontsize=8)

    def draw(step):
        xs = [u["x_m"][step] for u in uavs]
        ys = [u["y_m"][step] for u in uavs]
        dots.set_data(xs, ys)
        chain.set_data(xs, ys)
        clock.set_text(f"t = {run['metrics']['time_s'][step]:.1f} s")
        return dots, chain, clock

    mov = animation.FuncAnimation(fig, draw, frames=steps, blit=True)
    out_path = Path(out_path)
    if out_path.suffix == ".mp4":
        writer = animation.FFMpegWriter(fps=20)
    else:
        writer = animation.PillowWriter(fps=20)
    mov.save(out_path, writer=writer, dpi=dpi)
    plt.close(fig)
