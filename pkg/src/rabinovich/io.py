"""CSV and report output.

All floats are written with 17 significant digits so a written trajectory
reads back bit-for-bit.  Line endings are "\n" on every platform.
"""

from __future__ import annotations

import csv
import math
from typing import TextIO, Union

import numpy as np

from .harness import ConvergenceReport, SweepReport, Trajectory

__all__ = [
    "TRAJECTORY_HEADER",
    "SWEEP_HEADER",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_sweep_csv",
    "render_report",
    "write_report",
]

TRAJECTORY_HEADER = ("t", "x", "y", "z", "u", "active", "r")
SWEEP_HEADER = (
    "K", "epsilon", "mode", "stabilized", "target",
    "tail_max_distance", "control_effort", "max_abs_u",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, dest: Union[str, TextIO]) -> None:
    """Write one sample per row: t,x,y,z,u,active,r.

    ``active`` is 0/1; ``r`` is empty on samples where the delayed state is
    not yet available (the first tau of the run, and all of an uncontrolled
    run).
    """
    if isinstance(dest, str):
        with open(dest, "w", newline="") as fh:
            write_trajectory_csv(traj, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for k in range(traj.n_samples):
        x, y, z = traj.states[k]
        r = traj.r[k]
        writer.writerow(
            (
                _fmt(traj.t[k]),
                _fmt(x),
                _fmt(y),
                _fmt(z),
                _fmt(traj.u[k]),
                "1" if traj.active[k] else "0",
                "" if math.isnan(r) else _fmt(r),
            )
        )


def read_trajectory_csv(source: Union[str, TextIO]) -> Trajectory:
    """Inverse of write_trajectory_csv; rejects files with a wrong header."""
    if isinstance(source, str):
        with open(source, "r", newline="") as fh:
            return read_trajectory_csv(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty trajectory file") from None
    if tuple(header) != TRAJECTORY_HEADER:
        raise ValueError(
            f"bad trajectory header: expected {','.join(TRAJECTORY_HEADER)}, "
            f"got {','.join(header)}"
        )
    t, states, u, active, r = [], [], [], [], []
    for row in reader:
        if not row:
            continue
        if len(row) != len(TRAJECTORY_HEADER):
            raise ValueError(f"row {reader.line_num}: expected 7 fields, got {len(row)}")
        t.append(float(row[0]))
        states.append((float(row[1]), float(row[2]), float(row[3])))
        u.append(float(row[4]))
        if row[5] not in ("0", "1"):
            raise ValueError(f"row {reader.line_num}: active must be 0 or 1, got {row[5]!r}")
        active.append(row[5] == "1")
        r.append(math.nan if row[6] == "" else float(row[6]))
    return Trajectory(
        t=np.asarray(t, dtype=float),
        states=np.asarray(states, dtype=float),
        u=np.asarray(u, dtype=float),
        active=np.asarray(active, dtype=bool),
        r=np.asarray(r, dtype=float),
    )


def write_sweep_csv(report: SweepReport, dest: Union[str, TextIO]) -> None:
    """One row per (K, epsilon, mode) cell, in the order the sweep ran.

    Cells whose simulation diverged carry the grid coordinates and empty
    outcome fields.
    """
    if isinstance(dest, str):
        with open(dest, "w", newline="") as fh:
            write_sweep_csv(report, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for cell in report.cells:
        if cell.report is None:
            writer.writerow(
                (_fmt(cell.K), _fmt(cell.epsilon), cell.mode, "", "", "", "", "")
            )
            continue
        rep = cell.report
        writer.writerow(
            (
                _fmt(cell.K),
                _fmt(cell.epsilon),
                cell.mode,
                "1" if rep.stabilized else "0",
                rep.target_label,
                _fmt(rep.tail_max_distance),
                _fmt(rep.control_effort),
                _fmt(rep.max_abs_u_post_activation),
            )
        )


def _fmt_point(point) -> str:
    return "(" + ", ".join(format(v, ".6f") for v in (point.x, point.y, point.z)) + ")"


def render_report(report: ConvergenceReport) -> str:
    """Deterministic plain-text summary of one run's outcome."""
    s = report.settings
    lines = ["run summary", "-----------"]
    if s.mode is None:
        lines.append("control: off")
    else:
        lines.append(f"control: {s.mode} prediction")
        lines.append(f"K = {_fmt(s.K)}")
        lines.append(f"epsilon = {_fmt(s.epsilon)}")
        lines.append(f"t_on = {_fmt(s.t_on)}")
        lines.append(f"tau = {_fmt(s.tau)}")
    lines.append(f"dt = {_fmt(s.dt)}")
    lines.append(f"t_end = {_fmt(s.t_end)}")
    lines.append(f"capture_radius = {_fmt(s.capture_radius)}")
    lines.append(f"tail = {_fmt(s.tail)}")
    lines.append("")
    lines.append(f"target: {report.target_label} at {_fmt_point(report.target)}")
    lines.append(f"tail_max_distance = {_fmt(report.tail_max_distance)}")
    lines.append(f"tail_mean_distance = {_fmt(report.tail_mean_distance)}")
    lines.append(f"stabilized = {'yes' if report.stabilized else 'no'}")
    lines.append(f"control_effort = {_fmt(report.control_effort)}")
    lines.append(
        f"max_abs_u_post_activation = {_fmt(report.max_abs_u_post_activation)}"
    )
    lines.append("")
    lines.append(f"note: distances use the {s.r_norm}")
    lines.append(f"note: {s.gate_evaluation}")
    return "\n".join(lines) + "\n"


def write_report(report: ConvergenceReport, dest: Union[str, TextIO]) -> None:
    if isinstance(dest, str):
        with open(dest, "w", newline="") as fh:
            fh.write(render_report(report))
        return
    dest.write(render_report(report))
