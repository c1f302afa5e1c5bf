"""Simulation harness: controlled/uncontrolled runs, convergence metrics, sweeps.

Gating semantics: the activation gate is evaluated once per step, at the
step's start, from the ring-buffer history.  An active step integrates the
controlled vector field (open-loop field plus the control term on the
z-equation, evaluated at every RK4 substage); an inactive step integrates
the pure open-loop field.  Every recorded sample carries the control input
u in force at that sample (zero when inactive), the gate flag, and the
recurrence distance r (absent while the delay window fills).

Convergence is a measured quantity, never an assumption: a run is declared
stabilized only if the whole tail window stays within the capture radius
of the nearest equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .control import (
    ControllerConfig,
    DelayBuffer,
    PredictionMode,
    activation_gate,
    admissible_gain_interval,
    control_term,
    delay_steps,
)
from .dynamics import EquilibriumSet, Params, State, equilibria, field_components
from .integrator import (
    DivergenceError,
    IntegrationError,
    TimeGrid,
    check_state,
    integrate,
    rk4_step,
)

__all__ = [
    "Trajectory",
    "ReportSettings",
    "ConvergenceReport",
    "SweepCell",
    "SweepReport",
    "run_uncontrolled",
    "run_controlled",
    "convergence_report",
    "sweep",
    "DEFAULT_CAPTURE_RADIUS",
    "DEFAULT_TAIL",
]

# Report defaults: the attractor scale is O(10), so a 0.5 capture radius is
# a strict criterion; 20 time units of tail leave no room for slow escape.
DEFAULT_CAPTURE_RADIUS = 0.5
DEFAULT_TAIL = 20.0

R_NORM_NOTE = "euclidean norm over the full state vector"
GATE_NOTE = "gate evaluated once per step, at the step's start"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered samples (t, state, u, active, r); r is NaN while absent."""

    t: np.ndarray
    states: np.ndarray
    u: np.ndarray
    active: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        if not (len(self.states) == len(self.u) == len(self.active) == len(self.r) == n):
            raise ValueError("trajectory arrays must have equal length")
        if n < 2:
            raise ValueError("a trajectory needs at least two samples")
        if self.states.shape != (n, 3):
            raise ValueError(f"states must have shape ({n}, 3), got {self.states.shape}")
        if not np.all(np.diff(self.t) > 0.0):
            raise ValueError("sample times must be strictly increasing")
        if not np.all(self.u[~self.active] == 0.0):
            raise ValueError("u must be zero at every inactive sample")

    @property
    def n_samples(self) -> int:
        return len(self.t)

    @property
    def span(self) -> float:
        return float(self.t[-1] - self.t[0])

    def final_state(self) -> State:
        return State.from_array(self.states[-1])


def _open_field(p: Params):
    a, b, d, h = p.a, p.b, p.d, p.h

    def f(t, s):
        x, y, z = s
        return np.array(field_components(a, b, d, h, x, y, z))

    return f


def _controlled_field(p: Params, cfg: ControllerConfig):
    a, b, d, h = p.a, p.b, p.d, p.h

    def f(t, s):
        x, y, z = s
        dx, dy, dz = field_components(a, b, d, h, x, y, z)
        return np.array((dx, dy, dz + control_term(p, cfg, x, y, z)))

    return f


def run_uncontrolled(p: Params, s0: State, grid: TimeGrid) -> Trajectory:
    """Integrate the open-loop flow; u is zero and the gate never applies."""
    ts: list = []
    rows: list = []

    def observer(t, y):
        ts.append(t)
        rows.append(y)

    integrate(_open_field(p), s0.as_array(), grid, observer)
    n = len(ts)
    return Trajectory(
        t=np.array(ts),
        states=np.vstack(rows),
        u=np.zeros(n),
        active=np.zeros(n, dtype=bool),
        r=np.full(n, np.nan),
    )


def run_controlled(
    p: Params, s0: State, grid: TimeGrid, cfg: ControllerConfig
) -> Trajectory:
    """Integrate the gated controlled flow under the given controller.

    With K = 0 the produced times, states, and control inputs match
    run_uncontrolled sample for sample; the gate diagnostics (active, r)
    are still recorded, since gating does not depend on the gain.
    """
    lag = delay_steps(cfg, grid.dt)
    f_open = _open_field(p)
    f_ctl = _controlled_field(p, cfg)

    buffer = DelayBuffer(lag)
    y = s0.as_array()
    check_state(y, 0, grid.t0)
    buffer.push(y)

    n = grid.n_steps
    ts = np.empty(n + 1)
    states = np.empty((n + 1, 3))
    us = np.zeros(n + 1)
    actives = np.zeros(n + 1, dtype=bool)
    rs = np.full(n + 1, np.nan)

    def record(k: int, t: float, state: np.ndarray) -> bool:
        active, r = activation_gate(buffer, t, state, cfg)
        ts[k] = t
        states[k] = state
        actives[k] = active
        if r is not None:
            rs[k] = r
        if active:
            us[k] = control_term(p, cfg, state[0], state[1], state[2])
        return active

    active = record(0, grid.t0, y)
    for k in range(1, n + 1):
        t_prev = grid.t0 + (k - 1) * grid.dt
        field = f_ctl if active else f_open
        try:
            y = rk4_step(field, t_prev, y, grid.dt)
        except DivergenceError:
            raise
        except IntegrationError as exc:
            raise DivergenceError(k, t_prev, str(exc)) from exc
        t_k = grid.t0 + k * grid.dt
        check_state(y, k, t_k)
        buffer.push(y)
        active = record(k, t_k, y)

    return Trajectory(t=ts, states=states, u=us, active=actives, r=rs)


@dataclass(frozen=True)
class ReportSettings:
    """Echo of everything that shaped a run, frozen into its report."""

    mode: Optional[str]
    K: Optional[float]
    epsilon: Optional[float]
    t_on: Optional[float]
    tau: Optional[float]
    dt: float
    t_end: float
    capture_radius: float
    tail: float
    r_norm: str = R_NORM_NOTE
    gate_evaluation: str = GATE_NOTE


@dataclass(frozen=True)
class ConvergenceReport:
    """Measured convergence outcome of one run."""

    target_label: str
    target: State
    tail_max_distance: float
    tail_mean_distance: float
    stabilized: bool
    control_effort: float
    max_abs_u_post_activation: float
    settings: ReportSettings


def _trapezoid(values: np.ndarray, t: np.ndarray) -> float:
    widths = t[1:] - t[:-1]
    return float(np.sum(widths * (values[1:] + values[:-1])) * 0.5)


def convergence_report(
    traj: Trajectory,
    eqs: EquilibriumSet,
    tail: float = DEFAULT_TAIL,
    capture_radius: float = DEFAULT_CAPTURE_RADIUS,
    cfg: Optional[ControllerConfig] = None,
) -> ConvergenceReport:
    """Quantify where (and whether) a trajectory settled.

    The target is the equilibrium nearest the mean position over the tail
    window (the last ``tail`` time units); the run counts as stabilized iff
    the maximum distance to the target over that window is within
    ``capture_radius``.  Control effort is the trapezoid-rule integral of
    |u| over the whole run.
    """
    if tail <= 0.0:
        raise ValueError(f"tail must be positive, got {tail!r}")
    if tail >= traj.span:
        raise ValueError(
            f"tail window ({tail!r}) must be shorter than the trajectory span ({traj.span!r})"
        )
    if capture_radius <= 0.0:
        raise ValueError(f"capture_radius must be positive, got {capture_radius!r}")

    cut = traj.t[-1] - tail
    sel = traj.t >= cut
    tail_states = traj.states[sel]
    mean_state = tail_states.mean(axis=0)

    best_idx = 0
    best_dist = math.inf
    for i, point in enumerate(eqs.points):
        dist = float(np.linalg.norm(mean_state - point.as_array()))
        if dist < best_dist:
            best_idx = i
            best_dist = dist
    target = eqs.points[best_idx]
    target_arr = target.as_array()

    dists = np.sqrt(((tail_states - target_arr) ** 2).sum(axis=1))
    tail_max = float(dists.max())
    tail_mean = float(dists.mean())

    abs_u = np.abs(traj.u)
    effort = _trapezoid(abs_u, traj.t)
    if cfg is not None:
        post = abs_u[traj.t > cfg.t_on]
        max_abs_u = float(post.max()) if len(post) else 0.0
    else:
        max_abs_u = float(abs_u.max())

    dt = float(traj.t[1] - traj.t[0])
    settings = ReportSettings(
        mode=cfg.mode.value if cfg is not None else None,
        K=cfg.K if cfg is not None else None,
        epsilon=cfg.epsilon if cfg is not None else None,
        t_on=cfg.t_on if cfg is not None else None,
        tau=cfg.tau if cfg is not None else None,
        dt=dt,
        t_end=float(traj.t[-1]),
        capture_radius=capture_radius,
        tail=tail,
    )
    return ConvergenceReport(
        target_label=eqs.labels[best_idx],
        target=target,
        tail_max_distance=tail_max,
        tail_mean_distance=tail_mean,
        stabilized=tail_max <= capture_radius,
        control_effort=effort,
        max_abs_u_post_activation=max_abs_u,
        settings=settings,
    )


@dataclass(frozen=True)
class SweepCell:
    """Outcome of one (mode, K, epsilon) run; error text if the run aborted."""

    K: float
    epsilon: float
    mode: str
    in_admissible_interval: bool
    report: Optional[ConvergenceReport]
    error: Optional[str]


@dataclass(frozen=True)
class SweepReport:
    """All sweep cells in deterministic (mode, K, epsilon) order."""

    K_values: tuple[float, ...]
    eps_values: tuple[float, ...]
    modes: tuple[str, ...]
    cells: tuple[SweepCell, ...]

    def __post_init__(self):
        expected = len(self.K_values) * len(self.eps_values) * len(self.modes)
        if len(self.cells) != expected:
            raise ValueError(
                f"sweep grid mismatch: {len(self.cells)} cells for "
                f"{len(self.modes)}x{len(self.K_values)}x{len(self.eps_values)} grid"
            )

    def stabilized_cells(self) -> tuple[SweepCell, ...]:
        return tuple(
            c for c in self.cells if c.report is not None and c.report.stabilized
        )


def sweep(
    p: Params,
    s0: State,
    grid: TimeGrid,
    K_values: Sequence[float],
    eps_values: Sequence[float],
    base_cfg: ControllerConfig,
    modes: Optional[Sequence[PredictionMode]] = None,
    tail: float = DEFAULT_TAIL,
    capture_radius: float = DEFAULT_CAPTURE_RADIUS,
) -> SweepReport:
    """Run every (mode, K, epsilon) cell and collect convergence reports.

    Cells run sequentially in a fixed order, so repeated sweeps are
    reproducible.  A cell whose run diverges records the error and leaves
    the report empty; it never aborts the sweep.  Each cell is flagged
    against the admissible gain interval for the system's d.
    """
    if not K_values or not eps_values:
        raise ValueError("K_values and eps_values must be nonempty")
    mode_list = tuple(modes) if modes is not None else (base_cfg.mode,)
    if not mode_list:
        raise ValueError("modes must be nonempty when given")

    eqs = equilibria(p)
    interval = admissible_gain_interval(p.d)
    cells = []
    for mode in mode_list:
        for K in K_values:
            for eps in eps_values:
                cfg = replace(base_cfg, K=float(K), epsilon=float(eps), mode=mode)
                in_interval = interval.contains(cfg.K)
                try:
                    traj = run_controlled(p, s0, grid, cfg)
                    report = convergence_report(
                        traj, eqs, tail=tail, capture_radius=capture_radius, cfg=cfg
                    )
                    cells.append(
                        SweepCell(cfg.K, cfg.epsilon, mode.value, in_interval, report, None)
                    )
                except IntegrationError as exc:
                    cells.append(
                        SweepCell(cfg.K, cfg.epsilon, mode.value, in_interval, None, str(exc))
                    )
    return SweepReport(
        K_values=tuple(float(k) for k in K_values),
        eps_values=tuple(float(e) for e in eps_values),
        modes=tuple(m.value for m in mode_list),
        cells=tuple(cells),
    )
