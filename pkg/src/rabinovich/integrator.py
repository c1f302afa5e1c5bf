"""Fixed-step classical fourth-order Runge-Kutta integration.

Only fixed-step RK4 is provided: the simulation protocols this package
reproduces use a constant step, and a fixed grid keeps runs bit-for-bit
reproducible.  Grid times are always computed as ``t0 + k*dt`` (one
multiplication per step, never accumulated addition) so the time axis
carries no compounding rounding error.

The field callable receives the time even for autonomous systems because
the switched controlled field is time-gated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "TimeGrid",
    "FieldFn",
    "IntegrationError",
    "DivergenceError",
    "DIVERGENCE_LIMIT",
    "rk4_step",
    "integrate",
    "check_state",
]

FieldFn = Callable[[float, np.ndarray], np.ndarray]

# Abort threshold for any state component.  The attractors this package
# targets live at magnitudes of order 10, so 1e6 cleanly separates
# "still physical" from "numerically blown up".
DIVERGENCE_LIMIT = 1e6

_GRID_TOL = 1e-9


class IntegrationError(RuntimeError):
    """A step produced a non-finite derivative or state."""


class DivergenceError(IntegrationError):
    """State left the admissible region; carries the offending step index."""

    def __init__(self, step_index: int, time: float, reason: str):
        self.step_index = step_index
        self.time = time
        super().__init__(f"integration aborted at step {step_index} (t={time!r}): {reason}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t0, t0+dt, ..., t_end.  dt must divide the span evenly."""

    t0: float
    t_end: float
    dt: float

    def __post_init__(self):
        for name in ("t0", "t_end", "dt"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.t_end <= self.t0:
            raise ValueError(f"t_end ({self.t_end!r}) must exceed t0 ({self.t0!r})")
        quotient = (self.t_end - self.t0) / self.dt
        if abs(quotient - round(quotient)) >= _GRID_TOL or round(quotient) < 1:
            raise ValueError(
                f"grid does not divide evenly: (t_end - t0)/dt = {quotient!r} is not an integer"
            )

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    def time_at(self, k: int) -> float:
        return self.t0 + k * self.dt

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1, dtype=float)


def check_state(y: np.ndarray, step_index: int, t: float) -> None:
    """Divergence guard: reject non-finite or astronomically large states."""
    if not np.isfinite(y).all():
        raise DivergenceError(step_index, t, "non-finite state component")
    if np.abs(y).max() > DIVERGENCE_LIMIT:
        raise DivergenceError(
            step_index, t, f"state magnitude exceeded {DIVERGENCE_LIMIT:g}"
        )


def _eval(f: FieldFn, t: float, y: np.ndarray) -> np.ndarray:
    k = np.asarray(f(t, y), dtype=float)
    if not np.isfinite(k).all():
        raise IntegrationError(f"non-finite derivative at t={t!r}")
    return k


def rk4_step(f: FieldFn, t: float, state, dt: float) -> np.ndarray:
    """One classical RK4 update with the (1, 2, 2, 1)/6 weighting.

    Pure function of its inputs; identical inputs give bit-identical
    output.  Raises IntegrationError if the field returns a non-finite
    derivative at any stage.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    y = np.asarray(state, dtype=float)
    half = 0.5 * dt
    k1 = _eval(f, t, y)
    k2 = _eval(f, t + half, y + half * k1)
    k3 = _eval(f, t + half, y + half * k2)
    k4 = _eval(f, t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    f: FieldFn,
    y0,
    grid: TimeGrid,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
) -> np.ndarray:
    """Integrate ``f`` over ``grid``, reporting every grid point.

    The observer (if given) is invoked at every grid time including t0 and
    t_end, with a private copy of the state, so exactly
    ``grid.n_steps + 1`` times.  Returns the final state.

    Raises DivergenceError, carrying the step index, as soon as any state
    component is non-finite or exceeds DIVERGENCE_LIMIT in magnitude.
    """
    y = np.array(y0, dtype=float)
    check_state(y, 0, grid.t0)
    if observer is not None:
        observer(grid.t0, y.copy())
    for k in range(1, grid.n_steps + 1):
        t_prev = grid.t0 + (k - 1) * grid.dt
        try:
            y = rk4_step(f, t_prev, y, grid.dt)
        except DivergenceError:
            raise
        except IntegrationError as exc:
            raise DivergenceError(k, t_prev, str(exc)) from exc
        t_k = grid.t0 + k * grid.dt
        check_state(y, k, t_k)
        if observer is not None:
            observer(t_k, y.copy())
    return y
