"""Planar double-integrator dynamics for a single point-mass UAV."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum


class InvalidStateError(ValueError):
    """A UAV state contains a NaN or infinite component."""


class Action(IntEnum):
    """Discrete acceleration commands. The index order is fixed and is part
    of the one-hot encoding fed to the Q-network, so it must never change."""

    RIGHT = 0
    LEFT = 1
    UP = 2
    DOWN = 3
    COAST = 4


N_ACTIONS = len(Action)

_DIRECTIONS = {
    Action.RIGHT: (1.0, 0.0),
    Action.LEFT: (-1.0, 0.0),
    Action.UP: (0.0, 1.0),
    Action.DOWN: (0.0, -1.0),
    Action.COAST: (0.0, 0.0),
}


@dataclass(frozen=True)
class UavState:
    """Position and velocity of one vehicle in the plane."""

    x: float
    y: float
    vx: float
    vy: float

    def __post_init__(self) -> None:
        if not (
            math.isfinite(self.x)
            and math.isfinite(self.y)
            and math.isfinite(self.vx)
            and math.isfinite(self.vy)
        ):
            raise InvalidStateError(f"non-finite UAV state: {self!r}")


@dataclass(frozen=True)
class Accel:
    """Acceleration command; at most one axis is nonzero."""

    ux: float
    uy: float


def action_to_accel(action: Action, a_max: float) -> Accel:
    """Map a discrete action to its acceleration vector of magnitude a_max."""
    if a_max <= 0:
        raise ValueError(f"a_max must be positive, got {a_max}")
    dx, dy = _DIRECTIONS[Action(action)]
    return Accel(dx * a_max, dy * a_max)


def step(state: UavState, accel: Accel, dt: float) -> UavState:
    """Advance the state by dt under constant acceleration.

    The acceleration is constant over the interval, so the exact solution
    x' = x + v*dt + u*dt^2/2, v' = v + u*dt is used; there is no integrator
    error to account for in downstream checks.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return UavState(
        x=state.x + state.vx * dt + 0.5 * accel.ux * dt * dt,
        y=state.y + state.vy * dt + 0.5 * accel.uy * dt * dt,
        vx=state.vx + accel.ux * dt,
        vy=state.vy + accel.uy * dt,
    )
