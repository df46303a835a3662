"""Episodic multi-UAV tracking environment.

Each UAV is an uncoupled double integrator chasing its own goal trajectory.
Rewards are the negative distance to the goal, shifted up by one and clipped
to [-1, 1], so a vehicle sitting exactly on its goal collects 1 per step and
anything more than two units away collects -1. Observations come in two
flavours: direct localization (positions and velocities) or ranges to four
fixed landmarks. A reflecting square wall bounds the world; without it a
random policy diffuses tens of units away and fills the replay memory with
states the reward cannot distinguish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .dynamics import Action, UavState, action_to_accel, step as dynamics_step
from .formation import FormationSpec, Goal, goal_position


class EpisodeFinishedError(RuntimeError):
    """step() was called on an episode that already ran its full length."""


class SensorMode(Enum):
    LOCALIZATION = "localization"
    LANDMARKS = "landmarks"

    @property
    def state_len(self) -> int:
        return 6 if self is SensorMode.LOCALIZATION else 10


DEFAULT_LANDMARKS = ((-10.0, -10.0), (10.0, -10.0), (10.0, 10.0), (-10.0, 10.0))


@dataclass(frozen=True)
class EnvConfig:
    """World geometry and sensing defaults.

    The reward is informative only within two units of the goal, so the
    world is sized to keep visited states commensurate with that radius:
    start positions in a +/-2 box, reflecting walls at +/-5 that bound the
    drift a bad policy can accumulate (formations extend to +/-4 and never
    touch them). Features are fed to the network unscaled; RMSProp
    normalizes per parameter, and larger activations are what let the tiny
    learning rate move the value estimates at desk scale.
    """

    dt: float = 0.1
    a_max: float = 2.0
    episode_len: int = 400
    n_uavs: int = 1
    arena_half_width: float = 2.0
    wall_half_width: float = 5.0
    landmark_positions: tuple = DEFAULT_LANDMARKS
    sensor_mode: SensorMode = SensorMode.LOCALIZATION
    scale_pos: float = 1.0
    scale_vel: float = 1.0

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.episode_len < 1:
            raise ValueError(f"episode_len must be >= 1, got {self.episode_len}")
        if self.n_uavs < 1:
            raise ValueError(f"n_uavs must be >= 1, got {self.n_uavs}")
        if self.arena_half_width < 0:
            raise ValueError("arena_half_width must be non-negative")
        if self.wall_half_width < self.arena_half_width:
            raise ValueError("walls must enclose the start arena")
        if self.scale_pos <= 0 or self.scale_vel <= 0:
            raise ValueError("feature scales must be positive")
        if len(self.landmark_positions) != 4:
            raise ValueError("exactly four landmarks are required")


@dataclass
class StepResult:
    states: list[np.ndarray]
    rewards: list[float]
    done: bool


def raw_reward(position: Sequence[float], goal: Goal) -> float:
    """Negative Euclidean distance between the UAV and its goal."""
    x, y = position
    return -math.hypot(x - goal.gx, y - goal.gy)


def normalize_reward(r: float) -> float:
    """Shift the raw reward up by one, then clip to [-1, 1]."""
    return min(1.0, max(-1.0, r + 1.0))


def observe(state: UavState, goal: Goal, cfg: EnvConfig) -> np.ndarray:
    """Assemble the agent's feature vector for one UAV.

    LOCALIZATION mode exposes scaled coordinates directly; LANDMARKS mode
    replaces every position (own and goal) by its four landmark ranges, so
    the agent never sees a global frame.
    """
    if cfg.sensor_mode is SensorMode.LOCALIZATION:
        return np.array(
            [
                state.x / cfg.scale_pos,
                state.y / cfg.scale_pos,
                state.vx / cfg.scale_vel,
                state.vy / cfg.scale_vel,
                goal.gx / cfg.scale_pos,
                goal.gy / cfg.scale_pos,
            ]
        )
    features = np.empty(10)
    for k, (lx, ly) in enumerate(cfg.landmark_positions):
        features[k] = math.hypot(state.x - lx, state.y - ly) / cfg.scale_pos
    features[4] = state.vx / cfg.scale_vel
    features[5] = state.vy / cfg.scale_vel
    for k, (lx, ly) in enumerate(cfg.landmark_positions):
        features[6 + k] = math.hypot(goal.gx - lx, goal.gy - ly) / cfg.scale_pos
    return features


def _reflect(state: UavState, half_width: float) -> UavState:
    """Fold a state back inside the square wall, flipping velocity per bounce."""
    if -half_width <= state.x <= half_width and -half_width <= state.y <= half_width:
        return state
    x, y, vx, vy = state.x, state.y, state.vx, state.vy
    while not -half_width <= x <= half_width:
        if x > half_width:
            x, vx = 2.0 * half_width - x, -vx
        else:
            x, vx = -2.0 * half_width - x, -vx
    while not -half_width <= y <= half_width:
        if y > half_width:
            y, vy = 2.0 * half_width - y, -vy
        else:
            y, vy = -2.0 * half_width - y, -vy
    return UavState(x, y, vx, vy)


class FormationEnv:
    """Mutable episode state: UAV states, the active formation, a step counter.

    Instances are single-threaded; all the reward/observation helpers above
    are pure functions.
    """

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        self._spec: FormationSpec | None = None
        self._uavs: list[UavState] = []
        self._steps = 0

    @property
    def spec(self) -> FormationSpec | None:
        return self._spec

    @property
    def uav_states(self) -> tuple[UavState, ...]:
        return tuple(self._uavs)

    @property
    def steps_taken(self) -> int:
        return self._steps

    @property
    def time(self) -> float:
        return self._steps * self.cfg.dt

    @property
    def done(self) -> bool:
        return self._steps >= self.cfg.episode_len

    def goals(self) -> list[Goal]:
        """Goal positions at the current episode time."""
        if self._spec is None:
            raise RuntimeError("environment must be reset before querying goals")
        return [goal_position(self._spec, i, self.time) for i in range(self.cfg.n_uavs)]

    def reset(self, spec: FormationSpec, rng: np.random.Generator) -> list[np.ndarray]:
        """Start a new episode: fresh random start positions, zero velocity."""
        if spec.n_uavs != self.cfg.n_uavs:
            raise ValueError(
                f"formation is for {spec.n_uavs} UAVs, environment has {self.cfg.n_uavs}"
            )
        self._spec = spec
        self._steps = 0
        hw = self.cfg.arena_half_width
        starts = rng.uniform(-hw, hw, size=(self.cfg.n_uavs, 2))
        self._uavs = [UavState(float(px), float(py), 0.0, 0.0) for px, py in starts]
        return [
            observe(s, goal_position(spec, i, 0.0), self.cfg)
            for i, s in enumerate(self._uavs)
        ]

    def step(self, actions: Sequence[Action]) -> StepResult:
        """Advance every UAV one timestep and score it against its new goal."""
        if self._spec is None:
            raise RuntimeError("environment must be reset before stepping")
        if self.done:
            raise EpisodeFinishedError(
                f"episode already finished after {self._steps} steps"
            )
        if len(actions) != self.cfg.n_uavs:
            raise ValueError(f"expected {self.cfg.n_uavs} actions, got {len(actions)}")
        t_next = (self._steps + 1) * self.cfg.dt
        states: list[np.ndarray] = []
        rewards: list[float] = []
        new_uavs: list[UavState] = []
        for i, (uav, action) in enumerate(zip(self._uavs, actions)):
            accel = action_to_accel(action, self.cfg.a_max)
            moved = _reflect(dynamics_step(uav, accel, self.cfg.dt), self.cfg.wall_half_width)
            goal = goal_position(self._spec, i, t_next)
            rewards.append(normalize_reward(raw_reward((moved.x, moved.y), goal)))
            states.append(observe(moved, goal, self.cfg))
            new_uavs.append(moved)
        self._uavs = new_uavs
        self._steps += 1
        return StepResult(states=states, rewards=rewards, done=self.done)
