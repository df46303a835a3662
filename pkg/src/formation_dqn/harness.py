"""Experiment orchestration: training runs, greedy evaluations, metrics files.

Training follows the standard replay-based cycle: per episode, draw a random
training formation, reset, act epsilon-greedily (pure random until the replay
warm-up fills), push transitions, and apply one minibatch update per time
step once warm-up is met. Everything is driven by a single seeded generator,
so a (seed, config) pair reproduces its metrics file byte for byte.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .agent import AgentConfig, select_action, train_step
from .environment import EnvConfig, FormationEnv, SensorMode, raw_reward
from .formation import FormationSpec, sample_training_formation
from .network import (
    ModelFormatError,
    NumericalFailureError,
    OptimizerState,
    QNetwork,
    init_network,
    load_model,
    save_model,
)
from .replay import ReplayMemory, Transition

METRICS_HEADER = ("episode", "total_clipped_reward", "mean_loss", "epsilon")
TRAJECTORY_HEADER = ("episode", "t", "uav_id", "x", "y", "gx", "gy", "reward")

# How many of the final steps enter the evaluation tracking-error summary.
TRACKING_WINDOW = 100


class ConfigError(ValueError):
    """A run configuration file or value is invalid."""


_SENSOR_TOKENS = {
    "loc": SensorMode.LOCALIZATION,
    "localization": SensorMode.LOCALIZATION,
    "landmark": SensorMode.LANDMARKS,
    "landmarks": SensorMode.LANDMARKS,
}


def parse_sensor(token: str) -> SensorMode:
    try:
        return _SENSOR_TOKENS[token.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown sensor mode {token!r}; use loc or landmark") from None


@dataclass
class RunConfig:
    # environment
    dt: float = 0.1
    a_max: float = 2.0
    episode_len: int = 400
    n_uavs: int = 1
    arena_half_width: float = 2.0
    wall_half_width: float = 5.0
    sensor_mode: SensorMode = SensorMode.LOCALIZATION
    scale_pos: float = 1.0
    scale_vel: float = 1.0
    # agent
    gamma: float = 0.95
    epsilon_train: float = 0.5
    epsilon_eval: float = 0.0
    minibatch: int = 16
    warmup: int = 10_000
    replay_capacity: int = 1_000_000
    # run
    episodes: int = 300
    seed: int = 0
    model_out: str | None = None
    metrics_out: str | None = None

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise ConfigError(f"episodes must be >= 1, got {self.episodes}")

    def env_config(self, n_uavs: int | None = None) -> EnvConfig:
        return EnvConfig(
            dt=self.dt,
            a_max=self.a_max,
            episode_len=self.episode_len,
            n_uavs=self.n_uavs if n_uavs is None else n_uavs,
            arena_half_width=self.arena_half_width,
            wall_half_width=self.wall_half_width,
            sensor_mode=self.sensor_mode,
            scale_pos=self.scale_pos,
            scale_vel=self.scale_vel,
        )

    def agent_config(self) -> AgentConfig:
        return AgentConfig(
            gamma=self.gamma,
            epsilon_train=self.epsilon_train,
            epsilon_eval=self.epsilon_eval,
            minibatch=self.minibatch,
            warmup=self.warmup,
        )


_CONFIG_PARSERS: dict[str, Callable[[str], object]] = {
    "dt": float,
    "a_max": float,
    "episode_len": int,
    "n_uavs": int,
    "arena_half_width": float,
    "wall_half_width": float,
    "sensor": parse_sensor,
    "scale_pos": float,
    "scale_vel": float,
    "gamma": float,
    "epsilon_train": float,
    "epsilon_eval": float,
    "minibatch": int,
    "warmup": int,
    "replay_capacity": int,
    "episodes": int,
    "seed": int,
    "model_out": str,
    "metrics_out": str,
}


def parse_config_file(path) -> dict[str, object]:
    """Read flat `key = value` lines; unknown keys are an error."""
    values: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_PARSERS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                parsed = _CONFIG_PARSERS[key](value)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
            values["sensor_mode" if key == "sensor" else key] = parsed
    return values


def make_run_config(file_values: dict | None = None, **overrides) -> RunConfig:
    """Defaults, overlaid with config-file values, overlaid with overrides."""
    merged: dict[str, object] = dict(file_values or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    valid = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - valid
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    try:
        return RunConfig(**merged)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class EpisodeMetrics:
    episode: int
    total_clipped_reward: float
    mean_loss: float
    epsilon: float


@dataclass
class EvalSummary:
    formation_kind: str
    n_uavs: int
    episodes: int
    mean_reward: float
    mean_tracking_error: float  # over the final TRACKING_WINDOW steps


def write_metrics_csv(metrics: Sequence[EpisodeMetrics], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_HEADER)
        for m in metrics:
            writer.writerow([m.episode, m.total_clipped_reward, m.mean_loss, m.epsilon])


def read_metrics_csv(path) -> list[EpisodeMetrics]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(METRICS_HEADER):
            raise ConfigError(f"{path} is not a metrics CSV (header {header})")
        return [
            EpisodeMetrics(int(r[0]), float(r[1]), float(r[2]), float(r[3]))
            for r in reader
            if r
        ]


def train(
    cfg: RunConfig,
    on_episode: Callable[[EpisodeMetrics], None] | None = None,
) -> tuple[list[EpisodeMetrics], QNetwork]:
    """Run a training experiment; returns per-episode metrics and the model.

    Writes the metrics CSV and model file if the config names output paths.
    A non-finite loss or parameter aborts with episode/step context attached.
    """
    rng = np.random.default_rng(cfg.seed)
    env_cfg = cfg.env_config()
    agent_cfg = cfg.agent_config()
    net = init_network(env_cfg.sensor_mode.state_len, rng, env_cfg.sensor_mode.value)
    opt = OptimizerState.for_network(net)
    mem = ReplayMemory(cfg.replay_capacity)
    env = FormationEnv(env_cfg)

    metrics: list[EpisodeMetrics] = []
    for episode in range(cfg.episodes):
        spec = sample_training_formation(rng, env_cfg.n_uavs)
        states = env.reset(spec, rng)
        total = 0.0
        loss_sum = 0.0
        train_steps = 0
        epsilon = agent_cfg.epsilon_train
        for step_index in range(env_cfg.episode_len):
            # pure random policy until the replay memory is warmed up
            epsilon = 1.0 if len(mem) < agent_cfg.warmup else agent_cfg.epsilon_train
            actions = [select_action(net, s, epsilon, rng) for s in states]
            result = env.step(actions)
            for i in range(env_cfg.n_uavs):
                mem.push(
                    Transition(states[i], actions[i], result.rewards[i],
                               result.states[i], result.done)
                )
            states = result.states
            total += sum(result.rewards) / env_cfg.n_uavs
            if len(mem) >= agent_cfg.warmup:
                try:
                    loss_sum += train_step(net, opt, mem, agent_cfg, rng)
                except NumericalFailureError as exc:
                    raise NumericalFailureError(
                        f"episode {episode}, step {step_index}: {exc}"
                    ) from exc
                train_steps += 1
        record = EpisodeMetrics(
            episode=episode,
            total_clipped_reward=total,
            mean_loss=loss_sum / train_steps if train_steps else 0.0,
            epsilon=epsilon,
        )
        metrics.append(record)
        if on_episode is not None:
            on_episode(record)

    if cfg.metrics_out:
        write_metrics_csv(metrics, cfg.metrics_out)
    if cfg.model_out:
        save_model(net, cfg.model_out)
    return metrics, net


def evaluate(
    model: QNetwork | str | Path,
    spec: FormationSpec,
    n_uavs: int,
    episodes: int,
    seed: int,
    traj_out: str | Path | None = None,
    epsilon: float = 0.0,
    sensor_mode: SensorMode | None = None,
    env_cfg: EnvConfig | None = None,
) -> EvalSummary:
    """Deploy independent controller instances, one per UAV, and score them.

    epsilon 0 is the greedy deployment policy; epsilon 1 gives the
    pure-random-action baseline. Trajectories go to traj_out when given.
    """
    if isinstance(model, (str, Path)):
        net = load_model(model, sensor_mode.value if sensor_mode is not None else None)
    else:
        net = model
        if sensor_mode is not None and net.sensor_mode != sensor_mode.value:
            raise ModelFormatError(
                f"model was trained for sensor mode {net.sensor_mode!r}, "
                f"run requires {sensor_mode.value!r}"
            )
    mode = SensorMode(net.sensor_mode)
    if spec.n_uavs != n_uavs:
        raise ValueError(f"formation is for {spec.n_uavs} UAVs, requested {n_uavs}")
    if env_cfg is None:
        env_cfg = EnvConfig(sensor_mode=mode, n_uavs=n_uavs)
    elif env_cfg.sensor_mode is not mode or env_cfg.n_uavs != n_uavs:
        raise ValueError("env_cfg sensor mode / team size disagree with the request")

    rng = np.random.default_rng(seed)
    env = FormationEnv(env_cfg)
    rows: list[tuple] = []
    reward_sum = 0.0
    reward_count = 0
    tail_errors: list[float] = []
    tail_start = max(0, env_cfg.episode_len - TRACKING_WINDOW)
    for episode in range(episodes):
        states = env.reset(spec, rng)
        while not env.done:
            actions = [select_action(net, s, epsilon, rng) for s in states]
            result = env.step(actions)
            states = result.states
            t = env.time
            goals = env.goals()
            for i, uav in enumerate(env.uav_states):
                rows.append(
                    (episode, t, i, uav.x, uav.y, goals[i].gx, goals[i].gy, result.rewards[i])
                )
                if env.steps_taken > tail_start:
                    tail_errors.append(-raw_reward((uav.x, uav.y), goals[i]))
            reward_sum += sum(result.rewards)
            reward_count += len(result.rewards)

    if traj_out is not None:
        with open(traj_out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRAJECTORY_HEADER)
            writer.writerows(rows)

    return EvalSummary(
        formation_kind=spec.kind.value,
        n_uavs=n_uavs,
        episodes=episodes,
        mean_reward=reward_sum / reward_count,
        mean_tracking_error=float(np.mean(tail_errors)),
    )


def random_baseline(
    spec: FormationSpec,
    n_uavs: int,
    episodes: int,
    seed: int,
    sensor_mode: SensorMode = SensorMode.LOCALIZATION,
) -> tuple[EvalSummary, EvalSummary]:
    """Measured baselines: a random-init model run greedily, and pure random
    actions. Both are evaluated on the same formation and seed."""
    rng = np.random.default_rng(seed)
    untrained = init_network(sensor_mode.state_len, rng, sensor_mode.value)
    greedy_init = evaluate(untrained, spec, n_uavs, episodes, seed)
    pure_random = evaluate(untrained, spec, n_uavs, episodes, seed, epsilon=1.0)
    return greedy_init, pure_random
