"""Q-learning agent operations: value queries, exploration, training updates.

The functions here accept either a QNetwork or any object exposing
``action_values(state) -> array of 5``, which lets tests swap in an exact
lookup table where a network would get in the way.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import network
from .dynamics import Action, N_ACTIONS
from .network import OptimizerState, QNetwork
from .replay import ReplayMemory, Transition


class NotReadyError(RuntimeError):
    """Training was requested before the replay warm-up threshold."""


@dataclass(frozen=True)
class AgentConfig:
    gamma: float = 0.95
    epsilon_train: float = 0.5
    epsilon_eval: float = 0.0
    minibatch: int = 16
    warmup: int = 10_000

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        for name in ("epsilon_train", "epsilon_eval"):
            eps = getattr(self, name)
            if not 0.0 <= eps <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {eps}")
        if self.minibatch < 1:
            raise ValueError(f"minibatch must be >= 1, got {self.minibatch}")
        if self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")


def q_values(net, state) -> np.ndarray:
    """Vector of Q(s, a) over the five actions, in fixed action order."""
    if isinstance(net, QNetwork):
        return network.action_values(net, state)
    return np.asarray(net.action_values(state), dtype=float)


def select_action(net, state, epsilon: float, rng: np.random.Generator | None = None) -> Action:
    """Epsilon-greedy: uniform random with probability epsilon, else argmax.

    Ties break toward the lowest action index; with epsilon 0 no randomness
    is consumed, so an rng is only needed when epsilon > 0.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if epsilon > 0.0 and rng.random() < epsilon:
        return Action(int(rng.integers(N_ACTIONS)))
    return Action(int(np.argmax(q_values(net, state))))


def compute_target(transition: Transition, net, gamma: float) -> float:
    """Sample Bellman target r + gamma * max_a' Q(s', a').

    The done flag marks time-limit truncation, not a terminal state, so the
    target bootstraps through episode ends. No gradient flows through it.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    return float(transition.reward + gamma * np.max(q_values(net, transition.next_state)))


def train_step(
    net: QNetwork,
    opt: OptimizerState,
    mem: ReplayMemory,
    cfg: AgentConfig,
    rng: np.random.Generator,
) -> float:
    """One minibatch update: sample, build frozen targets, apply RMSProp.

    Returns the mean minibatch loss. The gradient applied is the mean of the
    per-sample gradients, so the learning rate is independent of batch size.
    """
    required = max(cfg.warmup, cfg.minibatch)
    if len(mem) < required:
        raise NotReadyError(
            f"replay memory holds {len(mem)} transitions, need {required} before training"
        )
    batch = mem.sample(cfg.minibatch, rng)
    states = np.stack([t.state for t in batch])
    actions = np.fromiter((int(t.action) for t in batch), dtype=int, count=len(batch))
    rewards = np.fromiter((t.reward for t in batch), dtype=float, count=len(batch))
    next_states = np.stack([t.next_state for t in batch])

    next_q = network.batch_action_values(net, next_states)
    targets = rewards + cfg.gamma * next_q.max(axis=1)

    x = network.encode_batch(states, actions)
    loss, grads = network.batch_loss_and_grads(net, x, targets)
    network.rmsprop_update(net, opt, grads)
    return loss


def compute_return(rewards: Sequence[float], gamma: float) -> float:
    """Discounted return sum_i gamma^i * r_i (test oracle, not used to train)."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    total = 0.0
    for r in reversed(list(rewards)):
        total = r + gamma * total
    return total
