"""Fixed-capacity FIFO replay memory with uniform minibatch sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Action

DEFAULT_CAPACITY = 1_000_000


class InsufficientDataError(RuntimeError):
    """Fewer stored transitions than the requested sample size."""


@dataclass(frozen=True, eq=False)
class Transition:
    """One (s, a, r, s', done) experience record.

    `done` marks the 400-step episode cutoff; it is a truncation flag, not an
    environment terminal, so learning targets still bootstrap through it.
    """

    state: np.ndarray
    action: Action
    reward: float
    next_state: np.ndarray
    done: bool

    def __post_init__(self) -> None:
        if len(self.state) != len(self.next_state):
            raise ValueError(
                f"state lengths differ: {len(self.state)} vs {len(self.next_state)}"
            )
        if not -1.0 <= self.reward <= 1.0:
            raise ValueError(f"reward {self.reward} outside [-1, 1]")


class ReplayMemory:
    """Ring buffer over the most recent `capacity` transitions."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._cursor = 0  # next slot to overwrite once full

    def __len__(self) -> int:
        return len(self._items)

    def push(self, transition: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(transition)
        else:
            self._items[self._cursor] = transition
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, k: int, rng: np.random.Generator) -> list[Transition]:
        """k independent uniform draws with replacement."""
        if k < 1:
            raise ValueError(f"sample size must be >= 1, got {k}")
        if len(self._items) < k:
            raise InsufficientDataError(
                f"memory holds {len(self._items)} transitions, wanted {k}"
            )
        indices = rng.integers(0, len(self._items), size=k)
        return [self._items[i] for i in indices]

    def contents(self) -> list[Transition]:
        """Stored transitions in insertion order, oldest first."""
        return self._items[self._cursor:] + self._items[: self._cursor]
