"""Discretized dynamic programs p(x) = max_y { f(x, y) + Im(x, y, p(eta(x, y))) }."""

from dataclasses import dataclass

import numpy as np

from errors import InputError

from .aggregator import AffineAggregator, Aggregator


@dataclass(frozen=True, eq=False)
class ValueFunction:
    """A bounded value function over the states, in state order."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InputError("value function must be a nonempty vector")
        if not np.all(np.isfinite(values)):
            i = int(np.flatnonzero(~np.isfinite(values))[0])
            raise InputError(f"value function entry {i} is not finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def to_list(self) -> list[float]:
        return self.values.tolist()

    def to_dict(self):
        return self.to_list()


def as_values(h) -> np.ndarray:
    return h.values if isinstance(h, ValueFunction) else ValueFunction(h).values


@dataclass(frozen=True, eq=False)
class BellmanProblem:
    states: tuple[str, ...]
    decisions: tuple[str, ...]
    reward: np.ndarray
    transition: np.ndarray
    aggregator: Aggregator

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        decisions = tuple(str(y) for y in self.decisions)
        if not states or not decisions:
            raise InputError("a Bellman problem needs at least one state and one decision")
        shape = (len(states), len(decisions))
        try:
            reward = np.array(self.reward, dtype=np.float64)
            transition = np.array(self.transition)
        except (TypeError, ValueError) as e:
            raise InputError(f"reward and transition must be rectangular numeric tables: {e}") from e
        if reward.shape != shape:
            raise InputError(f"reward has shape {reward.shape}, expected {shape}")
        if not np.all(np.isfinite(reward)):
            x, y = np.argwhere(~np.isfinite(reward))[0]
            raise InputError(f"reward[{x}][{y}] is not finite")
        if transition.shape != shape:
            raise InputError(f"transition has shape {transition.shape}, expected {shape}")
        if not np.issubdtype(transition.dtype, np.integer):
            if not np.all(np.mod(transition, 1) == 0):
                raise InputError("transition entries must be integer state indices")
            transition = transition.astype(np.int64)
        bad = np.argwhere((transition < 0) | (transition >= len(states)))
        if len(bad):
            x, y = bad[0]
            raise InputError(f"transition[{x}][{y}] = {transition[x, y]} is not a valid state index")
        self.aggregator.check_shape(shape)
        reward.setflags(write=False)
        transition.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "decisions", decisions)
        object.__setattr__(self, "reward", reward)
        object.__setattr__(self, "transition", transition)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_decisions(self) -> int:
        return len(self.decisions)

    def to_dict(self):
        return {
            "states": list(self.states),
            "decisions": list(self.decisions),
            "reward": self.reward.tolist(),
            "transition": self.transition.tolist(),
            "aggregator": self.aggregator.describe(),
        }


def random_affine_problem(
    rng: np.random.Generator, n_states: int, n_decisions: int, beta: float
) -> BellmanProblem:
    """Uniform rewards and offsets, uniform transitions, Im(x, y, t) = c + beta*t."""
    shape = (n_states, n_decisions)
    return BellmanProblem(
        states=tuple(f"w{i}" for i in range(n_states)),
        decisions=tuple(f"y{j}" for j in range(n_decisions)),
        reward=rng.uniform(-1.0, 1.0, size=shape),
        transition=rng.integers(0, n_states, size=shape),
        aggregator=AffineAggregator(c=rng.uniform(-1.0, 1.0, size=shape), beta=beta),
    )
