"""Environment simulators that draw from the true (hidden-to-the-agent) parameters."""

from __future__ import annotations

import numpy as np

from .models import DiscreteMdp, DiscretePomdp


def _sample_row(cumulative_row: np.ndarray, rng: np.random.Generator) -> int:
    # inverse-CDF draw; much cheaper than Generator.choice with p=
    return int(np.searchsorted(cumulative_row, rng.random(), side="right"))


class MdpSimulator:
    """Fully observable environment; the observation is the next state index."""

    def __init__(self, model: DiscreteMdp, start_state: int = 0):
        self.model = model
        self.start_state = int(start_state)
        self.state = self.start_state
        self._cum_t = np.cumsum(model.transition, axis=2)

    @property
    def num_actions(self) -> int:
        return self.model.num_actions

    @property
    def num_observations(self) -> int:
        return self.model.num_states

    def reset(self, rng: np.random.Generator) -> int:
        self.state = self.start_state
        return self.state

    def step(self, action: int, rng: np.random.Generator):
        s = self.state
        s_next = _sample_row(self._cum_t[s, action], rng)
        reward = float(self.model.reward[s, action, s_next])
        self.state = s_next
        return s_next, reward, False

    def initial_observation(self) -> int:
        return self.state


class PomdpSimulator:
    """Partially observable environment; emits observations, hides the state.

    Actions in `episode_end_actions` mark episode boundaries for accounting;
    the model's own transition dynamics handle any state reset.
    """

    def __init__(self, model: DiscretePomdp, episode_end_actions=()):
        self.model = model
        self.episode_end_actions = frozenset(int(a) for a in episode_end_actions)
        self.state = 0
        self._cum_t = np.cumsum(model.transition, axis=2)
        self._cum_z = np.cumsum(model.observation, axis=2)
        self._cum_b0 = np.cumsum(model.initial_belief)

    @property
    def num_actions(self) -> int:
        return self.model.num_actions

    @property
    def num_observations(self) -> int:
        return self.model.num_observations

    def reset(self, rng: np.random.Generator) -> None:
        self.state = _sample_row(self._cum_b0, rng)
        return None

    def step(self, action: int, rng: np.random.Generator):
        s = self.state
        s_next = _sample_row(self._cum_t[s, action], rng)
        obs = _sample_row(self._cum_z[s_next, action], rng)
        reward = float(self.model.reward[s, action, s_next])
        self.state = s_next
        return obs, reward, action in self.episode_end_actions

    def initial_observation(self):
        return None
