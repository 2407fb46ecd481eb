"""Agents: the hypothesis-belief policy executor and the baseline strategies."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .dp import expected_mdp, mdp_value_iteration
from .models import DiscretePomdp, ImpossibleEvidenceError, MomdpModel
from .sampling import HypothesisSet
from .solver import MomdpDynamics, SolveResult


def momdp_from_pomdp(pomdp: DiscretePomdp) -> MomdpModel:
    """Embed a plain POMDP as a mixed-observability model with a trivial observed part."""
    s = pomdp.num_states
    return MomdpModel(
        pomdp.transition[None, :, :, None, :],
        pomdp.observation[None, :, :, :],
        pomdp.reward[None, :, :, None, :],
        pomdp.discount,
        0,
        pomdp.initial_belief,
    )


class McbrlAgent:
    """Tracks the hidden belief in a solved model and acts by its alpha policy."""

    def __init__(
        self,
        model: MomdpModel,
        result: SolveResult,
        dynamics: Optional[MomdpDynamics] = None,
    ):
        self.model = model
        self.result = result
        self.dynamics = dynamics or MomdpDynamics(model)
        self.x = model.initial_observed
        self.belief = np.asarray(model.initial_hidden_belief, dtype=np.float64)

    def reset(self, initial_observation, rng) -> None:
        self.x = self.model.initial_observed
        self.belief = np.asarray(self.model.initial_hidden_belief, dtype=np.float64)
        if self.model.num_observed > 1 and initial_observation is not None:
            if int(initial_observation) != self.x:
                raise ValueError(
                    "environment start state disagrees with the model's initial "
                    "observed state"
                )

    def act(self) -> int:
        action, _ = self.result.lower.best(self.x, self.belief)
        return action

    def update(self, action, observation, reward, episode_end) -> None:
        x_next = int(observation) if self.model.num_observed > 1 else 0
        self.belief = self.dynamics.belief_update(
            self.x, self.belief, action, x_next, int(observation)
        )
        self.x = x_next

    def hidden_belief(self):
        return self.belief


class GreedyMdpAgent:
    """Fixed state-feedback policy (used for value-iteration oracles)."""

    def __init__(self, policy):
        self.policy = np.asarray(policy, dtype=np.intp)
        self.state = 0

    def reset(self, initial_observation, rng) -> None:
        self.state = int(initial_observation)

    def act(self) -> int:
        return int(self.policy[self.state])

    def update(self, action, observation, reward, episode_end) -> None:
        self.state = int(observation)

    def hidden_belief(self):
        return None


class StatePolicyAgent:
    """Deterministic map from the observed state to an action (TFT, Pavlov)."""

    def __init__(self, mapping):
        self.mapping = dict(mapping)
        self.state = 0

    def reset(self, initial_observation, rng) -> None:
        self.state = int(initial_observation)

    def act(self) -> int:
        return int(self.mapping[self.state])

    def update(self, action, observation, reward, episode_end) -> None:
        self.state = int(observation)

    def hidden_belief(self):
        return None


def tft_agent() -> StatePolicyAgent:
    """Cooperate first, then copy the opponent's last move."""
    from .benchmarks.ipd import (
        ACTION_COOPERATE,
        ACTION_DEFECT,
        NUM_STATES,
        opponent_cooperated_in,
    )

    return StatePolicyAgent(
        {
            s: ACTION_COOPERATE if opponent_cooperated_in(s) else ACTION_DEFECT
            for s in range(NUM_STATES)
        }
    )


def pavlov_agent() -> StatePolicyAgent:
    """Win-stay, lose-shift: repeat the last move iff the outcome was R or T."""
    from .benchmarks.ipd import (
        ACTION_COOPERATE,
        ACTION_DEFECT,
        NUM_STATES,
        OUTCOME_R,
        OUTCOME_T,
        agent_cooperated_in,
    )

    mapping = {}
    for s in range(NUM_STATES):
        own = ACTION_COOPERATE if agent_cooperated_in(s) else ACTION_DEFECT
        won = s in (OUTCOME_R, OUTCOME_T)
        if won:
            mapping[s] = own
        else:
            mapping[s] = ACTION_DEFECT if own == ACTION_COOPERATE else ACTION_COOPERATE
    return StatePolicyAgent(mapping)


class QLearningAgent:
    """Tabular Q-learning: epsilon-greedy, learning rate 1/n(s,a)."""

    def __init__(
        self,
        num_states: int,
        num_actions: int,
        epsilon: float,
        discount: float,
        initial_q: float = 0.0,
    ):
        self.num_states = num_states
        self.num_actions = num_actions
        self.epsilon = float(epsilon)
        self.discount = float(discount)
        self.initial_q = float(initial_q)
        self.rng = None
        self.q = None
        self.counts = None
        self.state = 0

    def reset(self, initial_observation, rng) -> None:
        self.rng = rng
        self.q = np.full((self.num_states, self.num_actions), self.initial_q)
        self.counts = np.zeros((self.num_states, self.num_actions))
        self.state = int(initial_observation)

    def act(self) -> int:
        if self.epsilon > 0 and self.rng.random() < self.epsilon:
            return int(self.rng.integers(self.num_actions))
        row = self.q[self.state]
        best = np.flatnonzero(row == row.max())
        return int(best[self.rng.integers(len(best))])

    def update(self, action, observation, reward, episode_end) -> None:
        s, s_next = self.state, int(observation)
        self.counts[s, action] += 1.0
        alpha = 1.0 / self.counts[s, action]
        target = reward + self.discount * self.q[s_next].max()
        self.q[s, action] += alpha * (target - self.q[s, action])
        self.state = s_next

    def hidden_belief(self):
        return None


class ExploitAgent:
    """Pure exploitation: act greedily in the posterior-expected MDP each step.

    The posterior over the K hypotheses is the same hidden-belief filter the
    hypothesis-indexed model uses (observing (s, a, s') reweights by each
    hypothesis's transition probability).
    """

    def __init__(self, hyps: HypothesisSet, vi_tol: float = 1e-6):
        self.hyps = hyps
        self.vi_tol = vi_tol
        self.belief = np.full(hyps.num_hypotheses, 1.0 / hyps.num_hypotheses)
        self.state = 0

    def reset(self, initial_observation, rng) -> None:
        k = self.hyps.num_hypotheses
        self.belief = np.full(k, 1.0 / k)
        self.state = int(initial_observation)

    def act(self) -> int:
        mdp = expected_mdp(self.hyps, self.belief)
        _, policy = mdp_value_iteration(mdp, self.vi_tol)
        return int(policy[self.state])

    def update(self, action, observation, reward, episode_end) -> None:
        s, s_next = self.state, int(observation)
        post = self.belief * self.hyps.transitions[:, s, action, s_next]
        total = post.sum()
        if total <= 0.0:
            raise ImpossibleEvidenceError(
                f"transition ({s}, {action}, {s_next}) has zero likelihood under "
                "every hypothesis"
            )
        self.belief = post / total
        self.state = s_next

    def hidden_belief(self):
        return self.belief
