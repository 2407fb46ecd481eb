"""Iterated prisoner's dilemma against a one-stage-memory opponent.

The MDP state is the previous joint outcome: S (agent cooperated, opponent
defected), T (agent defected, opponent cooperated), R (mutual cooperation),
P (mutual defection). The opponent cooperates next with a probability
conditioned on the current outcome; those four probabilities are the
unknowns. Rewards are paid on entering an outcome: 0, 5, 3, 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs import MdpSimulator
from ..models import DiscreteMdp
from ..sampling import Prior, TaskSkeleton, UniformBox

NUM_STATES = 4
NUM_ACTIONS = 2
ACTION_COOPERATE, ACTION_DEFECT = 0, 1
OUTCOME_S, OUTCOME_T, OUTCOME_R, OUTCOME_P = 0, 1, 2, 3
OUTCOME_NAMES = ("S", "T", "R", "P")
OUTCOME_REWARDS = (0.0, 5.0, 3.0, 1.0)
PARAM_NAMES = ("p_s", "p_t", "p_r", "p_p")


@dataclass(frozen=True)
class IpdOpponent:
    """Cooperation probabilities conditioned on the current joint outcome."""

    p_s: float
    p_t: float
    p_r: float
    p_p: float

    def __post_init__(self):
        for p in self.as_tuple():
            if not 0.0 <= p <= 1.0:
                raise ValueError("cooperation probabilities must lie in [0, 1]")

    def as_tuple(self) -> tuple:
        return (self.p_s, self.p_t, self.p_r, self.p_p)


@dataclass(frozen=True)
class IpdSpec:
    opponent: IpdOpponent
    discount: float = 0.95
    start_state: int = OUTCOME_R  # virtual previous round of mutual cooperation


def outcome_of(agent_action: int, opponent_cooperates: bool) -> int:
    if agent_action == ACTION_COOPERATE:
        return OUTCOME_R if opponent_cooperates else OUTCOME_S
    return OUTCOME_T if opponent_cooperates else OUTCOME_P


def opponent_cooperated_in(outcome: int) -> bool:
    return outcome in (OUTCOME_T, OUTCOME_R)


def agent_cooperated_in(outcome: int) -> bool:
    return outcome in (OUTCOME_S, OUTCOME_R)


def ipd_transition_tensor(coop_probs) -> np.ndarray:
    probs = np.asarray(coop_probs, dtype=np.float64)
    t = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    for s in range(NUM_STATES):
        p = probs[s]
        for a in range(NUM_ACTIONS):
            t[s, a, outcome_of(a, True)] += p
            t[s, a, outcome_of(a, False)] += 1.0 - p
    return t


def ipd_reward_tensor() -> np.ndarray:
    r = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    r[:, :, :] = np.asarray(OUTCOME_REWARDS)[None, None, :]
    return r


def sample_opponent(rng) -> IpdOpponent:
    """Four independent Uniform[0,1] cooperation parameters."""
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    draws = gen.uniform(0.0, 1.0, size=4)
    return IpdOpponent(*map(float, draws))


def default_prior(spec: IpdSpec) -> Prior:
    return UniformBox(0.0, 1.0)


def build_ipd(spec: IpdSpec) -> tuple[TaskSkeleton, MdpSimulator]:
    """Skeleton with the four opponent parameters unknown, plus the true environment."""
    reward = ipd_reward_tensor()
    true_t = ipd_transition_tensor(spec.opponent.as_tuple())
    env = MdpSimulator(DiscreteMdp(true_t, reward, spec.discount), spec.start_state)

    def apply_params(params):
        return ipd_transition_tensor([params[name] for name in PARAM_NAMES]), None

    skeleton = TaskSkeleton(
        num_states=NUM_STATES,
        num_actions=NUM_ACTIONS,
        reward=reward,
        discount=spec.discount,
        param_names=PARAM_NAMES,
        apply_params=apply_params,
        start_state=spec.start_state,
    )
    return skeleton, env
