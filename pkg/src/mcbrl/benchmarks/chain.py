"""The 5-state Chain problem with per-action slip noise.

Action a advances along the chain (the last state self-loops), action b
returns to state 1. Each action slips with some probability and causes the
other action's effect. Rewards follow the realized effect: 2 for b's effect,
10 for a's effect in the last state, 0 otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..envs import MdpSimulator
from ..models import DiscreteMdp
from ..sampling import DirichletRows, Prior, TaskSkeleton, UniformBox

NUM_STATES = 5
NUM_ACTIONS = 2
ACTION_ADVANCE, ACTION_RESET = 0, 1


@dataclass(frozen=True)
class ChainSpec:
    variant: str = "semi-tied"  # or "full"
    slip_advance: float = 0.2
    slip_reset: float = 0.2
    true_transition: Optional[np.ndarray] = None  # overrides slips (full variant)
    discount: float = 0.95
    reward_reset_effect: float = 2.0
    reward_advance_terminal: float = 10.0

    def __post_init__(self):
        if self.variant not in ("semi-tied", "full"):
            raise ValueError(f"unknown chain variant {self.variant!r}")
        for slip in (self.slip_advance, self.slip_reset):
            if not 0.0 <= slip <= 1.0:
                raise ValueError("slip probabilities must lie in [0, 1]")


def _advance_target(s: int) -> int:
    return min(s + 1, NUM_STATES - 1)


def chain_transition_tensor(slip_advance: float, slip_reset: float) -> np.ndarray:
    """T[s, a, s'] with each action slipping into the other's effect."""
    t = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    for s in range(NUM_STATES):
        fwd, back = _advance_target(s), 0
        t[s, ACTION_ADVANCE, fwd] += 1.0 - slip_advance
        t[s, ACTION_ADVANCE, back] += slip_advance
        t[s, ACTION_RESET, back] += 1.0 - slip_reset
        t[s, ACTION_RESET, fwd] += slip_reset
    return t


def chain_reward_tensor(
    reward_reset_effect: float = 2.0, reward_advance_terminal: float = 10.0
) -> np.ndarray:
    """R[s, a, s'] keyed by the realized effect, identical for both actions."""
    r = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    for s in range(NUM_STATES):
        fwd, back = _advance_target(s), 0
        for a in range(NUM_ACTIONS):
            r[s, a, back] = reward_reset_effect
            advance_reward = (
                reward_advance_terminal if s == NUM_STATES - 1 else 0.0
            )
            if fwd != back:
                r[s, a, fwd] = advance_reward
    return r


def default_prior(spec: ChainSpec) -> Prior:
    if spec.variant == "semi-tied":
        return UniformBox(0.0, 1.0)
    return DirichletRows()


def build_chain(spec: ChainSpec) -> tuple[TaskSkeleton, MdpSimulator]:
    """Agent-side skeleton with declared unknowns, plus the true-parameter environment."""
    reward = chain_reward_tensor(spec.reward_reset_effect, spec.reward_advance_terminal)
    if spec.true_transition is not None:
        true_t = np.asarray(spec.true_transition, dtype=np.float64)
    else:
        true_t = chain_transition_tensor(spec.slip_advance, spec.slip_reset)
    env = MdpSimulator(DiscreteMdp(true_t, reward, spec.discount), start_state=0)

    if spec.variant == "semi-tied":
        def apply_params(params):
            return chain_transition_tensor(params["slip_advance"], params["slip_reset"]), None

        skeleton = TaskSkeleton(
            num_states=NUM_STATES,
            num_actions=NUM_ACTIONS,
            reward=reward,
            discount=spec.discount,
            param_names=("slip_advance", "slip_reset"),
            apply_params=apply_params,
            start_state=0,
        )
    else:
        rows = tuple((s, a) for s in range(NUM_STATES) for a in range(NUM_ACTIONS))
        skeleton = TaskSkeleton(
            num_states=NUM_STATES,
            num_actions=NUM_ACTIONS,
            reward=reward,
            discount=spec.discount,
            transition=np.full((NUM_STATES, NUM_ACTIONS, NUM_STATES), 1.0 / NUM_STATES),
            unknown_transition_rows=rows,
            start_state=0,
        )
    return skeleton, env
