"""The Tiger problem: listen or open one of two doors hiding a tiger.

Listening leaves the tiger in place and reports its side with some error
rate; opening pays +10 (empty door) or -100 (tiger) and resets the tiger
uniformly. Listening costs -1. The listen error rates are the unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envs import PomdpSimulator
from ..models import DiscretePomdp
from ..sampling import BetaScalar, Prior, TaskSkeleton

NUM_STATES = 2  # tiger-left, tiger-right
NUM_ACTIONS = 3  # listen, open-left, open-right
NUM_OBSERVATIONS = 2  # hear-left, hear-right
ACTION_LISTEN, ACTION_OPEN_LEFT, ACTION_OPEN_RIGHT = 0, 1, 2

REWARD_TIGER = -100.0
REWARD_EMPTY = 10.0
REWARD_LISTEN = -1.0

# Ross et al.'s Dirichlet(3, 5) prior on each listen row: mean error rate 3/8
PRIOR_ERROR_ALPHA = 3.0
PRIOR_ERROR_BETA = 5.0
PRIOR_MEAN_ERROR = PRIOR_ERROR_ALPHA / (PRIOR_ERROR_ALPHA + PRIOR_ERROR_BETA)


@dataclass(frozen=True)
class TigerSpec:
    true_error_left: float = 0.15
    true_error_right: float = 0.15
    shared_rate: bool = False  # one error rate for both sides instead of two
    discount: float = 0.95

    def __post_init__(self):
        for eps in (self.true_error_left, self.true_error_right):
            if not 0.0 <= eps <= 1.0:
                raise ValueError("error rates must lie in [0, 1]")


def _transition_tensor() -> np.ndarray:
    t = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    t[:, ACTION_LISTEN] = np.eye(NUM_STATES)
    t[:, ACTION_OPEN_LEFT] = 0.5
    t[:, ACTION_OPEN_RIGHT] = 0.5
    return t


def _observation_tensor(error_left: float, error_right: float) -> np.ndarray:
    z = np.full((NUM_STATES, NUM_ACTIONS, NUM_OBSERVATIONS), 0.5)
    z[0, ACTION_LISTEN] = (1.0 - error_left, error_left)
    z[1, ACTION_LISTEN] = (error_right, 1.0 - error_right)
    return z


def _reward_tensor() -> np.ndarray:
    r = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    r[:, ACTION_LISTEN] = REWARD_LISTEN
    r[0, ACTION_OPEN_LEFT] = REWARD_TIGER
    r[1, ACTION_OPEN_LEFT] = REWARD_EMPTY
    r[0, ACTION_OPEN_RIGHT] = REWARD_EMPTY
    r[1, ACTION_OPEN_RIGHT] = REWARD_TIGER
    return r


def tiger_pomdp(
    error_left: float = 0.15, error_right: float = 0.15, discount: float = 0.95
) -> DiscretePomdp:
    """Known-parameter Tiger model (used by oracle baselines and tests)."""
    return DiscretePomdp(
        _transition_tensor(),
        _observation_tensor(error_left, error_right),
        _reward_tensor(),
        discount,
        np.array([0.5, 0.5]),
    )


def default_prior(spec: TigerSpec) -> Prior:
    return BetaScalar(PRIOR_ERROR_ALPHA, PRIOR_ERROR_BETA)


def build_tiger(spec: TigerSpec) -> tuple[TaskSkeleton, PomdpSimulator]:
    """Skeleton with unknown listen-observation rows, plus the true environment."""
    env_model = tiger_pomdp(spec.true_error_left, spec.true_error_right, spec.discount)
    env = PomdpSimulator(
        env_model, episode_end_actions=(ACTION_OPEN_LEFT, ACTION_OPEN_RIGHT)
    )

    if spec.shared_rate:
        names = ("error",)

        def apply_params(params):
            eps = params["error"]
            return _transition_tensor(), _observation_tensor(eps, eps)

    else:
        names = ("error_left", "error_right")

        def apply_params(params):
            return _transition_tensor(), _observation_tensor(
                params["error_left"], params["error_right"]
            )

    skeleton = TaskSkeleton(
        num_states=NUM_STATES,
        num_actions=NUM_ACTIONS,
        reward=_reward_tensor(),
        discount=spec.discount,
        num_observations=NUM_OBSERVATIONS,
        param_names=names,
        apply_params=apply_params,
        initial_belief=np.array([0.5, 0.5]),
    )
    return skeleton, env
