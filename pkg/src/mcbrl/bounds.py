"""Sample-complexity regret bound for hypothesis-sampled policies, and its inversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional


class InfeasibleTargetError(ValueError):
    """No finite sample count can reach the requested regret."""


@dataclass(frozen=True)
class BoundInputs:
    """Scalars the regret bound consumes.

    policy_size is the controller node count; delta is the certified solver
    gap at the initial belief.
    """

    policy_size: int
    num_observations: int
    num_actions: int
    num_samples: Optional[int]
    tau: float
    gamma: float
    r_max: float
    delta: float

    def __post_init__(self):
        if self.policy_size < 1 or self.num_observations < 1 or self.num_actions < 1:
            raise ValueError("counts must be at least 1")
        if self.num_samples is not None and self.num_samples < 1:
            raise ValueError("num_samples must be at least 1")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.r_max < 0:
            raise ValueError("r_max must be nonnegative")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


def _log_complexity(inp: BoundInputs) -> float:
    """(|pi||O|+2) ln|pi| + |pi| ln|A| + ln(4/tau)."""
    p = inp.policy_size
    return (
        (p * inp.num_observations + 2) * math.log(p)
        + p * math.log(inp.num_actions)
        + math.log(4.0 / inp.tau)
    )


def regret_bound_terms(inp: BoundInputs) -> dict:
    """The bound and each of its printed pieces."""
    if inp.num_samples is None:
        raise ValueError("num_samples is required to evaluate the bound")
    log_term = _log_complexity(inp)
    lead = 2.0 * inp.r_max / (1.0 - inp.gamma)
    sampling = lead * math.sqrt(2.0 * log_term / inp.num_samples)
    return {
        "leading_coefficient": lead,
        "log_complexity": log_term,
        "sampling_term": sampling,
        "solver_gap": inp.delta,
        "bound": sampling + inp.delta,
    }


def regret_bound(inp: BoundInputs) -> float:
    """High-probability regret of the sampled-model policy against the optimum:

    2 R_max / (1 - gamma) * sqrt(2 ((|pi||O|+2) ln|pi| + |pi| ln|A| + ln(4/tau)) / K)
    + delta
    """
    return regret_bound_terms(inp)["bound"]


def required_samples(inp: BoundInputs, target_regret: float) -> int:
    """Smallest K whose bound is at most target_regret (exact by local search)."""
    if target_regret <= inp.delta:
        raise InfeasibleTargetError(
            f"target {target_regret} is not above the solver gap {inp.delta}"
        )
    budget = target_regret - inp.delta
    lead = 2.0 * inp.r_max / (1.0 - inp.gamma)
    if lead == 0.0:
        return 1
    log_term = _log_complexity(inp)
    k = max(1, math.ceil(2.0 * log_term * (lead / budget) ** 2))

    def bound_at(kk: int) -> float:
        return regret_bound(replace(inp, num_samples=kk))

    while k > 1 and bound_at(k - 1) <= target_regret:
        k -= 1
    while bound_at(k) > target_regret:
        k += 1
    return k
