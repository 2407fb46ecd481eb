"""Online execution: run a policy against an environment, recording a full trace."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .models import ImpossibleEvidenceError


class EpisodeCapExceeded(RuntimeError):
    """An episode failed to terminate within the configured step cap."""


@dataclass
class Trace:
    """Step-aligned log of one run; rewards come from the environment only."""

    states: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    hidden_beliefs: list = field(default_factory=list)
    episode_ends: list = field(default_factory=list)
    failed: bool = False
    error: Optional[str] = None

    @property
    def total_reward(self) -> float:
        return float(sum(self.rewards))

    def episode_rewards(self) -> list:
        """Undiscounted reward per completed episode."""
        totals, acc = [], 0.0
        for r, end in zip(self.rewards, self.episode_ends):
            acc += r
            if end:
                totals.append(acc)
                acc = 0.0
        return totals

    def __len__(self) -> int:
        return len(self.actions)


def run_online(
    agent,
    env,
    *,
    steps: Optional[int] = None,
    episodes: Optional[int] = None,
    rng: np.random.Generator,
    max_steps_per_episode: int = 10_000,
    record_beliefs: bool = True,
) -> Trace:
    """Drive the agent for a fixed number of steps or completed episodes.

    A belief-filter failure (impossible evidence) or an episode exceeding the
    step cap marks the trace failed instead of raising.
    """
    if (steps is None) == (episodes is None):
        raise ValueError("specify exactly one of steps or episodes")
    trace = Trace()
    obs0 = env.reset(rng)
    agent.reset(obs0, rng)
    done_episodes = 0
    steps_this_episode = 0
    try:
        while True:
            if steps is not None and len(trace) >= steps:
                break
            if episodes is not None and done_episodes >= episodes:
                break
            state_before = getattr(env, "state", None)
            action = agent.act()
            obs, reward, episode_end = env.step(action, rng)
            agent.update(action, obs, reward, episode_end)
            trace.states.append(state_before)
            trace.actions.append(action)
            trace.observations.append(obs)
            trace.rewards.append(reward)
            trace.episode_ends.append(bool(episode_end))
            if record_beliefs:
                b = agent.hidden_belief()
                trace.hidden_beliefs.append(None if b is None else np.array(b))
            steps_this_episode += 1
            if episode_end:
                done_episodes += 1
                steps_this_episode = 0
            elif episodes is not None and steps_this_episode >= max_steps_per_episode:
                raise EpisodeCapExceeded(
                    f"episode {done_episodes} exceeded {max_steps_per_episode} steps"
                )
    except (ImpossibleEvidenceError, EpisodeCapExceeded) as exc:
        trace.failed = True
        trace.error = f"{type(exc).__name__}: {exc}"
    return trace
