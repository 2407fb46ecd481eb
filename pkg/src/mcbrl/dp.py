"""Exact dynamic programming on discrete MDPs: value iteration and expected models."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from .models import DiscreteMdp

if TYPE_CHECKING:
    from .sampling import HypothesisSet

_MAX_SWEEPS = 1_000_000


def mdp_value_iteration(mdp: DiscreteMdp, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Value-iterate until the sup-norm Bellman residual is at most tol.

    Returns (values, greedy_policy); ties in the greedy policy go to the
    lowest action index.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t, gamma = mdp.transition, mdp.discount
    expected_r = np.einsum("san,san->sa", t, mdp.reward)
    v = np.zeros(mdp.num_states)
    for _ in range(_MAX_SWEEPS):
        q = expected_r + gamma * np.tensordot(t, v, axes=([2], [0]))
        v_next = q.max(axis=1)
        if np.max(np.abs(v_next - v)) <= tol:
            v = v_next
            break
        v = v_next
    else:
        raise RuntimeError("value iteration failed to converge")
    q = expected_r + gamma * np.tensordot(t, v, axes=([2], [0]))
    policy = np.argmax(q, axis=1)
    return v, policy


def evaluate_policy(mdp: DiscreteMdp, policy) -> np.ndarray:
    """Exact value of a deterministic stationary policy (linear solve)."""
    pi = np.asarray(policy, dtype=np.intp)
    n = mdp.num_states
    t_pi = mdp.transition[np.arange(n), pi, :]
    r_pi = np.einsum("sn,sn->s", t_pi, mdp.reward[np.arange(n), pi, :])
    return np.linalg.solve(np.eye(n) - mdp.discount * t_pi, r_pi)


def expected_mdp(hyps: "HypothesisSet", hidden_belief) -> DiscreteMdp:
    """Belief-weighted average of the hypothesis MDPs: T-bar = sum_k b(k) T_k.

    Reward and discount are shared by all hypotheses and copied through.
    """
    b = np.asarray(hidden_belief, dtype=np.float64)
    if b.shape != (hyps.num_hypotheses,):
        raise ValueError(
            f"belief has {b.shape[0] if b.ndim == 1 else b.shape} entries, "
            f"expected {hyps.num_hypotheses}"
        )
    t_bar = np.tensordot(b, hyps.transitions, axes=([0], [0]))
    return DiscreteMdp(t_bar, hyps.reward, hyps.discount)
