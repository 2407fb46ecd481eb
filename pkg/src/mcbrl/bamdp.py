"""Construction of the hypothesis-indexed mixed-observability model.

The learning task plus a sampled hypothesis set compiles into a discrete
model whose hidden component indexes the hypotheses: the hypothesis never
changes during execution (Kronecker delta on the hidden index), and the
belief over it is what the agent learns.
"""

from __future__ import annotations

import numpy as np

from .models import MomdpModel, assert_valid
from .sampling import HypothesisSet, TaskSkeleton


def build_bamdp(
    skeleton: TaskSkeleton, hyps: HypothesisSet, validate: bool = True
) -> MomdpModel:
    """Fully observable world: observed component = task state, hidden = hypothesis.

    T[(s,k), a, (s',k')] = T_k(s,a,s') * delta(k,k');  observations reveal s'
    exactly (Z = delta); the initial hidden belief is uniform over hypotheses.
    """
    if skeleton.is_partially_observable or hyps.observations is not None:
        raise ValueError(
            "skeleton has an observation model; use build_bapomdp for "
            "partially observable worlds"
        )
    ns, na = skeleton.num_states, skeleton.num_actions
    k = hyps.num_hypotheses
    if hyps.transitions.shape != (k, ns, na, ns):
        raise ValueError(
            f"hypothesis tensor shape {hyps.transitions.shape} does not match "
            f"skeleton ({ns} states, {na} actions)"
        )
    t = np.zeros((ns, k, na, ns, k))
    idx = np.arange(k)
    # advanced indexing pulls the matched hidden axes to the front: (K, S, A, S)
    t[:, idx, :, :, idx] = hyps.transitions
    z = np.zeros((ns, k, na, ns))
    z[np.arange(ns), :, :, np.arange(ns)] = 1.0
    r = skeleton.reward[:, None, :, :, None]
    model = MomdpModel(
        t,
        z,
        r,
        skeleton.discount,
        skeleton.start_state,
        np.full(k, 1.0 / k),
    )
    if validate:
        assert_valid(model)
    return model


def _shared_deterministic_observation(skeleton: TaskSkeleton, hyps: HypothesisSet):
    """If every hypothesis shares one deterministic s'-revealing Z, return it."""
    if hyps.observations is None:
        return None
    z0 = hyps.observations[0]
    if not np.allclose(hyps.observations, z0[None], atol=1e-12):
        return None
    if not np.all((z0 == 0.0) | (z0 == 1.0)):
        return None
    # each action's s' -> o map must be injective, else s' is not recoverable
    for a in range(z0.shape[1]):
        omap = np.argmax(z0[:, a, :], axis=1)
        if len(set(omap.tolist())) != z0.shape[0]:
            return None
    return z0


def build_bapomdp(
    skeleton: TaskSkeleton, hyps: HypothesisSet, validate: bool = True
) -> MomdpModel:
    """Partially observable world: hypotheses carry (T_k, Z_k) pairs.

    Any state variable deterministically recoverable from the observation
    stays observed. When the shared observation model pins down s' exactly,
    that is the task state (observed = s, hidden = k); otherwise nothing is
    recoverable and the hidden component is the joint pair, laid out as
    y = s * K + k. The initial hidden belief is (task initial belief) x
    uniform over hypotheses.
    """
    if not skeleton.is_partially_observable:
        raise ValueError("skeleton has no observation space; use build_bamdp")
    ns, na, no = skeleton.num_states, skeleton.num_actions, skeleton.num_observations
    k = hyps.num_hypotheses
    if hyps.observations is None or hyps.observations.shape != (k, ns, na, no):
        raise ValueError("hypothesis set lacks observation tensors of the right shape")
    b0 = skeleton.initial_belief
    if b0 is None:
        b0 = np.zeros(ns)
        b0[skeleton.start_state] = 1.0

    z_shared = _shared_deterministic_observation(skeleton, hyps)
    if z_shared is not None:
        t = np.zeros((ns, k, na, ns, k))
        idx = np.arange(k)
        t[:, idx, :, :, idx] = hyps.transitions
        z = np.broadcast_to(z_shared[:, None], (ns, k, na, no)).copy()
        r = skeleton.reward[:, None, :, :, None]
        model = MomdpModel(
            t, z, r, skeleton.discount, skeleton.start_state, np.full(k, 1.0 / k)
        )
        if validate:
            assert_valid(model)
        return model

    ny = ns * k
    t = np.zeros((1, ny, na, 1, ny))
    # y = s*K + k: view the hidden axes as (S, K) blocks
    tv = t.reshape(ns, k, na, ns, k)
    idx = np.arange(k)
    tv[:, idx, :, :, idx] = hyps.transitions
    z = np.zeros((1, ny, na, no))
    zv = z.reshape(ns, k, na, no)
    zv[:] = np.swapaxes(hyps.observations, 0, 1)
    r_pairs = np.broadcast_to(
        skeleton.reward[:, None, :, :, None], (ns, k, na, ns, k)
    ).reshape(1, ny, na, 1, ny)
    b_hidden = (b0[:, None] * np.full((ns, k), 1.0 / k)).reshape(ny)
    model = MomdpModel(t, z, np.ascontiguousarray(r_pairs), skeleton.discount, 0, b_hidden)
    if validate:
        assert_valid(model)
    return model


def split_hidden_marginals(hidden_belief, num_states: int, num_hypotheses: int):
    """Marginals (over task state, over hypothesis) of a joint y = s*K + k belief."""
    b = np.asarray(hidden_belief, dtype=np.float64).reshape(num_states, num_hypotheses)
    return b.sum(axis=1), b.sum(axis=0)
