"""Discrete MDP / POMDP / mixed-observability model types, validation, and belief filters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

ROW_SUM_TOL = 1e-9
BELIEF_SUM_TOL = 1e-10
PROB_TOL = 1e-12


class ModelValidationError(ValueError):
    """Raised when a model is required to be valid but is not."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ImpossibleEvidenceError(ValueError):
    """Observed evidence has zero likelihood under every state the belief supports.

    In hypothesis-indexed models this means all sampled hypotheses rule the
    evidence out, which the caller must see rather than a silent NaN.
    """


def _tensor(x, name, shape=None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if shape is not None and arr.shape != shape:
        raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DiscreteMdp:
    """Finite MDP with dense transition T[s,a,s'] and reward R[s,a,s'] tensors."""

    transition: np.ndarray
    reward: np.ndarray
    discount: float

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=np.float64)
        if t.ndim != 3 or t.shape[0] != t.shape[2]:
            raise ValueError(f"transition must be (S, A, S), got {t.shape}")
        object.__setattr__(self, "transition", _tensor(t, "transition"))
        object.__setattr__(
            self, "reward", _tensor(self.reward, "reward", t.shape)
        )
        object.__setattr__(self, "discount", float(self.discount))

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True)
class DiscretePomdp:
    """Finite POMDP: MDP plus observation tensor Z[s',a,o] and an initial belief."""

    transition: np.ndarray
    observation: np.ndarray
    reward: np.ndarray
    discount: float
    initial_belief: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=np.float64)
        if t.ndim != 3 or t.shape[0] != t.shape[2]:
            raise ValueError(f"transition must be (S, A, S), got {t.shape}")
        s, a = t.shape[0], t.shape[1]
        z = np.asarray(self.observation, dtype=np.float64)
        if z.ndim != 3 or z.shape[0] != s or z.shape[1] != a:
            raise ValueError(f"observation must be (S, A, O), got {z.shape}")
        object.__setattr__(self, "transition", _tensor(t, "transition"))
        object.__setattr__(self, "observation", _tensor(z, "observation"))
        object.__setattr__(self, "reward", _tensor(self.reward, "reward", t.shape))
        object.__setattr__(self, "discount", float(self.discount))
        object.__setattr__(
            self, "initial_belief", _tensor(self.initial_belief, "initial_belief", (s,))
        )

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def num_observations(self) -> int:
        return self.observation.shape[2]

    def as_mdp(self) -> DiscreteMdp:
        """Fully-observable relaxation: drop the observation model."""
        return DiscreteMdp(self.transition, self.reward, self.discount)


@dataclass(frozen=True)
class MomdpModel:
    """Mixed-observability POMDP over states (x, y): x observed, y hidden.

    transition:  T[x, y, a, x', y']
    observation: Z[x', y', a, o]   (indexed by the *next* state)
    reward:      R[x, y, a, x', y'], stored broadcastable to the full shape
                 (an (X, 1, A, X, 1) base is accepted and kept un-materialized)
    """

    transition: np.ndarray
    observation: np.ndarray
    reward: np.ndarray
    discount: float
    initial_observed: int
    initial_hidden_belief: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=np.float64)
        if t.ndim != 5 or t.shape[0] != t.shape[3] or t.shape[1] != t.shape[4]:
            raise ValueError(f"transition must be (X, Y, A, X, Y), got {t.shape}")
        x, y, a = t.shape[0], t.shape[1], t.shape[2]
        z = np.asarray(self.observation, dtype=np.float64)
        if z.ndim != 4 or z.shape[:3] != (x, y, a):
            raise ValueError(f"observation must be (X, Y, A, O), got {z.shape}")
        r_base = np.asarray(self.reward, dtype=np.float64).copy()
        r_base.flags.writeable = False
        try:
            r = np.broadcast_to(r_base, t.shape)
        except ValueError:
            raise ValueError(
                f"reward with shape {r_base.shape} does not broadcast to {t.shape}"
            ) from None
        object.__setattr__(self, "transition", _tensor(t, "transition"))
        object.__setattr__(self, "observation", _tensor(z, "observation"))
        object.__setattr__(self, "reward", r)
        object.__setattr__(self, "discount", float(self.discount))
        object.__setattr__(self, "initial_observed", int(self.initial_observed))
        object.__setattr__(
            self,
            "initial_hidden_belief",
            _tensor(self.initial_hidden_belief, "initial_hidden_belief", (y,)),
        )
        if not 0 <= self.initial_observed < x:
            raise ValueError(f"initial_observed {self.initial_observed} out of range")

    @property
    def num_observed(self) -> int:
        return self.transition.shape[0]

    @property
    def num_hidden(self) -> int:
        return self.transition.shape[1]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[2]

    @property
    def num_observations(self) -> int:
        return self.observation.shape[3]

    def flatten(self) -> DiscretePomdp:
        """Flatten (x, y) -> x*Y + y into an equivalent plain POMDP.

        The flattened observation space is the joint (x', o) -> x'*O + o, since
        the observed component is itself seen by the agent; with a Kronecker-
        delta observation model this collapses to the usual construction.
        """
        nx, ny, na = self.num_observed, self.num_hidden, self.num_actions
        no = self.num_observations
        n = nx * ny
        t = self.transition.reshape(n, na, n)
        r = np.ascontiguousarray(self.reward).reshape(n, na, n)
        z = np.zeros((n, na, nx * no))
        zsrc = self.observation.reshape(n, na, no)
        for xp in range(nx):
            rows = slice(xp * ny, (xp + 1) * ny)
            z[rows, :, xp * no : (xp + 1) * no] = zsrc[rows]
        b0 = np.zeros(n)
        b0[self.initial_observed * ny : (self.initial_observed + 1) * ny] = (
            self.initial_hidden_belief
        )
        return DiscretePomdp(t, z, r, self.discount, b0)


Model = Union[DiscreteMdp, DiscretePomdp, MomdpModel]


@dataclass(frozen=True)
class HiddenBelief:
    """Normalized probability vector over the hidden component."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1:
            raise ValueError("belief must be a vector")
        if np.any(p < -PROB_TOL):
            raise ValueError("belief has negative entries")
        if abs(p.sum() - 1.0) > BELIEF_SUM_TOL:
            raise ValueError(f"belief sums to {p.sum()!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, n: int) -> "HiddenBelief":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def from_unnormalized(cls, weights) -> "HiddenBelief":
        w = np.asarray(weights, dtype=np.float64)
        total = w.sum()
        if total <= 0:
            raise ImpossibleEvidenceError("cannot normalize zero-mass belief")
        return cls(w / total)

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())

    def __array__(self, dtype=None):
        return np.asarray(self.probs, dtype=dtype)

    def __len__(self):
        return self.probs.shape[0]


def _check_rows(arr, axis_sum, tol, namer, violations):
    sums = arr.sum(axis=axis_sum)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    for idx in bad[:20]:
        violations.append(namer(tuple(int(i) for i in idx), float(sums[tuple(idx)])))
    if len(bad) > 20:
        violations.append(f"... and {len(bad) - 20} more non-stochastic rows")


def validate_model(model: Model) -> list[str]:
    """Check all type invariants; returns a list of violations (empty means ok)."""
    v: list[str] = []
    if isinstance(model, MomdpModel):
        t, z, r = model.transition, model.observation, model.reward
        if np.any(t < -PROB_TOL) or np.any(t > 1 + PROB_TOL):
            v.append("transition has entries outside [0, 1]")
        _check_rows(
            t.reshape(t.shape[0], t.shape[1], t.shape[2], -1),
            3,
            ROW_SUM_TOL,
            lambda i, s: f"transition row (x={i[0]}, y={i[1]}, a={i[2]}) sums to {s:.12g}",
            v,
        )
        if np.any(z < -PROB_TOL) or np.any(z > 1 + PROB_TOL):
            v.append("observation has entries outside [0, 1]")
        _check_rows(
            z,
            3,
            ROW_SUM_TOL,
            lambda i, s: f"observation row (x'={i[0]}, y'={i[1]}, a={i[2]}) sums to {s:.12g}",
            v,
        )
        base = r.base if r.base is not None else r
        if not np.all(np.isfinite(base)):
            v.append("reward has non-finite entries")
        b = model.initial_hidden_belief
        if np.any(b < -PROB_TOL):
            v.append("initial_hidden_belief has negative entries")
        if abs(b.sum() - 1.0) > ROW_SUM_TOL:
            v.append(f"initial_hidden_belief sums to {b.sum():.12g}")
    else:
        t, r = model.transition, model.reward
        if np.any(t < -PROB_TOL) or np.any(t > 1 + PROB_TOL):
            v.append("transition has entries outside [0, 1]")
        _check_rows(
            t,
            2,
            ROW_SUM_TOL,
            lambda i, s: f"transition row (s={i[0]}, a={i[1]}) sums to {s:.12g}",
            v,
        )
        if not np.all(np.isfinite(r)):
            v.append("reward has non-finite entries")
        if isinstance(model, DiscretePomdp):
            z = model.observation
            if np.any(z < -PROB_TOL) or np.any(z > 1 + PROB_TOL):
                v.append("observation has entries outside [0, 1]")
            _check_rows(
                z,
                2,
                ROW_SUM_TOL,
                lambda i, s: f"observation row (s'={i[0]}, a={i[1]}) sums to {s:.12g}",
                v,
            )
            b = model.initial_belief
            if np.any(b < -PROB_TOL):
                v.append("initial_belief has negative entries")
            if abs(b.sum() - 1.0) > ROW_SUM_TOL:
                v.append(f"initial_belief sums to {b.sum():.12g}")
    if not 0.0 < model.discount < 1.0:
        v.append(f"discount {model.discount} not in (0, 1)")
    return v


def assert_valid(model: Model) -> None:
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)


def belief_update_flat(
    pomdp: DiscretePomdp, belief, action: int, observation: int
) -> np.ndarray:
    """Bayes filter step: b'(s') proportional to Z[s',a,o] * sum_s T[s,a,s'] b(s)."""
    b = np.asarray(belief, dtype=np.float64)
    pred = b @ pomdp.transition[:, action, :]
    post = pomdp.observation[:, action, observation] * pred
    total = post.sum()
    if total <= 0.0:
        raise ImpossibleEvidenceError(
            f"observation {observation} after action {action} has zero likelihood "
            "under the current belief"
        )
    return post / total


def belief_update_momdp(
    model: MomdpModel,
    x: int,
    hidden_belief,
    action: int,
    x_next: int,
    observation: int,
) -> HiddenBelief:
    """Factored filter over the hidden component given the seen (x', o) pair.

    b'(y') proportional to Z[(x',y'),a,o] * sum_y T[(x,y),a,(x',y')] b(y);
    equals the Y-marginal of the flat filter on the flattened model.
    """
    b = np.asarray(hidden_belief, dtype=np.float64)
    pred = b @ model.transition[x, :, action, x_next, :]
    post = model.observation[x_next, :, action, observation] * pred
    total = post.sum()
    if total <= 0.0:
        raise ImpossibleEvidenceError(
            f"evidence (x'={x_next}, o={observation}) after action {action} has "
            "zero likelihood under every supported hidden state"
        )
    return HiddenBelief(post / total)
