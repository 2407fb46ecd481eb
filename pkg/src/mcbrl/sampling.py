"""Task skeletons with declared unknowns, priors over them, and hypothesis sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .models import ROW_SUM_TOL, DiscreteMdp, DiscretePomdp


class PriorSkeletonMismatchError(ValueError):
    """The prior does not cover (or over-covers) the skeleton's declared unknowns."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class TaskSkeleton:
    """A base task with some transition/observation rows or named scalars unknown.

    Unknowns are whole rows — T[s,a,:] or Z[s',a,:] — or named scalar
    parameters that `apply_params` maps into full tensors. Known rows must be
    stochastic. `reward` and `discount` are always known.
    """

    num_states: int
    num_actions: int
    reward: np.ndarray
    discount: float
    transition: Optional[np.ndarray] = None
    unknown_transition_rows: tuple = ()
    num_observations: Optional[int] = None
    observation: Optional[np.ndarray] = None
    unknown_observation_rows: tuple = ()
    param_names: tuple = ()
    apply_params: Optional[Callable[[Mapping[str, float]], tuple]] = None
    start_state: int = 0
    initial_belief: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "reward", np.asarray(self.reward, dtype=np.float64))
        if self.transition is not None:
            object.__setattr__(
                self, "transition", np.asarray(self.transition, dtype=np.float64)
            )
        if self.observation is not None:
            object.__setattr__(
                self, "observation", np.asarray(self.observation, dtype=np.float64)
            )
        if self.initial_belief is not None:
            object.__setattr__(
                self, "initial_belief", np.asarray(self.initial_belief, dtype=np.float64)
            )
        object.__setattr__(
            self, "unknown_transition_rows", tuple(map(tuple, self.unknown_transition_rows))
        )
        object.__setattr__(
            self, "unknown_observation_rows", tuple(map(tuple, self.unknown_observation_rows))
        )
        object.__setattr__(self, "param_names", tuple(self.param_names))
        if self.param_names and self.apply_params is None:
            raise ValueError("param_names declared without an apply_params mapping")
        if self.param_names and (self.unknown_transition_rows or self.unknown_observation_rows):
            raise ValueError("mix of named parameters and unknown rows is not supported")
        if self.unknown_transition_rows and self.transition is None:
            raise ValueError("unknown transition rows need a baseline transition tensor")
        if self.unknown_observation_rows and self.observation is None:
            raise ValueError("unknown observation rows need a baseline observation tensor")

    @property
    def is_partially_observable(self) -> bool:
        return self.num_observations is not None

    @property
    def num_free_parameters(self) -> int:
        """Free dimensions of the unknown part (rows contribute dim-1 each)."""
        n = len(self.param_names)
        n += len(self.unknown_transition_rows) * (self.num_states - 1)
        if self.num_observations is not None:
            n += len(self.unknown_observation_rows) * (self.num_observations - 1)
        return n

    def complete(self, draw: "HypothesisDraw") -> tuple[np.ndarray, Optional[np.ndarray]]:
        """Fill the unknowns from one sampled draw; returns full (T, Z or None)."""
        if self.param_names:
            t, z = self.apply_params(draw.params)
            t = np.asarray(t, dtype=np.float64)
            z = None if z is None else np.asarray(z, dtype=np.float64)
        else:
            t = self.transition.copy()
            for (s, a), row in draw.t_rows.items():
                t[s, a, :] = row
            z = None if self.observation is None else self.observation.copy()
            for (s, a), row in draw.z_rows.items():
                z[s, a, :] = row
        return t, z


@dataclass(frozen=True)
class HypothesisDraw:
    """One sampled assignment of all unknowns."""

    params: dict = field(default_factory=dict)
    t_rows: dict = field(default_factory=dict)
    z_rows: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "params": {k: float(v) for k, v in self.params.items()},
            "t_rows": {f"{s},{a}": list(map(float, r)) for (s, a), r in self.t_rows.items()},
            "z_rows": {f"{s},{a}": list(map(float, r)) for (s, a), r in self.z_rows.items()},
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "HypothesisDraw":
        def keyed(m):
            out = {}
            for k, row in m.items():
                s, a = k.split(",")
                out[(int(s), int(a))] = np.asarray(row, dtype=np.float64)
            return out

        return cls(dict(d.get("params", {})), keyed(d.get("t_rows", {})), keyed(d.get("z_rows", {})))


class Prior:
    """Samples a HypothesisDraw covering exactly the skeleton's unknowns."""

    def sample_draw(self, skeleton: TaskSkeleton, rng: np.random.Generator) -> HypothesisDraw:
        raise NotImplementedError

    def _require_named(self, skeleton: TaskSkeleton):
        if not skeleton.param_names:
            raise PriorSkeletonMismatchError(
                f"{type(self).__name__} needs named parameters, but the skeleton "
                "declares unknown rows"
            )


@dataclass(frozen=True)
class UniformBox(Prior):
    """Independent Uniform[lo, hi] per named parameter."""

    lo: float = 0.0
    hi: float = 1.0
    bounds: Optional[Mapping[str, tuple]] = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("lo > hi")
        if self.bounds:
            for name, (lo, hi) in self.bounds.items():
                if lo > hi:
                    raise ValueError(f"lo > hi for parameter {name}")

    def sample_draw(self, skeleton, rng):
        self._require_named(skeleton)
        params = {}
        for name in skeleton.param_names:
            lo, hi = (self.bounds or {}).get(name, (self.lo, self.hi))
            params[name] = float(rng.uniform(lo, hi))
        return HypothesisDraw(params=params)


@dataclass(frozen=True)
class BetaScalar(Prior):
    """Independent Beta(alpha, beta) per named parameter."""

    alpha: float = 1.0
    beta: float = 1.0
    per_param: Optional[Mapping[str, tuple]] = None

    def __post_init__(self):
        pairs = list((self.per_param or {}).values()) + [(self.alpha, self.beta)]
        if any(a <= 0 or b <= 0 for a, b in pairs):
            raise ValueError("Beta concentrations must be positive")

    def sample_draw(self, skeleton, rng):
        self._require_named(skeleton)
        params = {}
        for name in skeleton.param_names:
            a, b = (self.per_param or {}).get(name, (self.alpha, self.beta))
            params[name] = float(rng.beta(a, b))
        return HypothesisDraw(params=params)


@dataclass(frozen=True)
class DirichletRows(Prior):
    """Independent Dirichlet draw per unknown row; flat (all-ones) by default."""

    t_concentration: Optional[Mapping[tuple, np.ndarray]] = None
    z_concentration: Optional[Mapping[tuple, np.ndarray]] = None

    def __post_init__(self):
        for m in (self.t_concentration, self.z_concentration):
            if m:
                for key, c in m.items():
                    if np.any(np.asarray(c, dtype=np.float64) <= 0):
                        raise ValueError(f"non-positive concentration for row {key}")

    def sample_draw(self, skeleton, rng):
        if skeleton.param_names:
            raise PriorSkeletonMismatchError(
                "DirichletRows needs unknown rows, but the skeleton declares "
                "named parameters"
            )
        t_rows = {}
        for key in skeleton.unknown_transition_rows:
            c = (self.t_concentration or {}).get(key, np.ones(skeleton.num_states))
            t_rows[key] = rng.dirichlet(np.asarray(c, dtype=np.float64))
        z_rows = {}
        for key in skeleton.unknown_observation_rows:
            c = (self.z_concentration or {}).get(key, np.ones(skeleton.num_observations))
            z_rows[key] = rng.dirichlet(np.asarray(c, dtype=np.float64))
        return HypothesisDraw(t_rows=t_rows, z_rows=z_rows)


@dataclass(frozen=True)
class SamplerHook(Prior):
    """Escape hatch: any deterministic function of the RNG stream."""

    fn: Callable[[TaskSkeleton, np.random.Generator], HypothesisDraw]

    def sample_draw(self, skeleton, rng):
        return self.fn(skeleton, rng)


@dataclass(frozen=True)
class HypothesisSet:
    """K complete parameter hypotheses, each a full stochastic model of the task."""

    transitions: np.ndarray  # (K, S, A, S)
    observations: Optional[np.ndarray]  # (K, S, A, O) or None
    reward: np.ndarray
    discount: float
    draws: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "transitions", np.asarray(self.transitions, dtype=np.float64)
        )
        if self.observations is not None:
            object.__setattr__(
                self, "observations", np.asarray(self.observations, dtype=np.float64)
            )
        object.__setattr__(self, "reward", np.asarray(self.reward, dtype=np.float64))
        object.__setattr__(self, "draws", tuple(self.draws))

    @property
    def num_hypotheses(self) -> int:
        return self.transitions.shape[0]

    def hypothesis_model(self, k: int):
        """The k-th hypothesis as a standalone model (for inspection/replay)."""
        if self.observations is None:
            return DiscreteMdp(self.transitions[k], self.reward, self.discount)
        s = self.transitions.shape[1]
        return DiscretePomdp(
            self.transitions[k],
            self.observations[k],
            self.reward,
            self.discount,
            np.full(s, 1.0 / s),
        )


def _check_stochastic(arr, what, k):
    sums = arr.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > 1e-6) or np.any(arr < -1e-12):
        bad = np.argwhere(np.abs(sums - 1.0) > 1e-6)
        where = tuple(int(i) for i in bad[0]) if len(bad) else "negative entry"
        raise PriorSkeletonMismatchError(
            f"hypothesis {k} completed to a non-stochastic {what} at {where}"
        )


def sample_hypotheses(
    skeleton: TaskSkeleton, prior: Prior, num_hypotheses: int, rng
) -> HypothesisSet:
    """Draw K i.i.d. hypotheses from the prior and complete the skeleton with each.

    Deterministic given the RNG seed. Every hypothesis is checked to form a
    valid stochastic model.
    """
    if num_hypotheses < 1:
        raise ValueError("need at least one hypothesis")
    gen = _rng(rng)
    ts, zs, draws = [], [], []
    for k in range(num_hypotheses):
        draw = prior.sample_draw(skeleton, gen)
        t, z = skeleton.complete(draw)
        _check_stochastic(t, "transition", k)
        if z is not None:
            _check_stochastic(z, "observation", k)
        # renormalize away float round-off so built models meet the 1e-9 invariant
        t = t / t.sum(axis=-1, keepdims=True)
        if z is not None:
            z = z / z.sum(axis=-1, keepdims=True)
        ts.append(t)
        zs.append(z)
        draws.append(draw)
    observations = None
    if skeleton.is_partially_observable:
        if any(z is None for z in zs):
            raise PriorSkeletonMismatchError(
                "partially observable skeleton produced no observation tensor"
            )
        observations = np.stack(zs)
    return HypothesisSet(
        np.stack(ts), observations, skeleton.reward, skeleton.discount, tuple(draws)
    )


def insert_true_hypothesis(
    hyps: HypothesisSet, true_transition, true_observation=None
) -> HypothesisSet:
    """Replace hypothesis 0 with the true parameters (diagnostic MC-BRL+ mode)."""
    ts = hyps.transitions.copy()
    ts[0] = np.asarray(true_transition, dtype=np.float64)
    zs = None
    if hyps.observations is not None:
        zs = hyps.observations.copy()
        if true_observation is not None:
            zs[0] = np.asarray(true_observation, dtype=np.float64)
    return HypothesisSet(ts, zs, hyps.reward, hyps.discount, hyps.draws)
