"""Anytime point-based solver for mixed-observability models.

Maintains an alpha-vector lower bound and a sawtooth point-set upper bound,
explores beliefs guided by the bound gap, and reports the certified gap at
the initial belief. Alpha vectors live in the hidden dimension only, one set
per observed state.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models import ImpossibleEvidenceError, MomdpModel

_EPS = 1e-12
_PRUNE_SLACK = 1e-9


@dataclass(frozen=True)
class AlphaVector:
    """Linear value function over hidden beliefs at one observed state."""

    observed_state: int
    action: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=np.float64)
        )


@dataclass
class SolveConfig:
    """Stopping criteria and exploration seed; at least one criterion required."""

    target_gap: Optional[float] = None
    time_budget: Optional[float] = None
    max_backups: Optional[int] = None
    seed: int = 0
    prune_interval: int = 100
    tighten_corners: bool = True  # one-step-lookahead tightening of the upper corners

    def __post_init__(self):
        if self.target_gap is None and self.time_budget is None and self.max_backups is None:
            raise ValueError("set at least one of target_gap, time_budget, max_backups")


class MomdpDynamics:
    """Precomputed contraction forms for one model.

    When the hidden component never transitions across y != y' (every
    hypothesis-indexed model built from a fully observable task has this
    shape), contractions run in the exact per-y factorized form; otherwise a
    dense transposed copy (small models) or strided slices are used.
    """

    def __init__(self, model: MomdpModel):
        self.model = model
        t, z, r = model.transition, model.observation, model.reward
        self.gamma = model.discount
        nx, ny, na, no = (
            model.num_observed,
            model.num_hidden,
            model.num_actions,
            model.num_observations,
        )
        self.shape = (nx, ny, na, no)
        r_base = r.base if r.base is not None else r
        self.r_max = float(np.max(np.abs(r_base)))
        self.v_min = float(np.min(r_base)) / (1.0 - self.gamma)
        self.v_max = float(np.max(r_base)) / (1.0 - self.gamma)
        self.expected_reward = np.einsum("xyauv,xyauv->xya", t, r)
        self.z_t = np.ascontiguousarray(z.transpose(2, 0, 3, 1))  # (A, X', O, Y')
        self.theta = None
        self.t_c = None
        diag = np.diagonal(t, axis1=1, axis2=4)  # (X, A, X', Y)
        if np.count_nonzero(t) == np.count_nonzero(diag):
            self.theta = np.ascontiguousarray(diag)
        elif t.size <= 40_000_000:
            self.t_c = np.ascontiguousarray(t.transpose(2, 0, 3, 1, 4))  # (A, X, X', Y, Y')

    @property
    def is_hidden_diagonal(self) -> bool:
        return self.theta is not None

    @property
    def value_span(self) -> float:
        return self.v_max - self.v_min

    def _weights(self, x: int, b: np.ndarray, a: int) -> np.ndarray:
        """Unnormalized next-state mass w[x', y'] = sum_y T[x,y,a,x',y'] b(y)."""
        if self.theta is not None:
            return self.theta[x, a] * b[None, :]
        if self.t_c is not None:
            return np.tensordot(b, self.t_c[a, x], axes=([0], [1]))
        return np.einsum("y,yuv->uv", b, self.model.transition[x, :, a])

    def transition_terms(self, x: int, b: np.ndarray, a: int):
        """Per (x', o): unnormalized child beliefs tau (X,O,Y') and their mass p (X,O)."""
        w = self._weights(x, b, a)
        tau = self.z_t[a] * w[:, None, :]
        return tau, tau.sum(axis=2)

    def belief_update(self, x: int, b, a: int, x_next: int, o: int) -> np.ndarray:
        """Same filter as the model-level factored update, using precomputed forms."""
        b = np.asarray(b, dtype=np.float64)
        if self.theta is not None:
            w = self.theta[x, a, x_next] * b
        else:
            w = b @ self.model.transition[x, :, a, x_next, :]
        post = self.z_t[a, x_next, o] * w
        total = post.sum()
        if total <= 0.0:
            raise ImpossibleEvidenceError(
                f"evidence (x'={x_next}, o={o}) after action {a} has zero likelihood"
            )
        return post / total

    def expected_reward_at(self, x: int, b: np.ndarray, a: int) -> float:
        return float(self.expected_reward[x, :, a] @ b)

    def backup_alpha(self, x: int, b: np.ndarray, lower: "LowerBound") -> AlphaVector:
        """One-step Bellman backup of the lower bound at (x, b)."""
        nx, ny, na, no = self.shape
        best_val, best_a, best_vec = -np.inf, 0, None
        for a in range(na):
            tau, _ = self.transition_terms(x, b, a)
            chosen = np.empty((nx, no, ny))
            for xp in range(nx):
                chosen[xp] = lower.best_values_many(xp, tau[xp])
            g = np.einsum("xoy,xoy->xy", self.z_t[a], chosen)
            if self.theta is not None:
                future = (self.theta[x, a] * g).sum(axis=0)
            elif self.t_c is not None:
                future = np.einsum("uyv,uv->y", self.t_c[a, x], g)
            else:
                future = np.einsum("yuv,uv->y", self.model.transition[x, :, a], g)
            vec = self.expected_reward[x, :, a] + self.gamma * future
            val = float(vec @ b)
            if val > best_val:
                best_val, best_a, best_vec = val, a, vec
        return AlphaVector(x, best_a, best_vec)

    def q_upper(self, x: int, b: np.ndarray, upper: "UpperBound"):
        """Upper-bound Q values for all actions, plus the child terms per action."""
        na = self.shape[2]
        qs = np.empty(na)
        terms = []
        for a in range(na):
            tau, p = self.transition_terms(x, b, a)
            future = 0.0
            for xp in range(p.shape[0]):
                live = np.flatnonzero(p[xp] > 0.0)
                if live.size == 0:
                    continue
                children = tau[xp, live] / p[xp, live][:, None]
                vals = upper.value_many(xp, children)
                future += float(p[xp, live] @ vals)
            qs[a] = self.expected_reward_at(x, b, a) + self.gamma * future
            terms.append((tau, p))
        return qs, terms

    def blind_values(self) -> np.ndarray:
        """Exact value of each fixed-action-forever policy: (A, X, Y)."""
        nx, ny, na, _ = self.shape
        out = np.empty((na, nx, ny))
        if self.theta is not None:
            eye = np.eye(nx)
            for a in range(na):
                mats = eye[None] - self.gamma * self.theta[:, a].transpose(2, 0, 1)
                rhs = self.expected_reward[:, :, a].T
                out[a] = np.linalg.solve(mats, rhs[..., None])[..., 0].T
            return out
        n = nx * ny
        t_flat = self.model.transition.reshape(n, na, n)
        er_flat = self.expected_reward.reshape(n, na)
        if n <= 3000:
            eye = np.eye(n)
            for a in range(na):
                v = np.linalg.solve(eye - self.gamma * t_flat[:, a, :], er_flat[:, a])
                out[a] = v.reshape(nx, ny)
        else:
            # monotone iteration from below stays a valid lower bound at any cutoff
            for a in range(na):
                v = np.full(n, self.v_min)
                for _ in range(100_000):
                    v_next = er_flat[:, a] + self.gamma * (t_flat[:, a, :] @ v)
                    if np.max(np.abs(v_next - v)) <= 1e-9 * max(1.0, self.r_max):
                        v = v_next
                        break
                    v = v_next
                out[a] = v.reshape(nx, ny)
        return out

    def relaxation_values(self, tol: float = 1e-8) -> np.ndarray:
        """Fully-observable relaxation V*(x, y); iterated from above, so any
        cutoff still dominates the optimum."""
        nx, ny, na, _ = self.shape
        scale = max(1.0, self.r_max)
        if self.theta is not None:
            v = np.full((nx, ny), self.v_max)
            for _ in range(1_000_000):
                q = self.expected_reward + self.gamma * np.einsum(
                    "xauy,uy->xya", self.theta, v
                )
                v_next = q.max(axis=2)
                if np.max(np.abs(v_next - v)) <= tol * scale:
                    return v_next
                v = v_next
            raise RuntimeError("relaxation value iteration failed to converge")
        n = nx * ny
        t_flat = self.model.transition.reshape(n, na, n)
        er_flat = self.expected_reward.reshape(n, na)
        v = np.full(n, self.v_max)
        for _ in range(1_000_000):
            q = er_flat + self.gamma * np.tensordot(t_flat, v, axes=([2], [0]))
            v_next = q.max(axis=1)
            if np.max(np.abs(v_next - v)) <= tol * scale:
                return v_next.reshape(nx, ny)
            v = v_next
        raise RuntimeError("relaxation value iteration failed to converge")

    def informed_corner_values(
        self, start: np.ndarray, tol: float = 1e-8, max_iters: int = 2000
    ) -> np.ndarray:
        """One-observation-lookahead tightening of admissible corner values.

        Iterates Q_a(s) = ER(s,a) + gamma * sum_(x',o) max_a' sum_y' T Z Q_a'
        downward from the relaxation values; every iterate stays an upper
        bound on the optimum, so any cutoff is admissible. Mirrors the fast
        informed bound; only worthwhile when observations are noisy (for
        delta observations it coincides with the relaxation).
        """
        nx, ny, na, no = self.shape
        if self.theta is not None:
            return start  # observations reveal x'; lookahead adds nothing
        n = nx * ny
        if n > 3000 or self.t_c is None or na * no * nx * n * ny > 60_000_000:
            return start
        # m[a, (x,y), (x',o), y'] contributions: T[x,y,a,x',y'] * Z[x',y',a,o]
        t = self.model.transition.reshape(n, na, nx, ny)
        mats = np.empty((na, no * nx, n, ny))
        for a in range(na):
            for xp in range(nx):
                for o in range(no):
                    mats[a, xp * no + o] = t[:, a, xp, :] * self.z_t[a, xp, o][None, :]
        q = np.tile(start.reshape(1, n), (na, 1))
        scale = max(1.0, self.r_max)
        er = self.expected_reward.reshape(n, na).T
        for _ in range(max_iters):
            # best successor value per (x', o) pair, maximized over next action
            nxt = np.full((na, no * nx, n), -np.inf)
            for ap in range(na):
                qa = q[ap].reshape(nx, ny)
                for a in range(na):
                    for xp in range(nx):
                        block = mats[a, xp * no : (xp + 1) * no] @ qa[xp]
                        nxt[a, xp * no : (xp + 1) * no] = np.maximum(
                            nxt[a, xp * no : (xp + 1) * no], block
                        )
            q_new = er + self.gamma * nxt.sum(axis=1)
            if np.max(np.abs(q_new - q)) <= tol * scale:
                q = q_new
                break
            q = q_new
        return q.max(axis=0).reshape(nx, ny)


class LowerBound:
    """Per observed state, a set of alpha vectors; value = max inner product."""

    def __init__(self, num_observed: int, num_hidden: int):
        self.num_observed = num_observed
        self.num_hidden = num_hidden
        self._mats = [np.empty((8, num_hidden)) for _ in range(num_observed)]
        self._actions = [np.empty(8, dtype=np.intp) for _ in range(num_observed)]
        self._ids = [np.empty(8, dtype=np.intp) for _ in range(num_observed)]
        self._n = [0] * num_observed
        self._next_id = 0

    def _grow(self, x: int):
        for name in ("_mats", "_actions", "_ids"):
            buf = getattr(self, name)[x]
            bigger = np.empty((buf.shape[0] * 2,) + buf.shape[1:], dtype=buf.dtype)
            bigger[: buf.shape[0]] = buf
            getattr(self, name)[x] = bigger

    def add(self, alpha: AlphaVector) -> bool:
        """Insert unless pointwise-dominated by an existing vector."""
        x, n = alpha.observed_state, self._n[alpha.observed_state]
        mat = self._mats[x][:n]
        if n and bool(np.any(np.all(mat >= alpha.values - _EPS, axis=1))):
            return False
        if n == self._mats[x].shape[0]:
            self._grow(x)
        self._mats[x][n] = alpha.values
        self._actions[x][n] = alpha.action
        self._ids[x][n] = self._next_id
        self._next_id += 1
        self._n[x] = n + 1
        return True

    def value(self, x: int, b: np.ndarray) -> float:
        n = self._n[x]
        return float(np.max(self._mats[x][:n] @ b))

    def value_many(self, x: int, beliefs: np.ndarray) -> np.ndarray:
        n = self._n[x]
        return (self._mats[x][:n] @ beliefs.T).max(axis=0)

    def best_values_many(self, x: int, weights: np.ndarray) -> np.ndarray:
        """Per weight row, the alpha maximizing the inner product: (M, Y)."""
        n = self._n[x]
        scores = self._mats[x][:n] @ weights.T  # (N, M)
        return self._mats[x][np.argmax(scores, axis=0)]

    def best(self, x: int, b: np.ndarray) -> tuple[int, int]:
        """(action, row index) of the maximizing alpha; ties break to the lowest
        action index, then the lowest insertion index."""
        n = self._n[x]
        vals = self._mats[x][:n] @ b
        top = np.flatnonzero(vals == vals.max())
        order = np.lexsort((self._ids[x][top], self._actions[x][top]))
        row = int(top[order[0]])
        return int(self._actions[x][row]), row

    def vectors(self, x: int) -> list[AlphaVector]:
        n = self._n[x]
        return [
            AlphaVector(x, int(self._actions[x][i]), self._mats[x][i].copy())
            for i in range(n)
        ]

    def total_vectors(self) -> int:
        return sum(self._n)

    def prune(self):
        """Drop vectors pointwise-dominated by another (earliest id wins ties)."""
        for x in range(self.num_observed):
            n = self._n[x]
            if n < 2:
                continue
            mat = self._mats[x][:n]
            keep = np.ones(n, dtype=bool)
            order = np.argsort(self._ids[x][:n])
            for i in order:
                if not keep[i]:
                    continue
                dominated = np.all(mat <= mat[i] + _EPS, axis=1) & keep
                dominated[i] = False
                exact_dup = np.all(mat == mat[i], axis=1)
                dominated &= ~exact_dup | (self._ids[x][:n] > self._ids[x][i])
                keep &= ~dominated
            if keep.all():
                continue
            m = int(keep.sum())
            self._mats[x][:m] = mat[keep]
            self._actions[x][:m] = self._actions[x][:n][keep]
            self._ids[x][:m] = self._ids[x][:n][keep]
            self._n[x] = m


class UpperBound:
    """Corner values plus belief points per observed state; sawtooth interpolation."""

    def __init__(self, corners: np.ndarray):
        self.corners = np.asarray(corners, dtype=np.float64).copy()
        nx, ny = self.corners.shape
        self._beliefs = [np.empty((8, ny)) for _ in range(nx)]
        self._vals = [np.empty(8) for _ in range(nx)]
        self._corner_dots = [np.empty(8) for _ in range(nx)]
        self._n = [0] * nx

    def _grow(self, x: int):
        for name in ("_beliefs", "_vals", "_corner_dots"):
            buf = getattr(self, name)[x]
            bigger = np.empty((buf.shape[0] * 2,) + buf.shape[1:], dtype=buf.dtype)
            bigger[: buf.shape[0]] = buf
            getattr(self, name)[x] = bigger

    def set_corners(self, corners: np.ndarray):
        self.corners = np.asarray(corners, dtype=np.float64).copy()
        for x in range(self.corners.shape[0]):
            n = self._n[x]
            if n:
                self._corner_dots[x][:n] = self._beliefs[x][:n] @ self.corners[x]

    def value(self, x: int, b: np.ndarray) -> float:
        return float(self.value_many(x, b[None, :])[0])

    def value_many(self, x: int, beliefs: np.ndarray) -> np.ndarray:
        """Sawtooth upper values for a batch of beliefs: (M,)."""
        corner_vals = beliefs @ self.corners[x]
        n = self._n[x]
        if n == 0:
            return corner_vals
        out = corner_vals.copy()
        all_pts = self._beliefs[x]
        vals, cd = self._vals[x], self._corner_dots[x]
        m, y = beliefs.shape
        chunk = max(1, 2_000_000 // max(1, m * y))
        for lo in range(0, n, min(chunk, n)):
            hi = min(lo + chunk, n)
            pts = all_pts[lo:hi]  # (p, Y)
            ratios = np.full((hi - lo, m, y), np.inf)
            np.divide(
                beliefs[None, :, :],
                pts[:, None, :],
                out=ratios,
                where=pts[:, None, :] > _EPS,
            )
            r = np.clip(ratios.min(axis=2), 0.0, 1.0)  # (p, M)
            saw = corner_vals[None, :] + r * (vals[lo:hi] - cd[lo:hi])[:, None]
            np.minimum(out, saw.min(axis=0), out=out)
        return out

    def add_point(self, x: int, b: np.ndarray, value: float):
        corner_at_b = float(self.corners[x] @ b)
        value = min(value, corner_at_b)
        top = int(np.argmax(b))
        if b[top] == 1.0:  # exact corner: tighten the corner value itself
            if value < self.corners[x, top]:
                self.corners[x, top] = value
                n = self._n[x]
                if n:
                    self._corner_dots[x][:n] = self._beliefs[x][:n] @ self.corners[x]
            return
        n = self._n[x]
        if n:
            close = np.max(np.abs(self._beliefs[x][:n] - b[None, :]), axis=1) < 1e-12
            hit = np.flatnonzero(close)
            if hit.size:
                i = int(hit[0])
                self._vals[x][i] = min(self._vals[x][i], value)
                return
        if n == self._beliefs[x].shape[0]:
            self._grow(x)
        self._beliefs[x][n] = b
        self._vals[x][n] = value
        self._corner_dots[x][n] = float(b @ self.corners[x])
        self._n[x] = n + 1

    def num_points(self) -> int:
        return sum(self._n)

    def points(self, x: int):
        n = self._n[x]
        return self._beliefs[x][:n].copy(), self._vals[x][:n].copy()

    def prune(self):
        """Drop points that the remaining set already covers at their own belief
        (within 1e-9, so the bound rises by at most that much)."""
        for x in range(self.corners.shape[0]):
            n = self._n[x]
            if n < 2:
                continue
            keep = np.ones(n, dtype=bool)
            for i in range(n):
                keep[i] = False
                others = np.flatnonzero(keep)
                b_i, v_i = self._beliefs[x][i], self._vals[x][i]
                best = self._corner_dots[x][i]
                if others.size:
                    pts = self._beliefs[x][others]
                    ratios = np.full(pts.shape, np.inf)
                    np.divide(b_i[None, :], pts, out=ratios, where=pts > _EPS)
                    r = np.clip(ratios.min(axis=1), 0.0, 1.0)
                    saw = self._corner_dots[x][i] + r * (
                        self._vals[x][others] - self._corner_dots[x][others]
                    )
                    best = min(best, float(saw.min()))
                if best > v_i + _PRUNE_SLACK:
                    keep[i] = True
            m = int(keep.sum())
            if m == n:
                continue
            self._beliefs[x][:m] = self._beliefs[x][:n][keep]
            self._vals[x][:m] = self._vals[x][:n][keep]
            self._corner_dots[x][:m] = self._corner_dots[x][:n][keep]
            self._n[x] = m


@dataclass
class SolveResult:
    """Certified bounds and the gap at the initial belief."""

    lower: LowerBound
    upper: Optional[UpperBound]
    delta: float
    backup_count: int
    wall_time: float


def initialize_bounds(
    model: MomdpModel,
    dynamics: Optional[MomdpDynamics] = None,
    tighten_corners: bool = False,
) -> tuple[LowerBound, UpperBound]:
    """Blind-policy alpha vectors below, fully-observable relaxation corners above."""
    dyn = dynamics or MomdpDynamics(model)
    lower = LowerBound(model.num_observed, model.num_hidden)
    blind = dyn.blind_values()
    for a in range(model.num_actions):
        for x in range(model.num_observed):
            lower.add(AlphaVector(x, a, blind[a, x]))
    corners = dyn.relaxation_values()
    if tighten_corners:
        corners = dyn.informed_corner_values(corners)
    upper = UpperBound(corners)
    return lower, upper


def point_backup(
    model: MomdpModel,
    lower: LowerBound,
    x: int,
    hidden_belief,
    dynamics: Optional[MomdpDynamics] = None,
) -> AlphaVector:
    """Bellman backup of the lower bound at one belief; returns the new alpha."""
    dyn = dynamics or MomdpDynamics(model)
    b = np.asarray(hidden_belief, dtype=np.float64)
    return dyn.backup_alpha(x, b, lower)


def solve(
    model: MomdpModel,
    config: SolveConfig,
    dynamics: Optional[MomdpDynamics] = None,
) -> SolveResult:
    """Gap-guided anytime solving from the initial belief.

    Repeatedly samples a belief trajectory toward the largest discounted
    bound gap, then backs up both bounds along it deepest-first. Stops on
    target gap, wall-clock budget, or backup budget, whichever first.
    """
    dyn = dynamics or MomdpDynamics(model)
    lower, upper = initialize_bounds(model, dyn, tighten_corners=config.tighten_corners)
    x0 = model.initial_observed
    b0 = np.asarray(model.initial_hidden_belief, dtype=np.float64)
    rng = np.random.default_rng(config.seed)
    gamma = model.discount

    gap_scale = config.target_gap
    if gap_scale is None or gap_scale <= 0:
        gap_scale = max(1e-3 * max(dyn.value_span, 1e-9), 1e-9)
    if dyn.r_max > 0 and gap_scale * (1 - gamma) < 2 * dyn.r_max:
        depth_cap = math.ceil(
            math.log(gap_scale * (1 - gamma) / (2 * dyn.r_max)) / math.log(gamma)
        )
    else:
        depth_cap = 0
    depth_cap = max(depth_cap, 1)

    start = time.perf_counter()
    backups = 0
    next_prune = config.prune_interval

    def stop() -> bool:
        if config.target_gap is not None:
            if upper.value(x0, b0) - lower.value(x0, b0) <= config.target_gap:
                return True
        if config.max_backups is not None and backups >= config.max_backups:
            return True
        if config.time_budget is not None:
            if time.perf_counter() - start >= config.time_budget:
                return True
        return False

    while not stop():
        path = []
        x, b = x0, b0
        for depth in range(depth_cap):
            thresh = gap_scale * gamma ** (-depth)
            if upper.value(x, b) - lower.value(x, b) <= thresh:
                break
            path.append((x, b))
            qs, terms = dyn.q_upper(x, b, upper)
            a_star = int(np.argmax(qs))
            tau, p = terms[a_star]
            child_thresh = gap_scale * gamma ** (-(depth + 1))
            best_excess, candidates = -np.inf, []
            for xp in range(p.shape[0]):
                live = np.flatnonzero(p[xp] > 0.0)
                if live.size == 0:
                    continue
                children = tau[xp, live] / p[xp, live][:, None]
                widths = upper.value_many(xp, children) - lower.value_many(xp, children)
                excesses = p[xp, live] * (widths - child_thresh)
                for j, o in enumerate(live):
                    if excesses[j] > best_excess + _EPS:
                        best_excess, candidates = excesses[j], [(xp, children[j])]
                    elif excesses[j] >= best_excess - _EPS:
                        candidates.append((xp, children[j]))
            if best_excess <= 0.0 or not candidates:
                break
            x, b = candidates[int(rng.integers(len(candidates)))]
        if not path:
            break
        for xx, bb in reversed(path):
            lower.add(dyn.backup_alpha(xx, bb, lower))
            qs, _ = dyn.q_upper(xx, bb, upper)
            upper.add_point(xx, bb, float(qs.max()))
            backups += 1
            if config.max_backups is not None and backups >= config.max_backups:
                break
        if backups >= next_prune:
            lower.prune()
            upper.prune()
            next_prune = backups + config.prune_interval

    delta = upper.value(x0, b0) - lower.value(x0, b0)
    return SolveResult(lower, upper, delta, backups, time.perf_counter() - start)


def policy_action(result: SolveResult, x: int, hidden_belief) -> int:
    """Action of the maximizing alpha at (x, b); deterministic tie-breaking."""
    b = np.asarray(hidden_belief, dtype=np.float64)
    action, _ = result.lower.best(x, b)
    return action


def policy_to_json(result: SolveResult) -> str:
    """Serialize the alpha-vector policy (loadable without re-solving)."""
    alphas = []
    for x in range(result.lower.num_observed):
        for vec in result.lower.vectors(x):
            alphas.append(
                {
                    "observed_state": x,
                    "action": vec.action,
                    "values": [float(v) for v in vec.values],
                }
            )
    return json.dumps(
        {
            "num_observed": result.lower.num_observed,
            "num_hidden": result.lower.num_hidden,
            "delta": result.delta,
            "backup_count": result.backup_count,
            "alphas": alphas,
        },
        indent=2,
    )


def policy_from_json(text: str) -> SolveResult:
    """Load a serialized alpha policy; the upper bound is not persisted."""
    doc = json.loads(text)
    lower = LowerBound(int(doc["num_observed"]), int(doc["num_hidden"]))
    for entry in doc["alphas"]:
        lower.add(
            AlphaVector(
                int(entry["observed_state"]),
                int(entry["action"]),
                np.asarray(entry["values"], dtype=np.float64),
            )
        )
    return SolveResult(
        lower, None, float(doc["delta"]), int(doc["backup_count"]), 0.0
    )
