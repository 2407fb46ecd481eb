"""Experiment orchestration: configs, counter-based seeding, simulation batches,
aggregation, and result persistence."""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .agents import (
    ExploitAgent,
    GreedyMdpAgent,
    McbrlAgent,
    QLearningAgent,
    momdp_from_pomdp,
    pavlov_agent,
    tft_agent,
)
from .bamdp import build_bamdp, build_bapomdp
from .benchmarks import chain as chain_bench
from .benchmarks import ipd as ipd_bench
from .benchmarks import tiger as tiger_bench
from .dp import mdp_value_iteration
from .envs import MdpSimulator, PomdpSimulator
from .models import DiscreteMdp
from .sampling import (
    BetaScalar,
    DirichletRows,
    HypothesisSet,
    UniformBox,
    insert_true_hypothesis,
    sample_hypotheses,
)
from .solver import MomdpDynamics, SolveConfig, SolveResult, policy_from_json, policy_to_json, solve

PHASE_OFFLINE, PHASE_SOLVE, PHASE_ENV, PHASE_AGENT, PHASE_OPPONENT, PHASE_PLAY = range(6)

ALGORITHMS = (
    "mc-brl",
    "mc-brl-plus",
    "q-learning",
    "exploit",
    "tft",
    "pavlov",
    "prior-model",
    "upper-bound",
)

_DOMAIN_ALGOS = {
    "chain-semitied": ("mc-brl", "mc-brl-plus", "q-learning", "exploit", "prior-model", "upper-bound"),
    "chain-full": ("mc-brl", "mc-brl-plus", "q-learning", "exploit", "upper-bound"),
    "tiger": ("mc-brl", "prior-model", "upper-bound"),
    "ipd": ("mc-brl", "q-learning", "exploit", "tft", "pavlov", "upper-bound"),
}

_DEFAULT_GAPS = {"chain-semitied": 5.0, "chain-full": 5.0, "tiger": 1.0, "ipd": 5.0}


def child_rng(master_seed: int, sim_index: int, phase: int, extra=()) -> np.random.Generator:
    """Counter-based derivation: independent of scheduling and worker count."""
    key = (int(sim_index), int(phase)) + tuple(int(e) for e in extra)
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=key))


def worker_count(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("MCBRL_WORKERS")
    if env:
        return max(1, int(env))
    return 1


@dataclass
class ExperimentConfig:
    """One experiment: a domain, an algorithm, and the simulation protocol."""

    domain: str
    algorithm: str
    num_simulations: int = 100
    steps: Optional[int] = None
    episodes: Optional[int] = None
    num_hypotheses: int = 100
    master_seed: int = 0
    target_gap: Optional[float] = None
    time_budget: Optional[float] = None
    max_backups: Optional[int] = None
    epsilon: Optional[float] = None
    epsilon_grid: tuple = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
    num_plays: int = 20
    shared_rate: bool = False
    prior: Optional[dict] = None
    discount: Optional[float] = None
    max_steps_per_episode: int = 500
    out_path: Optional[str] = None
    workers: Optional[int] = None

    def __post_init__(self):
        if self.domain not in _DOMAIN_ALGOS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm not in _DOMAIN_ALGOS[self.domain]:
            raise ValueError(f"{self.algorithm!r} does not apply to {self.domain!r}")
        if self.num_simulations < 1:
            raise ValueError("num_simulations must be at least 1")
        episodic = self.domain == "tiger"
        if episodic:
            if self.episodes is None:
                self.episodes = 100
        else:
            if self.steps is None:
                self.steps = 1000 if self.domain.startswith("chain") else 300
        if self.num_hypotheses < 1:
            raise ValueError("num_hypotheses must be at least 1")

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        doc["epsilon_grid"] = tuple(doc.get("epsilon_grid", cls.epsilon_grid))
        return cls(**doc)


@dataclass
class ResultTable:
    """Aggregate of one experiment; every published number is recomputable from
    the raw per-simulation totals."""

    domain: str
    algorithm: str
    totals: np.ndarray  # per successful simulation
    mean: float
    two_se: float
    num_simulations: int
    failures: int
    records: list = field(default_factory=list)
    per_episode: Optional[np.ndarray] = None  # (n_success, episodes)
    metadata: dict = field(default_factory=dict)


def summarize(values) -> tuple[float, float]:
    """(mean, two standard errors) with the n-1 sample standard deviation."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise ValueError("need at least two values to summarize")
    mean = float(arr.mean())
    two_se = float(2.0 * arr.std(ddof=1) / np.sqrt(arr.size))
    return mean, two_se


def _prior_from_config(cfg: ExperimentConfig, default):
    doc = cfg.prior
    if doc is None:
        return default
    kind = doc.get("type")
    if kind == "uniform-box":
        return UniformBox(doc.get("lo", 0.0), doc.get("hi", 1.0))
    if kind == "beta-scalar":
        return BetaScalar(doc.get("alpha", 1.0), doc.get("beta", 1.0))
    if kind == "dirichlet-rows":
        return DirichletRows()
    raise ValueError(f"unknown prior type {kind!r}")


def _solve_config(cfg: ExperimentConfig, seed: int) -> SolveConfig:
    gap = cfg.target_gap
    if gap is None and cfg.time_budget is None and cfg.max_backups is None:
        gap = _DEFAULT_GAPS[cfg.domain]
    return SolveConfig(
        target_gap=gap if gap is not None else cfg.target_gap,
        time_budget=cfg.time_budget,
        max_backups=cfg.max_backups,
        seed=seed,
    )


def _discounted_total(rewards, gamma: float) -> float:
    r = np.asarray(rewards, dtype=np.float64)
    return float(r @ np.power(gamma, np.arange(r.size)))


def _solver_seed(cfg: ExperimentConfig, sim_index: int) -> int:
    return int(child_rng(cfg.master_seed, sim_index, PHASE_SOLVE).integers(2**31))


# --- chain -----------------------------------------------------------------

def _chain_spec(cfg: ExperimentConfig) -> chain_bench.ChainSpec:
    variant = "semi-tied" if cfg.domain == "chain-semitied" else "full"
    if cfg.discount is not None:
        return chain_bench.ChainSpec(variant=variant, discount=cfg.discount)
    return chain_bench.ChainSpec(variant=variant)


def _chain_shared(cfg: ExperimentConfig) -> dict:
    spec = _chain_spec(cfg)
    skeleton, env = chain_bench.build_chain(spec)
    shared = {}
    if cfg.algorithm == "upper-bound":
        _, policy = mdp_value_iteration(env.model, 1e-9)
        shared["policy"] = policy
    elif cfg.algorithm == "prior-model":
        # parameters fixed at the prior mean: slip 0.5 under the uniform prior
        mean_t = chain_bench.chain_transition_tensor(0.5, 0.5)
        mdp = DiscreteMdp(mean_t, skeleton.reward, skeleton.discount)
        _, policy = mdp_value_iteration(mdp, 1e-9)
        shared["policy"] = policy
    return shared


def _chain_sim(cfg: ExperimentConfig, shared: dict, i: int, epsilon=None, eps_index: int = 0) -> dict:
    from .online import run_online

    spec = _chain_spec(cfg)
    skeleton, env = chain_bench.build_chain(spec)
    rng_env = child_rng(cfg.master_seed, i, PHASE_ENV)
    record = {"sim_index": i}
    if cfg.algorithm in ("mc-brl", "mc-brl-plus"):
        prior = _prior_from_config(cfg, chain_bench.default_prior(spec))
        hyps = sample_hypotheses(
            skeleton, prior, cfg.num_hypotheses, child_rng(cfg.master_seed, i, PHASE_OFFLINE)
        )
        if cfg.algorithm == "mc-brl-plus":
            hyps = insert_true_hypothesis(hyps, env.model.transition)
        model = build_bamdp(skeleton, hyps, validate=False)
        dyn = MomdpDynamics(model)
        result = solve(model, _solve_config(cfg, _solver_seed(cfg, i)), dynamics=dyn)
        agent = McbrlAgent(model, result, dyn)
        record["delta"] = result.delta
        record["backups"] = result.backup_count
    elif cfg.algorithm == "exploit":
        prior = _prior_from_config(cfg, chain_bench.default_prior(spec))
        hyps = sample_hypotheses(
            skeleton, prior, cfg.num_hypotheses, child_rng(cfg.master_seed, i, PHASE_OFFLINE)
        )
        agent = ExploitAgent(hyps)
    elif cfg.algorithm == "q-learning":
        agent = QLearningAgent(
            skeleton.num_states, skeleton.num_actions, epsilon, skeleton.discount
        )
    else:  # upper-bound / prior-model
        agent = GreedyMdpAgent(shared["policy"])
    agent_rng = child_rng(cfg.master_seed, i, PHASE_AGENT, (eps_index,))
    trace = run_online(
        agent, env, steps=cfg.steps, rng=_fold(rng_env, agent_rng, cfg.algorithm),
        record_beliefs=False,
    )
    record["failed"] = trace.failed
    record["error"] = trace.error
    record["total"] = trace.total_reward
    return record


def _fold(rng_env, rng_agent, algorithm):
    # q-learning draws exploration noise from the same stream as the env; all
    # derivations stay counter-based so this remains reproducible
    return rng_agent if algorithm == "q-learning" else rng_env


# --- tiger -----------------------------------------------------------------

def _tiger_spec(cfg: ExperimentConfig) -> tiger_bench.TigerSpec:
    discount = 0.95 if cfg.discount is None else cfg.discount
    return tiger_bench.TigerSpec(shared_rate=cfg.shared_rate, discount=discount)


def _tiger_shared(cfg: ExperimentConfig) -> dict:
    spec = _tiger_spec(cfg)
    shared = {}
    if cfg.algorithm in ("upper-bound", "prior-model"):
        if cfg.algorithm == "upper-bound":
            model = tiger_bench.tiger_pomdp(
                spec.true_error_left, spec.true_error_right, spec.discount
            )
        else:
            eps = tiger_bench.PRIOR_MEAN_ERROR
            model = tiger_bench.tiger_pomdp(eps, eps, spec.discount)
        momdp = momdp_from_pomdp(model)
        result = solve(
            momdp,
            SolveConfig(
                target_gap=cfg.target_gap,
                max_backups=cfg.max_backups or 40_000,
                time_budget=cfg.time_budget or 90.0,
                seed=0,
            ),
        )
        shared["policy_json"] = policy_to_json(result)
    return shared


def _tiger_sim(cfg: ExperimentConfig, shared: dict, i: int, epsilon=None, eps_index: int = 0) -> dict:
    from .online import run_online

    spec = _tiger_spec(cfg)
    skeleton, env = tiger_bench.build_tiger(spec)
    record = {"sim_index": i}
    if cfg.algorithm == "mc-brl":
        prior = _prior_from_config(cfg, tiger_bench.default_prior(spec))
        hyps = sample_hypotheses(
            skeleton, prior, cfg.num_hypotheses, child_rng(cfg.master_seed, i, PHASE_OFFLINE)
        )
        model = build_bapomdp(skeleton, hyps, validate=False)
        dyn = MomdpDynamics(model)
        result = solve(model, _solve_config(cfg, _solver_seed(cfg, i)), dynamics=dyn)
        agent = McbrlAgent(model, result, dyn)
        record["delta"] = result.delta
        record["backups"] = result.backup_count
    else:
        result = policy_from_json(shared["policy_json"])
        if cfg.algorithm == "upper-bound":
            model = tiger_bench.tiger_pomdp(
                spec.true_error_left, spec.true_error_right, spec.discount
            )
        else:
            eps = tiger_bench.PRIOR_MEAN_ERROR
            model = tiger_bench.tiger_pomdp(eps, eps, spec.discount)
        agent = McbrlAgent(momdp_from_pomdp(model), result)
    trace = run_online(
        agent,
        env,
        episodes=cfg.episodes,
        rng=child_rng(cfg.master_seed, i, PHASE_ENV),
        max_steps_per_episode=cfg.max_steps_per_episode,
        record_beliefs=False,
    )
    record["failed"] = trace.failed
    record["error"] = trace.error
    record["total"] = trace.total_reward
    record["discounted_total"] = _discounted_total(trace.rewards, spec.discount)
    record["episode_rewards"] = trace.episode_rewards()
    return record


# --- ipd ---------------------------------------------------------------------

def _ipd_spec(cfg: ExperimentConfig, opponent: ipd_bench.IpdOpponent) -> ipd_bench.IpdSpec:
    if cfg.discount is not None:
        return ipd_bench.IpdSpec(opponent, discount=cfg.discount)
    return ipd_bench.IpdSpec(opponent)


def _ipd_sim(cfg: ExperimentConfig, shared: dict, i: int, epsilon=None, eps_index: int = 0) -> dict:
    from .online import run_online

    opponent = ipd_bench.sample_opponent(child_rng(cfg.master_seed, i, PHASE_OPPONENT))
    spec = _ipd_spec(cfg, opponent)
    skeleton, env = ipd_bench.build_ipd(spec)
    record = {"sim_index": i, "opponent": opponent.as_tuple()}

    make_agent = None
    if cfg.algorithm == "mc-brl":
        prior = _prior_from_config(cfg, ipd_bench.default_prior(spec))
        hyps = sample_hypotheses(
            skeleton, prior, cfg.num_hypotheses, child_rng(cfg.master_seed, i, PHASE_OFFLINE)
        )
        model = build_bamdp(skeleton, hyps, validate=False)
        dyn = MomdpDynamics(model)
        result = solve(model, _solve_config(cfg, _solver_seed(cfg, i)), dynamics=dyn)
        record["delta"] = result.delta
        record["backups"] = result.backup_count
        make_agent = lambda: McbrlAgent(model, result, dyn)  # noqa: E731
    elif cfg.algorithm == "upper-bound":
        _, policy = mdp_value_iteration(env.model, 1e-9)
        make_agent = lambda: GreedyMdpAgent(policy)  # noqa: E731
    elif cfg.algorithm == "exploit":
        prior = _prior_from_config(cfg, ipd_bench.default_prior(spec))
        hyps = sample_hypotheses(
            skeleton, prior, cfg.num_hypotheses, child_rng(cfg.master_seed, i, PHASE_OFFLINE)
        )
        make_agent = lambda: ExploitAgent(hyps)  # noqa: E731
    elif cfg.algorithm == "tft":
        make_agent = tft_agent
    elif cfg.algorithm == "pavlov":
        make_agent = pavlov_agent
    elif cfg.algorithm == "q-learning":
        make_agent = lambda: QLearningAgent(  # noqa: E731
            skeleton.num_states, skeleton.num_actions, epsilon, skeleton.discount
        )

    plays = []
    failures = 0
    for j in range(cfg.num_plays):
        rng = child_rng(cfg.master_seed, i, PHASE_PLAY, (eps_index, j))
        trace = run_online(make_agent(), env, steps=cfg.steps, rng=rng, record_beliefs=False)
        if trace.failed:
            failures += 1
        else:
            plays.append(trace.total_reward)
    record["plays"] = plays
    record["failed"] = len(plays) == 0
    record["error"] = None if plays else "all plays failed"
    record["play_failures"] = failures
    record["total"] = float(np.mean(plays)) if plays else float("nan")
    return record


_DOMAIN_SIM = {
    "chain-semitied": (_chain_sim, _chain_shared),
    "chain-full": (_chain_sim, _chain_shared),
    "tiger": (_tiger_sim, _tiger_shared),
    "ipd": (_ipd_sim, lambda cfg: {}),
}


def _run_batch(cfg: ExperimentConfig, epsilon=None, eps_index: int = 0) -> list:
    sim_fn, shared_fn = _DOMAIN_SIM[cfg.domain]
    shared = shared_fn(cfg)
    indices = range(cfg.num_simulations)
    n_workers = worker_count(cfg.workers)
    if n_workers == 1:
        return [sim_fn(cfg, shared, i, epsilon, eps_index) for i in indices]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        futures = [
            pool.submit(sim_fn, cfg, shared, i, epsilon, eps_index) for i in indices
        ]
        return [f.result() for f in futures]


def _aggregate(cfg: ExperimentConfig, records: list, metadata: dict) -> ResultTable:
    good = [r for r in records if not r.get("failed")]
    totals = np.asarray([r["total"] for r in good], dtype=np.float64)
    failures = len(records) - len(good)
    if totals.size >= 2:
        mean, two_se = summarize(totals)
    else:
        mean, two_se = (float(totals.mean()) if totals.size else float("nan")), float("nan")
    per_episode = None
    if good and "episode_rewards" in good[0]:
        lengths = [len(r["episode_rewards"]) for r in good]
        width = min(lengths)
        per_episode = np.asarray([r["episode_rewards"][:width] for r in good])
    return ResultTable(
        domain=cfg.domain,
        algorithm=cfg.algorithm,
        totals=totals,
        mean=mean,
        two_se=two_se,
        num_simulations=len(records),
        failures=failures,
        records=records,
        per_episode=per_episode,
        metadata=metadata,
    )


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Run the configured batch; deterministic given (config, master seed).

    Q-learning with no fixed epsilon sweeps the configured grid and reports
    the best mean. Per-simulation failures are recorded and excluded from the
    aggregate, never fatal.
    """
    if cfg.algorithm == "q-learning" and cfg.epsilon is None:
        best = None
        for idx, eps in enumerate(cfg.epsilon_grid):
            records = _run_batch(cfg, epsilon=eps, eps_index=idx)
            table = _aggregate(cfg, records, {"epsilon": eps})
            if best is None or (
                np.isfinite(table.mean) and table.mean > best.mean
            ):
                best = table
        best.metadata["epsilon_grid"] = list(cfg.epsilon_grid)
        table = best
    else:
        records = _run_batch(cfg, epsilon=cfg.epsilon, eps_index=0)
        metadata = {} if cfg.epsilon is None else {"epsilon": cfg.epsilon}
        table = _aggregate(cfg, records, metadata)
    if cfg.out_path:
        write_results(cfg, table, cfg.out_path)
    return table


def learning_curve(cfg: ExperimentConfig) -> np.ndarray:
    """Cross-simulation mean reward per episode (episodic domains only)."""
    if cfg.domain != "tiger":
        raise ValueError(f"{cfg.domain!r} is not episodic; no learning curve")
    table = run_experiment(cfg)
    if table.per_episode is None or table.per_episode.size == 0:
        raise RuntimeError("no successful simulations to build a curve from")
    return table.per_episode.mean(axis=0)


def write_results(cfg: ExperimentConfig, table: ResultTable, out_path: str) -> None:
    """CSV with one row per simulation plus a JSON summary next to it."""
    base, ext = os.path.splitext(out_path)
    csv_path = out_path if ext == ".csv" else base + ".csv"
    json_path = base + ".json"
    fields = ["sim_index", "total", "failed", "error", "delta", "backups"]
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for rec in table.records:
            writer.writerow({k: rec.get(k) for k in fields})
    summary = {
        "config": asdict(cfg),
        "mean": table.mean,
        "two_se": table.two_se,
        "n": int(table.totals.size),
        "failures": table.failures,
        "metadata": table.metadata,
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")
