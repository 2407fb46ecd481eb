"""Finite-state-controller policies: conversion from alpha sets, execution, export."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .models import MomdpModel
from .solver import MomdpDynamics, SolveResult


@dataclass(frozen=True)
class PolicyGraph:
    """Controller with one action per node and one out-edge per observation.

    `edges[i, o]` is the successor of node i after observation o. Synthetic
    nodes absorb observation branches the witness beliefs rule out: they
    repeat their action forever.
    """

    actions: tuple
    edges: np.ndarray  # (N, O) int
    start_node: int
    synthetic: tuple = field(default=())

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.intp)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "actions", tuple(int(a) for a in self.actions))
        n = len(self.actions)
        if e.shape[0] != n:
            raise ValueError("edges and actions disagree on node count")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge target out of range")
        if not 0 <= self.start_node < n:
            raise ValueError("start node out of range")
        synth = tuple(bool(s) for s in self.synthetic) or tuple(False for _ in range(n))
        if len(synth) != n:
            raise ValueError("synthetic flags and actions disagree on node count")
        object.__setattr__(self, "synthetic", synth)

    @property
    def num_nodes(self) -> int:
        return len(self.actions)

    @property
    def num_observations(self) -> int:
        return self.edges.shape[1]

    @property
    def num_reachable(self) -> int:
        """Nodes reachable from the start by following edges."""
        seen = {self.start_node}
        frontier = [self.start_node]
        while frontier:
            node = frontier.pop()
            for nxt in self.edges[node]:
                if int(nxt) not in seen:
                    seen.add(int(nxt))
                    frontier.append(int(nxt))
        return len(seen)


def to_policy_graph(
    result: SolveResult,
    model: MomdpModel,
    horizon: int,
    dynamics: MomdpDynamics | None = None,
) -> PolicyGraph:
    """Convert an alpha policy into a controller by witness-belief lookahead.

    Nodes are the distinct (observed state, maximizing alpha) pairs reached by
    propagating beliefs from the initial belief for `horizon` steps; each
    node's edges follow the alpha chosen at the one-step update of the node's
    witness belief. Observations the witness belief makes impossible route to
    an absorbing repeat-action node, flagged synthetic.
    """
    dyn = dynamics or MomdpDynamics(model)
    no = model.num_observations
    lower = result.lower

    b0 = np.asarray(model.initial_hidden_belief, dtype=np.float64)
    x0 = model.initial_observed

    actions: list[int] = []
    synthetic: list[bool] = []
    witnesses: list[tuple[int, np.ndarray]] = []
    key_to_node: dict[tuple[int, int], int] = {}
    absorbing: dict[int, int] = {}
    edge_rows: list[np.ndarray | None] = []

    def node_for(x: int, b: np.ndarray) -> int:
        action, row = lower.best(x, b)
        key = (x, row)
        if key in key_to_node:
            return key_to_node[key]
        idx = len(actions)
        key_to_node[key] = idx
        actions.append(action)
        synthetic.append(False)
        witnesses.append((x, b))
        edge_rows.append(None)
        return idx

    def absorbing_for(action: int) -> int:
        if action in absorbing:
            return absorbing[action]
        idx = len(actions)
        absorbing[action] = idx
        actions.append(action)
        synthetic.append(True)
        witnesses.append((0, b0))
        edge_rows.append(np.full(no, idx, dtype=np.intp))
        return idx

    start = node_for(x0, b0)
    queue: deque[tuple[int, int]] = deque([(start, 0)])
    expanded = set()
    while queue:
        node, depth = queue.popleft()
        if node in expanded or synthetic[node]:
            continue
        expanded.add(node)
        x, b = witnesses[node]
        a = actions[node]
        tau, p = dyn.transition_terms(x, b, a)
        row = np.empty(no, dtype=np.intp)
        for o in range(no):
            mass = p[:, o]
            if mass.max() <= 0.0:
                row[o] = absorbing_for(a)
                continue
            xp = int(np.argmax(mass))
            child = tau[xp, o] / mass[xp]
            known = len(actions)
            nxt = node_for(xp, child)
            row[o] = nxt
            if nxt >= known or nxt not in expanded:
                if depth + 1 <= horizon:
                    queue.append((nxt, depth + 1))
                elif edge_rows[nxt] is None:
                    # discovered beyond the horizon: absorb instead of expanding
                    edge_rows[nxt] = np.full(no, absorbing_for(actions[nxt]), dtype=np.intp)
        edge_rows[node] = row

    for i, row in enumerate(edge_rows):
        if row is None:
            edge_rows[i] = np.full(no, absorbing_for(actions[i]), dtype=np.intp)

    return PolicyGraph(
        tuple(actions), np.vstack(edge_rows), start, tuple(synthetic)
    )


def execute_graph(graph: PolicyGraph, observations) -> list[int]:
    """Deterministic controller run; emits len(observations)+1 actions."""
    node = graph.start_node
    out = [graph.actions[node]]
    for o in observations:
        node = int(graph.edges[node, int(o)])
        out.append(graph.actions[node])
    return out


def graph_to_text(graph: PolicyGraph) -> str:
    """Plain adjacency listing for visualization tools."""
    lines = [f"start {graph.start_node}"]
    for i in range(graph.num_nodes):
        edges = " ".join(
            f"{o}->{int(graph.edges[i, o])}" for o in range(graph.num_observations)
        )
        tag = " synthetic" if graph.synthetic[i] else ""
        lines.append(f"node {i} action {graph.actions[i]}{tag}: {edges}")
    return "\n".join(lines) + "\n"
