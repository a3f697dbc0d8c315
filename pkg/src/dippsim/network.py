"""Static directed communication graphs and neighbor queries.

Ring topologies C_d send to the next d nodes around a circle and receive from
the previous d; the Watts-Strogatz builder places bidirectional ring-lattice
links and rewires the far endpoint of each with a fixed probability.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetworkTopology:
    """Directed graph over node_count nodes with per-node in/out neighbor lists."""

    node_count: int
    out_neighbors: tuple[tuple[int, ...], ...]
    in_neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.out_neighbors) != self.node_count or len(self.in_neighbors) != self.node_count:
            raise ValueError("neighbor lists must cover every node")

    def edges(self):
        for src, outs in enumerate(self.out_neighbors):
            for dst in outs:
                yield src, dst


def topology_from_edges(node_count: int, edges) -> NetworkTopology:
    """Build a topology from directed (src, dst) pairs; rejects self-loops and duplicates."""
    outs: list[set[int]] = [set() for _ in range(node_count)]
    ins: list[set[int]] = [set() for _ in range(node_count)]
    for src, dst in edges:
        if not (0 <= src < node_count and 0 <= dst < node_count):
            raise ValueError(f"edge ({src}, {dst}) out of range")
        if src == dst:
            raise ValueError(f"self-loop at node {src}")
        if dst in outs[src]:
            raise ValueError(f"duplicate edge ({src}, {dst})")
        outs[src].add(dst)
        ins[dst].add(src)
    return NetworkTopology(
        node_count,
        tuple(tuple(sorted(s)) for s in outs),
        tuple(tuple(sorted(s)) for s in ins),
    )


def build_ring(node_count: int, degree: int) -> NetworkTopology:
    """Circular topology where node p sends to p+1..p+degree and receives from p-1..p-degree.

    degree = node_count - 1 yields the complete digraph.
    """
    if not 1 <= degree <= node_count - 1:
        raise ValueError(f"degree {degree} out of range for {node_count} nodes")
    edges = [
        (p, (p + j) % node_count) for p in range(node_count) for j in range(1, degree + 1)
    ]
    return topology_from_edges(node_count, edges)


def build_complete(node_count: int) -> NetworkTopology:
    return build_ring(node_count, node_count - 1)


def _lattice_pairs(node_count: int, q: int) -> list[tuple[int, int]]:
    # Each node initiates ceil(q/2) forward links, giving undirected degree 2*ceil(q/2).
    span = math.ceil(q / 2)
    return [(p, (p + j) % node_count) for p in range(node_count) for j in range(1, span + 1)]


def _watts_strogatz_draw(
    node_count: int, q: int, p_rewire: float, rng: np.random.Generator
) -> NetworkTopology:
    """One undirected small-world draw, returned as paired directed edges."""
    adj: list[set[int]] = [set() for _ in range(node_count)]
    pairs = _lattice_pairs(node_count, q)
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    for a, b in pairs:
        if rng.random() >= p_rewire:
            continue
        allowed = [v for v in range(node_count) if v != a and v not in adj[a]]
        if not allowed:
            continue
        new_b = allowed[rng.integers(len(allowed))]
        adj[a].discard(b)
        adj[b].discard(a)
        adj[a].add(new_b)
        adj[new_b].add(a)
    edges = [(a, b) for a in range(node_count) for b in adj[a]]
    return topology_from_edges(node_count, edges)


def build_watts_strogatz(
    node_count: int,
    q: int,
    p_rewire: float,
    rng: np.random.Generator,
    max_attempts: int = 1000,
) -> NetworkTopology:
    """Connected Watts-Strogatz small-world network with bidirectional links.

    Disconnected draws are rejected and redrawn; the number of attempts is
    logged when more than one was needed.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    if 2 * math.ceil(q / 2) > node_count - 1:
        raise ValueError(f"q={q} too large for {node_count} nodes")
    if not 0.0 <= p_rewire <= 1.0:
        raise ValueError("p_rewire must lie in [0, 1]")
    for attempt in range(1, max_attempts + 1):
        topology = _watts_strogatz_draw(node_count, q, p_rewire, rng)
        if is_connected(topology):
            if attempt > 1:
                log.info("watts-strogatz: %d draws needed for a connected graph", attempt)
            return topology
    raise RuntimeError(f"no connected draw in {max_attempts} attempts")


def _reachable(start: int, neighbors: tuple[tuple[int, ...], ...]) -> int:
    seen = {start}
    queue = deque([start])
    while queue:
        for nxt in neighbors[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen)


def is_connected(topology: NetworkTopology) -> bool:
    """True iff the directed graph is strongly connected."""
    n = topology.node_count
    if n <= 1:
        return True
    return (
        _reachable(0, topology.out_neighbors) == n
        and _reachable(0, topology.in_neighbors) == n
    )


def write_edge_list(topology: NetworkTopology, path: str) -> None:
    """Export as one "src dst" pair per line."""
    with open(path, "w") as fh:
        for src, dst in topology.edges():
            fh.write(f"{src} {dst}\n")
