"""Friendship graph ingestion and sampling.

Reads whitespace-separated edge lists (the format used by public social
network snapshots), samples connected subgraphs of a requested size, and
falls back to a seeded small-world generator when no file is given.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import networkx as nx

log = logging.getLogger(__name__)


@dataclass
class FriendshipGraph:
    """Undirected friendship graph as adjacency sets over string node ids."""

    adjacency: dict[str, set[str]] = field(default_factory=dict)
    dropped_self_loops: int = 0

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(n) for n in self.adjacency.values()) // 2

    def nodes(self) -> list[str]:
        return sorted(self.adjacency)

    def neighbors(self, node: str) -> set[str]:
        return self.adjacency[node]

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            raise ValueError(f"self-loop: {a!r}")
        self.adjacency.setdefault(a, set()).add(b)
        self.adjacency.setdefault(b, set()).add(a)


def load_friendship_edges(path: str | Path) -> FriendshipGraph:
    """Parse an edge list file into a FriendshipGraph.

    Two whitespace-separated node tokens per line; `#` starts a comment.
    Reversed duplicates collapse into one undirected edge. Self-loops are
    dropped and counted (a warning is logged with the total). The result is
    order-insensitive: shuffling the file yields the same graph.
    """
    graph = FriendshipGraph()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"edge line {lineno}: expected 2 fields, got {len(fields)}")
        a, b = fields
        if a == b:
            graph.dropped_self_loops += 1
            continue
        graph.adjacency.setdefault(a, set()).add(b)
        graph.adjacency.setdefault(b, set()).add(a)
    if graph.dropped_self_loops:
        log.warning("dropped %d self-loop(s) from %s", graph.dropped_self_loops, path)
    return graph


def sample_subgraph(graph: FriendshipGraph, size: int, seed: int) -> FriendshipGraph:
    """Induced subgraph over `size` nodes picked by seeded breadth-first search.

    Expansion starts at a random node and follows sorted neighbor order; if a
    component is exhausted early, search restarts at a new random unvisited
    node, so the requested size is always reached when the graph is big
    enough.
    """
    if size <= 0:
        raise ValueError(f"sample size must be positive: {size}")
    if size > graph.node_count:
        raise ValueError(f"sample size {size} exceeds graph size {graph.node_count}")
    rng = random.Random(seed)
    universe = graph.nodes()
    visited: set[str] = set()
    picked: list[str] = []
    queue: list[str] = []
    while len(picked) < size:
        if not queue:
            remaining = [n for n in universe if n not in visited]
            start = rng.choice(remaining)
            visited.add(start)
            queue.append(start)
            picked.append(start)
            if len(picked) == size:
                break
            continue
        current = queue.pop(0)
        for neighbor in sorted(graph.neighbors(current)):
            if neighbor in visited:
                continue
            visited.add(neighbor)
            queue.append(neighbor)
            picked.append(neighbor)
            if len(picked) == size:
                break
        if len(picked) == size:
            break
    keep = set(picked)
    induced = FriendshipGraph()
    for node in sorted(keep):
        induced.adjacency[node] = {n for n in graph.adjacency[node] if n in keep}
    return induced


def synthetic_small_world(size: int, seed: int, degree: int = 6, rewire: float = 0.1) -> FriendshipGraph:
    """Seeded Watts-Strogatz-style fallback when no edge file is available."""
    if size <= 0:
        raise ValueError(f"graph size must be positive: {size}")
    k = min(degree, max(2, size - 1))
    if k % 2:
        k -= 1
    generated = nx.watts_strogatz_graph(size, max(k, 2), rewire, seed=seed)
    graph = FriendshipGraph()
    width = len(str(size - 1))
    label = {i: f"n{i:0{width}d}" for i in generated.nodes}
    for i in generated.nodes:
        graph.adjacency.setdefault(label[i], set())
    for a, b in generated.edges:
        graph.add_edge(label[a], label[b])
    return graph
