"""Bipartite interference graph: construction, cycle tests, forest decomposition.

The graph has one node per source (the X side) and one node W_i per
destination (the Y side); an edge (j, i) means source j interferes at
destination i, i.e. j is not demanded there but its transfer function is not
identically zero.  Nodes are addressed as ("x", j) / ("y", i) pairs with
0-based indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .network import Network, NetworkRealization

NodeRef = tuple[str, int]  # ("x", source index) or ("y", destination index)


class EmptyInterference(Exception):
    """Some destination has an empty interfering set."""

    def __init__(self, destinations: tuple[int, ...]):
        self.destinations = destinations
        names = ", ".join(f"W{i + 1}" for i in destinations)
        super().__init__(f"no interference at: {names}")


class CyclicGraph(Exception):
    """Forest decomposition was requested for a graph with cycles."""


@dataclass(frozen=True)
class InterferenceGraph:
    n_sources: int
    n_destinations: int
    edges: frozenset[tuple[int, int]]  # (source j, destination i)

    def interferers(self, i: int) -> tuple[int, ...]:
        """Sources with an edge at destination i, ascending."""
        return tuple(sorted(j for j, ii in self.edges if ii == i))

    def interferes_at(self, j: int) -> tuple[int, ...]:
        """Destinations where source j appears as interference, ascending."""
        return tuple(sorted(i for jj, i in self.edges if jj == j))

    def empty_destinations(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_destinations) if not self.interferers(i))

    def replace_edges(self, edges) -> "InterferenceGraph":
        return InterferenceGraph(self.n_sources, self.n_destinations, frozenset(edges))


def build_igraph(net: Network, realization: NetworkRealization, allow_empty: bool = False) -> InterferenceGraph:
    """Assemble the interference graph from a realization's transfer values.

    An all-zero transfer row across the realization's slots is taken as
    evidence that the pair's transfer function is identically zero (one-sided
    Monte Carlo, error probability at most (deg/q)**slots).
    """
    edges = set()
    for i in range(net.n_destinations):
        for j in range(net.n_sources):
            if j in net.demands[i]:
                continue
            if not (realization.transfer[i, j, :] == 0).all():
                edges.add((j, i))
    graph = InterferenceGraph(net.n_sources, net.n_destinations, frozenset(edges))
    empty = graph.empty_destinations()
    if empty and not allow_empty:
        raise EmptyInterference(empty)
    return graph


def _adjacency(g: InterferenceGraph) -> dict[NodeRef, list[NodeRef]]:
    adj: dict[NodeRef, list[NodeRef]] = {}
    for j in range(g.n_sources):
        adj[("x", j)] = []
    for i in range(g.n_destinations):
        adj[("y", i)] = []
    for j, i in sorted(g.edges):
        adj[("x", j)].append(("y", i))
        adj[("y", i)].append(("x", j))
    return adj


def connected_components(g: InterferenceGraph) -> list[list[NodeRef]]:
    """Components in ascending order of their smallest member, X side first."""
    adj = _adjacency(g)
    seen: set[NodeRef] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        comps.append(sorted(comp))
    # order components by their minimum source index when they have one
    def comp_key(comp):
        xs = [idx for kind, idx in comp if kind == "x"]
        return (0, min(xs)) if xs else (1, comp[0][1])

    comps.sort(key=comp_key)
    return comps


def has_cycle(g: InterferenceGraph) -> bool:
    """True iff some connected component has at least as many edges as nodes."""
    for comp in connected_components(g):
        members = set(comp)
        n_edges = sum(1 for j, i in g.edges if ("x", j) in members)
        if n_edges >= len(comp):
            return True
    return False


@dataclass(eq=False)
class TreeComponent:
    """One tree of the forest, with BFS levels from the chosen root source."""

    x_nodes: tuple[int, ...]
    y_nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    root: int  # source index
    levels: tuple[tuple[NodeRef, ...], ...]
    parent: dict  # NodeRef -> NodeRef, root excluded
    depth: dict  # NodeRef -> int


@dataclass(eq=False)
class ForestDecomposition:
    """Trees (each containing at least one source) plus isolated Y nodes."""

    components: tuple[TreeComponent, ...]
    isolated_y: tuple[int, ...]


def decompose(g: InterferenceGraph, roots: dict[int, int] | None = None) -> ForestDecomposition:
    """Split an acyclic interference graph into rooted BFS trees.

    The root of each tree defaults to its smallest source index; ``roots``
    may override per component (keyed by that smallest index).  Raises
    CyclicGraph when the graph has a cycle.
    """
    if has_cycle(g):
        raise CyclicGraph("interference graph has a cycle; sparsify first")
    adj = _adjacency(g)
    components = []
    isolated_y = []
    for comp in connected_components(g):
        xs = tuple(idx for kind, idx in comp if kind == "x")
        ys = tuple(idx for kind, idx in comp if kind == "y")
        if not xs:
            isolated_y.extend(ys)
            continue
        root = min(xs)
        if roots and root in roots:
            root = roots[root]
            if ("x", root) not in set(comp):
                raise ValueError(f"root override S{root + 1} is not in this component")
        root_ref: NodeRef = ("x", root)
        depth = {root_ref: 0}
        parent: dict[NodeRef, NodeRef] = {}
        levels = [[root_ref]]
        frontier = [root_ref]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in depth:
                        depth[v] = depth[u] + 1
                        parent[v] = u
                        nxt.append(v)
            if nxt:
                levels.append(sorted(nxt))
            frontier = nxt
        edges = tuple(sorted((j, i) for j, i in g.edges if ("x", j) in depth and ("y", i) in depth))
        components.append(
            TreeComponent(
                x_nodes=xs,
                y_nodes=ys,
                edges=edges,
                root=root,
                levels=tuple(tuple(lv) for lv in levels),
                parent=parent,
                depth=depth,
            )
        )
    return ForestDecomposition(tuple(components), tuple(sorted(isolated_y)))


def shortest_cycle(g: InterferenceGraph) -> tuple[NodeRef, ...] | None:
    """Shortest cycle as an alternating node sequence, or None if acyclic.

    For every edge, BFS the shortest path between its endpoints in the graph
    without that edge; the best closure wins.  Rotated to start at the
    smallest source on the cycle for deterministic output.
    """
    adj = _adjacency(g)
    best: list[NodeRef] | None = None
    for j, i in sorted(g.edges):
        a: NodeRef = ("x", j)
        b: NodeRef = ("y", i)
        prev: dict[NodeRef, NodeRef] = {a: a}
        queue = deque([a])
        while queue and b not in prev:
            u = queue.popleft()
            for v in adj[u]:
                if v in prev or (u == a and v == b) or (u == b and v == a):
                    continue
                prev[v] = u
                queue.append(v)
        if b not in prev:
            continue
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        cycle = list(reversed(path))
        if best is None or len(cycle) < len(best):
            best = cycle
    if best is None:
        return None
    starts = [k for k, (kind, _) in enumerate(best) if kind == "x"]
    k0 = min(starts, key=lambda k: best[k][1])
    return tuple(best[k0:] + best[:k0])


def to_dot(g: InterferenceGraph) -> str:
    """DOT text with the two bipartite ranks and the interference edge list."""
    lines = ["graph interference {", "  rankdir=LR;"]
    lines.append("  { rank=source; " + " ".join(f'"S{j + 1}";' for j in range(g.n_sources)) + " }")
    lines.append("  { rank=sink; " + " ".join(f'"W{i + 1}";' for i in range(g.n_destinations)) + " }")
    for j, i in sorted(g.edges, key=lambda e: (e[1], e[0])):
        lines.append(f'  "S{j + 1}" -- "W{i + 1}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
