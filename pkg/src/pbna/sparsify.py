"""Minimal extra-decode sparsification of the interference graph.

Finds the smallest per-destination removal quota d* such that deleting at
most d* interference edges at every destination node leaves the graph
acyclic, together with the witnessing removal.  The search scans edges in a
fixed label order, greedily collecting a set that is independent in both the
bond (cographic) matroid -- edge sets whose removal keeps every component
connected -- and the partition matroid that allows at most d edges per
destination node, raising d until the kept edges form a spanning forest.

The common independent sets of two matroids do not form a matroid, so the
greedy scan can stall at a maximal set below the maximum (rare, but real:
see tests for counterexamples).  When that happens, find_dstar finishes the
job exactly with matroid-intersection augmenting paths before deciding that
the current quota is infeasible.  An exhaustive oracle over all removal
subsets is provided for cross-checking on small graphs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .interference import InterferenceGraph, connected_components


class TooLarge(ValueError):
    """Graph too large for the exhaustive oracle."""


Edge = tuple[int, int]


def default_labeling(g: InterferenceGraph) -> tuple[Edge, ...]:
    """Deterministic edge order: lexicographic by (destination, source)."""
    return tuple(sorted(g.edges, key=lambda e: (e[1], e[0])))


def _component_count(g: InterferenceGraph, removed: frozenset[Edge] | set[Edge]) -> int:
    adj: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for j in range(g.n_sources):
        adj[("x", j)] = []
    for i in range(g.n_destinations):
        adj[("y", i)] = []
    for j, i in g.edges:
        if (j, i) in removed:
            continue
        adj[("x", j)].append(("y", i))
        adj[("y", i)].append(("x", j))
    seen = set()
    count = 0
    for start in adj:
        if start in seen:
            continue
        count += 1
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return count


def independence_check(g: InterferenceGraph, candidate, d: int) -> bool:
    """Membership test for the intersected matroid.

    True iff removing ``candidate`` leaves every component of g connected
    (bond-matroid independence, checked by BFS) and at most d candidate
    edges touch any one destination node (partition-matroid independence).
    """
    cand = set(candidate)
    per_dest: dict[int, int] = {}
    for _, i in cand:
        per_dest[i] = per_dest.get(i, 0) + 1
        if per_dest[i] > d:
            return False
    return _component_count(g, cand) == _component_count(g, frozenset())


def greedy_d(g: InterferenceGraph, labeling, d: int) -> tuple[Edge, ...]:
    """Greedy maximal independent set, scanning edges in label order.

    Requires g connected (single component over all of its nodes).
    """
    if _component_count(g, frozenset()) != 1:
        raise ValueError("greedy_d requires a connected graph")
    return _greedy_scan(g, tuple(labeling), d)


def _greedy_scan(g: InterferenceGraph, labeling: tuple[Edge, ...], d: int) -> tuple[Edge, ...]:
    base_components = _component_count(g, frozenset())
    chosen: list[Edge] = []
    per_dest: dict[int, int] = {}
    for e in labeling:
        if per_dest.get(e[1], 0) + 1 > d:
            continue
        if _component_count(g, set(chosen) | {e}) != base_components:
            continue
        chosen.append(e)
        per_dest[e[1]] = per_dest.get(e[1], 0) + 1
    return tuple(chosen)


def _augment_to_maximum(g: InterferenceGraph, pool: tuple[Edge, ...], d: int, start) -> tuple[Edge, ...]:
    """Maximum common independent set via exchange-graph augmenting paths.

    Grows ``start`` (a common independent set of the bond and partition
    matroids over ``pool``) by one element per shortest augmenting path until
    none exists; by the matroid intersection theorem the result is maximum.
    """
    base_components = _component_count(g, frozenset())

    def bond_ok(removal) -> bool:
        return _component_count(g, removal) == base_components

    current = set(start)
    while True:
        ins = sorted(current)
        outs = sorted(e for e in pool if e not in current)
        deg = {}
        for _, i in current:
            deg[i] = deg.get(i, 0) + 1
        sources = [e for e in outs if bond_ok(current | {e})]
        sinks = {e for e in outs if deg.get(e[1], 0) + 1 <= d}
        if not sources or not sinks:
            return tuple(sorted(current))
        arcs: dict[Edge, list[Edge]] = {e: [] for e in ins + outs}
        for y in ins:
            swapped_base = current - {y}
            for x in outs:
                if bond_ok(swapped_base | {x}):
                    arcs[y].append(x)  # exchange keeps bond independence
                extra = 1 if x[1] == y[1] else 0
                if deg.get(x[1], 0) + 1 - extra <= d:
                    arcs[x].append(y)  # exchange keeps partition independence
        prev: dict[Edge, Edge | None] = {e: None for e in sources}
        queue = deque(sources)
        goal = None
        for e in sources:
            if e in sinks:
                goal = e
                break
        while queue and goal is None:
            u = queue.popleft()
            for v in arcs[u]:
                if v in prev:
                    continue
                prev[v] = u
                if v in sinks:
                    goal = v
                    queue.clear()
                    break
                queue.append(v)
        if goal is None:
            return tuple(sorted(current))
        node: Edge | None = goal
        while node is not None:
            current.symmetric_difference_update({node})
            node = prev[node]


@dataclass(frozen=True)
class ComponentStats:
    sources: int
    destinations: int
    edges: int
    d: int


@dataclass(eq=False)
class SparsificationResult:
    """Outcome of the minimal extra-decode search.

    ``removed`` is the union of the per-component maximum independent sets;
    its complement ``spanning_forest`` is a spanning tree of every component.
    ``h_bar`` removes further spanning-forest edges until every destination
    node has lost exactly min(d_star, degree) edges; those losses define the
    per-destination extra-decode sets.  ``independence_checks`` counts greedy
    membership tests; ``augmentations`` counts the rare exact-fallback passes
    that rescued a stalled greedy scan.
    """

    d_star: int
    removed: frozenset[Edge]
    spanning_forest: frozenset[Edge]
    h_bar: InterferenceGraph
    extra_decode: tuple[frozenset[int], ...]
    new_interference: tuple[frozenset[int], ...]
    new_demands: tuple[frozenset[int], ...] | None
    components: tuple[ComponentStats, ...]
    independence_checks: int
    augmentations: int


def find_dstar(g: InterferenceGraph, labeling=None, demands=None) -> SparsificationResult:
    """Find d* and the sparsified acyclic graph for a (possibly disconnected) g.

    Each component is searched independently, iterating the quota d upward
    from max(0, ceil((f-k-m+1)/m)) until the greedy independent set reaches
    size f-k-m+1 (complement a spanning tree); d* is the maximum over
    components.  When ``demands`` is given, the enlarged per-destination
    decode sets are filled in alongside the extra-decode sets.
    """
    label_order = tuple(labeling) if labeling is not None else default_labeling(g)
    if set(label_order) != set(g.edges) or len(label_order) != len(g.edges):
        raise ValueError("labeling must be a permutation of the edge set")

    checks = 0
    augmentations = 0
    removed: set[Edge] = set()
    stats = []
    for comp in connected_components(g):
        members = set(comp)
        comp_labels = tuple(e for e in label_order if ("x", e[0]) in members)
        f = len(comp_labels)
        if f == 0:
            continue
        k = sum(1 for kind, _ in comp if kind == "x")
        m = sum(1 for kind, _ in comp if kind == "y")
        target = f - k - m + 1
        d = max(0, math.ceil(target / m))
        while True:
            chosen = _greedy_scan(g, comp_labels, d)
            checks += f
            if len(chosen) < target:
                # Greedy stalled below the bond-matroid rank; the common
                # independent sets of two matroids are not themselves a
                # matroid, so settle quota-d feasibility exactly.
                chosen = _augment_to_maximum(g, comp_labels, d, chosen)
                augmentations += 1
            if len(chosen) == target:
                break
            d += 1
            if d > f:  # cannot happen: quota >= max degree makes the scan unconstrained
                raise AssertionError("search failed to reach a spanning tree")
        removed.update(chosen)
        stats.append(ComponentStats(k, m, f, d))

    d_star = max((s.d for s in stats), default=0)
    spanning_forest = frozenset(g.edges - removed)

    # Trim: every destination node loses exactly min(d_star, degree) edges in
    # total.  Extra deletions come from the spanning forest in label order;
    # removing forest edges keeps the graph acyclic, and since each edge
    # touches exactly one destination node the quotas never interact.
    final_removed = set(removed)
    for i in range(g.n_destinations):
        degree = len(g.interferers(i))
        need = min(d_star, degree) - sum(1 for e in final_removed if e[1] == i)
        for e in label_order:
            if need <= 0:
                break
            if e[1] == i and e not in final_removed:
                final_removed.add(e)
                need -= 1

    h_bar = g.replace_edges(g.edges - final_removed)
    extra = tuple(
        frozenset(j for j, ii in final_removed if ii == i) for i in range(g.n_destinations)
    )
    new_interference = tuple(frozenset(h_bar.interferers(i)) for i in range(g.n_destinations))
    new_demands = None
    if demands is not None:
        new_demands = tuple(frozenset(demands[i]) | extra[i] for i in range(g.n_destinations))
    return SparsificationResult(
        d_star=d_star,
        removed=frozenset(removed),
        spanning_forest=spanning_forest,
        h_bar=h_bar,
        extra_decode=extra,
        new_interference=new_interference,
        new_demands=new_demands,
        components=tuple(stats),
        independence_checks=checks,
        augmentations=augmentations,
    )


def _is_acyclic(n_nodes: int, edges) -> bool:
    parent = list(range(n_nodes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def brute_force_dstar(g: InterferenceGraph) -> int:
    """Exhaustive oracle: smallest worst-case per-destination removal count.

    Minimizes max_i |removed edges at W_i| over all removal subsets whose
    complement is acyclic.  Exponential in |edges|; refuses more than 14.
    """
    edges = sorted(g.edges)
    f = len(edges)
    if f > 14:
        raise TooLarge(f"{f} edges is beyond the exhaustive search cap of 14")
    node_id = {}
    for j, i in edges:
        node_id.setdefault(("x", j), len(node_id))
        node_id.setdefault(("y", i), len(node_id))
    pairs = [(node_id[("x", j)], node_id[("y", i)]) for j, i in edges]
    best = f
    for mask in range(1 << f):
        kept = [pairs[t] for t in range(f) if not mask >> t & 1]
        if not _is_acyclic(len(node_id), kept):
            continue
        per_dest: dict[int, int] = {}
        for t in range(f):
            if mask >> t & 1:
                i = edges[t][1]
                per_dest[i] = per_dest.get(i, 0) + 1
        best = min(best, max(per_dest.values(), default=0))
        if best == 0:
            break
    return best
