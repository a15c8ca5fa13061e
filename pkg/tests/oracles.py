"""Independent reference implementations used to cross-check the package.

Everything here is deliberately naive -- extended Euclid, Laplace expansion,
subset enumeration, path enumeration -- and shares no code with the
implementations under test.
"""

from __future__ import annotations

import itertools
from collections import deque


def egcd_inverse(a: int, q: int) -> int:
    """Modular inverse via the extended Euclidean algorithm."""
    old_r, r = a % q, q
    old_s, s = 1, 0
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
    assert old_r == 1, "not invertible"
    return old_s % q


def det_mod(rows, q: int) -> int:
    """Determinant by Laplace expansion along the first row, mod q."""
    n = len(rows)
    if n == 1:
        return rows[0][0] % q
    total = 0
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in rows[1:]]
        term = rows[0][c] * det_mod(minor, q)
        total += -term if c % 2 else term
    return total % q


def rank_by_minors(mat, q: int) -> int:
    """Largest r such that some r x r minor has nonzero determinant mod q."""
    rows = [[int(x) % q for x in row] for row in mat]
    n_rows, n_cols = len(rows), len(rows[0]) if rows else 0
    for r in range(min(n_rows, n_cols), 0, -1):
        for row_idx in itertools.combinations(range(n_rows), r):
            for col_idx in itertools.combinations(range(n_cols), r):
                sub = [[rows[i][j] for j in col_idx] for i in row_idx]
                if det_mod(sub, q) != 0:
                    return r
    return 0


def _has_path(n_nodes: int, edges, s: int, t: int) -> bool:
    adj = [[] for _ in range(n_nodes)]
    for a, b in edges:
        adj[a].append(b)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            return True
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return s == t


def mincut_by_enumeration(net, j: int, i: int) -> int:
    """Smallest edge set whose removal disconnects source j from destination i."""
    idx = {v: k for k, v in enumerate(net.nodes)}
    edges = [(idx[t], idx[h]) for t, h in net.edges]
    s, t = idx[net.sources[j]], idx[net.destinations[i]]
    if s == t:
        return 0
    for size in range(len(edges) + 1):
        for cut in itertools.combinations(range(len(edges)), size):
            kept = [e for k, e in enumerate(edges) if k not in cut]
            if not _has_path(len(net.nodes), kept, s, t):
                return size
    return len(edges)


def enumerate_paths(net, j: int):
    """All directed edge-index paths from source j to any node, grouped by endpoint."""
    start = net.sources[j]
    out_edges: dict[str, list[int]] = {v: [] for v in net.nodes}
    for e, (tail, _) in enumerate(net.edges):
        out_edges[tail].append(e)
    paths_to: dict[str, list[tuple[int, ...]]] = {v: [] for v in net.nodes}
    stack = [(start, ())]
    while stack:
        node, path = stack.pop()
        if path:
            paths_to[node].append(path)
        for e in out_edges[node]:
            stack.append((net.edges[e][1], path + (e,)))
    return paths_to


def transfer_by_paths(net, realization, i: int, j: int, k: int) -> int:
    """Transfer value as the sum over paths of products of path coefficients."""
    q = realization.q
    paths = enumerate_paths(net, j)[net.destinations[i]]
    total = 0
    for path in paths:
        prod = realization.injection_value(k, j, path[0])
        for e_in, e_out in zip(path, path[1:]):
            prod = prod * realization.pair_value(k, e_in, e_out) % q
        total = (total + prod) % q
    return total


def bipartite_has_cycle_bruteforce(g) -> bool:
    """Cycle detection by checking every edge subset for being a single cycle.

    A subset is a cycle iff every touched node has degree exactly 2 and the
    subset is connected; the graph has a cycle iff some subset qualifies.
    """
    edges = sorted(g.edges)
    for size in range(4, len(edges) + 1, 2):
        for combo in itertools.combinations(edges, size):
            deg: dict[tuple[str, int], int] = {}
            for j, i in combo:
                deg[("x", j)] = deg.get(("x", j), 0) + 1
                deg[("y", i)] = deg.get(("y", i), 0) + 1
            if any(d != 2 for d in deg.values()):
                continue
            nodes = list(deg)
            adj = {u: [] for u in nodes}
            for j, i in combo:
                adj[("x", j)].append(("y", i))
                adj[("y", i)].append(("x", j))
            seen = {nodes[0]}
            queue = deque([nodes[0]])
            while queue:
                u = queue.popleft()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        queue.append(v)
            if len(seen) == len(nodes):
                return True
    return False


def _forest_after_removal(g, removed) -> bool:
    node_id: dict[tuple[str, int], int] = {}
    kept = [e for e in g.edges if e not in removed]
    for j, i in g.edges:
        node_id.setdefault(("x", j), len(node_id))
        node_id.setdefault(("y", i), len(node_id))
    parent = list(range(len(node_id)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, i in kept:
        ra, rb = find(node_id[("x", j)]), find(node_id[("y", i)])
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def dstar_exact_removal(g) -> int:
    """Oracle for the variant removing exactly min(d, degree) edges per node.

    Enumerates, per quota d, every way of choosing exactly min(d, deg_i)
    edges at each destination node, and asks whether some choice leaves the
    graph acyclic.
    """
    by_dest: dict[int, list[tuple[int, int]]] = {}
    for j, i in sorted(g.edges):
        by_dest.setdefault(i, []).append((j, i))
    max_deg = max((len(v) for v in by_dest.values()), default=0)
    for d in range(max_deg + 1):
        options = [
            list(itertools.combinations(edges, min(d, len(edges))))
            for edges in by_dest.values()
        ]
        for pick in itertools.product(*options):
            removed = set(itertools.chain.from_iterable(pick))
            if _forest_after_removal(g, removed):
                return d
    return max_deg
