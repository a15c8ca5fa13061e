"""Network model: DAG with groupcast demands, mincut checks, transfer evaluation.

A network is a directed acyclic multigraph with K ordered source nodes, M
ordered destination nodes, and per-destination demand sets of equal size L.
Random linear coding assigns one coefficient to every adjacent
(in-edge, out-edge) pair at each node plus one injection coefficient per
(source, out-edge) pair; a destination observes the sum of the symbols on its
in-edges.  Source-to-destination transfer functions are never materialized as
polynomials -- they are evaluated at concrete coefficient assignments by
forward propagation in topological order.

The network file format is UTF-8 JSON with exactly the keys "nodes", "edges"
(pairs [tail, head]), "sources", "destinations", and "demands" (arrays of
1-based source indices, one array per destination).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .gf import DEFAULT_Q


class ParseError(ValueError):
    """Network file or network structure is malformed."""


class CycleError(ParseError):
    """The directed graph has a cycle (no topological order exists)."""


class DemandSizeError(ParseError):
    """Demand sets do not all have the same size."""


class AssumptionViolation(Exception):
    """Mincut assumptions do not hold; carries the validation report."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        pairs = ", ".join(
            f"(D{p.destination + 1}, S{p.source + 1}) mincut={p.mincut}" for p in report.violations
        )
        super().__init__(f"mincut assumptions violated for: {pairs}")


@dataclass(eq=False)
class Network:
    """Immutable groupcast network; validated on construction.

    demands holds 0-based source index sets, one per destination.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    sources: tuple[str, ...]
    destinations: tuple[str, ...]
    demands: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        self.nodes = tuple(self.nodes)
        self.edges = tuple((t, h) for t, h in self.edges)
        self.sources = tuple(self.sources)
        self.destinations = tuple(self.destinations)
        self.demands = tuple(frozenset(d) for d in self.demands)

        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ParseError("duplicate node ids")
        for t, h in self.edges:
            if t not in known or h not in known:
                raise ParseError(f"edge ({t!r}, {h!r}) references an unknown node")
            if t == h:
                raise CycleError(f"self-loop at node {t!r}")
        for group, name in ((self.sources, "sources"), (self.destinations, "destinations")):
            if len(set(group)) != len(group):
                raise ParseError(f"duplicate entries in {name}")
            for node in group:
                if node not in known:
                    raise ParseError(f"{name} entry {node!r} is not a declared node")
        if len(self.demands) != len(self.destinations):
            raise ParseError("need exactly one demand set per destination")
        if not self.demands:
            raise ParseError("at least one destination is required")
        sizes = {len(d) for d in self.demands}
        if len(sizes) != 1:
            raise DemandSizeError(f"demand sets must share one size, got sizes {sorted(sizes)}")
        for dem in self.demands:
            for j in dem:
                if not 0 <= j < len(self.sources):
                    raise ParseError(f"demand source index {j} out of range")
        self._topo_order = self._topological_order()

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_destinations(self) -> int:
        return len(self.destinations)

    @property
    def demand_size(self) -> int:
        return len(self.demands[0])

    @property
    def topo_order(self) -> tuple[str, ...]:
        return self._topo_order

    def _topological_order(self) -> tuple[str, ...]:
        # Kahn's algorithm; ties broken by position in the nodes list so the
        # order depends only on structure, not on node names.
        pos = {v: i for i, v in enumerate(self.nodes)}
        indeg = {v: 0 for v in self.nodes}
        succ: dict[str, list[str]] = {v: [] for v in self.nodes}
        for t, h in self.edges:
            indeg[h] += 1
            succ[t].append(h)
        ready = sorted((v for v in self.nodes if indeg[v] == 0), key=pos.__getitem__)
        order: list[str] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            changed = False
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
                    changed = True
            if changed:
                ready.sort(key=pos.__getitem__)
        if len(order) != len(self.nodes):
            raise CycleError("directed graph has a cycle")
        return tuple(order)

    @cached_property
    def layout(self) -> "CodingLayout":
        return _build_layout(self)

    def to_mapping(self) -> dict:
        """JSON-ready mapping in the network file format (1-based demands)."""
        return {
            "nodes": list(self.nodes),
            "edges": [[t, h] for t, h in self.edges],
            "sources": list(self.sources),
            "destinations": list(self.destinations),
            "demands": [sorted(j + 1 for j in dem) for dem in self.demands],
        }


_FILE_KEYS = {"nodes", "edges", "sources", "destinations", "demands"}


def load_network(data: bytes | str) -> Network:
    """Parse and validate a network from its JSON file content."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"network file is not UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    unknown = set(obj) - _FILE_KEYS
    if unknown:
        raise ParseError(f"unknown keys in network file: {sorted(unknown)}")
    missing = _FILE_KEYS - set(obj)
    if missing:
        raise ParseError(f"missing keys in network file: {sorted(missing)}")

    def str_list(key: str) -> list[str]:
        val = obj[key]
        if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
            raise ParseError(f"{key!r} must be an array of strings")
        return val

    nodes = str_list("nodes")
    sources = str_list("sources")
    destinations = str_list("destinations")
    edges_raw = obj["edges"]
    if not isinstance(edges_raw, list):
        raise ParseError("'edges' must be an array of [tail, head] pairs")
    edges = []
    for item in edges_raw:
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
            raise ParseError(f"bad edge entry {item!r}; expected [tail, head] strings")
        edges.append((item[0], item[1]))
    demands_raw = obj["demands"]
    if not isinstance(demands_raw, list):
        raise ParseError("'demands' must be an array of arrays of 1-based source indices")
    demands = []
    for entry in demands_raw:
        if not (isinstance(entry, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in entry)):
            raise ParseError(f"bad demand entry {entry!r}; expected integers")
        for idx in entry:
            if not 1 <= idx <= len(sources):
                raise ParseError(f"demand source index {idx} out of range 1..{len(sources)}")
        demands.append(frozenset(idx - 1 for idx in entry))
    return Network(tuple(nodes), tuple(edges), tuple(sources), tuple(destinations), tuple(demands))


def load_network_file(path) -> Network:
    with open(path, "rb") as fh:
        return load_network(fh.read())


def mincut(net: Network, j: int, i: int) -> int:
    """Max-flow value from source j to destination i with unit edge capacities.

    Computed by breadth-first augmenting paths; parallel edges add capacity.
    An unreachable destination (or co-located pair) yields 0.
    """
    s = net.sources[j]
    t = net.destinations[i]
    if s == t:
        return 0
    idx = {v: k for k, v in enumerate(net.nodes)}
    n = len(net.nodes)
    cap = [[0] * n for _ in range(n)]
    for tail, head in net.edges:
        cap[idx[tail]][idx[head]] += 1
    src, dst = idx[s], idx[t]
    flow = 0
    while True:
        parent = [-1] * n
        parent[src] = src
        queue = [src]
        while queue and parent[dst] < 0:
            u = queue.pop(0)
            for v in range(n):
                if parent[v] < 0 and cap[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[dst] < 0:
            return flow
        v = dst
        while v != src:
            u = parent[v]
            cap[u][v] -= 1
            cap[v][u] += 1
            v = u
        flow += 1


@dataclass(eq=False)
class CodingLayout:
    """Index layout of the coding-coefficient vector for one network.

    Coefficient order follows edges in topological processing order: for each
    edge, first its source injection (if the tail is a source), then one
    coefficient per in-edge of the tail.  The ``pair_*`` arrays are already in
    a valid propagation order.
    """

    n_coeffs: int
    edge_order: tuple[int, ...]
    inj_edge: np.ndarray
    inj_col: np.ndarray
    inj_cidx: np.ndarray
    pair_in: np.ndarray
    pair_out: np.ndarray
    pair_cidx: np.ndarray
    dest_ptr: np.ndarray
    dest_edges: np.ndarray
    inj_index: dict = field(repr=False, default_factory=dict)
    pair_index: dict = field(repr=False, default_factory=dict)


def _build_layout(net: Network) -> CodingLayout:
    topo_pos = {v: k for k, v in enumerate(net.topo_order)}
    n_edges = len(net.edges)
    edge_order = tuple(sorted(range(n_edges), key=lambda e: (topo_pos[net.edges[e][0]], e)))
    in_edges: dict[str, list[int]] = {v: [] for v in net.nodes}
    for e in edge_order:
        in_edges[net.edges[e][1]].append(e)
    source_of = {s: j for j, s in enumerate(net.sources)}

    inj_edge, inj_col, inj_cidx = [], [], []
    pair_in, pair_out, pair_cidx = [], [], []
    inj_index: dict[tuple[int, int], int] = {}
    pair_index: dict[tuple[int, int], int] = {}
    cidx = 0
    for e in edge_order:
        tail = net.edges[e][0]
        if tail in source_of:
            j = source_of[tail]
            inj_edge.append(e)
            inj_col.append(j)
            inj_cidx.append(cidx)
            inj_index[(j, e)] = cidx
            cidx += 1
        for e_in in in_edges[tail]:
            pair_in.append(e_in)
            pair_out.append(e)
            pair_cidx.append(cidx)
            pair_index[(e_in, e)] = cidx
            cidx += 1

    dest_ptr = [0]
    dest_edges: list[int] = []
    for d in net.destinations:
        dest_edges.extend(in_edges[d])
        dest_ptr.append(len(dest_edges))

    def as_arr(xs):
        return np.asarray(xs, dtype=np.int64)

    return CodingLayout(
        n_coeffs=cidx,
        edge_order=edge_order,
        inj_edge=as_arr(inj_edge),
        inj_col=as_arr(inj_col),
        inj_cidx=as_arr(inj_cidx),
        pair_in=as_arr(pair_in),
        pair_out=as_arr(pair_out),
        pair_cidx=as_arr(pair_cidx),
        dest_ptr=as_arr(dest_ptr),
        dest_edges=as_arr(dest_edges),
        inj_index=inj_index,
        pair_index=pair_index,
    )


@dataclass(eq=False)
class NetworkRealization:
    """One concrete assignment of all coding coefficients per slot.

    transfer[i, j, k] is the transfer value from source j to destination i
    under the slot-k assignment.  Fully reproducible from (network, q, seed).
    """

    network: Network
    q: int
    slot_count: int
    coding_assignments: np.ndarray  # (slot_count, n_coeffs)
    transfer: np.ndarray  # (M, K, slot_count)

    def injection_value(self, k: int, j: int, e: int) -> int:
        return int(self.coding_assignments[k, self.network.layout.inj_index[(j, e)]])

    def pair_value(self, k: int, e_in: int, e_out: int) -> int:
        return int(self.coding_assignments[k, self.network.layout.pair_index[(e_in, e_out)]])


def transfer_from_assignments(net: Network, coeffs: np.ndarray, q: int) -> np.ndarray:
    """Evaluate all transfer values for the given (n_slots, n_coeffs) rows."""
    lay = net.layout
    return kernels.propagate(
        np.ascontiguousarray(coeffs, dtype=np.int64),
        lay.inj_edge, lay.inj_col, lay.inj_cidx,
        lay.pair_in, lay.pair_out, lay.pair_cidx,
        lay.dest_ptr, lay.dest_edges,
        len(net.edges), net.n_sources, q,
    )


def realize(net: Network, n: int, seed: int, q: int = DEFAULT_Q) -> NetworkRealization:
    """Draw all coding coefficients uniformly at random, independently per slot."""
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(0, q, size=(n, net.layout.n_coeffs), dtype=np.int64)
    transfer = transfer_from_assignments(net, coeffs, q)
    return NetworkRealization(net, q, n, coeffs, transfer)


def is_zero_function(net: Network, j: int, i: int, trials: int = 3, seed: int = 0, q: int = DEFAULT_Q) -> bool:
    """One-sided Monte Carlo test for m_ij being identically zero.

    Evaluates the transfer function at ``trials`` independent random
    assignments; False is always correct, True errs with probability at most
    (deg/q)**trials.
    """
    r = realize(net, trials, seed, q)
    return bool((r.transfer[i, j, :] == 0).all())


@dataclass(frozen=True)
class PairCheck:
    destination: int
    source: int
    mincut: int
    demanded: bool
    ok: bool


@dataclass(frozen=True)
class ValidationReport:
    """Per-pair mincut results plus empty-interference warnings.

    ok requires mincut exactly 1 for demanded pairs and at most 1 elsewhere.
    Destinations whose interfering set came out empty are listed as warnings
    (the alignment constraints there are vacuous), not as violations.
    """

    ok: bool
    pairs: tuple[PairCheck, ...]
    violations: tuple[PairCheck, ...]
    empty_interference: tuple[int, ...]

    def require_ok(self) -> None:
        if not self.ok:
            raise AssumptionViolation(self)


def validate_assumptions(net: Network, trials: int = 3, seed: int = 0, q: int = DEFAULT_Q) -> ValidationReport:
    """Check the unit-mincut regime for every (destination, source) pair."""
    checks = []
    for i in range(net.n_destinations):
        for j in range(net.n_sources):
            cut = mincut(net, j, i)
            demanded = j in net.demands[i]
            ok = cut == 1 if demanded else cut <= 1
            checks.append(PairCheck(i, j, cut, demanded, ok))
    probe = realize(net, trials, seed, q)
    empty = []
    for i in range(net.n_destinations):
        interferers = [
            j for j in range(net.n_sources)
            if j not in net.demands[i] and not (probe.transfer[i, j, :] == 0).all()
        ]
        if not interferers:
            empty.append(i)
    violations = tuple(c for c in checks if not c.ok)
    return ValidationReport(not violations, tuple(checks), violations, tuple(empty))
