"""Cycle obstruction: constancy test of the alternating transfer ratio.

Around a cycle of the interference graph, the product of transfer values on
edges traversed from the destination side to the source side, divided by the
product on edges traversed the other way, is a rational function of the
coding coefficients.  If it is non-constant, the 2x2-session configuration
whose interference graph is a single 8-cycle cannot reach per-source rate 1/3
in finitely many slots.  Constancy is tested black-box: evaluate at
independent random assignments and compare (one-sided; "constant" can be
wrong with probability at most (deg/q)**(valid evaluations - 1)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import DEFAULT_Q
from .interference import InterferenceGraph, NodeRef, build_igraph, shortest_cycle
from .network import Network, realize


class NotACycle(ValueError):
    """The supplied node sequence is not a cycle of the interference graph."""


@dataclass(frozen=True)
class CycleRatio:
    """Alternating-ratio evaluations around one cycle.

    evaluations has one entry per trial; None marks trials skipped because a
    denominator factor vanished.  verdict is "non-constant", "constant", or
    "undefined" (fewer than two usable evaluations).
    """

    cycle: tuple[NodeRef, ...]
    evaluations: tuple[int | None, ...]
    verdict: str


def _check_cycle(net: Network, cycle) -> tuple[NodeRef, ...]:
    cyc = tuple((str(kind), int(idx)) for kind, idx in cycle)
    if len(cyc) < 4 or len(cyc) % 2 != 0:
        raise NotACycle("a cycle needs an even number of nodes, at least 4")
    if len(set(cyc)) != len(cyc):
        raise NotACycle("cycle nodes must be distinct")
    for kind, idx in cyc:
        if kind == "x":
            if not 0 <= idx < net.n_sources:
                raise NotACycle(f"source index {idx} out of range")
        elif kind == "y":
            if not 0 <= idx < net.n_destinations:
                raise NotACycle(f"destination index {idx} out of range")
        else:
            raise NotACycle(f"bad node kind {kind!r}")
    for t, (kind, _) in enumerate(cyc):
        if kind == cyc[(t + 1) % len(cyc)][0]:
            raise NotACycle("cycle must alternate source and destination nodes")
    for t in range(len(cyc)):
        u, v = cyc[t], cyc[(t + 1) % len(cyc)]
        j, i = (u[1], v[1]) if u[0] == "x" else (v[1], u[1])
        if j in net.demands[i]:
            raise NotACycle(f"(S{j + 1}, W{i + 1}) is a demanded pair, not interference")
    return cyc


def cycle_ratio(net: Network, cycle, trials: int = 5, seed: int = 0, q: int = DEFAULT_Q) -> CycleRatio:
    """Evaluate the alternating ratio at ``trials`` independent assignments.

    Walking the cycle in order, an edge entered from the destination side
    contributes its transfer value to the numerator, an edge entered from the
    source side to the denominator.
    """
    if trials < 2:
        raise ValueError("constancy testing needs at least 2 trials")
    cyc = _check_cycle(net, cycle)
    rng = np.random.default_rng(seed)
    evaluations: list[int | None] = []
    for _ in range(trials):
        r = realize(net, 1, int(rng.integers(0, 2**63)), q)
        num = 1
        den = 1
        skip = False
        for t in range(len(cyc)):
            u, v = cyc[t], cyc[(t + 1) % len(cyc)]
            if u[0] == "x":
                m = int(r.transfer[v[1], u[1], 0])
                if m == 0:
                    skip = True
                    break
                den = den * m % q
            else:
                num = num * int(r.transfer[u[1], v[1], 0]) % q
        evaluations.append(None if skip else num * pow(den, q - 2, q) % q)

    valid = [e for e in evaluations if e is not None]
    if len(valid) < 2:
        verdict = "undefined"
    elif any(e != valid[0] for e in valid[1:]):
        verdict = "non-constant"
    else:
        verdict = "constant"
    return CycleRatio(cyc, tuple(evaluations), verdict)


@dataclass(frozen=True)
class ObstructionReport:
    four_by_four_cycle: bool
    verdict: str
    claim: str  # "infeasible" | "advisory" | "none"
    statement: str
    cycle: tuple[NodeRef, ...]


def _is_four_by_four_cycle(net: Network, graph: InterferenceGraph) -> bool:
    if net.n_sources != 4 or net.n_destinations != 4 or net.demand_size != 2:
        return False
    if len(graph.edges) != 8:
        return False
    degrees_ok = all(len(graph.interferers(i)) == 2 for i in range(4)) and all(
        len(graph.interferes_at(j)) == 2 for j in range(4)
    )
    if not degrees_ok:
        return False
    cyc = shortest_cycle(graph)
    return cyc is not None and len(cyc) == 8


def infeasibility_report(net: Network, ratio: CycleRatio, graph: InterferenceGraph | None = None,
                         trials: int = 3, seed: int = 0, q: int = DEFAULT_Q) -> ObstructionReport:
    """Interpret a cycle-ratio verdict for this network's configuration.

    The hard infeasibility statement is only issued for the 4-source,
    4-destination, two-demands configuration whose interference graph is a
    single 8-cycle; other cyclic configurations get an advisory.
    """
    if graph is None:
        graph = build_igraph(net, realize(net, trials, seed, q), allow_empty=True)
    matched = _is_four_by_four_cycle(net, graph)
    if ratio.verdict == "non-constant" and matched:
        claim = "infeasible"
        statement = (
            "Per-source rate 1/3 is not achievable in any finite number of slots: "
            "the alternating transfer ratio around the interference cycle is "
            "non-constant, which forces rank-deficient decoding at every "
            "destination under 3-slot precoding. Decoding one extra session per "
            "destination (d* = 1) achieves per-source rate 1/4 instead."
        )
    elif ratio.verdict == "non-constant":
        claim = "advisory"
        statement = (
            "Non-constant alternating transfer ratio detected around an "
            "interference cycle. The hard rate bound is established only for the "
            "4x4 single-cycle configuration; treat this as an obstruction "
            "advisory and sparsify (decode extra sessions) to restore an acyclic "
            "interference graph."
        )
    else:
        claim = "none"
        statement = (
            f"Alternating transfer ratio verdict is '{ratio.verdict}'; the "
            "obstruction hypothesis is not established for this network."
        )
    return ObstructionReport(matched, ratio.verdict, claim, statement, ratio.cycle)
