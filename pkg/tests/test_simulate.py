import numpy as np
import pytest

from pbna import simulate as sim
from pbna.interference import ForestDecomposition, build_igraph
from pbna.network import Network, realize
from pbna.precoding import PrecodingPlan, plan_with_resampling
from pbna.sparsify import find_dstar
from gen import forest_instance, random_dag_net


def build_plan(net, seed=0):
    graph = build_igraph(net, realize(net, 3, seed), allow_empty=True)
    spars = find_dstar(graph, demands=net.demands)
    return plan_with_resampling(net, spars, seed=seed)


def l2_forest_net() -> Network:
    """Two destinations, L=2 demands, one interference edge each (a forest)."""
    return Network(
        ("S1", "S2", "S3", "D1", "D2"),
        (("S1", "D1"), ("S2", "D1"), ("S3", "D1"), ("S2", "D2"), ("S3", "D2"), ("S1", "D2")),
        ("S1", "S2", "S3"), ("D1", "D2"),
        (frozenset({0, 1}), frozenset({1, 2})),
    )


def test_all_zero_messages_decode_to_zero(fourbyfour):
    plan = build_plan(fourbyfour)
    trace = sim.run_session(fourbyfour, plan.realization, plan, messages=np.zeros(4, dtype=np.int64))
    assert (trace.received == 0).all()
    assert all(trace.success)
    assert all(all(v == 0 for v in d.values()) for d in trace.decoded)


def test_single_edge_smoke_with_handmade_plan():
    # degenerate single-slot plan used purely as plumbing: x = z, y = m*z
    net = Network(("S1", "D1"), (("S1", "D1"),), ("S1",), ("D1",), (frozenset({0}),))
    realization = realize(net, 1, seed=2)
    plan = PrecodingPlan(
        n=1,
        V=np.ones((1, 1), dtype=np.int64),
        thetas={0: np.ones(1, dtype=np.int64)},
        realization=realization,
        forest=ForestDecomposition((), ()),
        new_demands=(frozenset({0}),),
        new_interference=(frozenset(),),
    )
    trace = sim.run_session(net, realization, plan, messages=[123456])
    assert trace.decoded[0][0] == 123456
    assert trace.success == (True,)


def test_hundred_random_tuples_all_decode(fourbyfour):
    plan = build_plan(fourbyfour)
    rng = np.random.default_rng(5)
    for _ in range(100):
        msg = rng.integers(0, plan.realization.q, size=4, dtype=np.int64)
        trace = sim.run_session(fourbyfour, plan.realization, plan, messages=msg)
        assert all(trace.success)
        for i in range(4):
            for j in sorted(plan.new_demands[i]):
                assert trace.decoded[i][j] == int(msg[j])


def test_received_matches_algebraic_model(fourbyfour):
    plan = build_plan(fourbyfour)
    realization = plan.realization
    q = realization.q
    rng = np.random.default_rng(17)
    msg = rng.integers(0, q, size=4, dtype=np.int64)
    trace = sim.run_session(fourbyfour, realization, plan, messages=msg)
    for i in range(4):
        expect = np.zeros(plan.n, dtype=np.int64)
        for j in range(4):
            expect = (expect + realization.transfer[i, j, :] * plan.V[j] % q * msg[j]) % q
        assert np.array_equal(trace.received[i], expect)


def test_raw_propagation_matches_transfer_on_random_dags():
    # transfer-consistency oracle: python edge walk vs batched kernel
    rng = np.random.default_rng(23)
    checked = 0
    while checked < 100:
        net = random_dag_net(rng, max_extra_nodes=4, max_edges=9)
        realization = realize(net, 1, seed=int(rng.integers(2**32)))
        x = rng.integers(0, realization.q, size=1, dtype=np.int64)
        got = sim.propagate_symbols(net, realization, 0, x)
        expect = realization.transfer[0, 0, 0] * x[0] % realization.q
        assert int(got[0]) == int(expect)
        checked += 1


def test_receive_is_linear_in_messages(fourbyfour):
    plan = build_plan(fourbyfour)
    realization = plan.realization
    q = realization.q
    rng = np.random.default_rng(31)
    z1 = rng.integers(0, q, size=4, dtype=np.int64)
    z2 = rng.integers(0, q, size=4, dtype=np.int64)
    t1 = sim.run_session(fourbyfour, realization, plan, messages=z1)
    t2 = sim.run_session(fourbyfour, realization, plan, messages=z2)
    t3 = sim.run_session(fourbyfour, realization, plan, messages=(z1 + z2) % q)
    assert np.array_equal(t3.received, (t1.received + t2.received) % q)


def test_rate_report_forest_is_one_over_l_plus_one():
    net = l2_forest_net()
    plan = build_plan(net)
    assert plan.n == 3  # L = 2, d* = 0
    traces = [sim.run_session(net, plan.realization, plan, seed=s) for s in range(10)]
    report = sim.rate_report(traces, plan)
    assert report.per_source_rate == (1, 3)
    assert report.success_fraction == 1.0
    assert report.sum_rate == (3, 3)
    assert report.sum_rate_ceiling == (3, 3)
    assert report.matches_reference


def test_rate_report_fourbyfour(fourbyfour):
    plan = build_plan(fourbyfour)
    traces = [sim.run_session(fourbyfour, plan.realization, plan, seed=s) for s in range(5)]
    report = sim.rate_report(traces, plan)
    assert report.per_source_rate == (1, 4)
    assert report.sum_rate == (4, 4)
    assert report.sum_rate_ceiling == (4, 3)
    assert report.success_fraction == 1.0


def test_rate_report_empty_traces(fourbyfour):
    plan = build_plan(fourbyfour)
    report = sim.rate_report([], plan)
    assert report.sessions == 0
    assert report.per_source_rate is None
    assert report.sum_rate is None
    assert report.success_fraction is None


def test_run_session_requires_decode_sets(fourbyfour):
    realization = realize(fourbyfour, 4, seed=1)
    plan = PrecodingPlan(
        n=4, V=np.ones((4, 4), dtype=np.int64), thetas={}, realization=realization,
        forest=ForestDecomposition((), ()),
    )
    with pytest.raises(ValueError):
        sim.run_session(fourbyfour, realization, plan, messages=np.zeros(4, dtype=np.int64))


def test_success_on_random_forest_instances():
    rng = np.random.default_rng(41)
    for _ in range(5):
        net, _ = forest_instance(rng)
        plan = build_plan(net, seed=int(rng.integers(2**31)))
        for s in range(20):
            trace = sim.run_session(net, plan.realization, plan, seed=s)
            assert all(trace.success)
