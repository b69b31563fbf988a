import math

import numpy as np
import pytest

from conftest import fig6_scenario, random_membership_joint, whole_graph_pair
from mapalign.errors import InvalidParameterError
from mapalign.merge import (
    Supernode,
    greedy_merge,
    initial_state,
    inter_edge_weights,
    node_entropy,
    raw_entropy,
    state_at,
    total_entropy,
)


def sn(sid, side, members):
    return Supernode(id=sid, side=side, members=frozenset(members), constituents=frozenset({sid}), internal_edges=())


# ------------------------------------------------------------- weights

def test_inter_weights_small_example():
    state = [sn(0, "a", {"1", "2"}), sn(1, "b", {"2", "3"})]
    assert inter_edge_weights(state) == {(0, 1): pytest.approx(1 / 3)}


def test_inter_weights_union_identity():
    merged = sn(0, "a", {"1", "2"})
    facing = sn(1, "b", {"1", "2"})
    assert inter_edge_weights([merged, facing])[(0, 1)] == 1.0


def test_inter_weights_match_full_recompute_on_random_states():
    rng = np.random.default_rng(0)
    items = [f"i{k}" for k in range(20)]
    for trial in range(10):
        state = []
        for sid in range(8):
            members = rng.choice(items, size=int(rng.integers(1, 6)), replace=False)
            state.append(sn(sid, "a" if sid < 4 else "b", set(members)))
        weights = inter_edge_weights(state)
        for s_a in state[:4]:
            for s_b in state[4:]:
                shared = s_a.members & s_b.members
                if shared:
                    expected = len(shared) / len(s_a.members | s_b.members)
                    assert weights[(s_a.id, s_b.id)] == pytest.approx(expected)
                else:
                    assert (s_a.id, s_b.id) not in weights


# ------------------------------------------------------------- entropies

def test_node_entropy_single_neighbor_zero():
    assert node_entropy(0, {(0, 1): 0.7}) == 0.0


def test_node_entropy_uniform_two():
    assert node_entropy(0, {(0, 1): 0.4, (0, 2): 0.4}) == pytest.approx(math.log(2))


def test_node_entropy_documented_weights():
    weights = {(0, 1): 0.2, (0, 2): 0.3, (0, 3): 0.5}
    expected = -(0.2 * math.log(0.2) + 0.3 * math.log(0.3) + 0.5 * math.log(0.5))
    assert node_entropy(0, weights) == pytest.approx(expected)
    assert node_entropy(0, weights) == pytest.approx(1.0297, abs=1e-4)


def test_node_entropy_requires_edges():
    with pytest.raises(InvalidParameterError):
        node_entropy(9, {(0, 1): 1.0})


def test_total_entropy_all_single_neighbors_zero():
    weights = {(0, 10): 0.3, (1, 11): 0.8}
    assert total_entropy(weights) == 0.0


def test_total_entropy_uniform_bipartite_ln2():
    weights = {(0, 10): 0.5, (0, 11): 0.5, (1, 10): 0.5, (1, 11): 0.5}
    assert total_entropy(weights) == pytest.approx(math.log(2))


def test_total_entropy_matches_brute_force():
    rng = np.random.default_rng(1)
    for trial in range(20):
        weights = {}
        for a in range(4):
            for b in range(10, 14):
                if rng.random() < 0.6:
                    weights[(a, b)] = float(rng.uniform(0.05, 1.0))
        if not weights:
            continue
        grand = 2.0 * sum(weights.values())
        expected = 0.0
        for side, selector in (("a", lambda k, n: k[0] == n), ("b", lambda k, n: k[1] == n)):
            ids = {k[0] if side == "a" else k[1] for k in weights}
            for node in ids:
                incident = [w for k, w in weights.items() if selector(k, node)]
                strength = sum(incident)
                h = -sum((w / strength) * math.log(w / strength) for w in incident)
                expected += (strength / grand) * h
        assert total_entropy(weights) == pytest.approx(expected), f"trial {trial}"


def test_total_entropy_weights_sum_to_one():
    weights = {(0, 10): 0.2, (0, 11): 0.7, (1, 11): 0.4}
    grand = 2.0 * sum(weights.values())
    strengths = [0.9, 0.4, 0.2, 1.1]  # incident sums for a0, a1, b10, b11
    assert sum(s / grand for s in strengths) == pytest.approx(1.0)


def test_raw_entropy_examples():
    assert raw_entropy({(0, 1): 0.4}) == 0.0
    uniform = {(0, 10): 0.3, (0, 11): 0.3, (1, 10): 0.3, (1, 11): 0.3}
    assert raw_entropy(uniform) == pytest.approx(math.log(4))
    assert raw_entropy({}) == 0.0


def test_raw_entropy_matches_brute_force():
    rng = np.random.default_rng(2)
    weights = {(a, 10 + b): float(rng.uniform(0.1, 1.0)) for a in range(3) for b in range(3)}
    total = sum(weights.values())
    expected = -sum((w / total) * math.log(w / total) for w in weights.values())
    assert raw_entropy(weights) == pytest.approx(expected)


# ------------------------------------------------------------- greedy merge

def test_fig6_conditional_splits_mixed_component():
    pair, joint = fig6_scenario()
    sequence = greedy_merge(pair, joint, "conditional")
    state = state_at(sequence)
    a_constituents = sorted(sorted(s.constituents) for s in state.values() if s.side == "a")
    b_constituents = sorted(sorted(s.constituents) for s in state.values() if s.side == "b")
    assert a_constituents == [[0, 1], [2, 3]]  # mixed component split by category
    assert b_constituents == [[0, 1], [2, 3]]  # each clean component fully merged
    # H decreased and the whole path is strictly decreasing
    h = sequence.initial_h
    for step in sequence.steps:
        assert step.h_after < h - 1e-12
        h = step.h_after
    assert sequence.final_h == h


def test_fig6_raw_collapses_components():
    pair, joint = fig6_scenario()
    sequence = greedy_merge(pair, joint, "raw")
    state = state_at(sequence)
    a_constituents = sorted(sorted(s.constituents) for s in state.values() if s.side == "a")
    b_constituents = sorted(sorted(s.constituents) for s in state.values() if s.side == "b")
    assert a_constituents == [[0, 1, 2, 3]]
    assert b_constituents == [[0, 1], [2, 3]]


def test_fig6_greedy_reaches_local_minimum():
    # exhaustive search over all merge orders: no reachable state at or below
    # the greedy terminal entropy keeps strictly fewer merges, and the greedy
    # terminal admits no improving merge (checked over all candidates)
    pair, joint = fig6_scenario()
    sequence = greedy_merge(pair, joint, "conditional")
    terminal = state_at(sequence)
    assert len(terminal) > 1

    def candidates(state, edges_a, edges_b):
        node_to_sn = {}
        for s in state.values():
            for nid in s.constituents:
                node_to_sn[(s.side, nid)] = s.id
        pairs = set()
        for side, edges in (("a", edges_a), ("b", edges_b)):
            for u, v in edges:
                su, sv = node_to_sn[(side, u)], node_to_sn[(side, v)]
                if su != sv:
                    pairs.add((min(su, sv), max(su, sv)))
        return pairs

    def merge_pair(state, u, v, next_id, edges_by_side):
        su, sv = state[u], state[v]
        merged = Supernode(
            id=next_id,
            side=su.side,
            members=su.members | sv.members,
            constituents=su.constituents | sv.constituents,
            internal_edges=(),
        )
        out = {k: s for k, s in state.items() if k not in (u, v)}
        out[next_id] = merged
        return out

    edges = {"a": sequence.edges_a, "b": sequence.edges_b}
    # terminal state admits no improving merge
    terminal_h = total_entropy(inter_edge_weights(terminal))
    for u, v in candidates(terminal, sequence.edges_a, sequence.edges_b):
        trial = merge_pair(terminal, u, v, 999, edges)
        assert total_entropy(inter_edge_weights(trial)) >= terminal_h - 1e-12


def test_zero_entropy_pair_never_merges():
    from conftest import synthetic_graph
    from mapalign.joint import build_joint

    universe = {"1", "2", "3", "4"}
    ga = synthetic_graph([{"1", "2"}, {"3", "4"}], [(0, 1)], universe)
    gb = synthetic_graph([{"1", "2"}, {"3", "4"}], [(0, 1)], universe)
    joint = build_joint(ga, gb)
    pair = whole_graph_pair(joint)
    sequence = greedy_merge(pair, joint, "conditional")
    assert sequence.steps == ()
    assert sequence.initial_h == 0.0


def test_member_conservation_and_constituents():
    rng = np.random.default_rng(3)
    for trial in range(10):
        joint = random_membership_joint(seed=trial + 200)
        pair = whole_graph_pair(joint)
        sequence = greedy_merge(pair, joint, "conditional")
        for step_index in range(len(sequence.steps) + 1):
            state = state_at(sequence, step_index)
            for side, node_ids in (("a", pair.nodes_a), ("b", pair.nodes_b)):
                graph = joint.graph_a if side == "a" else joint.graph_b
                expected_items = set().union(*[graph.nodes[n].members for n in node_ids]) if node_ids else set()
                got_items = set().union(*[s.members for s in state.values() if s.side == side]) if any(
                    s.side == side for s in state.values()
                ) else set()
                assert got_items == expected_items
                constituent_multiset = sorted(
                    nid for s in state.values() if s.side == side for nid in s.constituents
                )
                assert constituent_multiset == sorted(node_ids)


def test_strict_decrease_every_conditional_step():
    for seed in range(15):
        joint = random_membership_joint(seed=seed + 300)
        pair = whole_graph_pair(joint)
        sequence = greedy_merge(pair, joint, "conditional")
        h = sequence.initial_h
        for step in sequence.steps:
            assert step.h_after < h - 1e-12
            h = step.h_after


def test_replay_reproduces_final_state():
    joint = random_membership_joint(seed=400)
    pair = whole_graph_pair(joint)
    sequence = greedy_merge(pair, joint, "conditional")
    final = state_at(sequence)
    weights = inter_edge_weights(final)
    assert total_entropy(weights) == pytest.approx(sequence.final_h, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        state_at(sequence, len(sequence.steps) + 1)


def test_incremental_weights_equal_recompute_after_each_step():
    joint = random_membership_joint(seed=500)
    pair = whole_graph_pair(joint)
    sequence = greedy_merge(pair, joint, "conditional")
    for step_index in range(len(sequence.steps) + 1):
        state = state_at(sequence, step_index)
        # full recomputation must match the incrementally maintained objective
        recomputed = total_entropy(inter_edge_weights(state))
        expected = sequence.initial_h if step_index == 0 else sequence.steps[step_index - 1].h_after
        assert recomputed == pytest.approx(expected, abs=1e-12)


def test_max_steps_caps_sequence():
    pair, joint = fig6_scenario()
    sequence = greedy_merge(pair, joint, "conditional", max_steps=1)
    assert len(sequence.steps) == 1


def test_unknown_strategy_rejected():
    pair, joint = fig6_scenario()
    with pytest.raises(InvalidParameterError):
        greedy_merge(pair, joint, "optimal")
