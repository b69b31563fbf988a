import numpy as np
import pytest

from conftest import identity_path_joint, random_membership_joint, synthetic_graph
from mapalign.errors import CoincidentNodesError, InvalidParameterError
from mapalign.joint import JointGraph, build_joint
from mapalign.layout import (
    LayoutParams,
    energy,
    energy_gradient,
    optimize_layout,
    optimize_side,
    separate_side_by_side,
)


def single_edge_joint():
    graph = synthetic_graph([{"u"}, {"v"}], [(0, 1)], universe={"u", "v"})
    empty = synthetic_graph([{"u"}, {"v"}], [], universe={"u", "v"})
    empty = empty.__class__(nodes=(), edges=(), params=empty.params, universe=empty.universe, uncovered=frozenset())
    return JointGraph(graph_a=graph, graph_b=empty, inter_edges=())


def test_energy_lambda_zero_drops_align_term():
    joint = identity_path_joint(4)
    rng = np.random.default_rng(0)
    positions = {key: tuple(rng.normal(size=2)) for side in ("a", "b") for key in [(side, i) for i in range(4)]}
    params0 = LayoutParams(alignment_strength=0.0, repulsion=0.01)
    total, intra_a, intra_b, align = energy(positions, joint, params0)
    assert total == intra_a + intra_b
    assert align > 0  # the term exists, it just is not counted


def test_energy_two_singletons_align_contribution():
    universe = {"s"}
    ga = synthetic_graph([{"s"}], [], universe)
    gb = synthetic_graph([{"s"}], [], universe)
    joint = build_joint(ga, gb)
    assert [e.w for e in joint.inter_edges] == [1.0]
    positions = {("a", 0): (0.0, 0.0), ("b", 0): (2.0, 0.0)}
    params = LayoutParams(alignment_strength=1.0, repulsion=0.01)
    total, intra_a, intra_b, align = energy(positions, joint, params)
    assert align == pytest.approx(4.0)
    assert intra_a == 0.0 and intra_b == 0.0
    assert total == pytest.approx(4.0)


def test_energy_rejects_coincident_same_graph_nodes():
    joint = identity_path_joint(3)
    positions = {("a", 0): (0.0, 0.0), ("a", 1): (0.0, 0.0), ("a", 2): (1.0, 1.0),
                 ("b", 0): (0.1, 0.1), ("b", 1): (0.5, 0.5), ("b", 2): (0.9, 0.9)}
    with pytest.raises(CoincidentNodesError):
        energy(positions, joint, LayoutParams(repulsion=0.01))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    joint = random_membership_joint(seed=11)
    params = LayoutParams(alignment_strength=0.8, repulsion=0.02, preferred_edge_length=1.2)
    keys = [("a", n.id) for n in joint.graph_a.nodes] + [("b", n.id) for n in joint.graph_b.nodes]
    positions = {key: tuple(rng.normal(scale=1.5, size=2)) for key in keys}
    grad = energy_gradient(positions, joint, params)
    h = 1e-6
    for key in keys:
        for axis in range(2):
            plus, minus = dict(positions), dict(positions)
            bumped = list(positions[key])
            bumped[axis] += h
            plus[key] = tuple(bumped)
            bumped = list(positions[key])
            bumped[axis] -= h
            minus[key] = tuple(bumped)
            fd = (energy(plus, joint, params)[0] - energy(minus, joint, params)[0]) / (2 * h)
            assert abs(fd - grad[key][axis]) / max(1.0, abs(grad[key][axis])) < 1e-5


def test_spring_equilibrium_without_repulsion():
    joint = single_edge_joint()
    params = LayoutParams(
        alignment_strength=0.0,
        repulsion=1e-9,
        preferred_edge_length=1.0,
        max_iters=5000,
        convergence_tol=1e-8,
        step_decay=1.0,
        seed=1,
    )
    result = optimize_layout(joint, params)
    (x0, y0), (x1, y1) = result.positions[("a", 0)], result.positions[("a", 1)]
    assert np.hypot(x0 - x1, y0 - y1) == pytest.approx(1.0, abs=1e-3)


def test_lambda_zero_is_bitwise_decoupled():
    joint = identity_path_joint(6)
    params = LayoutParams(alignment_strength=0.0, repulsion=0.005, max_iters=300, seed=3)
    joint_run = optimize_layout(joint, params)
    solo_a = optimize_side(joint.graph_a, "a", params)
    solo_b = optimize_side(joint.graph_b, "b", params)
    for i in range(6):
        assert joint_run.positions[("a", i)] == solo_a.positions[("a", i)]
        assert joint_run.positions[("b", i)] == solo_b.positions[("b", i)]


def matched_pair_distance(result, n):
    return float(
        np.mean(
            [
                np.hypot(
                    result.positions[("a", i)][0] - result.positions[("b", i)][0],
                    result.positions[("a", i)][1] - result.positions[("b", i)][1],
                )
                for i in range(n)
            ]
        )
    )


def test_alignment_strength_pulls_matched_pairs_together():
    joint = identity_path_joint(6)
    coupled, free = [], []
    for seed in range(10):
        base = dict(repulsion=0.005, max_iters=300, seed=seed)
        free.append(matched_pair_distance(optimize_layout(joint, LayoutParams(alignment_strength=0.0, **base)), 6))
        coupled.append(matched_pair_distance(optimize_layout(joint, LayoutParams(alignment_strength=5.0, **base)), 6))
    assert np.mean(coupled) < np.mean(free)


def test_energy_trace_non_increasing_and_final_low():
    joint = random_membership_joint(seed=21)
    result = optimize_layout(joint, LayoutParams(alignment_strength=1.0, repulsion=0.01, max_iters=150, seed=0))
    trace = result.energy_trace
    assert all(later <= earlier + 1e-9 for earlier, later in zip(trace, trace[1:]))
    assert result.final_energy <= trace[0]
    assert result.final_energy == trace[-1]


def test_determinism_same_seed():
    joint = random_membership_joint(seed=31)
    params = LayoutParams(alignment_strength=0.7, repulsion=0.01, max_iters=120, seed=9)
    first = optimize_layout(joint, params)
    second = optimize_layout(joint, params)
    assert first.positions == second.positions
    assert first.energy_trace == second.energy_trace


def test_warm_start_used_and_deterministic():
    joint = random_membership_joint(seed=41)
    params = LayoutParams(alignment_strength=0.0, repulsion=0.01, max_iters=100, seed=2)
    cold = optimize_layout(joint, params)
    warm_params = LayoutParams(alignment_strength=2.0, repulsion=0.01, max_iters=100, seed=2)
    warm1 = optimize_layout(joint, warm_params, initial_positions=cold.positions)
    warm2 = optimize_layout(joint, warm_params, initial_positions=cold.positions)
    assert warm1.positions == warm2.positions


def test_separate_side_by_side_gap_exact():
    joint = identity_path_joint(5)
    result = optimize_layout(joint, LayoutParams(alignment_strength=3.0, repulsion=0.005, max_iters=150, seed=4))
    margin = 0.75
    separated = separate_side_by_side(result, margin)
    max_a = max(x for (s, _), (x, _) in separated.positions.items() if s == "a")
    min_b = min(x for (s, _), (x, _) in separated.positions.items() if s == "b")
    assert min_b - max_a == pytest.approx(margin, abs=1e-9)
    assert separated.offsets["a"] == (0.0, 0.0)
    assert separated.offsets["b"][1] == 0.0


def test_separate_preserves_intra_distances():
    joint = random_membership_joint(seed=51)
    result = optimize_layout(joint, LayoutParams(max_iters=60, seed=1))
    separated = separate_side_by_side(result, 2.0)
    for side in ("a", "b"):
        before = result.side_positions(side)
        after = separated.side_positions(side)
        ids = sorted(before)
        for i in ids:
            for j in ids:
                if i < j:
                    d_before = np.hypot(before[i][0] - before[j][0], before[i][1] - before[j][1])
                    d_after = np.hypot(after[i][0] - after[j][0], after[i][1] - after[j][1])
                    assert abs(d_before - d_after) < 1e-12


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        LayoutParams(alignment_strength=-1.0)
    with pytest.raises(InvalidParameterError):
        LayoutParams(preferred_edge_length=0.0)
    with pytest.raises(InvalidParameterError):
        LayoutParams(step_decay=0.0)
