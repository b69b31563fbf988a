import numpy as np
import pytest

from mapalign.errors import InvalidParameterError
from mapalign.membrane import (
    internal_layout,
    membrane_energy,
    membrane_gradient,
    membrane_layout,
    oval_radius,
)
from mapalign.merge import Supernode


def sn(sid, side, members, constituents=None, internal_edges=()):
    constituents = constituents if constituents is not None else {sid}
    return Supernode(
        id=sid,
        side=side,
        members=frozenset(members),
        constituents=frozenset(constituents),
        internal_edges=tuple(internal_edges),
    )


def test_single_correspondence_is_vertical():
    state = {0: sn(0, "a", {"x"}), 1: sn(1, "b", {"x"})}
    layout = membrane_layout(state, {(0, 1): 1.0}, gap=1.0, seed=0)
    (xa, ya) = layout.supernode_positions[0]
    (xb, yb) = layout.supernode_positions[1]
    assert ya == 0.0 and yb == 1.0
    assert abs(xa - xb) < 1e-3  # the inter-edge is vertical, length = gap


def test_two_disjoint_correspondences_vertical_and_separated():
    state = {
        0: sn(0, "a", {"x"}),
        1: sn(1, "a", {"y"}),
        2: sn(2, "b", {"x"}),
        3: sn(3, "b", {"y"}),
    }
    weights = {(0, 2): 1.0, (1, 3): 1.0}
    layout = membrane_layout(state, weights, gap=1.0, seed=1)
    x = {k: v[0] for k, v in layout.supernode_positions.items()}
    assert abs(x[0] - x[2]) < 1e-3
    assert abs(x[1] - x[3]) < 1e-3
    assert abs(x[0] - x[1]) > 0.1  # 1D repulsion keeps the pairs apart


def test_layer_constraint_bit_exact():
    rng = np.random.default_rng(2)
    state = {}
    for sid in range(6):
        side = "a" if sid < 3 else "b"
        state[sid] = sn(sid, side, {f"m{sid}"})
    weights = {(0, 3): 0.5, (1, 4): 0.9, (2, 5): 0.4}
    gap = 2.5
    layout = membrane_layout(state, weights, gap=gap, seed=3)
    for sid, (x, y) in layout.supernode_positions.items():
        assert y == (0.0 if state[sid].side == "a" else gap)


def test_membrane_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    n = 7
    x = rng.normal(0, 2, n)
    layer = np.array([0, 0, 0, 1, 1, 1, 1])
    inter = [(0, 3, 0.5), (1, 4, 0.9), (2, 5, 0.3), (2, 6, 0.8)]
    grad = membrane_gradient(x, layer, inter, 1.0, 0.05)
    h = 1e-6
    for i in range(n):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fd = (membrane_energy(xp, layer, inter, 1.0, 0.05) - membrane_energy(xm, layer, inter, 1.0, 0.05)) / (2 * h)
        assert abs(fd - grad[i]) / max(1.0, abs(grad[i])) < 1e-5


def test_global_positions_anchor_initialization():
    state = {0: sn(0, "a", {"x"}, constituents={5}), 1: sn(1, "b", {"x"}, constituents={7})}
    layout = membrane_layout(
        state,
        {},
        gap=1.0,
        seed=0,
        global_positions={("a", 5): (3.25, 0.4), ("b", 7): (-1.5, 2.0)},
    )
    assert layout.supernode_positions[0][0] == pytest.approx(3.25)
    assert layout.supernode_positions[1][0] == pytest.approx(-1.5)


def test_internal_layout_single_constituent_centered():
    node = sn(0, "a", {"m"}, constituents={4})
    assert internal_layout(node, seed=0) == {4: (0.0, 0.0)}


def test_internal_layout_path_collinear():
    node = sn(0, "a", {f"m{i}" for i in range(9)}, constituents={0, 1, 2}, internal_edges=[(0, 1), (1, 2)])
    positions = internal_layout(node, seed=1, radius=1.0)
    p = np.array([positions[i] for i in (0, 1, 2)])
    # deviation of the middle point from the chord, relative to chord length
    chord = p[2] - p[0]
    rel = p[1] - p[0]
    deviation = abs(chord[0] * rel[1] - chord[1] * rel[0]) / (np.linalg.norm(chord) ** 2 + 1e-12)
    assert deviation < 0.1


def test_internal_layout_fits_radius():
    rng = np.random.default_rng(5)
    for trial in range(5):
        count = int(rng.integers(2, 8))
        constituents = set(range(count))
        edges = [(i, i + 1) for i in range(count - 1)]
        node = sn(0, "a", {f"m{i}" for i in range(count * 2)}, constituents=constituents, internal_edges=edges)
        radius = oval_radius(len(node.members))
        positions = internal_layout(node, seed=trial, radius=radius)
        for xy in positions.values():
            assert np.hypot(*xy) <= radius + 1e-9


def test_oval_radius_monotone_in_member_count():
    values = [oval_radius(n) for n in (1, 2, 5, 10, 100)]
    assert values == sorted(values)


def test_membrane_deterministic():
    state = {0: sn(0, "a", {"x", "y"}), 1: sn(1, "a", {"z"}), 2: sn(2, "b", {"x", "z"})}
    weights = {(0, 2): 0.5, (1, 2): 0.5}
    first = membrane_layout(state, weights, gap=1.0, seed=7)
    second = membrane_layout(state, weights, gap=1.0, seed=7)
    assert first.supernode_positions == second.supernode_positions
    assert first.internal_layouts == second.internal_layouts


def test_gap_must_be_positive():
    with pytest.raises(InvalidParameterError):
        membrane_layout({0: sn(0, "a", {"x"})}, {}, gap=0.0, seed=0)
