import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockadesim.lattice import (
    BlockadeGraph,
    LatticeSpec,
    PhysicalParams,
    blockade_radius,
    build_blockade_graph,
    max_blocked_neighbors,
    mean_atoms_per_pseudoatom,
)


def test_three_cycle():
    g = build_blockade_graph(LatticeSpec("chain", 3, "periodic"))
    assert g.neighbors == ((1, 2), (0, 2), (0, 1))


def test_open_path():
    g = build_blockade_graph(LatticeSpec("chain", 4, "open"))
    assert g.neighbors == ((1,), (0, 2), (1, 3), (2,))


def test_square_grid():
    g = build_blockade_graph(LatticeSpec("grid", (2, 2)))
    # sites 0 1 / 2 3: each blocks its two orthogonal partners
    assert g.neighbors == ((1, 2), (0, 3), (0, 3), (1, 2))


def test_grid_range_two_uses_manhattan_distance():
    g = build_blockade_graph(LatticeSpec("grid", (3, 3), blockade_range=2))
    # center site 4 reaches everything except the corners at distance 2? no:
    # corners are at Manhattan distance 2 from the center, so all 8 are blocked
    assert g.neighbors[4] == (0, 1, 2, 3, 5, 6, 7, 8)
    assert g.neighbors[0] == (1, 2, 3, 4, 6)


@settings(max_examples=60)
@given(
    kind=st.sampled_from(["chain", "grid"]),
    size=st.integers(2, 12),
    cols=st.integers(1, 4),
    boundary=st.sampled_from(["open", "periodic"]),
    b=st.integers(1, 3),
)
def test_graph_symmetric(kind, size, cols, boundary, b):
    if kind == "chain":
        spec_args = ("chain", size, boundary, b)
    else:
        spec_args = ("grid", (size, cols), "open", b)
    try:
        spec = LatticeSpec(*spec_args)
    except ValueError:
        return
    g = build_blockade_graph(spec)
    for j, part in enumerate(g.neighbors):
        assert j not in part
        for q in part:
            assert j in g.neighbors[q]


@pytest.mark.parametrize("n,b", [(6, 1), (8, 2), (9, 3)])
def test_periodic_chain_partner_count(n, b):
    g = build_blockade_graph(LatticeSpec("chain", n, "periodic", b))
    assert all(len(part) == 2 * b for part in g.neighbors)


def test_open_chain_boundary_sites_have_fewer():
    g = build_blockade_graph(LatticeSpec("chain", 6, "open", 2))
    assert len(g.neighbors[0]) == 2
    assert len(g.neighbors[1]) == 3
    assert len(g.neighbors[3]) == 4


def test_spec_validation():
    with pytest.raises(ValueError):
        LatticeSpec("chain", 1, "open")
    with pytest.raises(ValueError):
        LatticeSpec("chain", 4, "open", blockade_range=0)
    with pytest.raises(ValueError):
        LatticeSpec("chain", 4, "open", blockade_range=4)  # everything blocked
    with pytest.raises(ValueError):
        LatticeSpec("grid", (2, 2), "periodic")
    with pytest.raises(ValueError):
        LatticeSpec("ring", 4, "open")
    with pytest.raises(ValueError):
        LatticeSpec("grid", (1, 1))


def test_graph_validation():
    with pytest.raises(ValueError):
        BlockadeGraph(2, ((1,), ()))  # asymmetric
    with pytest.raises(ValueError):
        BlockadeGraph(2, ((0,), (0,)))  # self-loop


def test_blockade_radius():
    assert blockade_radius(1.0, 1.0) == pytest.approx(1.0)
    assert blockade_radius(64.0, 1.0) == pytest.approx(2.0)
    assert blockade_radius(1.0, 64.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        blockade_radius(-1.0, 1.0)
    with pytest.raises(ValueError):
        blockade_radius(1.0, 0.0)


def test_mean_atoms_per_pseudoatom():
    assert mean_atoms_per_pseudoatom(1, 1, 1, 2) == pytest.approx(1.0)
    assert mean_atoms_per_pseudoatom(3, 2, 1, 4) == pytest.approx(3.0)
    assert mean_atoms_per_pseudoatom(12, 1, 2, 16) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        mean_atoms_per_pseudoatom(0, 1, 1, 2)


def test_max_blocked_neighbors_small_counts():
    assert [max_blocked_neighbors(nw, 6.0) for nw in range(2, 7)] == [0, 1, 1, 1, 2]
    assert max_blocked_neighbors(3, 6.0) == 1  # simplest nontrivial partition


def test_max_blocked_neighbors_large():
    bound = 0.5 * 100 * 6.0 ** (-1.0 / 6.0)  # ~37.09
    expected = math.ceil(bound) - 1
    assert expected == 37
    assert max_blocked_neighbors(100, 6.0) == expected


@settings(max_examples=60)
@given(nw=st.integers(2, 199), eta=st.floats(0.5, 50.0))
def test_max_blocked_monotone(nw, eta):
    assert max_blocked_neighbors(nw + 1, eta) >= max_blocked_neighbors(nw, eta)
    assert max_blocked_neighbors(nw, eta + 0.5) <= max_blocked_neighbors(nw, eta)


def test_max_blocked_validation():
    with pytest.raises(ValueError):
        max_blocked_neighbors(1, 6.0)
    with pytest.raises(ValueError):
        max_blocked_neighbors(4, 0.0)


def test_physical_params():
    p = PhysicalParams(c6=64.0, omega=1.0, density=3.0, transverse_area=1.0, n_w=4)
    assert p.r_b == pytest.approx(2.0)
    assert p.mean_occupancy == pytest.approx(2 * 3 * 2.0 * 1.0 / 4)
    assert p.blocked_neighbors == max_blocked_neighbors(4, 6.0)
    with pytest.raises(ValueError):
        PhysicalParams(c6=0.0, omega=1.0, density=1.0, transverse_area=1.0, n_w=2)
