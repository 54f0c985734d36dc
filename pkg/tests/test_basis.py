import numpy as np
import pytest
from oracles import (
    admissible,
    brute_force_states,
    chain_neighbors,
    fibonacci,
    grid_neighbors,
    lucas,
)

from blockadesim.basis import (
    RestrictedBasis,
    enumerate_full,
    enumerate_restricted,
    max_excitations,
)
from blockadesim.lattice import BlockadeGraph, LatticeSpec, build_blockade_graph


def chain_basis(n, boundary="open", b=1):
    return enumerate_restricted(build_blockade_graph(LatticeSpec("chain", n, boundary, b)))


def test_two_site_open():
    basis = chain_basis(2)
    assert basis.states.tolist() == [0b00, 0b01, 0b10]
    assert basis.dim == 3


def test_four_site_periodic():
    assert chain_basis(4, "periodic").dim == 7


def test_sixteen_site_periodic_is_lucas():
    basis = chain_basis(16, "periodic")
    assert basis.dim == 2207
    assert basis.dim == lucas(16)


@pytest.mark.parametrize("n", range(2, 13))
@pytest.mark.parametrize("boundary", ["open", "periodic"])
def test_matches_brute_force(n, boundary):
    basis = chain_basis(n, boundary)
    expected = brute_force_states(chain_neighbors(n, boundary == "periodic"))
    assert basis.states.tolist() == expected


def test_open_chain_fibonacci_recurrence():
    dims = {n: chain_basis(n).dim for n in range(2, 21)}
    for n in range(4, 21):
        assert dims[n] == dims[n - 1] + dims[n - 2]
    assert all(dims[n] == fibonacci(n + 2) for n in dims)


def test_grid_counts_match_brute_force():
    for rows, cols in [(2, 2), (2, 3), (3, 3), (3, 4)]:
        graph = build_blockade_graph(LatticeSpec("grid", (rows, cols)))
        basis = enumerate_restricted(graph)
        assert basis.states.tolist() == brute_force_states(grid_neighbors(rows, cols))


def test_grid_5x5_regression_constant():
    # exhaustive scan over 2^25 masks, recorded once as a regression value
    graph = build_blockade_graph(LatticeSpec("grid", (5, 5)))
    assert enumerate_restricted(graph, cap=1 << 25).dim == 55447


def test_round_trip_index():
    for basis in (chain_basis(9, "periodic"), chain_basis(10), enumerate_full(6)):
        pos = basis.index_of(basis.states)
        assert np.array_equal(pos, np.arange(basis.dim))
        assert basis.index_of(int(basis.states[5])) == 5


def test_index_of_rejects_missing():
    basis = chain_basis(4, "periodic")
    with pytest.raises(KeyError):
        basis.index_of(0b0011)


def test_every_state_admissible_and_none_missing():
    graph = build_blockade_graph(LatticeSpec("chain", 8, "periodic", 2))
    basis = enumerate_restricted(graph)
    assert all(admissible(int(m), graph.neighbors) for m in basis.states)
    assert basis.states.tolist() == brute_force_states(graph.neighbors)


def test_enumerate_full():
    assert enumerate_full(2).states.tolist() == [0, 1, 2, 3]
    assert enumerate_full(5).dim == 32
    assert enumerate_full(16).dim == 65536


def test_caps():
    graph = build_blockade_graph(LatticeSpec("chain", 8, "open"))
    with pytest.raises(ValueError, match="cap"):
        enumerate_restricted(graph, cap=10)
    with pytest.raises(ValueError, match="cap"):
        enumerate_full(8, cap=100)
    with pytest.raises(ValueError, match="scan limit"):
        enumerate_restricted(BlockadeGraph(31, tuple(() for _ in range(31))))


def test_max_excitations():
    assert max_excitations(chain_basis(16, "periodic")) == 8
    assert max_excitations(chain_basis(5, "open")) == 3  # pattern 10101
    basis5 = chain_basis(5, "periodic")
    assert max_excitations(basis5) == 2
    assert max_excitations(basis5) == max(
        bin(m).count("1") for m in brute_force_states(chain_neighbors(5, True))
    )


def test_state_strings_lsb_first():
    assert chain_basis(2).to_strings() == ["00", "10", "01"]


def test_popcounts_and_bits():
    basis = chain_basis(6, "periodic")
    masks = basis.states
    assert np.array_equal(basis.popcounts, np.array([bin(int(m)).count("1") for m in masks]))
    for k in range(6):
        assert np.array_equal(basis.bits(k), (masks >> k) & 1)


def test_basis_constructor_validation():
    with pytest.raises(ValueError):
        RestrictedBasis(2, np.array([0, 0, 1]))  # not strictly ascending
    with pytest.raises(ValueError):
        RestrictedBasis(2, np.array([], dtype=np.int64))
