import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import reduced_pair_from_full, embed_restricted, two_site_amplitudes
from scipy.linalg import sqrtm

from blockadesim import observables as obs
from blockadesim.basis import enumerate_full, enumerate_restricted
from blockadesim.disorder import sample_configuration
from blockadesim.dynamics import StateVector, TimeGrid, propagate
from blockadesim.hamiltonians import BlockadeHamiltonian
from blockadesim.lattice import LatticeSpec, build_blockade_graph

BELL_GE_EG = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2)  # (|ge> + |eg>)/sqrt(2)
PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)


def chain_state(n, boundary="periodic", amplitudes=None, seed=0):
    graph = build_blockade_graph(LatticeSpec("chain", n, boundary))
    basis = enumerate_restricted(graph)
    if amplitudes is None:
        rng = np.random.default_rng(seed)
        amplitudes = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        amplitudes /= np.linalg.norm(amplitudes)
    return StateVector(np.asarray(amplitudes, complex), basis)


def ground_state(n, boundary="periodic"):
    graph = build_blockade_graph(LatticeSpec("chain", n, boundary))
    basis = enumerate_restricted(graph)
    amplitudes = np.zeros(basis.dim, complex)
    amplitudes[basis.index_of(0)] = 1.0
    return StateVector(amplitudes, basis)


# ---------------------------------------------------------------------------
# excitation fraction


def test_excitation_fraction_examples():
    assert obs.excitation_fraction(ground_state(6)) == 0.0
    w_pair = chain_state(2, "open", amplitudes=[0.0, 1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert obs.excitation_fraction(w_pair) == pytest.approx(0.5)


def test_excitation_fraction_matches_site_sum():
    state = chain_state(7, seed=3)
    graph = build_blockade_graph(LatticeSpec("chain", 7, "periodic"))
    ham = BlockadeHamiltonian(state.basis, graph, np.ones(7))
    traj = propagate(ham, TimeGrid(2.0, 0.5))
    series = obs.excitation_series(traj)
    per_site = obs.site_occupation_series(traj)
    assert np.allclose(series, per_site.sum(axis=1) / 7, atol=1e-12)
    assert series.max() <= (7 // 2) / 7 + 1e-9


# ---------------------------------------------------------------------------
# reductions


def test_reduce_two_site_product_state():
    rho = obs.reduce_two_site(ground_state(5), 0, 3)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.allclose(rho, expected, atol=1e-14)


def test_reduce_two_site_bell_pair():
    state = chain_state(2, "open", amplitudes=[0.0, 1 / np.sqrt(2), 1 / np.sqrt(2)])
    rho = obs.reduce_two_site(state, 0, 1)
    assert np.allclose(rho, np.outer(BELL_GE_EG, BELL_GE_EG), atol=1e-14)


def test_reduce_two_site_matches_full_space_oracle():
    state = chain_state(3, seed=7)
    full = embed_restricted(state.amplitudes, state.basis.states, 3)
    want = reduced_pair_from_full(full, 3, 0, 2)
    got = obs.reduce_two_site(state, 0, 2)
    assert np.abs(got - want).max() < 1e-12
    # argument order does not change the lower-site-first convention
    assert np.abs(obs.reduce_two_site(state, 2, 0) - want).max() < 1e-12


def test_reduce_two_site_random_larger_chain():
    state = chain_state(8, seed=11)
    full = embed_restricted(state.amplitudes, state.basis.states, 8)
    for j, k in [(0, 1), (2, 6), (1, 4)]:
        want = reduced_pair_from_full(full, 8, j, k)
        assert np.abs(obs.reduce_two_site(state, j, k) - want).max() < 1e-12


def test_reduce_one_site():
    bell = chain_state(2, "open", amplitudes=[0.0, 1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert np.allclose(obs.reduce_one_site(bell, 0), np.eye(2) / 2, atol=1e-14)
    gg = ground_state(2, "open")
    assert np.allclose(obs.reduce_one_site(gg, 1), np.diag([1.0, 0.0]), atol=1e-14)


def test_one_site_two_paths_agree():
    state = chain_state(5, seed=9)
    rho_pair = obs.reduce_two_site(state, 1, 3)
    assert np.abs(obs.reduce_one_site(rho_pair, 0) - obs.reduce_one_site(state, 1)).max() < 1e-12
    assert np.abs(obs.reduce_one_site(rho_pair, 1) - obs.reduce_one_site(state, 3)).max() < 1e-12


def test_pair_marginals_batched():
    state = chain_state(6, seed=13)
    rho = obs.reduce_two_site(state, 0, 2)
    lo, hi = obs.pair_marginals(np.stack([rho, rho]))
    assert lo.shape == (2, 2, 2)
    assert np.allclose(lo[0], obs.reduce_one_site(rho, 0), atol=1e-14)
    assert np.allclose(hi[1], obs.reduce_one_site(rho, 1), atol=1e-14)


def test_reducer_validation():
    state = chain_state(4)
    with pytest.raises(ValueError):
        obs.reduce_two_site(state, 2, 2)
    with pytest.raises(ValueError):
        obs.reduce_two_site(state, 0, 9)


# ---------------------------------------------------------------------------
# concurrence / EOF / total correlation


def test_concurrence_bell():
    assert obs.concurrence(np.outer(BELL_GE_EG, BELL_GE_EG)) == pytest.approx(1.0, abs=1e-12)


def test_concurrence_product_states():
    rng = np.random.default_rng(2)
    for _ in range(5):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
        assert obs.concurrence(np.outer(psi, psi.conj())) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("p", [0.0, 1 / 3, 0.6, 1.0, 0.21, 0.84])
def test_concurrence_werner_family(p):
    rho = p * np.outer(PHI_PLUS, PHI_PLUS) + (1 - p) * np.eye(4) / 4
    assert obs.concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def test_concurrence_agrees_with_sqrtm_route():
    # independent evaluation through R = sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho)
    state = chain_state(6, seed=21)
    rho = obs.reduce_two_site(state, 0, 1)
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]).real
    root = sqrtm(rho)
    r = root @ yy @ rho.conj() @ yy @ root
    lams = np.sqrt(np.clip(np.linalg.eigvals(r).real, 0, None))
    lams.sort()
    expected = max(0.0, lams[3] - lams[2] - lams[1] - lams[0])
    assert obs.concurrence(rho) == pytest.approx(expected, abs=1e-10)


def test_concurrence_rejects_bad_input():
    with pytest.raises(ValueError):
        obs.concurrence(np.eye(4))  # trace 4
    bad = np.diag([1.2, -0.2, 0.0, 0.0])
    with pytest.raises(ValueError):
        obs.concurrence(bad)
    with pytest.raises(ValueError):
        obs.concurrence(np.eye(2))


def test_eof_endpoints_and_value():
    assert obs.entanglement_of_formation(0.0) == 0.0
    assert obs.entanglement_of_formation(1.0) == pytest.approx(1.0, abs=1e-12)
    expected = -(0.9 * np.log2(0.9) + 0.1 * np.log2(0.1))
    assert obs.entanglement_of_formation(0.6) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_eof_monotone(c1, c2):
    lo, hi = sorted([c1, c2])
    assert obs.entanglement_of_formation(lo) <= obs.entanglement_of_formation(hi) + 1e-12


def test_total_correlation_bell():
    rho = np.outer(BELL_GE_EG, BELL_GE_EG)
    lo, hi = obs.pair_marginals(rho)
    diff_eigs = np.linalg.eigvalsh(rho - np.kron(lo, hi))
    assert np.allclose(sorted(diff_eigs), [-0.25, -0.25, -0.25, 0.75], atol=1e-12)
    assert obs.total_correlation(rho) == pytest.approx(1.0, abs=1e-12)
    assert obs.total_correlation(rho, lo, hi) == pytest.approx(1.0, abs=1e-12)


def test_total_correlation_product_state():
    rho = np.diag([1.0, 0.0, 0.0, 0.0])
    assert obs.total_correlation(rho) == pytest.approx(0.0, abs=1e-14)


def test_total_correlation_matches_svd_route():
    state = chain_state(7, seed=23)
    rho = obs.reduce_two_site(state, 0, 3)
    lo, hi = obs.pair_marginals(rho)
    expected = (2.0 / 3.0) * np.linalg.svd(rho - np.kron(lo, hi), compute_uv=False).sum()
    assert obs.total_correlation(rho) == pytest.approx(expected, abs=1e-12)


def test_quantum_correlation_implies_total_correlation():
    graph = build_blockade_graph(LatticeSpec("chain", 6, "periodic"))
    basis = enumerate_restricted(graph)
    ham = BlockadeHamiltonian(basis, graph, sample_configuration(6, 3.0, 3, 0).couplings)
    traj = propagate(ham, TimeGrid(8.0, 0.1))
    reducer = obs.PairReducer(basis, 0, 1)
    rhos = reducer.matrices(traj.amplitudes)
    eof = obs.entanglement_of_formation(obs.concurrence_series(rhos))
    mc = obs.total_correlation_series(rhos)
    entangled = eof > 1e-12
    assert entangled.any()
    assert np.all(mc[entangled] > 0)


def test_two_site_measures_match_analytic():
    couplings = 0.8
    grid = TimeGrid(25.0, 0.05)
    ham = BlockadeHamiltonian(
        enumerate_restricted(build_blockade_graph(LatticeSpec("chain", 2, "open"))),
        build_blockade_graph(LatticeSpec("chain", 2, "open")),
        [couplings, couplings],
    )
    traj = propagate(ham, grid)
    reducer = obs.PairReducer(traj.basis, 0, 1)
    rhos = reducer.matrices(traj.amplitudes)
    eof = obs.entanglement_of_formation(obs.concurrence_series(rhos))
    mc = obs.total_correlation_series(rhos)

    # independent route: closed-form pure state, pure-state concurrence
    # |<psi| (sy x sy) |psi*>|, svd trace norm
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]).real
    amp = two_site_amplitudes(grid.times, couplings)
    eof_ref = np.empty(grid.times.size)
    mc_ref = np.empty(grid.times.size)
    for i in range(grid.times.size):
        psi = np.array([amp[i, 0], amp[i, 1], amp[i, 2], 0.0])
        rho = np.outer(psi, psi.conj())
        c = abs(psi.conj() @ (yy @ psi.conj()))
        x = (1 + math.sqrt(max(0.0, 1 - c * c))) / 2
        eof_ref[i] = 0.0 if x in (0.0, 1.0) else -(x * math.log2(x) + (1 - x) * math.log2(1 - x))
        lo, hi = obs.pair_marginals(rho)
        mc_ref[i] = (2 / 3) * np.linalg.svd(rho - np.kron(lo, hi), compute_uv=False).sum()
    assert np.abs(eof - eof_ref).max() < 1e-8
    assert np.abs(mc - mc_ref).max() < 1e-8


def test_bounds_assertion_fires():
    rho = 1.5 * np.outer(BELL_GE_EG, BELL_GE_EG)  # unnormalized: concurrence 1.5
    with pytest.raises(RuntimeError, match="concurrence"):
        obs.concurrence_series(rho[None, :, :])


# ---------------------------------------------------------------------------
# pair-correlation ingredients


def test_pair_weights_zero_at_unit_distance_restricted():
    basis = enumerate_restricted(build_blockade_graph(LatticeSpec("chain", 8, "periodic")))
    assert np.all(obs.pair_occupation_weights(basis, 1, periodic=True) == 0.0)


def test_pair_weights_full_basis_hand_check():
    basis = enumerate_full(3)
    w = obs.pair_occupation_weights(basis, 1, periodic=False)
    # pairs (0,1) and (1,2); e.g. mask 0b011 hits only the first -> 1/2
    assert w[0b011] == pytest.approx(0.5)
    assert w[0b111] == pytest.approx(1.0)
    assert w[0b101] == 0.0
    w_wrap = obs.pair_occupation_weights(basis, 1, periodic=True)
    assert w_wrap[0b101] == pytest.approx(1.0 / 3.0)


def test_pair_correlation_ratio():
    assert obs.pair_correlation(0.02, 0.1) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        obs.pair_correlation(0.1, 0.0)


# ---------------------------------------------------------------------------
# series features


def test_first_peak_sine():
    times = TimeGrid(25.0, 0.05).times
    peak = obs.first_peak(times, np.sin(times))
    assert abs(peak.time - math.pi / 2) <= 0.05 + 1e-12
    assert peak.value == pytest.approx(1.0, abs=1e-3)


def test_first_peak_takes_first_of_two():
    times = np.linspace(0, 10, 101)
    values = np.exp(-((times - 3) ** 2)) + 2 * np.exp(-((times - 7) ** 2))
    peak = obs.first_peak(times, values)
    assert abs(peak.time - 3) < 0.2


def test_first_peak_errors():
    times = np.linspace(0, 1, 50)
    with pytest.raises(ValueError, match="peak"):
        obs.first_peak(times, times)  # monotone
    with pytest.raises(ValueError, match="peak"):
        obs.first_peak(times, np.ones(50))  # flat
    with pytest.raises(ValueError, match="7 samples"):
        obs.first_peak(times[:5], times[:5])


def test_saturation_average():
    times = TimeGrid(25.0, 0.05).times
    stats = obs.saturation_average(times, np.full(times.size, 0.3), (15.0, 25.0))
    assert stats == (pytest.approx(0.3), pytest.approx(0.0), 201)
    with pytest.raises(ValueError):
        obs.saturation_average(times, times, (30.0, 40.0))
    with pytest.raises(ValueError):
        obs.saturation_average(times, times, (20.0, 15.0))
    with pytest.warns(UserWarning, match="saturation"):
        obs.saturation_average(times, np.ones(times.size), (0.0, 25.0))


def test_blockaded_pair_long_time_average():
    grid = TimeGrid(25.0, 0.05)
    amp = two_site_amplitudes(grid.times, 1.0)
    pex = (np.abs(amp[:, 1]) ** 2 + np.abs(amp[:, 2]) ** 2) / 2
    with pytest.warns(UserWarning):
        stats = obs.saturation_average(grid.times, pex, (0.0, 25.0))
    assert stats.mean == pytest.approx(0.25, abs=0.005)


def test_correlation_series_validation():
    times = np.linspace(0, 1, 11)
    series = obs.CorrelationSeries(times, np.linspace(0, 1, 11), {"lam": 3.0})
    assert series.metadata["lam"] == 3.0
    with pytest.raises(ValueError):
        obs.CorrelationSeries(times, np.linspace(0, 1.5, 11))
    with pytest.raises(ValueError):
        obs.CorrelationSeries(times, np.linspace(0, 1, 10))
