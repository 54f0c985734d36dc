"""Built-in verification battery behind the ``validate`` subcommand.

Cross-checks the implementation against independent routes: direct
per-bitmask scans for basis dimensions, full-space versus restricted-basis
evolution, spectral versus iterative propagation, dense versus matrix-free
Hamiltonian action, conservation laws, and closed-form correlation values.
"""

from __future__ import annotations

import math

import numpy as np

from .basis import enumerate_full, enumerate_restricted, max_excitations
from .disorder import sample_configuration
from .dynamics import TimeGrid, propagate
from .hamiltonians import BlockadeHamiltonian, LongRangeHamiltonian
from .lattice import LatticeSpec, build_blockade_graph
from .observables import concurrence, entanglement_of_formation, total_correlation


def _direct_count(graph) -> int:
    # deliberately naive per-mask loop, independent of the vectorized scan
    count = 0
    for mask in range(1 << graph.n_sites):
        ok = True
        for j in range(graph.n_sites):
            if (mask >> j) & 1 and any((mask >> q) & 1 for q in graph.neighbors[j]):
                ok = False
                break
        if ok:
            count += 1
    return count


def _check_basis(max_n: int) -> tuple[bool, str]:
    open_dims = {}
    for n in range(2, max_n + 1):
        for boundary in ("open", "periodic"):
            graph = build_blockade_graph(LatticeSpec("chain", n, boundary))
            basis = enumerate_restricted(graph)
            if basis.dim != _direct_count(graph):
                return False, f"dimension mismatch at N={n} {boundary}"
            # wrap boundary caps at floor(N/2); an open odd chain fits one more
            expected = n // 2 if boundary == "periodic" else (n + 1) // 2
            if max_excitations(basis) != expected:
                return False, f"max excitation wrong at N={n} {boundary}"
            if boundary == "open":
                open_dims[n] = basis.dim
    for n in range(4, max_n + 1):
        if open_dims[n] != open_dims[n - 1] + open_dims[n - 2]:
            return False, f"open-chain recurrence broke at N={n}"
    return True, f"chains 2..{max_n}, open and periodic"


def _check_full_vs_restricted(max_n: int, seed: int) -> tuple[bool, str]:
    grid = TimeGrid(t_max=10.0, dt=0.1)
    worst = 0.0
    for n in range(4, min(max_n, 10) + 1, 2):
        for boundary in ("open", "periodic"):
            graph = build_blockade_graph(LatticeSpec("chain", n, boundary))
            config = sample_configuration(n, 3.0, seed, 0)
            small = propagate(BlockadeHamiltonian(enumerate_restricted(graph), graph, config), grid)
            big = propagate(BlockadeHamiltonian(enumerate_full(n), graph, config), grid)
            # the full basis is indexed by the mask itself
            embedded = np.zeros_like(big.amplitudes)
            embedded[:, small.basis.states] = small.amplitudes
            worst = max(worst, float(np.abs(embedded - big.amplitudes).max()))
    return worst < 1e-10, f"max amplitude deviation {worst:.2e} (tolerance 1e-10)"


def _check_backends(max_n: int, seed: int) -> tuple[bool, str]:
    n = min(max_n, 12)
    graph = build_blockade_graph(LatticeSpec("chain", n, "periodic"))
    ham = BlockadeHamiltonian(enumerate_restricted(graph), graph, sample_configuration(n, 3.0, seed, 0))
    grid = TimeGrid(t_max=10.0, dt=0.1)
    a = propagate(ham, grid, backend="spectral")
    b = propagate(ham, grid, backend="krylov")
    pop = a.basis.popcounts / n
    diff = float(np.abs(np.abs(a.amplitudes) ** 2 @ pop - np.abs(b.amplitudes) ** 2 @ pop).max())
    return diff < 1e-8, f"excitation-series deviation {diff:.2e} at N={n} (tolerance 1e-8)"


def _check_dense_action(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    graph = build_blockade_graph(LatticeSpec("chain", 8, "periodic"))
    blockade = BlockadeHamiltonian(enumerate_restricted(graph), graph, sample_configuration(8, 3.0, seed, 1))
    longrange = LongRangeHamiltonian(enumerate_full(6), sample_configuration(6, 3.0, seed, 2), 60.0)
    worst = 0.0
    for ham in (blockade, longrange):
        dense = ham.to_dense()
        if np.abs(dense - dense.T).max() != 0.0:
            return False, "dense matrix is not symmetric"
        for _ in range(10):
            v = rng.normal(size=ham.dim) + 1j * rng.normal(size=ham.dim)
            v /= np.linalg.norm(v)
            worst = max(worst, float(np.abs(dense @ v - ham.apply(v)).max()))
    return worst < 1e-12, f"dense vs matrix-free deviation {worst:.2e} (tolerance 1e-12)"


def _check_conservation(seed: int) -> tuple[bool, str]:
    graph = build_blockade_graph(LatticeSpec("chain", 10, "periodic"))
    ham = BlockadeHamiltonian(enumerate_restricted(graph), graph, sample_configuration(10, 3.0, seed, 0))
    worst_norm, worst_energy = 0.0, 0.0
    for backend in ("spectral", "krylov"):
        traj = propagate(ham, TimeGrid(t_max=10.0, dt=0.1), backend=backend)
        worst_norm = max(worst_norm, traj.max_norm_drift())
        energies = np.einsum("ti,ti->t", traj.amplitudes.conj(), (ham.as_csr() @ traj.amplitudes.T).T).real
        worst_energy = max(worst_energy, float(np.abs(energies).max()))
    ok = worst_norm < 1e-9 and worst_energy < 1e-9
    return ok, f"norm drift {worst_norm:.2e}, energy drift {worst_energy:.2e} (tolerance 1e-9)"


def _check_measures() -> tuple[bool, str]:
    bell = np.zeros(4)
    bell[0], bell[3] = 1 / math.sqrt(2), 1 / math.sqrt(2)
    phi = np.outer(bell, bell)
    worst = 0.0
    for p in (0.0, 1 / 3, 0.6, 1.0):
        werner = p * phi + (1 - p) * np.eye(4) / 4
        worst = max(worst, abs(concurrence(werner) - max(0.0, (3 * p - 1) / 2)))
    w = np.zeros(4)
    w[1], w[2] = 1 / math.sqrt(2), 1 / math.sqrt(2)
    worst = max(worst, abs(total_correlation(np.outer(w, w)) - 1.0))
    worst = max(worst, abs(entanglement_of_formation(0.0)), abs(entanglement_of_formation(1.0) - 1.0))
    return worst < 1e-10, f"worst closed-form deviation {worst:.2e} (tolerance 1e-10)"


def run_battery(max_n: int = 10, seed: int = 0, emit=print) -> int:
    """Run every check, print one PASS/FAIL line each, return a process exit code."""
    checks = [
        ("basis dimensions vs direct scan", lambda: _check_basis(max_n)),
        ("full-space vs restricted evolution", lambda: _check_full_vs_restricted(max_n, seed)),
        ("spectral vs krylov backends", lambda: _check_backends(max_n, seed)),
        ("dense vs matrix-free action", lambda: _check_dense_action(seed)),
        ("norm and energy conservation", lambda: _check_conservation(seed)),
        ("closed-form correlation values", _check_measures),
    ]
    failures = 0
    for name, check in checks:
        try:
            ok, detail = check()
        except Exception as exc:  # noqa: BLE001 - a crashed check is a failed check
            ok, detail = False, f"raised {exc!r}"
        emit(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    emit(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 1
