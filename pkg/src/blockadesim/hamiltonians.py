"""Drive Hamiltonians on occupation bases.

Spin convention: bit 1 = excited, sigma_z|excited> = +|excited>, so
(1 - sigma_z)/2 projects on ground and (1 + sigma_z)/2 counts excitation.

The blockade Hamiltonian flips site k with amplitude J_k only when every
blocked partner of k is in the ground state; on the restricted basis this
action is closed.  The long-range Hamiltonian flips every site freely and
adds the diagonal pair interaction D / distance^6 for every excited pair.
Both are real symmetric in the bitmask basis.  The matrix-free action is
the defining form; sparse and dense forms are derived from the same flip
table and cross-checked in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import RestrictedBasis
from .disorder import DisorderConfiguration
from .lattice import BlockadeGraph

DEFAULT_DENSE_CAP = 20000


@dataclass(frozen=True)
class FlipTable:
    """All single-site flips allowed by a blockade graph, as (row, col, site) triples.

    Entry i means <state rows[i]| H |state cols[i]> picks up the coupling of
    ``sites[i]``.  The table depends only on (basis, graph) and is shared by
    every disorder configuration.
    """

    basis: RestrictedBasis
    rows: np.ndarray
    cols: np.ndarray
    sites: np.ndarray


def flip_transitions(basis: RestrictedBasis, graph: BlockadeGraph) -> FlipTable:
    """Enumerate the graph-allowed single-site flips within a basis.

    Works for the restricted basis (where closure is guaranteed) and for the
    full basis (giving the projected Hamiltonian on the whole space).  An
    edgeless graph yields the unconstrained flips used by the long-range model.
    """
    if graph.n_sites != basis.n_sites:
        raise ValueError("graph and basis disagree on the site count")
    masks = graph.neighbor_masks()
    rows, cols, sites = [], [], []
    all_cols = np.arange(basis.dim, dtype=np.int64)
    for k in range(basis.n_sites):
        allowed = (basis.states & masks[k]) == 0
        targets = basis.states[allowed] ^ (np.int64(1) << np.int64(k))
        rows.append(basis.index_of(targets))
        cols.append(all_cols[allowed])
        sites.append(np.full(targets.size, k, dtype=np.int64))
    return FlipTable(
        basis,
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(sites),
    )


def _as_couplings(couplings, n_sites: int) -> np.ndarray:
    if isinstance(couplings, DisorderConfiguration):
        couplings = couplings.couplings
    couplings = np.asarray(couplings, dtype=np.float64)
    if couplings.shape != (n_sites,):
        raise ValueError(f"expected {n_sites} couplings, got shape {couplings.shape}")
    return couplings


class BlockadeHamiltonian:
    """Sum over sites of J_k (flip site k, conditioned on ground blocked partners)."""

    def __init__(
        self,
        basis: RestrictedBasis,
        graph: BlockadeGraph,
        couplings,
        table: FlipTable | None = None,
    ):
        self.basis = basis
        self.graph = graph
        self.couplings = _as_couplings(couplings, basis.n_sites)
        if table is None:
            table = flip_transitions(basis, graph)
        elif table.basis is not basis:
            raise ValueError("flip table was built for a different basis")
        self.table = table
        self._csr: sp.csr_matrix | None = None

    @property
    def dim(self) -> int:
        return self.basis.dim

    def as_csr(self) -> sp.csr_matrix:
        if self._csr is None:
            t = self.table
            self._csr = sp.csr_matrix(
                (self.couplings[t.sites], (t.rows, t.cols)), shape=(self.dim, self.dim)
            )
        return self._csr

    def apply(self, v: np.ndarray) -> np.ndarray:
        if v.shape[0] != self.dim:
            raise ValueError("state vector does not match the Hamiltonian basis")
        return self.as_csr() @ v

    def to_dense(self, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
        if self.dim > dense_cap:
            raise ValueError(f"dimension {self.dim} exceeds the dense cap {dense_cap}")
        h = np.zeros((self.dim, self.dim))
        t = self.table
        h[t.rows, t.cols] = self.couplings[t.sites]
        return h


def _pair_distance(j: int, k: int, n_sites: int, boundary: str) -> int:
    d = abs(j - k)
    if boundary == "periodic":
        d = min(d, n_sites - d)
    return d


class LongRangeHamiltonian:
    """Unconstrained drive plus D/distance^6 repulsion between excited pairs.

    Defined on the full basis; distances are index differences (minimal
    image when periodic), in units of the nearest-neighbor spacing.
    """

    def __init__(
        self,
        basis: RestrictedBasis,
        couplings,
        interaction: float,
        boundary: str = "open",
        table: FlipTable | None = None,
    ):
        n = basis.n_sites
        if basis.dim != (1 << n):
            raise ValueError("long-range Hamiltonian requires the full basis")
        if boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {boundary!r}")
        self.basis = basis
        self.couplings = _as_couplings(couplings, n)
        self.interaction = float(interaction)
        self.boundary = boundary
        if table is None:
            table = flip_transitions(basis, _edgeless_graph(n))
        elif table.basis is not basis:
            raise ValueError("flip table was built for a different basis")
        self.table = table
        self.diagonal = self._build_diagonal()
        self._csr: sp.csr_matrix | None = None

    def _build_diagonal(self) -> np.ndarray:
        n = self.basis.n_sites
        diag = np.zeros(self.basis.dim)
        for j in range(n):
            for k in range(j + 1, n):
                pair = np.int64((1 << j) | (1 << k))
                d = _pair_distance(j, k, n, self.boundary)
                both = (self.basis.states & pair) == pair
                diag[both] += self.interaction / d**6
        return diag

    @property
    def dim(self) -> int:
        return self.basis.dim

    def as_csr(self) -> sp.csr_matrix:
        if self._csr is None:
            t = self.table
            offdiag = sp.csr_matrix(
                (self.couplings[t.sites], (t.rows, t.cols)), shape=(self.dim, self.dim)
            )
            self._csr = (offdiag + sp.diags(self.diagonal)).tocsr()
        return self._csr

    def apply(self, v: np.ndarray) -> np.ndarray:
        if v.shape[0] != self.dim:
            raise ValueError("state vector does not match the Hamiltonian basis")
        return self.as_csr() @ v

    def to_dense(self, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
        if self.dim > dense_cap:
            raise ValueError(f"dimension {self.dim} exceeds the dense cap {dense_cap}")
        h = np.zeros((self.dim, self.dim))
        t = self.table
        h[t.rows, t.cols] = self.couplings[t.sites]
        h[np.diag_indices(self.dim)] = self.diagonal
        return h


def _edgeless_graph(n_sites: int) -> BlockadeGraph:
    return BlockadeGraph(n_sites, tuple(() for _ in range(n_sites)))


def unconstrained_transitions(basis: RestrictedBasis) -> FlipTable:
    """Single-site flips with no blockade constraint (the long-range drive term)."""
    return flip_transitions(basis, _edgeless_graph(basis.n_sites))
