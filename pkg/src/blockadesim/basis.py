"""Enumeration and indexing of occupation bases.

A configuration of N sites is a bitmask: bit k set means site k excited.
The restricted basis keeps exactly the bitmasks in which no two blocked
sites are excited together (the independent sets of the blockade graph),
in ascending bitmask order so that output files are reproducible.
"""

from __future__ import annotations

import numpy as np

from .lattice import BlockadeGraph

DEFAULT_STATE_CAP = 1 << 24
_SCAN_CHUNK = 1 << 22


class RestrictedBasis:
    """Ordered admissible bitmasks with exact mask -> position lookup."""

    def __init__(self, n_sites: int, states: np.ndarray):
        states = np.asarray(states, dtype=np.int64)
        if states.ndim != 1 or states.size == 0:
            raise ValueError("basis needs a non-empty 1D state array")
        if np.any(np.diff(states) <= 0):
            raise ValueError("basis states must be strictly ascending")
        self.n_sites = int(n_sites)
        self.states = states
        self.states.setflags(write=False)
        self.popcounts = np.bitwise_count(states).astype(np.int64)
        self.popcounts.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.states.size)

    def __len__(self) -> int:
        return self.dim

    def index_of(self, masks: int | np.ndarray) -> int | np.ndarray:
        """Position(s) of the given bitmask(s); KeyError if any is not in the basis."""
        arr = np.asarray(masks, dtype=np.int64)
        pos = np.searchsorted(self.states, arr)
        ok = (pos < self.dim) & (self.states[np.minimum(pos, self.dim - 1)] == arr)
        if not np.all(ok):
            missing = np.atleast_1d(arr)[~np.atleast_1d(ok)]
            raise KeyError(f"bitmask {int(missing.flat[0])} is not in the basis")
        if np.isscalar(masks) or arr.ndim == 0:
            return int(pos)
        return pos

    def bits(self, site: int) -> np.ndarray:
        """Occupation (0/1) of one site across all basis states."""
        return ((self.states >> np.int64(site)) & np.int64(1)).astype(np.int64)

    def to_strings(self) -> list[str]:
        """Binary strings, one per state, leftmost character = site 0 (LSB first)."""
        return [format(int(s), f"0{self.n_sites}b")[::-1] for s in self.states]


def _scan(n_sites: int, keep_rule, cap: int) -> np.ndarray:
    """Ascending scan of all 2^n_sites bitmasks, keeping those passing keep_rule."""
    if n_sites > 30:
        raise ValueError(f"cannot scan 2^{n_sites} bitmasks; site count above scan limit 30")
    kept: list[np.ndarray] = []
    total = 0
    for start in range(0, 1 << n_sites, _SCAN_CHUNK):
        arr = np.arange(start, min(start + _SCAN_CHUNK, 1 << n_sites), dtype=np.int64)
        arr = keep_rule(arr)
        total += arr.size
        if total > cap:
            raise ValueError(
                f"basis dimension exceeds the configured cap {cap}; "
                "raise the cap explicitly if this size is intended"
            )
        kept.append(arr)
    return np.concatenate(kept)


def enumerate_restricted(graph: BlockadeGraph, cap: int = DEFAULT_STATE_CAP) -> RestrictedBasis:
    """All bitmasks with no blocked pair simultaneously excited, ascending."""
    edge_masks = [
        np.int64((1 << j) | (1 << k)) for j, k in graph.edges()
    ]

    def keep_rule(arr: np.ndarray) -> np.ndarray:
        keep = np.ones(arr.shape, dtype=bool)
        for m in edge_masks:
            keep &= (arr & m) != m
        return arr[keep]

    return RestrictedBasis(graph.n_sites, _scan(graph.n_sites, keep_rule, cap))


def enumerate_full(n_sites: int, cap: int = DEFAULT_STATE_CAP) -> RestrictedBasis:
    """All 2^n_sites bitmasks, same ordering and lookup contract as the restricted case."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    if (1 << n_sites) > cap:
        raise ValueError(f"full basis 2^{n_sites} exceeds the configured cap {cap}")
    return RestrictedBasis(n_sites, np.arange(1 << n_sites, dtype=np.int64))


def max_excitations(basis: RestrictedBasis) -> int:
    """Largest number of simultaneously excited sites over the basis."""
    return int(basis.popcounts.max())
