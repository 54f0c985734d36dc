"""Site geometry, blockade graphs, and helpers mapping gas parameters to the model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of a 1D chain or a rectangular grid of two-level sites.

    ``sites`` is the site count N for a chain, or ``(rows, cols)`` for a
    grid.  ``blockade_range`` is the graph distance (index difference on a
    chain, Manhattan distance on a grid) within which simultaneous
    excitation of two sites is forbidden; every standard experiment here
    uses nearest-neighbor blockade, ``blockade_range = 1``.
    """

    kind: str
    sites: int | tuple[int, int]
    boundary: str = "open"
    blockade_range: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("chain", "grid"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.kind == "chain":
            if not isinstance(self.sites, int):
                raise ValueError("chain sites must be a single integer")
            if self.sites < 2:
                raise ValueError("chain needs at least 2 sites")
        else:
            rows, cols = self.sites
            object.__setattr__(self, "sites", (int(rows), int(cols)))
            if rows < 1 or cols < 1 or rows * cols < 2:
                raise ValueError("grid needs rows*cols >= 2")
            if self.boundary == "periodic":
                raise ValueError("grids are open-boundary only")
        if self.blockade_range < 1:
            raise ValueError("blockade_range must be >= 1")
        if self.blockade_range >= self.n_sites:
            raise ValueError(
                f"blockade_range {self.blockade_range} >= site count {self.n_sites}: "
                "every pair is blocked and dynamics freezes after one excitation"
            )

    @property
    def n_sites(self) -> int:
        if self.kind == "chain":
            return int(self.sites)
        rows, cols = self.sites
        return rows * cols


@dataclass(frozen=True)
class BlockadeGraph:
    """Blocked-partner adjacency: ``neighbors[k]`` lists sites that cannot be excited together with k."""

    n_sites: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.neighbors) != self.n_sites:
            raise ValueError("adjacency length does not match site count")
        for k, part in enumerate(self.neighbors):
            for q in part:
                if not 0 <= q < self.n_sites or q == k:
                    raise ValueError(f"invalid blocked partner {q} for site {k}")
                if k not in self.neighbors[q]:
                    raise ValueError(f"asymmetric adjacency between sites {k} and {q}")

    def neighbor_masks(self) -> np.ndarray:
        """Per-site bitmask over blocked partners (bit q set iff q blocked with the site)."""
        masks = np.zeros(self.n_sites, dtype=np.int64)
        for k, part in enumerate(self.neighbors):
            for q in part:
                masks[k] |= np.int64(1) << np.int64(q)
        return masks

    def edges(self) -> list[tuple[int, int]]:
        """Unique blocked pairs (j, k) with j < k."""
        return [(j, k) for j in range(self.n_sites) for k in self.neighbors[j] if j < k]


def build_blockade_graph(spec: LatticeSpec) -> BlockadeGraph:
    """Blocked-partner graph of a lattice: all pairs within ``blockade_range``."""
    n = spec.n_sites
    b = spec.blockade_range
    neighbors: list[tuple[int, ...]] = []
    if spec.kind == "chain":
        for k in range(n):
            if spec.boundary == "periodic":
                part = {(k + d) % n for d in range(-b, b + 1) if d != 0}
                part.discard(k)
            else:
                part = {q for q in range(k - b, k + b + 1) if 0 <= q < n and q != k}
            neighbors.append(tuple(sorted(part)))
    else:
        rows, cols = spec.sites
        coords = [(r, c) for r in range(rows) for c in range(cols)]
        for r, c in coords:
            part = [
                q
                for q, (r2, c2) in enumerate(coords)
                if 0 < abs(r - r2) + abs(c - c2) <= b
            ]
            neighbors.append(tuple(part))
    return BlockadeGraph(n, tuple(neighbors))


def blockade_radius(c6: float, omega: float) -> float:
    """Distance at which the van der Waals shift c6/r^6 equals the drive frequency."""
    if c6 <= 0 or omega <= 0:
        raise ValueError("c6 and omega must be positive")
    return (c6 / omega) ** (1.0 / 6.0)


def mean_atoms_per_pseudoatom(density: float, r_b: float, area: float, n_w: int) -> float:
    """Poisson mean occupancy of one site: 2*density*r_b*area atoms per superatom, split over n_w sites."""
    if density <= 0 or r_b <= 0 or area <= 0 or n_w <= 0:
        raise ValueError("all physical parameters must be positive")
    return 2.0 * density * r_b * area / n_w


def max_blocked_neighbors(n_w: int, eta: float = 6.0) -> int:
    """Largest index distance at which a pair still interacts more than eta times the drive.

    Sites are spaced 2*r_b/n_w apart, so the pair at index distance k has
    interaction (n_w/(2k))^6 in drive units; the blocked range is the
    largest integer strictly below (n_w/2) * eta**(-1/6).
    """
    if n_w < 2:
        raise ValueError("n_w must be at least 2")
    if eta <= 0:
        raise ValueError("eta must be positive")
    bound = 0.5 * n_w * eta ** (-1.0 / 6.0)
    return max(0, math.ceil(bound) - 1)


@dataclass(frozen=True)
class PhysicalParams:
    """Rydberg-gas quantities (atomic units) behind the dimensionless model.

    c6: van der Waals coefficient; omega: drive Rabi frequency;
    density: atoms per volume; transverse_area: cross-section of the
    quasi-1D cloud; n_w: sites per superatom; eta: interaction/drive
    ratio above which a pair counts as blocked.
    """

    c6: float
    omega: float
    density: float
    transverse_area: float
    n_w: int
    eta: float = 6.0

    def __post_init__(self) -> None:
        if min(self.c6, self.omega, self.density, self.transverse_area, self.eta) <= 0:
            raise ValueError("all physical parameters must be positive")
        if self.n_w < 1:
            raise ValueError("n_w must be a positive integer")

    @property
    def r_b(self) -> float:
        return blockade_radius(self.c6, self.omega)

    @property
    def mean_occupancy(self) -> float:
        return mean_atoms_per_pseudoatom(self.density, self.r_b, self.transverse_area, self.n_w)

    @property
    def blocked_neighbors(self) -> int:
        return max_blocked_neighbors(self.n_w, self.eta)
