"""Disordered drive couplings.

Each site's coupling is J = sqrt(X/lam) with X drawn from an exact
Poisson distribution of mean lam (the mean atom number behind the site),
so E[J^2] = 1 for every lam.  The no-fluctuation limit lam = inf gives
J = 1 on every site.  Sampling is keyed by (master_seed, index) so that
ensemble members are reproducible independent of worker count and order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DisorderConfiguration:
    """One sampled coupling vector and the seed path that produced it."""

    couplings: np.ndarray
    lam: float
    master_seed: int
    index: int

    def __post_init__(self) -> None:
        couplings = np.asarray(self.couplings, dtype=np.float64)
        couplings.setflags(write=False)
        object.__setattr__(self, "couplings", couplings)
        if np.any(couplings < 0):
            raise ValueError("couplings must be non-negative")

    @property
    def n_sites(self) -> int:
        return int(self.couplings.size)


def sample_configuration(
    n_sites: int, lam: float, master_seed: int = 0, index: int = 0
) -> DisorderConfiguration:
    """Draw one coupling vector; deterministic for a given (master_seed, index)."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    if not (lam > 0):
        raise ValueError("lam must be positive (or inf)")
    if master_seed < 0 or index < 0:
        raise ValueError("master_seed and index must be non-negative")
    if math.isinf(lam):
        couplings = np.ones(n_sites)
    else:
        rng = np.random.default_rng([master_seed, index])
        counts = rng.poisson(lam, size=n_sites)
        couplings = np.sqrt(counts / lam)
    return DisorderConfiguration(couplings, lam, master_seed, index)


def mean_square_coupling(lam: float) -> float:
    """E[J^2] = E[X]/lam, identically 1; kept as a report sanity statistic."""
    if not (lam > 0):
        raise ValueError("lam must be positive (or inf)")
    return 1.0
