"""Measurements on propagated states.

Everything here is a pure function of state amplitudes: excitation
fraction, two-site reduced density matrices, Wootters concurrence and the
entanglement of formation derived from it, the trace-norm total
correlation (scaled to 1 for a maximally entangled pair), the
joint-excitation statistics behind the pair correlation, and the
time-series features (first peak, saturation average) used to condense
series into distance profiles.

Two-site matrices use the basis order {gg, ge, eg, ee} with the first
factor belonging to the lower site index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .basis import RestrictedBasis
from .dynamics import StateVector, Trajectory

_BOUND_TOL = 1e-9
_PSD_TOL = 1e-10

# kron(sigma_y, sigma_y) is real in this basis
_SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


class Peak(NamedTuple):
    time: float
    value: float
    index: int


class SaturationStats(NamedTuple):
    mean: float
    stdev: float
    n_samples: int


@dataclass
class CorrelationSeries:
    """A bounded time series (excitation fraction, EOF, total correlation) plus run metadata."""

    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have matching shapes")
        if self.values.size and (
            self.values.min() < -_BOUND_TOL or self.values.max() > 1.0 + _BOUND_TOL
        ):
            raise ValueError("series values outside [0, 1] beyond tolerance")

    def first_peak(self) -> Peak:
        return first_peak(self.times, self.values)

    def saturation_average(self, window: tuple[float, float]) -> SaturationStats:
        return saturation_average(self.times, self.values, window)


# ---------------------------------------------------------------------------
# occupation observables


def excitation_fraction(state: StateVector) -> float:
    """Mean excited-site fraction: sum_p |c_p|^2 popcount(p) / N."""
    weights = np.abs(state.amplitudes) ** 2
    return float(weights @ state.basis.popcounts) / state.basis.n_sites


def excitation_series(traj: Trajectory) -> np.ndarray:
    weights = np.abs(traj.amplitudes) ** 2
    return (weights @ traj.basis.popcounts) / traj.basis.n_sites


def site_occupation_series(traj: Trajectory) -> np.ndarray:
    """Per-site excitation probability, shape (n_times, n_sites)."""
    basis = traj.basis
    bits = np.stack([basis.bits(k) for k in range(basis.n_sites)], axis=1).astype(float)
    return np.abs(traj.amplitudes) ** 2 @ bits


def pair_occupation_weights(basis: RestrictedBasis, distance: int, periodic: bool) -> np.ndarray:
    """Site-averaged joint-occupation weight of each basis state for one separation.

    w[p] is the average over chain positions j of bit_j(p) * bit_{j+distance}(p),
    so w @ |c|^2 is the site-averaged probability of finding two excitations
    at that separation.
    """
    n = basis.n_sites
    if not 1 <= distance < n:
        raise ValueError("distance must be between 1 and n_sites-1")
    pairs = (
        [(j, (j + distance) % n) for j in range(n)]
        if periodic
        else [(j, j + distance) for j in range(n - distance)]
    )
    w = np.zeros(basis.dim)
    for j, k in pairs:
        w += basis.bits(j) * basis.bits(k)
    return w / len(pairs)


def joint_occupation_series(traj: Trajectory, distance: int, periodic: bool) -> np.ndarray:
    w = pair_occupation_weights(traj.basis, distance, periodic)
    return np.abs(traj.amplitudes) ** 2 @ w


def pair_correlation(joint_mean: float, single_mean: float) -> float:
    """Joint excitation probability normalized by the squared single-site probability.

    Both inputs are averages over sites, saturation-window times, and the
    disorder ensemble (averaged before the ratio is taken).
    """
    if single_mean <= 0:
        raise ValueError("pair correlation undefined: single-site excitation is zero")
    return float(joint_mean) / float(single_mean) ** 2


# ---------------------------------------------------------------------------
# two-site reductions


class PairReducer:
    """Precomputed index machinery tracing a basis down to one site pair.

    The reduced matrix element rho[a, b] = sum_r psi[(a, r)] conj(psi[(b, r)])
    couples states that agree on every site outside the pair; the index
    arrays below enumerate exactly those state pairs once per (a, b) label
    pair, so reducing a whole trajectory is a handful of vectorized sums.
    Building a reducer is O(dim) and is reused across configurations.
    """

    def __init__(self, basis: RestrictedBasis, j: int, k: int):
        if j == k:
            raise ValueError("pair sites must differ")
        for s in (j, k):
            if not 0 <= s < basis.n_sites:
                raise ValueError(f"site {s} outside the lattice")
        self.basis = basis
        self.lo, self.hi = min(j, k), max(j, k)
        labels = 2 * basis.bits(self.lo) + basis.bits(self.hi)
        rest = basis.states & ~np.int64((1 << self.lo) | (1 << self.hi))
        groups: dict[int, list[int]] = {}
        for p, r in enumerate(rest):
            groups.setdefault(int(r), []).append(p)
        per: dict[tuple[int, int], tuple[list[int], list[int]]] = {}
        for members in groups.values():
            for p in members:
                for q in members:
                    a, b = int(labels[p]), int(labels[q])
                    if a <= b:
                        per.setdefault((a, b), ([], []))[0].append(p)
                        per[(a, b)][1].append(q)
        self._terms = {
            ab: (np.asarray(pp, dtype=np.int64), np.asarray(qq, dtype=np.int64))
            for ab, (pp, qq) in per.items()
        }

    def matrices(self, amplitudes: np.ndarray) -> np.ndarray:
        """Reduced matrices for a (n_times, dim) amplitude block, shape (n_times, 4, 4)."""
        amplitudes = np.atleast_2d(amplitudes)
        rho = np.zeros((amplitudes.shape[0], 4, 4), dtype=np.complex128)
        for (a, b), (pp, qq) in self._terms.items():
            val = np.einsum("tp,tp->t", amplitudes[:, pp], amplitudes[:, qq].conj())
            rho[:, a, b] = val
            if a != b:
                rho[:, b, a] = val.conj()
        return rho

    def matrix(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrices(amplitudes[None, :])[0]


def _check_density_matrix(rho: np.ndarray) -> None:
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise ValueError("reduced matrix trace deviates from 1")
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ValueError("reduced matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -_PSD_TOL:
        raise ValueError("reduced matrix has a negative eigenvalue beyond tolerance")


def reduce_two_site(state: StateVector, j: int, k: int) -> np.ndarray:
    """Partial trace onto sites (j, k); lower site index is the first factor."""
    rho = PairReducer(state.basis, j, k).matrix(state.amplitudes)
    _check_density_matrix(rho)
    return rho


def pair_marginals(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Single-site marginals of two-site matrices; works on (..., 4, 4) stacks."""
    r4 = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    rho_lo = np.einsum("...abcb->...ac", r4)
    rho_hi = np.einsum("...abad->...bd", r4)
    return rho_lo, rho_hi


def reduce_one_site(source, which: int) -> np.ndarray:
    """Single-site reduced matrix.

    ``source`` is either a StateVector (``which`` = site index) or a 4x4
    two-site matrix (``which`` = 0 for the lower-site factor, 1 for the
    higher one).
    """
    if isinstance(source, StateVector):
        basis = source.basis
        if not 0 <= which < basis.n_sites:
            raise ValueError(f"site {which} outside the lattice")
        weights = source.amplitudes
        bit = basis.bits(which)
        rest = basis.states & ~(np.int64(1) << np.int64(which))
        rho = np.zeros((2, 2), dtype=np.complex128)
        groups: dict[int, list[int]] = {}
        for p, r in enumerate(rest):
            groups.setdefault(int(r), []).append(p)
        for members in groups.values():
            for p in members:
                for q in members:
                    rho[bit[p], bit[q]] += weights[p] * np.conj(weights[q])
        return rho
    rho = np.asarray(source)
    if rho.shape != (4, 4):
        raise ValueError("expected a StateVector or a 4x4 two-site matrix")
    lo, hi = pair_marginals(rho)
    return lo if which == 0 else hi


# ---------------------------------------------------------------------------
# correlation measures


def _concurrence_batch(rho: np.ndarray) -> np.ndarray:
    flipped = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    lam = np.linalg.eigvals(rho @ flipped).real
    # eigenvalue round-off below the clamping tolerance is zeroed; without
    # this the square root amplifies 1e-16 dust into 1e-8 concurrence noise
    lam[lam < _PSD_TOL] = 0.0
    lam = np.sqrt(lam)
    lam.sort(axis=-1)
    c = lam[..., 3] - lam[..., 2] - lam[..., 1] - lam[..., 0]
    return np.clip(c, 0.0, None)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError("concurrence expects a single 4x4 matrix")
    _check_density_matrix(rho)
    return float(_assert_bounded(_concurrence_batch(rho[None, :, :]), "concurrence")[0])


def concurrence_series(rhos: np.ndarray) -> np.ndarray:
    """Concurrence of a (n_times, 4, 4) stack of reduced matrices."""
    return _assert_bounded(_concurrence_batch(rhos), "concurrence")


def entanglement_of_formation(c) -> np.ndarray | float:
    """Binary-entropy map from concurrence to entanglement of formation."""
    c = np.clip(np.asarray(c, dtype=np.float64), 0.0, 1.0)
    x = 0.5 * (1.0 + np.sqrt(np.clip(1.0 - c**2, 0.0, None)))
    eof = _binary_entropy(x)
    eof = _assert_bounded(np.atleast_1d(eof), "entanglement of formation")
    return float(eof[0]) if np.isscalar(c) or c.ndim == 0 else eof


def _binary_entropy(x: np.ndarray) -> np.ndarray:
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = -np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)
        y = 1.0 - x
        terms -= np.where(y > 0, y * np.log2(np.where(y > 0, y, 1.0)), 0.0)
    return terms


def total_correlation(rho: np.ndarray, rho_lo: np.ndarray | None = None,
                      rho_hi: np.ndarray | None = None) -> float:
    """Scaled trace norm of rho minus the product of its marginals.

    The 2/3 prefactor normalizes a maximally entangled pair to 1.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho_lo is None or rho_hi is None:
        rho_lo, rho_hi = pair_marginals(rho)
    product = np.einsum("...ac,...bd->...abcd", rho_lo, rho_hi).reshape(rho.shape)
    eigs = np.linalg.eigvalsh(rho - product)
    mc = (2.0 / 3.0) * np.abs(eigs).sum(axis=-1)
    return float(mc) if rho.ndim == 2 else mc


def total_correlation_series(rhos: np.ndarray) -> np.ndarray:
    """Total correlation of a (n_times, 4, 4) stack of reduced matrices."""
    return _assert_bounded(np.atleast_1d(total_correlation(rhos)), "total correlation")


def _assert_bounded(values: np.ndarray, name: str) -> np.ndarray:
    if values.size and (values.min() < -_BOUND_TOL or values.max() > 1.0 + _BOUND_TOL):
        raise RuntimeError(
            f"{name} left [0, 1]: range [{values.min():.3e}, {values.max():.3e}]"
        )
    return np.clip(values, 0.0, 1.0)


# ---------------------------------------------------------------------------
# time-series features


def first_peak(times: np.ndarray, values: np.ndarray) -> Peak:
    """First grid point dominating its 3-neighborhood on both sides.

    The point must be >= all six surrounding samples and strictly greater
    than at least one of them, so flat and monotone series are rejected.
    Intended for ensemble-averaged series, which are smooth enough that no
    extra filtering is needed.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.size < 7:
        raise ValueError("need at least 7 samples to locate a peak")
    for i in range(3, values.size - 3):
        window = values[i - 3 : i + 4]
        if np.all(values[i] >= window) and np.any(values[i] > window):
            return Peak(float(times[i]), float(values[i]), i)
    raise ValueError("no interior peak found (series may be monotone)")


def saturation_average(times: np.ndarray, values: np.ndarray,
                       window: tuple[float, float]) -> SaturationStats:
    """Mean over a late-time window, with the window stdev as a saturation diagnostic."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    t_lo, t_hi = window
    if t_lo >= t_hi:
        raise ValueError("window must satisfy t_lo < t_hi")
    sel = (times >= t_lo) & (times <= t_hi)
    if not np.any(sel):
        raise ValueError("saturation window contains no grid points")
    if t_lo < 0.4 * times[-1]:
        warnings.warn("saturation window starts before 40% of the run; may precede saturation")
    picked = values[sel]
    return SaturationStats(float(picked.mean()), float(picked.std()), int(picked.size))
