"""Time propagation from the all-ground state and spectral overlap analysis.

Two interchangeable backends compute psi(t) = exp(-i H t) |ground>:

* ``spectral``: one dense diagonalization, then exact phases on the grid;
  the default whenever the dimension fits the dense cap.
* ``krylov``: short-step Lanczos propagation through the matrix-free/sparse
  action, with per-step tolerance 1e-10 and adaptive subspace size; required
  beyond the dense cap and much faster for large restricted spaces.

Both conserve the norm to well below 1e-9; propagation aborts if drift
exceeds 1e-6.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import RestrictedBasis

DEFAULT_DENSE_CAP = 20000
KRYLOV_TOL = 1e-10
_KRYLOV_MAX_DIM = 60
_NORM_ABORT = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling times i*dt for i = 0 .. round(t_max/dt)."""

    t_max: float = 25.0
    dt: float = 0.05

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max < self.dt:
            raise ValueError("t_max must be at least dt")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass
class StateVector:
    """Unit-norm complex amplitudes over a basis."""

    amplitudes: np.ndarray
    basis: RestrictedBasis

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError("amplitude vector does not match the basis dimension")
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > 1e-9:
            raise ValueError("state vector is not normalized")


class Trajectory:
    """States sampled on a time grid; amplitudes has shape (n_times, dim)."""

    def __init__(self, times: np.ndarray, amplitudes: np.ndarray, basis: RestrictedBasis):
        self.times = np.asarray(times, dtype=np.float64)
        self.amplitudes = amplitudes
        self.basis = basis

    def __len__(self) -> int:
        return self.times.size

    def state_at(self, i: int) -> StateVector:
        return StateVector(self.amplitudes[i], self.basis)

    def __iter__(self):
        return (self.state_at(i) for i in range(len(self)))

    def max_norm_drift(self) -> float:
        return float(np.abs(np.linalg.norm(self.amplitudes, axis=1) - 1.0).max())


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (ascending) and squared overlaps with the all-ground state."""

    energies: np.ndarray
    overlaps: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies must be ascending")
        if np.any(self.overlaps < -1e-12) or abs(self.overlaps.sum() - 1.0) > 1e-9:
            raise ValueError("overlaps must be non-negative and sum to 1")


def _ground_state(basis: RestrictedBasis) -> np.ndarray:
    v = np.zeros(basis.dim, dtype=np.complex128)
    v[basis.index_of(0)] = 1.0
    return v


def _lanczos_step(matvec, v: np.ndarray, dt: float, tol: float, depth: int = 0) -> np.ndarray:
    """One step of exp(-i dt H) v via a Lanczos subspace, splitting the step on non-convergence."""
    norm0 = np.linalg.norm(v)
    krylov = np.empty((_KRYLOV_MAX_DIM + 1, v.size), dtype=np.complex128)
    alpha = np.zeros(_KRYLOV_MAX_DIM)
    beta = np.zeros(_KRYLOV_MAX_DIM + 1)
    krylov[0] = v / norm0
    m = 0
    converged = False
    for j in range(_KRYLOV_MAX_DIM):
        w = matvec(krylov[j])
        if j > 0:
            w -= beta[j] * krylov[j - 1]
        alpha[j] = np.vdot(krylov[j], w).real
        w -= alpha[j] * krylov[j]
        # one full reorthogonalization pass keeps the small basis clean
        w -= krylov[: j + 1].T @ (krylov[: j + 1].conj() @ w)
        beta[j + 1] = np.linalg.norm(w)
        m = j + 1
        if beta[j + 1] < 1e-14:
            converged = True  # invariant subspace: projection is exact
            break
        if m >= 3:
            evals, evecs = eigh_tridiagonal(alpha[:m], beta[1:m])
            small = evecs @ (np.exp(-1j * dt * evals) * evecs[0])
            if abs(beta[m] * small[-1]) < tol:
                converged = True
                break
        krylov[j + 1] = w / beta[j + 1]
    if not converged:
        if depth >= 10:
            raise RuntimeError("krylov propagation failed to converge after 10 step halvings")
        half = _lanczos_step(matvec, v, dt / 2, tol / 2, depth + 1)
        return _lanczos_step(matvec, half, dt / 2, tol / 2, depth + 1)
    evals, evecs = eigh_tridiagonal(alpha[:m], beta[1:m])
    small = evecs @ (np.exp(-1j * dt * evals) * evecs[0])
    return norm0 * (krylov[:m].T @ small)


def evolve_state(ham, v0: np.ndarray, times: np.ndarray, backend: str = "auto",
                 dense_cap: int = DEFAULT_DENSE_CAP, tol: float = KRYLOV_TOL) -> Trajectory:
    """Propagate an arbitrary initial vector to every listed time (times[0] labels v0)."""
    times = np.asarray(times, dtype=np.float64)
    if backend == "auto":
        backend = "spectral" if ham.dim <= dense_cap else "krylov"
    if backend not in ("spectral", "krylov"):
        raise ValueError(f"unknown backend {backend!r}")
    out = np.empty((times.size, ham.dim), dtype=np.complex128)
    if backend == "spectral":
        energies, modes = np.linalg.eigh(ham.to_dense(dense_cap=dense_cap))
        coeff = modes.conj().T @ v0
        phases = np.exp(-1j * np.outer(energies, times - times[0])) * coeff[:, None]
        out[:] = (modes @ phases).T
    else:
        csr = ham.as_csr()
        v = v0.astype(np.complex128, copy=True)
        out[0] = v
        for i in range(1, times.size):
            v = _lanczos_step(csr.__matmul__, v, times[i] - times[i - 1], tol)
            out[i] = v
    traj = Trajectory(times, out, ham.basis)
    drift = traj.max_norm_drift()
    if drift > _NORM_ABORT:
        raise RuntimeError(f"norm drifted by {drift:.3e} during propagation (backend {backend})")
    return traj


def propagate(ham, grid: TimeGrid, backend: str = "auto",
              dense_cap: int = DEFAULT_DENSE_CAP) -> Trajectory:
    """Evolve the all-ground state across the grid."""
    return evolve_state(ham, _ground_state(ham.basis), grid.times, backend, dense_cap)


def spectrum_overlap(ham, dense_cap: int = DEFAULT_DENSE_CAP) -> SpectralData:
    """Eigen-decomposition plus squared overlaps of the all-ground state with each mode."""
    energies, modes = np.linalg.eigh(ham.to_dense(dense_cap=dense_cap))
    weights = np.abs(modes[ham.basis.index_of(0), :]) ** 2
    return SpectralData(energies, weights)
