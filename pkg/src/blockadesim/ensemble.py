"""Disorder-ensemble experiments: sweeps, deterministic averaging, and presets.

A run loops over every (coupling-mean, interaction) combination and over
configuration indices 0..n_configs-1, simulating each sampled coupling
vector independently and reducing the per-configuration observables in
index order, so the output is bit-identical for any worker count.
Nonlinear measures (EOF, total correlation) are computed per
configuration and then averaged; the pair correlation averages its
probabilities first and takes the ratio at the end.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from itertools import product

import numpy as np
from threadpoolctl import threadpool_limits

from . import observables as obs
from .basis import enumerate_full, enumerate_restricted
from .disorder import sample_configuration
from .dynamics import TimeGrid, Trajectory, propagate
from .hamiltonians import (
    BlockadeHamiltonian,
    LongRangeHamiltonian,
    flip_transitions,
    unconstrained_transitions,
)
from .lattice import LatticeSpec, build_blockade_graph

KNOWN_OBSERVABLES = ("pex", "pee", "eof", "mc")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one disorder-averaged experiment."""

    lattice: LatticeSpec
    hamiltonian: str = "blockade"
    lambdas: tuple[float, ...] = (3.0, 12.0, 48.0, math.inf)
    interactions: tuple[float, ...] = ()
    n_configs: int = 1000
    grid: TimeGrid = field(default_factory=TimeGrid)
    master_seed: int = 0
    observables: tuple[str, ...] = ("pex",)
    distances: tuple[int, ...] = ()
    site_average: bool = True
    reference_site: int = 0
    saturation_window: tuple[float, float] = (15.0, 25.0)
    backend: str = "auto"
    # alternative averaging orders, kept for sensitivity analysis
    pee_per_config_ratio: bool = False
    corr_of_mean_state: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "interactions", tuple(float(x) for x in self.interactions))
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "distances", tuple(int(d) for d in self.distances))
        if self.hamiltonian not in ("blockade", "longrange"):
            raise ValueError(f"unknown hamiltonian {self.hamiltonian!r}")
        if not self.lambdas or any(not (x > 0) for x in self.lambdas):
            raise ValueError("lambdas must be a non-empty tuple of positive values (inf allowed)")
        if self.hamiltonian == "longrange":
            if self.lattice.kind != "chain":
                raise ValueError("the long-range model is defined on chains only")
            if not self.interactions or any(x < 0 for x in self.interactions):
                raise ValueError("longrange runs need non-negative interaction strengths")
        elif self.interactions:
            raise ValueError("interaction strengths only apply to the longrange model")
        if self.n_configs < 1:
            raise ValueError("n_configs must be at least 1")
        unknown = set(self.observables) - set(KNOWN_OBSERVABLES)
        if unknown or not self.observables:
            raise ValueError(f"observables must be a non-empty subset of {KNOWN_OBSERVABLES}")
        if self.backend not in ("auto", "spectral", "krylov"):
            raise ValueError(f"unknown backend {self.backend!r}")
        needs_d = {"pee", "eof", "mc"} & set(self.observables)
        if needs_d and not self.distances:
            raise ValueError(f"observables {sorted(needs_d)} need a distances tuple")
        for d in self.distances:
            self._pairs_at(d)  # validates
        lo, hi = self.saturation_window
        if not (0 <= lo < hi <= self.grid.t_max + 1e-9):
            raise ValueError("saturation window must lie inside the time grid")

    def _pairs_at(self, distance: int) -> list[tuple[int, int]]:
        """Site pairs contributing to one separation, under the averaging mode."""
        lat = self.lattice
        if lat.kind == "chain":
            n = lat.n_sites
            if lat.boundary == "periodic":
                if not 1 <= distance <= n // 2:
                    raise ValueError(f"distance {distance} outside 1..{n // 2} (minimal image)")
                if self.site_average:
                    pairs = {tuple(sorted((j, (j + distance) % n))) for j in range(n)}
                    return sorted(pairs)
                return [(self.reference_site, (self.reference_site + distance) % n)]
            if not 1 <= distance < n:
                raise ValueError(f"distance {distance} outside 1..{n - 1}")
            if self.site_average:
                return [(j, j + distance) for j in range(n - distance)]
            if self.reference_site + distance >= n:
                raise ValueError(f"distance {distance} leaves the chain from site {self.reference_site}")
            return [(self.reference_site, self.reference_site + distance)]
        rows, cols = lat.sites
        if not 1 <= distance < cols:
            raise ValueError(f"grid distances run along the central row: 1..{cols - 1}")
        r = rows // 2
        return [(r * cols, r * cols + distance)]


def spec_as_dict(spec: ExperimentSpec) -> dict:
    """JSON-ready form of a spec (inf spelled 'inf')."""
    d = asdict(spec)
    d["lambdas"] = ["inf" if math.isinf(x) else x for x in spec.lambdas]
    return d


@dataclass
class ComboResult:
    """Reduced observables for one (coupling-mean, interaction) combination."""

    lam: float
    interaction: float | None
    n_configs: int
    failed: tuple[tuple[int, str], ...]
    pex_mean: np.ndarray
    pex_stderr: np.ndarray
    eof_mean: np.ndarray | None = None
    eof_stderr: np.ndarray | None = None
    mc_mean: np.ndarray | None = None
    mc_stderr: np.ndarray | None = None
    pee: np.ndarray | None = None
    pee_stderr: np.ndarray | None = None


class EnsembleResult:
    """Averaged series and distance profiles, with provenance for reproduction."""

    def __init__(self, spec: ExperimentSpec, combos: list[ComboResult], version: str):
        self.spec = spec
        self.times = spec.grid.times
        self.distances = spec.distances
        self.combos = combos
        self.provenance = {
            "spec": spec_as_dict(spec),
            "master_seed": spec.master_seed,
            "version": version,
        }

    def combo(self, lam: float, interaction: float | None = None) -> ComboResult:
        for c in self.combos:
            same_lam = (math.isinf(lam) and math.isinf(c.lam)) or c.lam == lam
            if same_lam and (interaction is None or c.interaction == interaction):
                return c
        raise KeyError(f"no combination with lam={lam}, interaction={interaction}")

    def series(self, measure: str, lam: float, distance: int | None = None,
               interaction: float | None = None) -> obs.CorrelationSeries:
        c = self.combo(lam, interaction)
        meta = {"lam": c.lam, "interaction": c.interaction, "measure": measure,
                "n_configs": c.n_configs, "distance": distance}
        if measure == "pex":
            return obs.CorrelationSeries(self.times, c.pex_mean, meta)
        mean = c.eof_mean if measure == "eof" else c.mc_mean
        if mean is None:
            raise KeyError(f"{measure} was not computed in this run")
        if distance not in self.distances:
            raise KeyError(f"distance {distance} was not computed in this run")
        return obs.CorrelationSeries(self.times, mean[self.distances.index(distance)], meta)

    def peak_profile(self, measure: str, lam: float, interaction: float | None = None,
                     strict: bool = True) -> list[tuple[int, obs.Peak | None, float]]:
        """First peak of the averaged series per distance, with the stderr at the peak.

        A series with no interior peak (e.g. identically zero EOF for a far
        pair) raises when strict, and yields a None peak otherwise.
        """
        c = self.combo(lam, interaction)
        stderr = c.eof_stderr if measure == "eof" else c.mc_stderr
        out = []
        for i, d in enumerate(self.distances):
            try:
                peak = self.series(measure, lam, d, interaction).first_peak()
            except ValueError:
                if strict:
                    raise
                out.append((d, None, float("nan")))
                continue
            out.append((d, peak, float(stderr[i][peak.index])))
        return out


# ---------------------------------------------------------------------------
# per-configuration simulation

_CTX: dict | None = None


def _build_context(spec: ExperimentSpec) -> dict:
    lat = spec.lattice
    graph = build_blockade_graph(lat)
    if spec.hamiltonian == "blockade":
        basis = enumerate_restricted(graph)
        table = flip_transitions(basis, graph)
    else:
        basis = enumerate_full(lat.n_sites)
        table = unconstrained_transitions(basis)
    reducers = None
    if {"eof", "mc"} & set(spec.observables):
        reducers = [
            [obs.PairReducer(basis, j, k) for j, k in spec._pairs_at(d)]
            for d in spec.distances
        ]
    pee_weights = None
    if "pee" in spec.observables:
        periodic = lat.kind == "chain" and lat.boundary == "periodic"
        pee_weights = np.stack(
            [obs.pair_occupation_weights(basis, d, periodic) for d in spec.distances]
        )
    times = spec.grid.times
    lo, hi = spec.saturation_window
    window = (times >= lo) & (times <= hi)
    return {
        "spec": spec,
        "graph": graph,
        "basis": basis,
        "table": table,
        "reducers": reducers,
        "pee_weights": pee_weights,
        "window": window,
    }


def _simulate_one(ctx: dict, lam: float, interaction: float | None, index: int) -> dict:
    spec: ExperimentSpec = ctx["spec"]
    config = sample_configuration(spec.lattice.n_sites, lam, spec.master_seed, index)
    if spec.hamiltonian == "blockade":
        ham = BlockadeHamiltonian(ctx["basis"], ctx["graph"], config, table=ctx["table"])
    else:
        ham = LongRangeHamiltonian(
            ctx["basis"], config, interaction, spec.lattice.boundary, table=ctx["table"]
        )
    traj = propagate(ham, spec.grid, backend=spec.backend)
    out: dict = {"pex": obs.excitation_series(traj)}
    window = ctx["window"]
    if "pee" in spec.observables:
        probs = np.abs(traj.amplitudes[window]) ** 2
        out["pee_joint"] = (ctx["pee_weights"] @ probs.T).mean(axis=1)
        out["pee_single"] = float(out["pex"][window].mean())
        if spec.pee_per_config_ratio:
            if out["pee_single"] <= 0:
                raise RuntimeError("per-configuration pair correlation undefined: no excitation")
            out["pee_ratio"] = out["pee_joint"] / out["pee_single"] ** 2
    if ctx["reducers"] is not None:
        want_eof = "eof" in spec.observables
        want_mc = "mc" in spec.observables
        n_d = len(spec.distances)
        n_t = traj.times.size
        if spec.corr_of_mean_state:
            # alternative order: accumulate the pair-averaged state, measure later
            out["rho_sums"] = np.zeros((n_d, n_t, 4, 4), dtype=np.complex128)
        if want_eof:
            out["eof"] = np.zeros((n_d, n_t))
        if want_mc:
            out["mc"] = np.zeros((n_d, n_t))
        for i, reducers in enumerate(ctx["reducers"]):
            for reducer in reducers:
                rhos = reducer.matrices(traj.amplitudes)
                if spec.corr_of_mean_state:
                    out["rho_sums"][i] += rhos / len(reducers)
                if want_eof:
                    conc = obs.concurrence_series(rhos)
                    out["eof"][i] += obs.entanglement_of_formation(conc)
                if want_mc:
                    out["mc"][i] += obs.total_correlation_series(rhos)
            if want_eof:
                out["eof"][i] /= len(reducers)
            if want_mc:
                out["mc"][i] /= len(reducers)
    return out


def _worker_init(spec: ExperimentSpec) -> None:
    global _CTX
    _CTX = _build_context(spec)


def _worker_job(job: tuple[float, float | None, int]):
    lam, interaction, index = job
    try:
        with threadpool_limits(limits=1):
            return ("ok", _simulate_one(_CTX, lam, interaction, index))
    except Exception as exc:  # noqa: BLE001 - reported with the config index by the reducer
        return ("err", f"configuration {index}: {exc!r}")


def _reduce(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    n = values.shape[0]
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, values.std(axis=0, ddof=1) / math.sqrt(n)


def _jackknife_ratio(joint: np.ndarray, single: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ratio-of-means estimate joint/single^2 per distance, with jackknife stderr."""
    n = single.size
    ratio = joint.mean(axis=0) / single.mean() ** 2
    if n < 2:
        return ratio, np.zeros_like(ratio)
    sum_j = joint.sum(axis=0)
    sum_s = single.sum()
    leave_out = ((sum_j[None, :] - joint) / (n - 1)) / (((sum_s - single) / (n - 1)) ** 2)[:, None]
    stderr = np.sqrt((n - 1) / n * ((leave_out - leave_out.mean(axis=0)) ** 2).sum(axis=0))
    return ratio, stderr


def run(spec: ExperimentSpec, workers: int = 1) -> EnsembleResult:
    """Execute every configuration of the experiment and reduce deterministically.

    Per-configuration failures are recorded with their index; the run aborts
    if more than 1% of configurations fail.  Worker count never changes the
    result: sampling is keyed by (master_seed, index), BLAS threading is
    pinned inside each simulation, and reduction order is fixed.
    """
    from . import __version__

    combos = list(product(spec.lambdas, spec.interactions or (None,)))
    jobs = [(lam, inter, idx) for lam, inter in combos for idx in range(spec.n_configs)]
    if workers <= 1:
        ctx = _build_context(spec)
        outcomes = []
        for lam, inter, idx in jobs:
            try:
                with threadpool_limits(limits=1):
                    outcomes.append(("ok", _simulate_one(ctx, lam, inter, idx)))
            except Exception as exc:  # noqa: BLE001
                outcomes.append(("err", f"configuration {idx}: {exc!r}"))
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(spec,)
        ) as pool:
            outcomes = list(pool.map(_worker_job, jobs, chunksize=1))

    results: list[ComboResult] = []
    for c_i, (lam, inter) in enumerate(combos):
        block = outcomes[c_i * spec.n_configs : (c_i + 1) * spec.n_configs]
        good = [payload for status, payload in block if status == "ok"]
        failed = tuple(
            (idx, payload)
            for idx, (status, payload) in enumerate(block)
            if status == "err"
        )
        if len(failed) > 0.01 * spec.n_configs:
            details = "; ".join(msg for _, msg in failed[:3])
            raise RuntimeError(
                f"{len(failed)}/{spec.n_configs} configurations failed for "
                f"lam={lam}, interaction={inter}: {details}"
            )
        pex_mean, pex_stderr = _reduce(np.stack([g["pex"] for g in good]))
        combo = ComboResult(lam, inter, len(good), failed, pex_mean, pex_stderr)
        if spec.corr_of_mean_state:
            mean_rho = np.stack([g["rho_sums"] for g in good]).mean(axis=0)
            if "eof" in spec.observables:
                combo.eof_mean = np.stack(
                    [obs.entanglement_of_formation(obs.concurrence_series(r)) for r in mean_rho]
                )
                combo.eof_stderr = np.zeros_like(combo.eof_mean)
            if "mc" in spec.observables:
                combo.mc_mean = np.stack([obs.total_correlation_series(r) for r in mean_rho])
                combo.mc_stderr = np.zeros_like(combo.mc_mean)
        else:
            if "eof" in spec.observables:
                combo.eof_mean, combo.eof_stderr = _reduce(np.stack([g["eof"] for g in good]))
            if "mc" in spec.observables:
                combo.mc_mean, combo.mc_stderr = _reduce(np.stack([g["mc"] for g in good]))
        if "pee" in spec.observables:
            if spec.pee_per_config_ratio:
                combo.pee, combo.pee_stderr = _reduce(np.stack([g["pee_ratio"] for g in good]))
            else:
                joint = np.stack([g["pee_joint"] for g in good])
                single = np.array([g["pee_single"] for g in good])
                if single.mean() <= 0:
                    raise RuntimeError("pair correlation undefined: no excitation in the window")
                combo.pee, combo.pee_stderr = _jackknife_ratio(joint, single)
        results.append(combo)
    return EnsembleResult(spec, results, __version__)


# ---------------------------------------------------------------------------
# presets reproducing the production figure set


def _chain16() -> LatticeSpec:
    return LatticeSpec("chain", 16, "periodic", 1)


_ALL_LAMBDAS = (3.0, 12.0, 48.0, math.inf)


def _presets() -> dict:
    return {
        "fig2": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("pex",), lambdas=_ALL_LAMBDAS
        ),
        "fig3": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("pee",),
            lambdas=(3.0, 12.0, 48.0), distances=tuple(range(1, 9)),
        ),
        "fig4": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("eof",), lambdas=_ALL_LAMBDAS, distances=(1,),
        ),
        "fig5": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("eof",), lambdas=(3.0,),
            distances=(1, 2, 3, 4),
        ),
        "fig6": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("eof",), lambdas=_ALL_LAMBDAS,
            distances=tuple(range(1, 9)),
        ),
        "fig7": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("mc",), lambdas=_ALL_LAMBDAS, distances=(1,),
        ),
        "fig8": lambda: ExperimentSpec(
            lattice=_chain16(), observables=("mc",), lambdas=(3.0, 48.0),
            distances=tuple(range(1, 9)),
        ),
        "fig8_n20": lambda: ExperimentSpec(
            lattice=LatticeSpec("chain", 20, "periodic", 1), observables=("mc",),
            lambdas=(3.0, 48.0), distances=tuple(range(1, 11)), backend="krylov",
        ),
        "fig9": lambda: ExperimentSpec(
            lattice=LatticeSpec("chain", 10, "open", 1), hamiltonian="longrange",
            interactions=(10.0, 60.0, 360.0), observables=("eof", "mc", "pee"),
            lambdas=(3.0, 48.0), distances=(1, 2, 3, 4, 5), site_average=False,
        ),
        "grid2d": lambda: ExperimentSpec(
            lattice=LatticeSpec("grid", (5, 5), "open", 1), observables=("eof", "mc"),
            lambdas=(3.0, 48.0), distances=(1, 2, 3, 4), n_configs=200,
            backend="krylov", site_average=False,
        ),
    }


_PRESET_ALIASES = {"fig9a": "fig9", "fig9b": "fig9"}


def preset_names() -> list[str]:
    return sorted(_presets())


def preset(name: str) -> ExperimentSpec:
    """Fully-populated spec for a named experiment; see preset_names()."""
    canonical = _PRESET_ALIASES.get(name, name)
    builders = _presets()
    if canonical not in builders:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")
    return builders[canonical]()
