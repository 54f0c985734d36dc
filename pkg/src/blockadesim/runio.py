"""Run-configuration parsing and the bit-exact output file schemas.

Every CSV is UTF-8, comma-separated, '.' decimal, one header line, floats
at 12 significant digits, rows in a fixed deterministic order, so a fixed
(spec, seed, version) reproduces files byte-for-byte.  Each CSV gets a
sibling ``<name>.provenance.json`` recording the spec, seed, version, and
content hashes; the creation timestamp is excluded from all hashes.

File family (``D`` column only for long-range runs):

* ``<prefix>_pex.csv``        t,lambda[,D],pex_mean,pex_stderr
* ``<prefix>_pee.csv``        d,lambda[,D],pee,pee_stderr
* ``<prefix>_eof.csv``        t,lambda[,D],d,eof_mean,eof_stderr
* ``<prefix>_mc.csv``         t,lambda[,D],d,mc_mean,mc_stderr
* ``<prefix>_eof_peaks.csv``  d,lambda[,D],n_sites,eof_peak,eof_peak_stderr,t_peak
* ``<prefix>_mc_peaks.csv``   d,lambda[,D],n_sites,mc_peak,mc_peak_stderr,t_peak
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .dynamics import TimeGrid
from .ensemble import EnsembleResult, ExperimentSpec, spec_as_dict
from .lattice import LatticeSpec


def fmt(x: float) -> str:
    """12-significant-digit, locale-independent float rendering; inf -> 'inf'."""
    if math.isinf(x):
        return "inf"
    return f"{x:.12g}"


def _combo_label(combo) -> list[str]:
    cols = [fmt(combo.lam)]
    if combo.interaction is not None:
        cols.append(fmt(combo.interaction))
    return cols


def result_tables(result: EnsembleResult, prefix: str) -> dict[str, tuple[list[str], list[list[str]]]]:
    """All (header, rows) tables an ensemble result produces, keyed by file name."""
    spec = result.spec
    lam_cols = ["lambda"] + (["D"] if spec.hamiltonian == "longrange" else [])
    tables: dict[str, tuple[list[str], list[list[str]]]] = {}

    if "pex" in spec.observables:
        rows = [
            [fmt(t)] + _combo_label(c) + [fmt(c.pex_mean[i]), fmt(c.pex_stderr[i])]
            for c in result.combos
            for i, t in enumerate(result.times)
        ]
        tables[f"{prefix}_pex.csv"] = (["t"] + lam_cols + ["pex_mean", "pex_stderr"], rows)

    if "pee" in spec.observables:
        rows = [
            [str(d)] + _combo_label(c) + [fmt(c.pee[k]), fmt(c.pee_stderr[k])]
            for c in result.combos
            for k, d in enumerate(result.distances)
        ]
        tables[f"{prefix}_pee.csv"] = (["d"] + lam_cols + ["pee", "pee_stderr"], rows)

    for measure in ("eof", "mc"):
        if measure not in spec.observables:
            continue
        rows = []
        peak_rows = []
        for c in result.combos:
            mean = getattr(c, f"{measure}_mean")
            stderr = getattr(c, f"{measure}_stderr")
            for k, d in enumerate(result.distances):
                rows.extend(
                    [fmt(t)] + _combo_label(c) + [str(d), fmt(mean[k][i]), fmt(stderr[k][i])]
                    for i, t in enumerate(result.times)
                )
            for d, peak, err in result.peak_profile(measure, c.lam, c.interaction, strict=False):
                if peak is None:
                    # a series that never forms an interior peak has no row
                    warnings.warn(
                        f"no {measure} peak at distance {d} for lam={c.lam}; row omitted"
                    )
                    continue
                peak_rows.append(
                    [str(d)] + _combo_label(c)
                    + [str(spec.lattice.n_sites), fmt(peak.value), fmt(err), fmt(peak.time)]
                )
        tables[f"{prefix}_{measure}.csv"] = (
            ["t"] + lam_cols + ["d", f"{measure}_mean", f"{measure}_stderr"], rows
        )
        tables[f"{prefix}_{measure}_peaks.csv"] = (
            ["d"] + lam_cols + ["n_sites", f"{measure}_peak", f"{measure}_peak_stderr", "t_peak"],
            peak_rows,
        )
    return tables


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> bytes:
    text = "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"
    data = text.encode("utf-8")
    path.write_bytes(data)
    return data


def write_provenance(path: Path, csv_bytes: bytes, spec_dict: dict,
                     master_seed: int, version: str) -> None:
    spec_json = json.dumps(spec_dict, sort_keys=True, separators=(",", ":"))
    record = {
        "file": path.name,
        "spec": spec_dict,
        "master_seed": master_seed,
        "version": version,
        "spec_sha256": hashlib.sha256(spec_json.encode()).hexdigest(),
        "csv_sha256": hashlib.sha256(csv_bytes).hexdigest(),
        # informational only: excluded from every hash above
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path.with_suffix(path.suffix + ".provenance.json").write_text(
        json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_result(result: EnsembleResult, out_dir: Path, prefix: str) -> list[Path]:
    """Write every table of a result plus provenance; returns the CSV paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec_dict = spec_as_dict(result.spec)
    version = result.provenance["version"]
    written = []
    for name, (header, rows) in sorted(result_tables(result, prefix).items()):
        path = out_dir / name
        data = write_csv(path, header, rows)
        write_provenance(path, data, spec_dict, result.spec.master_seed, version)
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# run-configuration files

_CONFIG_KEYS = {
    "kind", "sites", "boundary", "blockade_range",
    "hamiltonian", "interactions", "lambdas", "n_configs",
    "t_max", "dt", "master_seed", "observables", "distances",
    "site_average", "reference_site", "saturation_window", "backend",
    "pee_per_config_ratio", "corr_of_mean_state",
    "out_dir", "workers", "prefix",
}


@dataclass
class RunConfig:
    """An ExperimentSpec plus the runtime options that do not affect results."""

    spec: ExperimentSpec
    out_dir: str = "."
    workers: int = 1
    prefix: str = "run"


def _parse_lambda(x) -> float:
    if isinstance(x, str):
        if x.lower() in ("inf", "infinity"):
            return math.inf
        try:
            return float(x)
        except ValueError:
            raise ValueError(f"bad lambda value {x!r} (use a number or 'inf')") from None
    return float(x)


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a flat config mapping; unknown keys are errors, not warnings."""
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    sites = raw.get("sites", 16)
    lattice = LatticeSpec(
        kind=raw.get("kind", "chain"),
        sites=tuple(sites) if isinstance(sites, (list, tuple)) else int(sites),
        boundary=raw.get("boundary", "open"),
        blockade_range=int(raw.get("blockade_range", 1)),
    )
    grid = TimeGrid(t_max=float(raw.get("t_max", 25.0)), dt=float(raw.get("dt", 0.05)))
    spec = ExperimentSpec(
        lattice=lattice,
        hamiltonian=raw.get("hamiltonian", "blockade"),
        lambdas=tuple(_parse_lambda(x) for x in raw.get("lambdas", [3, 12, 48, "inf"])),
        interactions=tuple(float(x) for x in raw.get("interactions", [])),
        n_configs=int(raw.get("n_configs", 1000)),
        grid=grid,
        master_seed=int(raw.get("master_seed", 0)),
        observables=tuple(raw.get("observables", ["pex"])),
        distances=tuple(int(d) for d in raw.get("distances", [])),
        site_average=bool(raw.get("site_average", True)),
        reference_site=int(raw.get("reference_site", 0)),
        saturation_window=tuple(raw.get("saturation_window", (15.0, 25.0))),
        backend=raw.get("backend", "auto"),
        pee_per_config_ratio=bool(raw.get("pee_per_config_ratio", False)),
        corr_of_mean_state=bool(raw.get("corr_of_mean_state", False)),
    )
    return RunConfig(
        spec=spec,
        out_dir=str(raw.get("out_dir", ".")),
        workers=int(raw.get("workers", 1)),
        prefix=str(raw.get("prefix", "run")),
    )


def load_config(path: str | Path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    return config_from_dict(raw)


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """CLI-flag overrides on top of a config/preset; None values are ignored."""
    spec = cfg.spec
    spec_fields = {}
    for key in ("master_seed", "n_configs", "backend"):
        if overrides.get(key) is not None:
            spec_fields[key] = overrides[key]
    if overrides.get("lambdas") is not None:
        spec_fields["lambdas"] = tuple(_parse_lambda(x) for x in overrides["lambdas"])
    if overrides.get("t_max") is not None or overrides.get("dt") is not None:
        grid = TimeGrid(
            t_max=overrides.get("t_max") or spec.grid.t_max,
            dt=overrides.get("dt") or spec.grid.dt,
        )
        spec_fields["grid"] = grid
        lo, hi = spec.saturation_window
        if hi > grid.t_max:
            # keep the window meaning (a late-time slice) under the new grid
            spec_fields["saturation_window"] = (0.6 * grid.t_max, grid.t_max)
    if spec_fields:
        spec = replace(spec, **spec_fields)
    return RunConfig(
        spec=spec,
        out_dir=overrides.get("out_dir") or cfg.out_dir,
        workers=overrides.get("workers") or cfg.workers,
        prefix=overrides.get("prefix") or cfg.prefix,
    )
