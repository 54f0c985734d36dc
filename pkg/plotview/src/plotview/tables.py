"""Reading and validating the delimited outputs of the simulation CLI.

Only the documented public CSV schemas are known here; files whose header
does not match the expected schema are refused.
"""

from __future__ import annotations

import csv
from pathlib import Path

# column lists per table kind; the D column appears in long-range outputs
SCHEMAS = {
    "pex": ["t", "lambda", "pex_mean", "pex_stderr"],
    "pee": ["d", "lambda", "pee", "pee_stderr"],
    "eof": ["t", "lambda", "d", "eof_mean", "eof_stderr"],
    "mc": ["t", "lambda", "d", "mc_mean", "mc_stderr"],
    "eof_peaks": ["d", "lambda", "n_sites", "eof_peak", "eof_peak_stderr", "t_peak"],
    "mc_peaks": ["d", "lambda", "n_sites", "mc_peak", "mc_peak_stderr", "t_peak"],
}


class Table:
    """One parsed CSV: raw string columns, keyed by header name."""

    def __init__(self, path: Path, columns: dict[str, list[str]]):
        self.path = path
        self.columns = columns

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def floats(self, name: str) -> list[float]:
        return [float(x) for x in self.columns[name]]

    def groups(self, *names: str) -> list[tuple[str, ...]]:
        """Distinct value combinations of the named columns, in file order."""
        seen: list[tuple[str, ...]] = []
        for values in zip(*(self.columns[n] for n in names)):
            if values not in seen:
                seen.append(values)
        return seen

    def where(self, **filters: str) -> "Table":
        keep = [
            i
            for i in range(len(self))
            if all(self.columns[k][i] == v for k, v in filters.items())
        ]
        return Table(self.path, {k: [col[i] for i in keep] for k, col in self.columns.items()})


def expected_header(kind: str, longrange: bool) -> list[str]:
    cols = list(SCHEMAS[kind])
    if longrange:
        cols.insert(2, "D")
    return cols


def read_table(path: Path, kind: str) -> Table:
    """Load one CSV, validating its header against the documented schema."""
    if kind not in SCHEMAS:
        raise ValueError(f"unknown table kind {kind!r}")
    if not path.exists():
        raise FileNotFoundError(f"input file {path} does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path.name}: empty file (expected at least a header)")
    header = rows[0]
    for longrange in (False, True):
        if header == expected_header(kind, longrange):
            break
    else:
        raise ValueError(
            f"{path.name}: header {header} does not match the {kind!r} schema "
            f"{expected_header(kind, False)} (or its long-range variant)"
        )
    body = rows[1:]
    if any(len(r) != len(header) for r in body):
        raise ValueError(f"{path.name}: ragged rows")
    return Table(path, {name: [r[i] for r in body] for i, name in enumerate(header)})


def lambda_label(value: str) -> str:
    text = r"\infty" if value == "inf" else value
    return rf"$\lambda = {text}$"
