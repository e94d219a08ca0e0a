"""Loaders for the solver's CSV/JSON artifacts with schema validation.

Every artifact family couples a CSV to a JSON sidecar that embeds the
resolved run configuration and its hash; inputs without a hash are refused
so figures can always be traced back to the run that produced them.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the documented artifact schema."""


def load_sidecar(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not data.get("config_hash"):
        raise SchemaError(f"{path}: embedded config hash is missing")
    return data


@dataclass(frozen=True)
class Table:
    """Columnar view of one CSV artifact; floats parse once, verbatim."""

    path: str
    columns: tuple[str, ...]
    data: dict[str, np.ndarray] = field(repr=False)

    def __getitem__(self, column: str) -> np.ndarray:
        if column not in self.data:
            raise SchemaError(f"{self.path}: missing column '{column}'")
        return self.data[column]

    @property
    def rows(self) -> int:
        return len(next(iter(self.data.values()))) if self.data else 0


def load_table(path: str | Path, required: tuple[str, ...] = ()) -> Table:
    path = Path(path)
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = tuple(rows[0])
    for column in required:
        if column not in header:
            raise SchemaError(f"{path}: missing column '{column}'")
    numeric: dict[str, list] = {name: [] for name in header}
    text: dict[str, list] = {}
    for row in rows[1:]:
        if len(row) != len(header):
            raise SchemaError(f"{path}: ragged row with {len(row)} fields")
        for name, cell in zip(header, row):
            numeric[name].append(cell)
    data: dict[str, np.ndarray] = {}
    for name, cells in numeric.items():
        try:
            data[name] = np.array([float(c) if c else np.nan for c in cells])
        except ValueError:
            data[name] = np.array(cells, dtype=object)
    return Table(path=str(path), columns=header, data=data)


@dataclass(frozen=True)
class SpectrumArtifact:
    eigenvalues: np.ndarray
    threshold: float
    config_hash: str
    atom_count: int

    @property
    def cluster_size(self) -> int:
        """States inside the near-zero decay window, steady state included."""
        return int(np.sum(-self.eigenvalues.real < self.threshold))


def load_spectrum(path: str | Path) -> SpectrumArtifact:
    data = load_sidecar(path)
    for key in ("eigenvalues", "classification", "config"):
        if key not in data:
            raise SchemaError(f"{path}: missing key '{key}'")
    vals = np.array([complex(re, im) for re, im in data["eigenvalues"]])
    return SpectrumArtifact(
        eigenvalues=vals,
        threshold=float(data["classification"]["threshold"]),
        config_hash=data["config_hash"],
        atom_count=int(data["config"]["atom_count"]),
    )


@dataclass(frozen=True)
class SweepArtifact:
    drives: np.ndarray
    half_widths: np.ndarray
    points: list
    config_hash: str

    def grid_rates(self) -> np.ndarray:
        """-Re lambda_1 on the (half_width, drive) grid, row major."""
        out = np.full((len(self.half_widths), len(self.drives)), np.nan)
        index = {
            (round(d, 12), round(h, 12)): p
            for p in self.points
            for d, h in [(p["drive"], p["half_width"])]
        }
        for i, h in enumerate(self.half_widths):
            for j, d in enumerate(self.drives):
                point = index.get((round(d, 12), round(h, 12)))
                if point is not None and not point.get("error"):
                    out[i, j] = -point["lambda_1"][0]
        return out

    def eigenvalue_rows(self, half_width: float) -> list[np.ndarray]:
        """Leading eigenvalues per drive at one broadening value."""
        rows = []
        for d in self.drives:
            for p in self.points:
                if p["drive"] == d and abs(p["half_width"] - half_width) < 1e-12:
                    rows.append(
                        np.array([complex(re, im) for re, im in p["eigenvalues"]])
                    )
                    break
            else:
                raise SchemaError(
                    f"sweep has no point at drive={d}, half_width={half_width}"
                )
        return rows


def load_sweep(path: str | Path) -> SweepArtifact:
    data = load_sidecar(path)
    for key in ("points", "grid"):
        if key not in data:
            raise SchemaError(f"{path}: missing key '{key}'")
    return SweepArtifact(
        drives=np.array(data["grid"]["drive"], dtype=float),
        half_widths=np.array(data["grid"]["half_width"], dtype=float),
        points=data["points"],
        config_hash=data["config_hash"],
    )


@dataclass(frozen=True)
class DynamicsArtifact:
    table: Table
    pairs: tuple[tuple[int, int], ...]
    fits: dict
    config_hash: str

    def magnitude(self, pair: tuple[int, int]) -> np.ndarray:
        re = self.table[f"re_{pair[0]}_{pair[1]}"]
        im = self.table[f"im_{pair[0]}_{pair[1]}"]
        return np.hypot(re, im)


def load_dynamics(csv_path: str | Path, fits_path: str | Path) -> DynamicsArtifact:
    sidecar = load_sidecar(fits_path)
    table = load_table(csv_path, required=("t",))
    pairs = []
    for name in table.columns:
        if name.startswith("re_"):
            _, a, b = name.split("_")
            pairs.append((int(a), int(b)))
            if f"im_{a}_{b}" not in table.columns:
                raise SchemaError(f"{csv_path}: missing column 'im_{a}_{b}'")
    if not pairs:
        raise SchemaError(f"{csv_path}: no correlation columns found")
    return DynamicsArtifact(
        table=table,
        pairs=tuple(pairs),
        fits=sidecar.get("fits", {}),
        config_hash=sidecar["config_hash"],
    )


@dataclass(frozen=True)
class ContributionArtifact:
    pairs: tuple[tuple[int, int], ...]
    eigenvalues: np.ndarray
    magnitudes: np.ndarray
    config_hash: str


def load_contributions(path: str | Path) -> ContributionArtifact:
    data = load_sidecar(path)
    if "contributions" not in data:
        raise SchemaError(f"{path}: missing key 'contributions'")
    node = data["contributions"]
    for key in ("pairs", "eigenvalues", "magnitudes"):
        if key not in node:
            raise SchemaError(f"{path}: missing key 'contributions.{key}'")
    return ContributionArtifact(
        pairs=tuple((int(a), int(b)) for a, b in node["pairs"]),
        eigenvalues=np.array([complex(re, im) for re, im in node["eigenvalues"]]),
        magnitudes=np.array(node["magnitudes"], dtype=float),
        config_hash=data["config_hash"],
    )
