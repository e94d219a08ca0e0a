"""Run configuration: YAML parsing, validation, disorder materialization.

All rates in a config are in units of the collective decay rate; the gamma
entry only scales labels on output.  Exactly one disorder specification
must be present.  Flag overrides (output directory, seed, threads) are
applied after the file is parsed and win over file values.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from dickespec.operators import ModelParams, equidistant_detunings

RNG_NAME = "pcg64"

DEFAULT_SUBRADIANT_THRESHOLD = 0.05
DEFAULT_FREQ_DEDUP = 1e-6


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class DisorderSpec:
    kind: str  # explicit | equidistant | gaussian
    values: tuple[float, ...] = ()
    half_width: float = 0.0
    scale: float = 0.0
    seed: int = 0

    def materialize(self, atom_count: int) -> tuple[float, ...]:
        if self.kind == "explicit":
            if len(self.values) != atom_count:
                raise ConfigError(
                    f"explicit disorder lists {len(self.values)} values for "
                    f"{atom_count} atoms"
                )
            return self.values
        if self.kind == "equidistant":
            return equidistant_detunings(atom_count, self.half_width)
        if self.kind == "gaussian":
            rng = np.random.Generator(np.random.PCG64(self.seed))
            return tuple(float(x) for x in rng.normal(0.0, self.scale, atom_count))
        raise ConfigError(f"unknown disorder kind {self.kind!r}")

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "explicit":
            out["values"] = list(self.values)
        elif self.kind == "equidistant":
            out["half_width"] = self.half_width
        else:
            out["scale"] = self.scale
            out["seed"] = self.seed
            out["rng"] = RNG_NAME
        return out


@dataclass(frozen=True)
class GridSpec:
    values: tuple[float, ...]

    @staticmethod
    def parse(node, name: str) -> "GridSpec":
        if isinstance(node, (list, tuple)):
            vals = tuple(float(x) for x in node)
        elif isinstance(node, dict):
            try:
                lo, hi = float(node["min"]), float(node["max"])
                count = int(node["count"])
            except KeyError as exc:
                raise ConfigError(f"{name} grid needs min/max/count: missing {exc}")
            spacing = node.get("spacing", "linear")
            if count < 1:
                raise ConfigError(f"{name} grid count must be positive")
            if spacing == "log":
                if lo <= 0:
                    raise ConfigError(f"{name} log grid needs positive min")
                vals = tuple(float(x) for x in np.geomspace(lo, hi, count))
            elif spacing == "linear":
                vals = tuple(float(x) for x in np.linspace(lo, hi, count))
            else:
                raise ConfigError(f"{name} grid spacing must be linear or log")
        else:
            raise ConfigError(f"{name} grid must be a list or a min/max/count mapping")
        if not vals:
            raise ConfigError(f"{name} grid is empty")
        if any(v < 0 for v in vals):
            raise ConfigError(f"{name} grid values must be non-negative")
        return GridSpec(values=vals)


@dataclass(frozen=True)
class DynamicsSpec:
    t_min: float = 0.1
    t_max: float = 500.0
    samples: int = 500
    spacing: str = "log"
    initial_state: str = "ground"
    pairs: tuple[tuple[int, int], ...] = ()

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_min, self.t_max, self.samples)
        return np.linspace(self.t_min, self.t_max, self.samples)


@dataclass(frozen=True)
class RunConfig:
    atom_count: int
    gamma: float = 1.0
    drive: float = 0.0
    dd_strength: float = 0.0
    boundary: str = "none"
    disorder: DisorderSpec = field(default_factory=lambda: DisorderSpec(kind="explicit"))
    sweep_drive: GridSpec | None = None
    sweep_half_width: GridSpec | None = None
    dynamics: DynamicsSpec = field(default_factory=DynamicsSpec)
    out_dir: str = "out"
    threads: int = 0  # 0: use available cores
    subradiant_threshold: float = DEFAULT_SUBRADIANT_THRESHOLD
    freq_dedup: float = DEFAULT_FREQ_DEDUP

    def model_params(self) -> ModelParams:
        return ModelParams(
            atom_count=self.atom_count,
            decay_rate=1.0,
            drive=self.drive,
            detunings=self.disorder.materialize(self.atom_count),
            dd_strength=self.dd_strength,
            boundary=self.boundary,
        )

    def all_pairs(self) -> tuple[tuple[int, int], ...]:
        if self.dynamics.pairs:
            return self.dynamics.pairs
        n = self.atom_count
        return tuple((a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1))

    def resolved(self) -> dict:
        """Self-describing dictionary embedded into every JSON artifact."""
        out = {
            "atom_count": self.atom_count,
            "gamma": self.gamma,
            "drive": self.drive,
            "dd_strength": self.dd_strength,
            "boundary": self.boundary,
            "disorder": self.disorder.describe(),
            "detunings": list(self.disorder.materialize(self.atom_count)),
            "thresholds": {
                "subradiant": self.subradiant_threshold,
                "freq_dedup": self.freq_dedup,
            },
        }
        if self.sweep_drive is not None:
            out["sweep"] = {
                "drive": list(self.sweep_drive.values),
                "half_width": list(self.sweep_half_width.values),
            }
        out["dynamics"] = {
            "t_min": self.dynamics.t_min,
            "t_max": self.dynamics.t_max,
            "samples": self.dynamics.samples,
            "spacing": self.dynamics.spacing,
            "initial_state": self.dynamics.initial_state,
            "pairs": [list(p) for p in self.all_pairs()],
        }
        return out

    def config_hash(self) -> str:
        canon = json.dumps(self.resolved(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    model = data.get("model", {})
    _require(isinstance(model, dict), "model section must be a mapping")
    _require("atom_count" in model, "model.atom_count is required")
    atom_count = int(model["atom_count"])
    _require(atom_count >= 1, "model.atom_count must be >= 1")
    gamma = float(model.get("gamma", 1.0))
    _require(gamma > 0, "model.gamma must be positive")
    drive = float(model.get("drive", 0.0))
    _require(drive >= 0, "model.drive must be non-negative")
    dd = float(model.get("dd_strength", 0.0))
    boundary = str(model.get("boundary", "none"))

    dis_node = data.get("disorder", {})
    _require(isinstance(dis_node, dict), "disorder section must be a mapping")
    kinds = [k for k in ("explicit", "equidistant", "gaussian") if k in dis_node]
    _require(
        len(kinds) == 1,
        f"exactly one disorder spec is required, found {kinds or 'none'}",
    )
    kind = kinds[0]
    node = dis_node[kind] or {}
    if kind == "explicit":
        _require("values" in node, "disorder.explicit.values is required")
        disorder = DisorderSpec(
            kind="explicit", values=tuple(float(x) for x in node["values"])
        )
    elif kind == "equidistant":
        _require("half_width" in node, "disorder.equidistant.half_width is required")
        hw = float(node["half_width"])
        _require(hw >= 0, "disorder half_width must be non-negative")
        disorder = DisorderSpec(kind="equidistant", half_width=hw)
    else:
        _require("scale" in node, "disorder.gaussian.scale is required")
        scale = float(node["scale"])
        _require(scale >= 0, "disorder scale must be non-negative")
        seed = int(node.get("seed", 0))
        _require(0 <= seed < 2**64, "disorder seed must fit in 64 bits")
        disorder = DisorderSpec(kind="gaussian", scale=scale, seed=seed)

    sweep_drive = sweep_hw = None
    if "sweep" in data:
        sweep = data["sweep"]
        _require(isinstance(sweep, dict), "sweep section must be a mapping")
        _require(
            "drive" in sweep and "half_width" in sweep,
            "sweep needs both drive and half_width grids",
        )
        sweep_drive = GridSpec.parse(sweep["drive"], "sweep.drive")
        sweep_hw = GridSpec.parse(sweep["half_width"], "sweep.half_width")

    dyn_node = data.get("dynamics", {})
    _require(isinstance(dyn_node, dict), "dynamics section must be a mapping")
    pairs = tuple(
        (int(a), int(b)) for a, b in (dyn_node.get("pairs") or ())
    )
    for a, b in pairs:
        _require(
            1 <= a <= atom_count and 1 <= b <= atom_count,
            f"pair ({a},{b}) out of range for {atom_count} atoms",
        )
    dynamics = DynamicsSpec(
        t_min=float(dyn_node.get("t_min", 0.1)),
        t_max=float(dyn_node.get("t_max", 500.0)),
        samples=int(dyn_node.get("samples", 500)),
        spacing=str(dyn_node.get("spacing", "log")),
        initial_state=str(dyn_node.get("initial_state", "ground")),
        pairs=pairs,
    )
    _require(dynamics.t_min > 0, "dynamics.t_min must be positive")
    _require(dynamics.t_max > dynamics.t_min, "dynamics.t_max must exceed t_min")
    _require(dynamics.samples >= 10, "dynamics.samples must be at least 10")
    _require(
        dynamics.spacing in ("log", "linear"), "dynamics.spacing must be log or linear"
    )
    _require(
        dynamics.initial_state in ("ground", "excited", "mixed"),
        "dynamics.initial_state must be ground, excited or mixed",
    )

    out_node = data.get("outputs", {})
    _require(isinstance(out_node, dict), "outputs section must be a mapping")
    out_dir = str(out_node.get("directory", "out"))

    thr = data.get("thresholds", {})
    _require(isinstance(thr, dict), "thresholds section must be a mapping")
    subr = float(thr.get("subradiant", DEFAULT_SUBRADIANT_THRESHOLD))
    _require(subr > 0, "thresholds.subradiant must be positive")
    dedup = float(thr.get("freq_dedup", DEFAULT_FREQ_DEDUP))
    _require(dedup > 0, "thresholds.freq_dedup must be positive")

    cfg = RunConfig(
        atom_count=atom_count,
        gamma=gamma,
        drive=drive,
        dd_strength=dd,
        boundary=boundary,
        disorder=disorder,
        sweep_drive=sweep_drive,
        sweep_half_width=sweep_hw,
        dynamics=dynamics,
        out_dir=out_dir,
        subradiant_threshold=subr,
        freq_dedup=dedup,
    )
    try:
        cfg.model_params()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        raise ConfigError(f"config {path} is empty")
    return parse_config(data)


def apply_overrides(
    cfg: RunConfig,
    *,
    out_dir: str | None = None,
    threads: int | None = None,
    seed: int | None = None,
) -> RunConfig:
    """Command-line flags win over file values."""
    if out_dir is not None:
        cfg = replace(cfg, out_dir=out_dir)
    if threads is not None:
        if threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = replace(cfg, threads=threads)
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ConfigError("--seed must fit in 64 bits")
        if cfg.disorder.kind != "gaussian":
            raise ConfigError("--seed only applies to gaussian disorder")
        cfg = replace(cfg, disorder=replace(cfg.disorder, seed=seed))
    return cfg
