import subprocess
import sys
from pathlib import Path

import pytest
import yaml

DETUNINGS = [-0.62448819, 5.93539815, -1.53186917, 3.04670911]


def run_cli(config: dict, command: str, out_dir: Path, tmp: Path) -> None:
    config = dict(config)
    config["outputs"] = {"directory": str(out_dir)}
    cfg_path = tmp / f"{command}-{out_dir.name}.yaml"
    cfg_path.write_text(yaml.safe_dump(config))
    proc = subprocess.run(
        [sys.executable, "-m", "dickespec.cli", "--config", str(cfg_path), command],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, f"{command} failed: {proc.stderr}"


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory) -> dict:
    """Solver outputs produced through the CLI, as the plotting tool sees them."""
    tmp = tmp_path_factory.mktemp("artifacts")
    out: dict[str, Path] = {}

    # strong-drive spectrum without dipole coupling; the recorded threshold
    # of 0.1 sits inside the gap that separates the 14-state cluster
    base = {
        "model": {"atom_count": 4, "drive": 200.0},
        "disorder": {"explicit": {"values": DETUNINGS}},
        "thresholds": {"subradiant": 0.1},
    }
    spot = tmp / "plain"
    run_cli(base, "spectrum", spot, tmp)
    out["spectrum_plain"] = spot / "spectrum.json"

    # dipole-coupled geometries; 0.03 splits dark modes from oscillating ones
    for boundary in ("periodic", "open"):
        cfg = {
            "model": {
                "atom_count": 4,
                "drive": 200.0,
                "dd_strength": 1.0,
                "boundary": boundary,
            },
            "disorder": {"explicit": {"values": DETUNINGS}},
            "thresholds": {"subradiant": 0.03},
        }
        spot = tmp / boundary
        run_cli(cfg, "spectrum", spot, tmp)
        out[f"spectrum_{boundary}"] = spot / "spectrum.json"

    sweep_cfg = {
        "model": {"atom_count": 4},
        "disorder": {"equidistant": {"half_width": 2.0}},
        "sweep": {
            "drive": {"min": 0.5, "max": 100.0, "count": 6, "spacing": "log"},
            "half_width": [0.5, 1.25, 2.0],
        },
    }
    spot = tmp / "sweep"
    run_cli(sweep_cfg, "sweep", spot, tmp)
    out["sweep"] = spot / "sweep.json"
    out["sweep_csv"] = spot / "sweep.csv"

    dyn_cfg = {
        "model": {"atom_count": 4, "drive": 200.0},
        "disorder": {"explicit": {"values": DETUNINGS}},
        "dynamics": {
            "t_min": 0.1,
            "t_max": 500.0,
            "samples": 250,
            "pairs": [[1, 3], [3, 4], [1, 2]],
        },
    }
    spot = tmp / "dyn"
    run_cli(dyn_cfg, "dynamics", spot, tmp)
    out["dynamics_csv"] = spot / "dynamics.csv"
    out["fits"] = spot / "fits.json"
    out["contributions"] = spot / "contributions.json"
    return out


@pytest.fixture()
def figdir(tmp_path) -> Path:
    return tmp_path / "fig"
