import csv
import json
from pathlib import Path

import numpy as np
import pytest

from dickeplots.figures import continue_branches
from dickeplots.render import SpecError, load_figure_spec, main, render
from dickeplots.tables import (
    SchemaError,
    load_dynamics,
    load_spectrum,
    load_sweep,
    load_table,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def write_spec(tmp_path: Path, spec: dict) -> Path:
    path = tmp_path / "figspec.json"
    path.write_text(json.dumps(spec))
    return path


class TestRenderKinds:
    def test_heatmap_renders(self, artifacts, figdir):
        out = render(
            {
                "kind": "heatmap",
                "inputs": {"sweep": str(artifacts["sweep"])},
                "output": str(figdir / "map.png"),
            }
        )
        assert Path(out).read_bytes()[:8] == PNG_MAGIC

    def test_scatter_renders(self, artifacts, figdir):
        out = render(
            {
                "kind": "scatter",
                "inputs": {"spectrum": str(artifacts["spectrum_plain"])},
                "output": str(figdir / "scatter.png"),
            }
        )
        assert Path(out).read_bytes()[:8] == PNG_MAGIC

    def test_branches_render(self, artifacts, figdir):
        out = render(
            {
                "kind": "branches",
                "inputs": {"sweep": str(artifacts["sweep"])},
                "output": str(figdir / "branches.png"),
                "axes": {"half_width": 2.0},
            }
        )
        assert Path(out).read_bytes()[:8] == PNG_MAGIC

    def test_timeseries_renders(self, artifacts, figdir):
        out = render(
            {
                "kind": "timeseries",
                "inputs": {
                    "dynamics_csv": str(artifacts["dynamics_csv"]),
                    "fits": str(artifacts["fits"]),
                },
                "output": str(figdir / "traces.png"),
            }
        )
        assert Path(out).read_bytes()[:8] == PNG_MAGIC

    def test_contribution_grid_renders(self, artifacts, figdir):
        out = render(
            {
                "kind": "contribution-grid",
                "inputs": {"contributions": str(artifacts["contributions"])},
                "output": str(figdir / "grid.png"),
            }
        )
        assert Path(out).read_bytes()[:8] == PNG_MAGIC

    def test_render_is_deterministic(self, artifacts, figdir):
        spec = {
            "kind": "scatter",
            "inputs": {"spectrum": str(artifacts["spectrum_plain"])},
            "output": str(figdir / "a.png"),
        }
        first = Path(render(spec)).read_bytes()
        spec["output"] = str(figdir / "b.png")
        second = Path(render(spec)).read_bytes()
        assert first == second


class TestClusterSizes:
    def test_scatter_cluster_counts_match_primary_criteria(self, artifacts):
        # pixel-independent: counts come from the pipeline's internal table
        plain = load_spectrum(artifacts["spectrum_plain"])
        assert plain.cluster_size == 14
        ring = load_spectrum(artifacts["spectrum_periodic"])
        assert ring.cluster_size == 7
        chain = load_spectrum(artifacts["spectrum_open"])
        assert chain.cluster_size == 2


class TestSchemaChecks:
    def test_round_trip_exact(self, artifacts):
        table = load_table(artifacts["sweep_csv"])
        with open(artifacts["sweep_csv"], newline="") as handle:
            rows = list(csv.reader(handle))
        header, body = rows[0], rows[1:]
        for j, name in enumerate(header):
            if name == "errors":
                continue
            raw = np.array([float(r[j]) for r in body])
            assert np.array_equal(table[name], raw)

    def test_missing_column_is_named(self, artifacts):
        with pytest.raises(SchemaError, match="no_such_column"):
            load_table(artifacts["sweep_csv"])["no_such_column"]

    def test_missing_hash_refused(self, tmp_path, artifacts):
        data = json.loads(Path(artifacts["spectrum_plain"]).read_text())
        del data["config_hash"]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        with pytest.raises(SchemaError, match="hash"):
            load_spectrum(bad)

    def test_dynamics_requires_imaginary_columns(self, tmp_path, artifacts):
        src = Path(artifacts["dynamics_csv"]).read_text().splitlines()
        header = src[0].replace("im_1_3", "im_9_9")
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join([header] + src[1:]))
        with pytest.raises(SchemaError, match="im_1_3"):
            load_dynamics(bad, artifacts["fits"])

    def test_sweep_missing_key(self, tmp_path):
        bad = tmp_path / "s.json"
        bad.write_text(json.dumps({"config_hash": "x", "points": []}))
        with pytest.raises(SchemaError, match="grid"):
            load_sweep(bad)


class TestCliEntry:
    def test_exit_code_on_bad_spec_kind(self, tmp_path):
        spec = write_spec(tmp_path, {"kind": "pie", "inputs": {}, "output": "x.png"})
        assert main(["--spec", str(spec)]) == 2

    def test_exit_code_on_missing_input_key(self, tmp_path):
        spec = write_spec(
            tmp_path, {"kind": "heatmap", "inputs": {}, "output": "x.png"}
        )
        assert main(["--spec", str(spec)]) == 2

    def test_exit_code_on_schema_error(self, tmp_path):
        bad = tmp_path / "sweep.json"
        bad.write_text(json.dumps({"points": []}))  # no hash
        spec = write_spec(
            tmp_path,
            {"kind": "heatmap", "inputs": {"sweep": str(bad)}, "output": "x.png"},
        )
        assert main(["--spec", str(spec)]) == 2

    def test_successful_run(self, artifacts, tmp_path, figdir, capsys):
        spec = write_spec(
            tmp_path,
            {
                "kind": "scatter",
                "inputs": {"spectrum": str(artifacts["spectrum_plain"])},
                "output": str(figdir / "ok.png"),
            },
        )
        assert main(["--spec", str(spec)]) == 0
        assert "rendered scatter" in capsys.readouterr().out

    def test_spec_validation(self, tmp_path):
        with pytest.raises(SpecError, match="output"):
            load_figure_spec(
                write_spec(tmp_path, {"kind": "heatmap", "inputs": {}})
            )


class TestBranchContinuation:
    def test_crossing_branches_stay_sorted_by_continuity(self):
        # two branches cross in Re while staying apart in Im
        xs = np.linspace(0.0, 1.0, 11)
        a = -1.0 + xs + 0.5j
        b = -xs - 0.5j
        rows = []
        for i in range(len(xs)):
            pair = [a[i], b[i]]
            if i % 2:
                pair.reverse()
            rows.append(np.array(pair))
        branches, jumps = continue_branches(rows)
        assert np.allclose(branches[0], a) or np.allclose(branches[0], b)
        assert np.allclose(branches[1], b) or np.allclose(branches[1], a)
        assert not jumps.any()

    def test_discontinuity_flagged(self):
        rows = [
            np.array([0.0 + 0.0j, -1.0 + 0.0j]),
            np.array([0.001 + 0.0j, -1.0 + 0.001j]),
            np.array([0.002 + 50.0j, -1.0 + 0.002j]),  # sudden distant jump
        ]
        _, jumps = continue_branches(rows)
        assert jumps.any()
