"""Figure-spec driven entry point: ``render --spec spec.json``.

A figure spec names the kind, the input artifacts, the output image, and
optional axis settings, e.g.::

    {"kind": "heatmap",
     "inputs": {"sweep": "out/sweep.json"},
     "output": "fig/map.png",
     "axes": {"xscale": "log"}}

Exit codes: 0 success, 2 for schema or spec errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from dickeplots import figures, tables
from dickeplots.tables import SchemaError

KINDS = ("heatmap", "scatter", "branches", "timeseries", "contribution-grid")


class SpecError(ValueError):
    pass


def load_figure_spec(path: str | Path) -> dict:
    try:
        spec = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec {path} is not valid JSON: {exc}") from exc
    kind = spec.get("kind")
    if kind not in KINDS:
        raise SpecError(f"spec kind must be one of {KINDS}, got {kind!r}")
    if "output" not in spec:
        raise SpecError("spec is missing 'output'")
    if not isinstance(spec.get("inputs"), dict):
        raise SpecError("spec is missing the 'inputs' mapping")
    return spec


def _input(spec: dict, name: str) -> str:
    try:
        return spec["inputs"][name]
    except KeyError:
        raise SpecError(f"spec kind {spec['kind']!r} needs input '{name}'")


def render(spec: dict) -> str:
    kind = spec["kind"]
    output = spec["output"]
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    axes = spec.get("axes", {})
    if kind == "heatmap":
        figures.heatmap(tables.load_sweep(_input(spec, "sweep")), output, axes)
    elif kind == "scatter":
        figures.scatter(tables.load_spectrum(_input(spec, "spectrum")), output, axes)
    elif kind == "branches":
        figures.branches(tables.load_sweep(_input(spec, "sweep")), output, axes)
    elif kind == "timeseries":
        artifact = tables.load_dynamics(
            _input(spec, "dynamics_csv"), _input(spec, "fits")
        )
        figures.timeseries(artifact, output, axes)
    else:
        figures.contribution_grid(
            tables.load_contributions(_input(spec, "contributions")), output, axes
        )
    return output


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="render figures from solver artifacts"
    )
    parser.add_argument("--spec", required=True, help="figure spec JSON")
    args = parser.parse_args(argv)
    try:
        spec = load_figure_spec(args.spec)
        output = render(spec)
    except (SpecError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"rendered {spec['kind']} -> {output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
