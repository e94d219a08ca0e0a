"""Command-line front end: spectra, sweeps, dynamics, symmetry and rate reports.

All outputs are deterministic for a fixed config (the only run-dependent
JSON field is ``generated_at``) and are written atomically, so a failed run
never leaves partial artifacts behind.  Exit codes: 0 success, 1 runtime
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from dickespec import dynamics as dyn
from dickespec import rateq
from dickespec.config import ConfigError, RunConfig, apply_overrides, load_config
from dickespec.liouvillian import (
    build_liouvillian,
    classify_subradiant,
    spectrum,
)
from dickespec.operators import ModelParams, collective_ops, hamiltonian
from dickespec.symmetry import (
    GROUP_KINDS,
    build_group,
    count_oscillation_frequencies,
    count_stationary,
    count_strong_drive,
    decompose_ladder,
    group_for_boundary,
    half_integer_str,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def fmt(x: float) -> str:
    """Floats in CSV carry 12 significant digits."""
    return f"{x:.12g}"


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["generated_at"] = datetime.now(timezone.utc).isoformat()
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=1) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def matrix_rowmajor(op: np.ndarray) -> list[list[float]]:
    """Row-major (re, im) pairs; the fixed serialization for operators."""
    return [[float(x.real), float(x.imag)] for x in np.asarray(op).reshape(-1)]


def base_payload(cfg: RunConfig) -> dict:
    return {"config": cfg.resolved(), "config_hash": cfg.config_hash()}


def initial_state(cfg: RunConfig) -> np.ndarray:
    kind = cfg.dynamics.initial_state
    dim = 2**cfg.atom_count
    if kind == "ground":
        return dyn.ground_state(cfg.atom_count)
    if kind == "excited":
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    return np.eye(dim, dtype=complex) / dim


# ---------------------------------------------------------------- spectrum


def run_spectrum(cfg: RunConfig) -> dict:
    params = cfg.model_params()
    spec = spectrum(build_liouvillian(params))
    report = classify_subradiant(
        spec, cfg.subradiant_threshold, freq_tol=cfg.freq_dedup
    )
    vals = spec.eigenvalues
    payload = base_payload(cfg)
    payload.update(
        {
            "sort_order": spec.sort_order,
            "eigenvalues": [[float(v.real), float(v.imag)] for v in vals],
            "residuals": [float(r) for r in spec.residuals],
            "steady_count": spec.steady_count,
            "classification": {
                "threshold": report.threshold,
                "lambda_1": [report.lambda_1.real, report.lambda_1.imag],
                "count_with_steady": report.count_with_steady,
                "count_without_steady": report.count_without_steady,
                "frequencies": list(report.frequencies),
            },
        }
    )
    return payload


def cmd_spectrum(cfg: RunConfig) -> int:
    payload = run_spectrum(cfg)
    out = Path(cfg.out_dir)
    write_json(out / "spectrum.json", payload)
    rows = [[fmt(re), fmt(im)] for re, im in payload["eigenvalues"]]
    write_csv(out / "spectrum.csv", ["re", "im"], rows)
    print(f"spectrum: {len(rows)} eigenvalues -> {out/'spectrum.json'}")
    return EXIT_OK


# ---------------------------------------------------------------- sweep


def _sweep_point(args: tuple) -> dict:
    """One grid point; returns a plain dict so it can cross process borders."""
    atom_count, drive, half_width, threshold, freq_tol, keep = args
    try:
        from dickespec.operators import equidistant_detunings

        params = ModelParams(
            atom_count=atom_count,
            drive=drive,
            detunings=equidistant_detunings(atom_count, half_width),
        )
        t0 = time.perf_counter()
        spec = spectrum(build_liouvillian(params))
        report = classify_subradiant(spec, threshold, freq_tol=freq_tol)
        wall = time.perf_counter() - t0
        lead = spec.eigenvalues[:keep]
        return {
            "drive": drive,
            "half_width": half_width,
            "lambda_1": [report.lambda_1.real, report.lambda_1.imag],
            "subradiant_count": report.count_with_steady,
            "eigenvalues": [[float(v.real), float(v.imag)] for v in lead],
            "wall_time": wall,
            "error": "",
        }
    except Exception as exc:  # per-point failures recorded, run continues
        return {
            "drive": drive,
            "half_width": half_width,
            "lambda_1": [float("nan"), float("nan")],
            "subradiant_count": -1,
            "eigenvalues": [],
            "wall_time": 0.0,
            "error": f"{type(exc).__name__}: {exc}",
        }


def run_sweep(cfg: RunConfig) -> list[dict]:
    keep = count_strong_drive(cfg.atom_count)
    tasks = [
        (cfg.atom_count, om, hw, cfg.subradiant_threshold, cfg.freq_dedup, keep)
        for hw in cfg.sweep_half_width.values
        for om in cfg.sweep_drive.values
    ]
    threads = cfg.threads or os.cpu_count() or 1
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=4))
    else:
        results = [_sweep_point(t) for t in tasks]
    return results


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.sweep_drive is None or cfg.sweep_half_width is None:
        raise ConfigError("sweep requires sweep.drive and sweep.half_width grids")
    points = run_sweep(cfg)
    out = Path(cfg.out_dir)
    header = [
        "omega_drive",
        "delta_omega",
        "re_lambda1",
        "im_lambda1",
        "subradiant_count",
        "errors",
    ]
    rows = [
        [
            fmt(pt["drive"]),
            fmt(pt["half_width"]),
            fmt(pt["lambda_1"][0]),
            fmt(pt["lambda_1"][1]),
            str(pt["subradiant_count"]),
            pt["error"],
        ]
        for pt in points
    ]
    write_csv(out / "sweep.csv", header, rows)
    payload = base_payload(cfg)
    payload["points"] = points
    payload["grid"] = {
        "drive": list(cfg.sweep_drive.values),
        "half_width": list(cfg.sweep_half_width.values),
        "ordering": "row-major over (half_width, drive)",
    }
    write_json(out / "sweep.json", payload)
    failures = sum(1 for pt in points if pt["error"])
    print(f"sweep: {len(points)} points ({failures} failed) -> {out/'sweep.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- dynamics


def run_dynamics(cfg: RunConfig) -> tuple[dict, dyn.TimeTrace, np.ndarray]:
    params = cfg.model_params()
    spec = spectrum(build_liouvillian(params))
    pairs = list(cfg.all_pairs())
    rho0 = initial_state(cfg)
    times = cfg.dynamics.times()
    trace = dyn.spectral_correlations(spec, rho0, times, pairs, cfg.atom_count)
    contributions = dyn.eigenvector_observables(
        spec, pairs, cfg.atom_count, count=count_strong_drive(cfg.atom_count)
    )

    fits = {}
    oscillating = cfg.dd_strength != 0.0
    for k, pair in enumerate(pairs):
        key = f"{pair[0]}_{pair[1]}"
        try:
            window = dyn.auto_fit_window(trace, pair, t_max=cfg.dynamics.t_max)
            fit = dyn.fit_exponential(trace, pair, window, envelope=oscillating)
            lam = dyn.dominant_eigenvalue_for_pair(spec, contributions, k)
            fits[key] = {
                "amplitude": fit.amplitude,
                "rate": fit.rate,
                "window": list(fit.window),
                "residual_rms": fit.residual_rms,
                "envelope": fit.envelope,
                "dominant_eigenvalue": [lam.real, lam.imag],
                "error": "",
            }
        except ValueError as exc:
            fits[key] = {"error": str(exc)}
    payload = base_payload(cfg)
    payload["fits"] = fits
    payload["contributions"] = {
        "pairs": [list(p) for p in pairs],
        "eigenvalues": [
            [float(v.real), float(v.imag)]
            for v in spec.eigenvalues[: contributions.shape[0]]
        ],
        "magnitudes": [[float(x) for x in row] for row in contributions],
    }
    return payload, trace, contributions


def cmd_dynamics(cfg: RunConfig) -> int:
    payload, trace, _ = run_dynamics(cfg)
    out = Path(cfg.out_dir)
    pairs = list(trace.pairs)
    header = ["t"]
    for n, m in pairs:
        header += [f"re_{n}_{m}", f"im_{n}_{m}"]
    rows = []
    for k, t in enumerate(trace.times):
        row = [fmt(float(t))]
        for pair in pairs:
            v = trace.values[pair][k]
            row += [fmt(v.real), fmt(v.imag)]
        rows.append(row)
    write_csv(out / "dynamics.csv", header, rows)
    fit_payload = {k: v for k, v in payload.items() if k != "contributions"}
    write_json(out / "fits.json", fit_payload)
    write_json(
        out / "contributions.json",
        {
            "config": payload["config"],
            "config_hash": payload["config_hash"],
            "contributions": payload["contributions"],
        },
    )
    bad = [k for k, v in payload["fits"].items() if v.get("error")]
    print(
        f"dynamics: {len(pairs)} pairs, {len(trace.times)} samples"
        + (f", fit failures: {bad}" if bad else "")
        + f" -> {out/'dynamics.csv'}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- symmetry


def run_symmetry(cfg: RunConfig) -> dict:
    n = cfg.atom_count
    if not 2 <= n <= 5:
        raise ConfigError(f"symmetry tables cover 2 <= N <= 5, got {n}")
    payload = base_payload(cfg)
    payload["counts"] = {"strong_drive": count_strong_drive(n)}
    groups = {}
    for kind in GROUP_KINDS:
        group = build_group(kind, n)
        decomp = decompose_ladder(group)
        sectors = []
        for sec in decomp.sectors:
            sectors.append(
                {
                    "two_j": sec.j2,
                    "j": half_integer_str(sec.j2),
                    "irreps": [
                        {"name": name, "dim": dim, "multiplicity": mult}
                        for name, dim, mult in sec.entries
                    ],
                    "label": sec.label(),
                }
            )
        groups[kind] = {
            "order": group.order,
            "sectors": sectors,
            "stationary_count": count_stationary(decomp),
            "oscillation_frequency_count": count_oscillation_frequencies(decomp),
        }
    payload["groups"] = groups
    return payload


def symmetry_text(payload: dict) -> str:
    lines = []
    n = payload["config"]["atom_count"]
    lines.append(f"Ladder decompositions for N = {n}")
    lines.append(f"strong-drive count (fully symmetric): {payload['counts']['strong_drive']}")
    lines.append("")
    lines.append(f"{'j':>5s}  {'S_N':22s}{'D_N':22s}{'C_s':22s}")
    sector_count = len(payload["groups"]["S"]["sectors"])
    for i in range(sector_count):
        row = [f"{payload['groups']['S']['sectors'][i]['j']:>5s}  "]
        for kind in GROUP_KINDS:
            row.append(f"{payload['groups'][kind]['sectors'][i]['label']:22s}")
        lines.append("".join(row))
    lines.append("")
    lines.append(f"{'group':>6s}  {'stationary':>10s}  {'osc. freqs':>10s}")
    for kind in GROUP_KINDS:
        g = payload["groups"][kind]
        lines.append(
            f"{kind:>6s}  {g['stationary_count']:>10d}  {g['oscillation_frequency_count']:>10d}"
        )
    return "\n".join(lines) + "\n"


def cmd_symmetry(cfg: RunConfig) -> int:
    payload = run_symmetry(cfg)
    out = Path(cfg.out_dir)
    write_json(out / "symmetry.json", payload)
    text = symmetry_text(payload)
    atomic_write_text(out / "symmetry.txt", text)
    print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------- rates


def run_rates(cfg: RunConfig) -> dict:
    params = cfg.model_params()
    # The secular analysis targets the strong-drive limit where disorder is
    # decoupled, so the rate basis is built from the disorder-free part.
    sym_params = ModelParams(
        atom_count=cfg.atom_count,
        drive=cfg.drive,
        detunings=(0.0,) * cfg.atom_count,
        dd_strength=cfg.dd_strength,
        boundary=cfg.boundary,
    )
    h = hamiltonian(sym_params)
    _, _, _, jm = collective_ops(cfg.atom_count)
    group = group_for_boundary(cfg.boundary, cfg.atom_count)
    basis = rateq.symmetry_adapted_basis(cfg.atom_count, h, group=group)
    rate = rateq.build_rate_matrix(h, jm, basis=basis)
    null_dim = rateq.stationary_count(rate)
    conserve = rateq.conservation_defect(rate)
    table = rateq.predicted_frequency_table(basis)
    freqs = rateq.predicted_frequencies(basis, freq_tol=cfg.freq_dedup)

    spec = spectrum(build_liouvillian(params))
    report = classify_subradiant(spec, 0.2, freq_tol=cfg.freq_dedup)
    matches = []
    for f in freqs:
        best = min(
            (abs(f - obs) / f for obs in report.frequencies), default=float("nan")
        )
        matches.append({"predicted": f, "best_rel_err": best})

    payload = base_payload(cfg)
    payload.update(
        {
            "disorder_decoupled": True,
            "group": group.kind,
            "states": [
                {
                    "two_j": lab.j2,
                    "two_m": lab.m2,
                    "block": lab.block,
                    "irrep": lab.irrep,
                    "energy": lab.energy,
                }
                for lab in basis.labels
            ],
            "null_space_dim": null_dim,
            "conservation_defect": conserve,
            "conservation_ok": bool(conserve < 1e-10),
            "frequency_table": [
                {
                    "two_j": e.j2,
                    "irrep_a": e.irrep_a,
                    "irrep_b": e.irrep_b,
                    "frequency": e.frequency,
                }
                for e in table
            ],
            "predicted_frequencies": list(freqs),
            "block_pair_count": len(table),
            "liouvillian_frequencies": list(report.frequencies),
            "frequency_matches": matches,
        }
    )
    return payload


def cmd_rates(cfg: RunConfig) -> int:
    payload = run_rates(cfg)
    out = Path(cfg.out_dir)
    write_json(out / "rates.json", payload)
    status = "pass" if payload["conservation_ok"] else "FAIL"
    print(
        f"rates: null-space dim {payload['null_space_dim']}, "
        f"{payload['block_pair_count']} block pairs, "
        f"conservation {status} -> {out/'rates.json'}"
    )
    return EXIT_OK if payload["conservation_ok"] else EXIT_RUNTIME


# ---------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickespec",
        description="Liouvillian spectra and dark-state analysis of the "
        "driven disordered Dicke model",
    )
    parser.add_argument("--config", required=False, help="YAML run configuration")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--threads", type=int, help="worker pool size for sweeps")
    parser.add_argument("--seed", type=int, help="gaussian disorder seed override")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("spectrum", "full Liouvillian eigendecomposition"),
        ("sweep", "lambda_1 map over the (drive, broadening) grid"),
        ("dynamics", "correlation time traces and exponential fits"),
        ("symmetry", "irrep decompositions and counting identities"),
        ("rates", "secular rate-equation report"),
    ):
        sub.add_parser(name, help=doc)
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "dynamics": cmd_dynamics,
    "symmetry": cmd_symmetry,
    "rates": cmd_rates,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(
            cfg, out_dir=args.out, threads=args.threads, seed=args.seed
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
