"""Time propagation, two-point correlations, and exponential decay fits."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from dickespec.liouvillian import (
    LiouvillianSpectrum,
    Superoperator,
    decompose_initial,
    unvectorize,
    vectorize,
)
from dickespec.operators import single_atom_op


def ground_state(atom_count: int) -> np.ndarray:
    """Density matrix with every atom in its ground state."""
    dim = 2**atom_count
    rho = np.zeros((dim, dim), dtype=complex)
    rho[dim - 1, dim - 1] = 1.0
    return rho


def pair_operator(n: int, m: int, atom_count: int) -> np.ndarray:
    """sigma_n^+ sigma_m^- with 1-based atom labels."""
    return single_atom_op(n, "raise", atom_count) @ single_atom_op(m, "lower", atom_count)


def propagate_spectral(
    spec: LiouvillianSpectrum, rho0: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """rho(t) for each requested time via the eigenmode expansion.

    Returns an array of shape (len(times), d, d).
    """
    times = np.asarray(times, dtype=float)
    coeffs = decompose_initial(spec, rho0)
    phases = np.exp(np.outer(times, spec.eigenvalues))  # (T, modes)
    flat = (phases * coeffs[None, :]) @ spec.right.T  # rows are vec(rho(t))
    d = rho0.shape[0]
    # column-stacked rows unfold to (d, d) via a transpose
    return flat.reshape(len(times), d, d).transpose(0, 2, 1)


def propagate_ode(
    superop: Superoperator,
    rho0: np.ndarray,
    times: np.ndarray,
    *,
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> np.ndarray:
    """Direct adaptive integration of the vectorized master equation."""
    times = np.asarray(times, dtype=float)
    mat = superop.matrix
    y0 = vectorize(rho0)
    t0 = float(times[0]) if times[0] < 0 else 0.0

    def rhs(_t, y):
        return mat @ y

    sol = solve_ivp(
        rhs,
        (min(t0, times[0]), float(times[-1])),
        y0,
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"integrator failed: {sol.message}")
    return np.stack([unvectorize(sol.y[:, k]) for k in range(sol.y.shape[1])])


@dataclass(frozen=True)
class TimeTrace:
    """Correlation series <sigma_n^+ sigma_m^->(t) for a set of atom pairs."""

    times: np.ndarray
    values: dict[tuple[int, int], np.ndarray] = field(repr=False)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.values.keys())


def correlations(
    trajectory: np.ndarray,
    times: np.ndarray,
    pairs: list[tuple[int, int]],
    atom_count: int,
) -> TimeTrace:
    """Evaluate <sigma_n^+ sigma_m^-> along a density-matrix trajectory."""
    values: dict[tuple[int, int], np.ndarray] = {}
    for n, m in pairs:
        op = pair_operator(n, m, atom_count)
        values[(n, m)] = np.einsum("ij,tji->t", op, trajectory)
    return TimeTrace(times=np.asarray(times, dtype=float), values=values)


def spectral_correlations(
    spec: LiouvillianSpectrum,
    rho0: np.ndarray,
    times: np.ndarray,
    pairs: list[tuple[int, int]],
    atom_count: int,
) -> TimeTrace:
    """Mode-summed correlations; avoids materializing rho(t) at every time."""
    times = np.asarray(times, dtype=float)
    coeffs = decompose_initial(spec, rho0)
    phases = np.exp(np.outer(times, spec.eigenvalues))  # (T, modes)
    values: dict[tuple[int, int], np.ndarray] = {}
    for n, m in pairs:
        op = pair_operator(n, m, atom_count)
        # trace(op rho_i) for every eigenmode, as a row over modes
        weights = vectorize(op.T) @ spec.right
        values[(n, m)] = phases @ (coeffs * weights)
    return TimeTrace(times=times, values=values)


@dataclass(frozen=True)
class ExpFit:
    """Least-squares fit of |value| ~ amplitude * exp(-rate * t)."""

    amplitude: float
    rate: float
    window: tuple[float, float]
    residual_rms: float
    envelope: bool = False


def fit_exponential(
    trace: TimeTrace,
    pair: tuple[int, int],
    window: tuple[float, float],
    *,
    envelope: bool = False,
    min_samples: int = 10,
) -> ExpFit:
    """Linear fit of log|value| against time over the requested window.

    With ``envelope=True`` the fit runs through the local maxima of |value|
    only, which tames oscillating traces.
    """
    t_lo, t_hi = window
    mask = (trace.times >= t_lo) & (trace.times <= t_hi)
    t = trace.times[mask]
    y = np.abs(trace.values[pair][mask])
    if envelope:
        keep = _local_maxima(y)
        t, y = t[keep], y[keep]
    if t.size < min_samples:
        raise ValueError(
            f"window {window} holds {t.size} samples for pair {pair}; need {min_samples}"
        )
    if np.any(y <= 0.0):
        raise ValueError(f"non-positive magnitudes in window for pair {pair}")
    slope, intercept = np.polyfit(t, np.log(y), 1)
    resid = np.log(y) - (slope * t + intercept)
    return ExpFit(
        amplitude=float(np.exp(intercept)),
        rate=float(-slope),
        window=(float(t_lo), float(t_hi)),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        envelope=envelope,
    )


def _local_maxima(y: np.ndarray) -> np.ndarray:
    if y.size < 3:
        return np.arange(y.size)
    interior = np.where((y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1
    idx = np.concatenate(([0], interior, [y.size - 1]))
    return np.unique(idx)


def auto_fit_window(
    trace: TimeTrace,
    pair: tuple[int, int],
    *,
    t_min: float = 5.0,
    t_max: float | None = None,
    efolds: float = 2.5,
) -> tuple[float, float]:
    """Window that skips the transient and stops after a few decay e-folds.

    The window closes once |value| has dropped by exp(-efolds) relative to
    its magnitude at ``t_min``: past that point slower background modes take
    over and would flatten the fitted slope.
    """
    if t_max is None:
        t_max = float(trace.times[-1])
    mags = np.abs(trace.values[pair])
    i0 = int(np.searchsorted(trace.times, t_min))
    if i0 >= mags.size:
        raise ValueError(f"t_min={t_min} is beyond the trace for pair {pair}")
    floor = mags[i0] * np.exp(-efolds)
    below = np.where((trace.times > 1.5 * t_min) & (mags < floor))[0]
    t_hi = float(trace.times[below[0]]) if below.size else t_max
    return (t_min, min(t_hi, t_max))


def eigenvector_observables(
    spec: LiouvillianSpectrum,
    pairs: list[tuple[int, int]],
    atom_count: int,
    *,
    count: int = 14,
) -> np.ndarray:
    """|<sigma_n^+ sigma_m^->| evaluated on the leading eigenmatrices.

    Rows follow the spectrum ordering (steady state first).  Traceless
    eigenmatrices are Frobenius normalized; near-zero eigenvalues are
    normalized to unit trace instead so that the steady column reports the
    actual steady-state correlations.
    """
    k = min(count, spec.dim)
    out = np.zeros((k, len(pairs)))
    ops = [pair_operator(n, m, atom_count) for n, m in pairs]
    for i in range(k):
        rho = spec.eigenmatrix(i)
        if abs(spec.eigenvalues[i]) < spec.steady_tol * spec.gamma:
            rho = 0.5 * (rho + rho.conj().T)
            tr = np.trace(rho).real
            if abs(tr) > 1e-12:
                rho = rho / tr
        else:
            rho = rho / np.linalg.norm(rho)
        for col, op in enumerate(ops):
            out[i, col] = abs(np.trace(op @ rho))
    return out


def dominant_eigenvalue_for_pair(
    spec: LiouvillianSpectrum,
    contributions: np.ndarray,
    pair_index: int,
    *,
    rel_cut: float = 0.1,
) -> complex:
    """Smallest-|Re| nonzero eigenvalue contributing appreciably to a pair.

    An eigenvector counts as contributing when its entry clears ``rel_cut``
    of both the pair's largest contribution and the eigenvector's own
    largest contribution; either condition alone admits borderline modes
    whose weight on the pair is marginal.
    """
    col = contributions[:, pair_index]
    col_cut = rel_cut * col.max()
    best = None
    for i in range(1, contributions.shape[0]):
        row_cut = rel_cut * contributions[i, :].max()
        if col[i] > col_cut and col[i] > row_cut:
            lam = spec.eigenvalues[i]
            if abs(lam) < spec.steady_tol * spec.gamma:
                continue
            if best is None or abs(lam.real) < abs(best.real):
                best = lam
    if best is None:
        warnings.warn("no contributing eigenvalue above the relative cut")
        best = spec.eigenvalues[1]
    return complex(best)
