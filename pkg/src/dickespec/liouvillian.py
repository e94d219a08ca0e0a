"""Dense Liouvillian assembly, non-Hermitian eigendecomposition, classification.

Density matrices are vectorized by column stacking, so left and right
multiplication become Kronecker products: vec(A rho B) = (B^T kron A) vec(rho).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from dickespec.operators import ModelParams, collective_ops, hamiltonian

VECTORIZATION = "column-stacking"

MAX_DENSE_ATOMS = 6


class DegenerateSteadyStateError(ValueError):
    """More than one eigenvalue indistinguishable from zero."""

    def __init__(self, eigenvalues):
        self.eigenvalues = np.asarray(eigenvalues)
        super().__init__(
            f"steady state is not unique: {self.eigenvalues.size} eigenvalues near zero "
            f"({self.eigenvalues})"
        )


class EigendecompositionWarning(UserWarning):
    """Residuals or biorthogonalization outside tolerance (possible Jordan block)."""


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray = field(repr=False)
    gamma: float
    convention: str = VECTORIZATION

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def hilbert_dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))


@dataclass(frozen=True)
class LiouvillianSpectrum:
    """Eigensystem sorted with the steady state first, then slowest decay."""

    eigenvalues: np.ndarray
    right: np.ndarray = field(repr=False)  # columns are vectorized eigenmatrices
    left: np.ndarray = field(repr=False)  # columns biorthonormal to right ones
    residuals: np.ndarray = field(repr=False)
    gamma: float
    steady_tol: float = 1e-9
    sort_order: str = "steady-first,ascending-neg-re,ascending-abs-im,im-sign"

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def steady_count(self) -> int:
        """Eigenvalues indistinguishable from zero; one for generic parameters."""
        return int(np.sum(np.abs(self.eigenvalues) < self.steady_tol * self.gamma))

    def eigenmatrix(self, i: int) -> np.ndarray:
        d = int(round(np.sqrt(self.dim)))
        return self.right[:, i].reshape((d, d), order="F")


def vectorize(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(vec.size)))
    return np.asarray(vec, dtype=complex).reshape((d, d), order="F")


def apply_liouvillian(params: ModelParams, rho: np.ndarray) -> np.ndarray:
    """Matrix-free action -i[H, rho] + (gamma/2)(2 J- rho J+ - {J+J-, rho})."""
    h = hamiltonian(params)
    _, _, _, jm = collective_ops(params.atom_count)
    jp = jm.conj().T
    jpjm = jp @ jm
    g = params.decay_rate
    return -1j * (h @ rho - rho @ h) + 0.5 * g * (
        2.0 * jm @ rho @ jp - rho @ jpjm - jpjm @ rho
    )


def build_liouvillian(params: ModelParams) -> Superoperator:
    """Assemble the dense 4^N x 4^N generator for the model parameters."""
    n = params.atom_count
    if n > MAX_DENSE_ATOMS:
        raise ValueError(f"dense Liouvillian limited to N <= {MAX_DENSE_ATOMS}, got {n}")
    h = hamiltonian(params)
    _, _, _, jm = collective_ops(n)
    jp = jm.conj().T
    jpjm = jp @ jm
    dim = 2**n
    eye = np.eye(dim, dtype=complex)
    g = params.decay_rate
    mat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    mat += 0.5 * g * (
        2.0 * np.kron(jp.T, jm) - np.kron(jpjm.T, eye) - np.kron(eye, jpjm)
    )
    return Superoperator(matrix=mat, gamma=g)


def spectrum(
    superop: Superoperator,
    *,
    residual_tol: float = 1e-8,
    steady_tol: float = 1e-9,
) -> LiouvillianSpectrum:
    """Full eigendecomposition with biorthonormal left/right eigenvectors.

    Residuals or a failed biorthogonalization beyond tolerance raise a
    warning rather than being silently accepted; both indicate a defective
    (Jordan-like) matrix for which the spectral propagation is unreliable.
    """
    mat = superop.matrix
    gamma = superop.gamma
    vals, right = scipy.linalg.eig(mat)

    norm = np.linalg.norm(mat, ord=2) if mat.shape[0] <= 64 else np.linalg.norm(mat)
    residuals = np.linalg.norm(mat @ right - right * vals[None, :], axis=0)
    bad = residuals > residual_tol * gamma * max(norm, gamma)
    if np.any(bad):
        warnings.warn(
            f"{int(np.sum(bad))} eigenpairs exceed the residual tolerance "
            f"(max residual {residuals.max():.3e}); possible Jordan structure",
            EigendecompositionWarning,
        )

    steady = np.abs(vals) < steady_tol * gamma

    order = sorted(
        range(vals.size),
        key=lambda i: (
            not steady[i],
            -vals[i].real,
            abs(vals[i].imag),
            np.sign(vals[i].imag),
        ),
    )
    vals = vals[order]
    right = right[:, order]
    residuals = residuals[order]

    try:
        left = np.linalg.inv(right).conj().T
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"eigenvector matrix is singular: {exc}") from exc
    bi = left.conj().T @ right
    bi_err = np.abs(bi - np.eye(vals.size)).max()
    if bi_err > 1e-6:
        warnings.warn(
            f"biorthogonalization error {bi_err:.3e}; eigenbasis is ill conditioned",
            EigendecompositionWarning,
        )
    return LiouvillianSpectrum(
        eigenvalues=vals,
        right=right,
        left=left,
        residuals=residuals,
        gamma=gamma,
        steady_tol=steady_tol,
    )


def steady_state(spec: LiouvillianSpectrum, *, psd_tol: float = 1e-8) -> np.ndarray:
    """Zero-eigenvalue eigenmatrix, Hermitized and normalized to unit trace.

    Raises DegenerateSteadyStateError when the zero eigenvalue is not simple,
    which happens at non-generic points such as zero drive with zero disorder
    or an exactly symmetric dipole chain.
    """
    if spec.steady_count != 1:
        near_zero = spec.eigenvalues[
            np.abs(spec.eigenvalues) < spec.steady_tol * spec.gamma
        ]
        raise DegenerateSteadyStateError(near_zero)
    rho = spec.eigenmatrix(0)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise ValueError("steady-state candidate has vanishing trace")
    rho = rho / tr
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -psd_tol:
        warnings.warn(
            f"steady state has negative eigenvalue {evals.min():.3e}",
            EigendecompositionWarning,
        )
    return rho


@dataclass(frozen=True)
class SubradiantReport:
    """Near-zero cluster of the spectrum at a given decay threshold."""

    threshold: float
    lambda_1: complex
    count_with_steady: int
    count_without_steady: int
    frequencies: tuple[float, ...]
    cluster: np.ndarray = field(repr=False)

    @property
    def frequency_count(self) -> int:
        return len(self.frequencies)


def dedupe_frequencies(values, tol: float) -> tuple[float, ...]:
    """Collapse near-identical magnitudes; values below tol do not count."""
    out: list[float] = []
    for v in sorted(abs(float(x)) for x in values):
        if v <= tol:
            continue
        if not out or v - out[-1] > tol:
            out.append(v)
    return tuple(out)


def classify_subradiant(
    spec: LiouvillianSpectrum,
    threshold: float = 0.05,
    *,
    freq_tol: float = 1e-6,
) -> SubradiantReport:
    """Slowest nonzero eigenvalue plus the census of the near-zero cluster.

    ``threshold`` is a fraction of gamma; an eigenvalue belongs to the
    cluster when -Re(lambda) < threshold * gamma.  Distinct oscillation
    frequencies are the |Im| values in the cluster, merged within
    ``freq_tol * gamma``.
    """
    gamma = spec.gamma
    vals = spec.eigenvalues
    lam1 = vals[1] if vals.size > 1 else vals[0]
    mask = -vals.real < threshold * gamma
    cluster = vals[mask]
    n_total = int(np.sum(mask))
    n_steady = int(np.sum(np.abs(cluster) < spec.steady_tol * gamma))
    freqs = dedupe_frequencies(cluster.imag / gamma, freq_tol)
    return SubradiantReport(
        threshold=threshold,
        lambda_1=complex(lam1),
        count_with_steady=n_total,
        count_without_steady=n_total - n_steady,
        frequencies=tuple(f * gamma for f in freqs),
        cluster=cluster,
    )


def decompose_initial(spec: LiouvillianSpectrum, rho0: np.ndarray) -> np.ndarray:
    """Coefficients c_i = <left_i, vec(rho0)> of the spectral expansion."""
    coeffs = spec.left.conj().T @ vectorize(rho0)
    recon = spec.right @ coeffs
    err = np.linalg.norm(recon - vectorize(rho0))
    if err > 1e-8 * max(1.0, np.linalg.norm(rho0)):
        warnings.warn(
            f"spectral reconstruction error {err:.3e}; decomposition ill conditioned",
            EigendecompositionWarning,
        )
    return coeffs
