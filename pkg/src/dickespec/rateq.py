"""Secular rate equation in a symmetry-adapted eigenbasis of the Hamiltonian.

Populations of Hamiltonian eigenstates obey
``c'_a = gamma * (sum_b |<a|J-|b>|^2 c_b - c_a <a|J+J-|a>)``;
its null space counts the stationary population patterns, and energy
differences between irrep blocks of the same collective-spin sector predict
the oscillation frequencies of the long-living coherences.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from dickespec.liouvillian import dedupe_frequencies
from dickespec.operators import dicke_basis, spin_sectors
from dickespec.symmetry import PermGroup, permutation_operator


class RateDegeneracyError(ValueError):
    """Degenerate Hamiltonian eigenspaces that were not symmetry-resolved."""

    def __init__(self, clusters):
        self.clusters = clusters
        detail = ", ".join(f"E={e:.6g} (dim {d})" for e, d in clusters)
        super().__init__(
            f"degenerate eigenspaces need a symmetry-adapted basis: {detail}"
        )


@dataclass(frozen=True)
class StateLabel:
    """Labels of one basis state: spin sector, projection, block, irrep."""

    j2: int
    m2: int
    block: int
    irrep: str | None
    energy: float


@dataclass(frozen=True)
class LabeledBasis:
    """Orthonormal basis (columns) with per-state sector/block labels."""

    vectors: np.ndarray = field(repr=False)
    labels: tuple[StateLabel, ...]
    atom_count: int

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class RateMatrix:
    matrix: np.ndarray = field(repr=False)
    energies: np.ndarray
    basis: LabeledBasis | None
    gamma: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _block_slices(values: np.ndarray, tol: float) -> list[slice]:
    """Contiguous groups of near-equal sorted values."""
    edges = [0]
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            edges.append(i)
    edges.append(values.size)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _identify_irrep(
    group: PermGroup, hw_vectors: np.ndarray, block: np.ndarray
) -> str | None:
    """Match a multiplicity-space block to an irrep by its character."""
    chars = {}
    for cname in group.class_names:
        rep = group.classes[cname][0]
        pg = permutation_operator(rep.perm)
        act = hw_vectors.conj().T @ pg @ hw_vectors
        chars[cname] = complex(np.trace(block.conj().T @ act @ block))
    sizes = group.class_sizes()
    for irrep in group.irrep_names:
        acc = sum(
            sizes[c] * np.conj(group.characters[irrep][c]) * chars[c]
            for c in group.class_names
        ) / group.order
        if abs(acc - 1.0) < 1e-6:
            return irrep
    return None


def symmetry_adapted_basis(
    atom_count: int,
    hamiltonian_matrix: np.ndarray,
    *,
    axis: str = "x",
    group: PermGroup | None = None,
    block_tol: float = 1e-8,
) -> LabeledBasis:
    """Collective-spin ladder basis rotated to diagonalize the perturbation.

    Starting from the |j, m, nu> ladders quantized along ``axis``, each spin
    sector's multiplicity space is rotated by the eigenvectors of the
    ladder-averaged Hamiltonian block, one common rotation for every m, so
    the ladder alignment survives.  Degenerate eigenvalues of that block
    form irrep blocks, labelled through character projection when a group
    is supplied.
    """
    basis = dicke_basis(atom_count, axis)
    h = hamiltonian_matrix
    columns: list[np.ndarray] = []
    labels: list[StateLabel] = []
    for j2 in spin_sectors(atom_count):
        hw = basis.highest_weight(j2)
        d_j = len(hw)
        ladders = [basis.ladder(j2, nu) for nu in range(1, d_j + 1)]
        n_m = j2 + 1
        # ladder-averaged multiplicity block; the drive part averages out
        avg = np.zeros((d_j, d_j), dtype=complex)
        per_m = []
        for k in range(n_m):
            vecs = np.column_stack([ladders[nu][k].vector for nu in range(d_j)])
            per_m.append(vecs)
            avg += vecs.conj().T @ h @ vecs
        avg /= n_m
        avg = 0.5 * (avg + avg.conj().T)
        evals, rot = np.linalg.eigh(avg)
        tol = block_tol * max(1.0, float(np.abs(evals).max(initial=0.0)))
        slices = _block_slices(evals, tol)

        hw_mat = np.column_stack([s.vector for s in hw])
        block_irreps: list[str | None] = []
        for sl in slices:
            if group is not None:
                block_irreps.append(_identify_irrep(group, hw_mat, rot[:, sl]))
            else:
                block_irreps.append(None)

        for k in range(n_m):
            m2 = j2 - 2 * k
            rotated = per_m[k] @ rot
            for b, sl in enumerate(slices):
                for col in range(sl.start, sl.stop):
                    vec = rotated[:, col]
                    energy = float(np.real(vec.conj() @ h @ vec))
                    columns.append(vec)
                    labels.append(
                        StateLabel(
                            j2=j2,
                            m2=m2,
                            block=b,
                            irrep=block_irreps[b],
                            energy=energy,
                        )
                    )
    return LabeledBasis(
        vectors=np.column_stack(columns), labels=tuple(labels), atom_count=atom_count
    )


def build_rate_matrix(
    hamiltonian_matrix: np.ndarray,
    j_minus: np.ndarray,
    *,
    basis: LabeledBasis | None = None,
    gamma: float = 1.0,
    degeneracy_tol: float = 1e-8,
) -> RateMatrix:
    """Assemble the population rate matrix in an eigenbasis of H.

    Without an explicit basis the Hamiltonian must be non-degenerate at
    ``degeneracy_tol``; degenerate eigenspaces are ambiguous for the
    diagonal ansatz and are reported rather than resolved arbitrarily.
    Use :func:`symmetry_adapted_basis` for the driven collective model.
    """
    h = np.asarray(hamiltonian_matrix, dtype=complex)
    if np.abs(h - h.conj().T).max() > 1e-10 * max(1.0, np.abs(h).max()):
        raise ValueError("Hamiltonian must be Hermitian")
    if basis is None:
        evals, vecs = np.linalg.eigh(h)
        scale = max(1.0, float(np.abs(evals).max()))
        clusters = _block_slices(evals, degeneracy_tol * scale)
        bad = [
            (float(np.mean(evals[sl])), sl.stop - sl.start)
            for sl in clusters
            if sl.stop - sl.start > 1
        ]
        if bad:
            raise RateDegeneracyError(bad)
        energies = evals
        u = vecs
        labeled = None
    else:
        u = basis.vectors
        energies = np.array([lab.energy for lab in basis.labels])
        labeled = basis
    jm = u.conj().T @ j_minus @ u
    jpjm = u.conj().T @ (j_minus.conj().T @ j_minus) @ u
    rates = gamma * np.abs(jm) ** 2
    rates -= np.diag(gamma * np.real(np.diag(jpjm)))
    return RateMatrix(matrix=rates, energies=np.real(energies), basis=labeled, gamma=gamma)


def stationary_count(rate: RateMatrix, *, tol: float = 1e-9) -> int:
    """Dimension of the null space of R at threshold tol * ||R||."""
    svals = np.linalg.svd(rate.matrix, compute_uv=False)
    if svals.size == 0:
        return 0
    cut = tol * svals[0]
    count = int(np.sum(svals < cut))
    near = np.sum((svals >= cut) & (svals < 10 * cut))
    if near:
        warnings.warn(
            f"{near} singular values within a decade of the null-space cut {cut:.3e}"
        )
    return count


def conservation_defect(rate: RateMatrix) -> float:
    """Largest column-sum magnitude; zero when probability is conserved."""
    return float(np.abs(rate.matrix.sum(axis=0)).max())


@dataclass(frozen=True)
class FrequencyEntry:
    """One coherence between two irrep blocks of the same spin sector."""

    j2: int
    irrep_a: str | None
    irrep_b: str | None
    frequency: float


def predicted_frequency_table(basis: LabeledBasis) -> tuple[FrequencyEntry, ...]:
    """One entry per pair of irrep blocks within each spin sector.

    A coherence between two blocks mixes all m levels uniformly, so its
    frequency is the difference of the blocks' ladder-averaged energies.
    The number of entries is the block-pair count sum_j C(n_j, 2); distinct
    block pairs can share a frequency at this order of approximation.
    """
    sums: dict[tuple[int, int], list[float]] = {}
    irreps: dict[tuple[int, int], str | None] = {}
    for lab in basis.labels:
        sums.setdefault((lab.j2, lab.block), []).append(lab.energy)
        irreps[(lab.j2, lab.block)] = lab.irrep
    by_sector: dict[int, list[tuple[int, float]]] = {}
    for (j2, block), energies in sorted(sums.items()):
        by_sector.setdefault(j2, []).append((block, float(np.mean(energies))))
    entries = []
    for j2, blocks in by_sector.items():
        for a in range(len(blocks)):
            for b in range(a + 1, len(blocks)):
                ba, ea = blocks[a]
                bb, eb = blocks[b]
                entries.append(
                    FrequencyEntry(
                        j2=j2,
                        irrep_a=irreps[(j2, ba)],
                        irrep_b=irreps[(j2, bb)],
                        frequency=abs(ea - eb),
                    )
                )
    return tuple(entries)


def predicted_frequencies(
    basis: LabeledBasis,
    *,
    freq_tol: float = 1e-6,
    gamma: float = 1.0,
) -> tuple[float, ...]:
    """Distinct oscillation frequencies, deduplicated within freq_tol * gamma."""
    table = predicted_frequency_table(basis)
    return dedupe_frequencies([e.frequency for e in table], freq_tol * gamma)
