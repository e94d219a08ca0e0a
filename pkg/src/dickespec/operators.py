"""Spin operators, Hamiltonians, and collective angular-momentum bases.

All operators are dense complex matrices on the 2^N product space.  The
tensor-product basis puts atom 1 in the most significant slot and orders
each atom's states as (excited, ground), so basis index
``b = sum_n bit_n * 2^(N-n)`` with ``bit_n = 0`` for an excited atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    "lower": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex),
    "raise": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
}

BOUNDARIES = ("none", "periodic", "open")


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of the driven disordered ensemble.

    All rates are in units of the collective decay rate unless a different
    ``decay_rate`` is supplied.  ``boundary`` must be "none" exactly when
    ``dd_strength`` vanishes: a dipole-dipole term only makes sense once a
    chain geometry is declared.
    """

    atom_count: int
    decay_rate: float = 1.0
    drive: float = 0.0
    detunings: tuple[float, ...] = ()
    dd_strength: float = 0.0
    boundary: str = "none"

    def __post_init__(self):
        n = self.atom_count
        if n < 1:
            raise ValueError(f"atom_count must be >= 1, got {n}")
        if self.decay_rate <= 0:
            raise ValueError(f"decay_rate must be positive, got {self.decay_rate}")
        if self.drive < 0:
            raise ValueError(f"drive must be non-negative, got {self.drive}")
        dets = tuple(float(w) for w in self.detunings)
        if not dets:
            dets = (0.0,) * n
        if len(dets) != n:
            raise ValueError(f"expected {n} detunings, got {len(dets)}")
        object.__setattr__(self, "detunings", dets)
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if (self.boundary == "none") != (self.dd_strength == 0.0):
            raise ValueError(
                "boundary='none' requires dd_strength=0 and vice versa; "
                f"got boundary={self.boundary!r}, dd_strength={self.dd_strength}"
            )
        if self.boundary != "none" and n < 2:
            raise ValueError("a dipole-dipole geometry needs at least 2 atoms")

    @property
    def dim(self) -> int:
        return 2**self.atom_count


def single_atom_op(n: int, kind: str, atom_count: int) -> np.ndarray:
    """Embed a single-atom Pauli-type operator at slot ``n`` (1-based)."""
    if not 1 <= n <= atom_count:
        raise IndexError(f"atom index {n} out of range 1..{atom_count}")
    if kind not in PAULI:
        raise ValueError(f"unknown operator kind {kind!r}")
    op = np.eye(1, dtype=complex)
    for slot in range(1, atom_count + 1):
        op = np.kron(op, PAULI[kind] if slot == n else np.eye(2, dtype=complex))
    return op


def collective_ops(atom_count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (Jx, Jy, Jz, Jminus) built from sums of single-atom operators."""
    dim = 2**atom_count
    jx = np.zeros((dim, dim), dtype=complex)
    jy = np.zeros((dim, dim), dtype=complex)
    jz = np.zeros((dim, dim), dtype=complex)
    jminus = np.zeros((dim, dim), dtype=complex)
    for n in range(1, atom_count + 1):
        jx += 0.5 * single_atom_op(n, "x", atom_count)
        jy += 0.5 * single_atom_op(n, "y", atom_count)
        jz += 0.5 * single_atom_op(n, "z", atom_count)
        jminus += single_atom_op(n, "lower", atom_count)
    return jx, jy, jz, jminus


def j_squared(atom_count: int) -> np.ndarray:
    jx, jy, jz, _ = collective_ops(atom_count)
    return jx @ jx + jy @ jy + jz @ jz


def equidistant_detunings(atom_count: int, half_width: float) -> tuple[float, ...]:
    """Detunings spaced evenly over [-half_width, half_width], endpoints included."""
    n = atom_count
    if n == 1:
        return (0.0,)
    return tuple(-half_width + 2.0 * half_width * k / (n - 1) for k in range(n))


def dipole_bonds(atom_count: int, boundary: str) -> list[tuple[int, int]]:
    """Nearest-neighbour bonds (1-based) for the declared chain geometry."""
    bonds = [(n, n + 1) for n in range(1, atom_count)]
    if boundary == "periodic" and atom_count > 2:
        bonds.append((atom_count, 1))
    return bonds


def hamiltonian(params: ModelParams) -> np.ndarray:
    """Coherent part: drive along x, local detunings, optional dipole hopping."""
    n = params.atom_count
    jx, _, _, _ = collective_ops(n)
    h = 2.0 * params.drive * jx
    for atom, omega in enumerate(params.detunings, start=1):
        if omega != 0.0:
            h = h + omega * single_atom_op(atom, "z", n)
    if params.boundary != "none":
        for a, b in dipole_bonds(n, params.boundary):
            hop = single_atom_op(a, "raise", n) @ single_atom_op(b, "lower", n)
            h = h + params.dd_strength * (hop + hop.conj().T)
    return h


def degeneracy_dj(atom_count: int, j2: int) -> int:
    """Multiplicity of the spin-j ladder; ``j2`` is twice the spin value.

    Equals N!(2j+1) / ((N/2+j+1)! (N/2-j)!), evaluated in exact integers.
    """
    n = atom_count
    if j2 < 0 or j2 > n or (n - j2) % 2 != 0:
        raise ValueError(f"invalid spin 2j={j2} for {n} atoms")
    a = (n + j2) // 2 + 1  # N/2 + j + 1
    b = (n - j2) // 2  # N/2 - j
    return math.factorial(n) * (j2 + 1) // (math.factorial(a) * math.factorial(b))


def spin_sectors(atom_count: int) -> list[int]:
    """Allowed 2j values, largest first."""
    return list(range(atom_count, -1, -2))


@dataclass(frozen=True)
class DickeState:
    """One |j, m, nu> vector; j and m are stored as doubled integers."""

    j2: int
    m2: int
    nu: int
    vector: np.ndarray = field(repr=False)

    @property
    def j(self) -> Fraction:
        return Fraction(self.j2, 2)

    @property
    def m(self) -> Fraction:
        return Fraction(self.m2, 2)


@dataclass(frozen=True)
class DickeBasis:
    axis: str
    atom_count: int
    states: tuple[DickeState, ...]

    def highest_weight(self, j2: int) -> list[DickeState]:
        return [s for s in self.states if s.j2 == j2 and s.m2 == j2]

    def ladder(self, j2: int, nu: int) -> list[DickeState]:
        """States of one (j, nu) ladder, ordered from m = j down to m = -j."""
        out = [s for s in self.states if s.j2 == j2 and s.nu == nu]
        return sorted(out, key=lambda s: -s.m2)

    def matrix(self) -> np.ndarray:
        """All basis vectors as columns, in the stored state order."""
        return np.column_stack([s.vector for s in self.states])


def _ladder_ops(atom_count: int, axis: str) -> tuple[np.ndarray, np.ndarray]:
    """(J'_z, J'_-) for quantization along the requested axis."""
    jx, jy, jz, _ = collective_ops(atom_count)
    if axis == "z":
        return jz, jx - 1j * jy
    if axis == "x":
        # Cyclic frame x->z, y->x, z->y keeps the ladder algebra intact.
        return jx, jy - 1j * jz
    raise ValueError(f"axis must be 'z' or 'x', got {axis!r}")


def dicke_basis(atom_count: int, axis: str = "z") -> DickeBasis:
    """Complete orthonormal |j, m, nu> basis quantized along ``axis``.

    The multiplicity label is fixed deterministically: the highest-weight
    space of each j is filled by Gram-Schmidt against product-basis vectors
    taken in index order, and lower m states are generated by the lowering
    operator, so every (j, nu) ladder carries the standard phase convention.
    """
    if atom_count > 8:
        raise ValueError("dense Dicke basis construction is limited to N <= 8")
    dim = 2**atom_count
    jsq = j_squared(atom_count)
    jz_like, lower = _ladder_ops(atom_count, axis)

    evals, evecs = np.linalg.eigh(jsq)
    states: list[DickeState] = []
    for j2 in spin_sectors(atom_count):
        j = j2 / 2.0
        target = j * (j + 1.0)
        cols = np.where(np.abs(evals - target) < 0.25)[0]
        d_j = degeneracy_dj(atom_count, j2)
        if cols.size != (j2 + 1) * d_j:
            raise RuntimeError(
                f"spin-{j} sector has dimension {cols.size}, expected {(j2 + 1) * d_j}"
            )
        block = evecs[:, cols]
        # Highest-weight subspace: eigenvalue m = j of the axis projection.
        proj = block.conj().T @ jz_like @ block
        mvals, mvecs = np.linalg.eigh(proj)
        top = np.where(np.abs(mvals - j) < 0.25)[0]
        if top.size != d_j:
            raise RuntimeError(f"highest-weight space of spin {j} has size {top.size}")
        hw = block @ mvecs[:, top]
        hw_proj = hw @ hw.conj().T

        chosen: list[np.ndarray] = []
        for seed in range(dim):
            if len(chosen) == d_j:
                break
            cand = hw_proj[:, seed].copy()
            for prev in chosen:
                cand -= prev * (prev.conj() @ cand)
            norm = np.linalg.norm(cand)
            if norm > 1e-6:
                chosen.append(cand / norm)
        if len(chosen) != d_j:
            raise RuntimeError(f"could not seed {d_j} multiplicity vectors for spin {j}")

        for nu, vec in enumerate(chosen, start=1):
            cur = vec
            m2 = j2
            states.append(DickeState(j2=j2, m2=m2, nu=nu, vector=cur))
            while m2 > -j2:
                m = m2 / 2.0
                cur = (lower @ cur) / math.sqrt(j * (j + 1.0) - m * (m - 1.0))
                m2 -= 2
                states.append(DickeState(j2=j2, m2=m2, nu=nu, vector=cur))
    return DickeBasis(axis=axis, atom_count=atom_count, states=tuple(states))


def dark_mixture(basis: DickeBasis, j2: int, nu: int, nu_prime: int) -> np.ndarray:
    """Uniform mixture over one j ladder, coherently linking labels nu, nu'.

    Requires an x-quantized basis; the result commutes with Jx and has
    trace 1 for nu == nu' and trace 0 otherwise.
    """
    if basis.axis != "x":
        raise ValueError("dark mixtures are defined on the x-quantized basis")
    d_j = degeneracy_dj(basis.atom_count, j2)
    if not (1 <= nu <= d_j and 1 <= nu_prime <= d_j):
        raise ValueError(f"multiplicity labels must lie in 1..{d_j}")
    kets = basis.ladder(j2, nu)
    bras = basis.ladder(j2, nu_prime)
    dim = 2**basis.atom_count
    rho = np.zeros((dim, dim), dtype=complex)
    for ket, bra in zip(kets, bras):
        rho += np.outer(ket.vector, bra.vector.conj())
    return rho / (j2 + 1)
