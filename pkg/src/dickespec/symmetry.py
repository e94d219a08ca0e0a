"""Atom-permutation symmetry groups and their action on the spin ladders.

Covers the full permutation group of the ensemble, the dihedral group of a
ring of atoms, and the mirror group of an open chain.  Character tables for
the supported sizes (N <= 5) are hard coded with conventional Mulliken-style
irrep names; multiplicities are obtained by character projection onto the
highest-weight subspace of each collective-spin sector.

Group elements are kept abstract because the dihedral group of two atoms
acts non-faithfully: the shift and the mirror are the same transposition,
yet the group itself has four elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from dickespec.operators import DickeBasis, degeneracy_dj, dicke_basis, spin_sectors

GROUP_KINDS = ("S", "D", "Cs")

_PHI_A = 2.0 * math.cos(2.0 * math.pi / 5.0)  # golden-ratio pair for pentagon classes
_PHI_B = 2.0 * math.cos(4.0 * math.pi / 5.0)


@dataclass(frozen=True)
class GroupElement:
    """Abstract element with its realization as an atom permutation.

    ``perm`` maps 0-based atom slots: element g sends atom i to perm[i].
    ``key`` distinguishes abstract elements with identical permutations.
    """

    key: tuple
    perm: tuple[int, ...]


@dataclass(frozen=True)
class PermGroup:
    kind: str
    atom_count: int
    elements: tuple[GroupElement, ...]
    class_names: tuple[str, ...]
    classes: dict[str, tuple[GroupElement, ...]] = field(repr=False)
    characters: dict[str, dict[str, float]] = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def irrep_names(self) -> tuple[str, ...]:
        return tuple(self.characters.keys())

    def irrep_dim(self, irrep: str) -> int:
        return int(round(self.characters[irrep][self.class_names[0]]))

    def class_sizes(self) -> dict[str, int]:
        return {name: len(members) for name, members in self.classes.items()}


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """(p o q)(i) = p(q(i))."""
    return tuple(p[q[i]] for i in range(len(p)))


def _mirror(n: int) -> tuple[int, ...]:
    return tuple(n - 1 - i for i in range(n))


def _shift(n: int, k: int) -> tuple[int, ...]:
    return tuple((i + k) % n for i in range(n))


def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


# Character tables over cycle-type classes, largest cycles first in the name.
_SN_TABLES = {
    2: {
        "classes": {"E": (1, 1), "C2": (2,)},
        "chars": {
            "A": {"E": 1, "C2": 1},
            "B_1": {"E": 1, "C2": -1},
        },
    },
    3: {
        "classes": {"E": (1, 1, 1), "3C2": (2, 1), "2C3": (3,)},
        "chars": {
            "A_1": {"E": 1, "3C2": 1, "2C3": 1},
            "A_2": {"E": 1, "3C2": -1, "2C3": 1},
            "E": {"E": 2, "3C2": 0, "2C3": -1},
        },
    },
    4: {
        "classes": {
            "E": (1, 1, 1, 1),
            "6C2": (2, 1, 1),
            "3C2'": (2, 2),
            "8C3": (3, 1),
            "6C4": (4,),
        },
        "chars": {
            "A_1": {"E": 1, "6C2": 1, "3C2'": 1, "8C3": 1, "6C4": 1},
            "A_2": {"E": 1, "6C2": -1, "3C2'": 1, "8C3": 1, "6C4": -1},
            "E": {"E": 2, "6C2": 0, "3C2'": 2, "8C3": -1, "6C4": 0},
            "T_1": {"E": 3, "6C2": 1, "3C2'": -1, "8C3": 0, "6C4": -1},
            "T_2": {"E": 3, "6C2": -1, "3C2'": -1, "8C3": 0, "6C4": 1},
        },
    },
    5: {
        "classes": {
            "E": (1, 1, 1, 1, 1),
            "10C2": (2, 1, 1, 1),
            "15C2'": (2, 2, 1),
            "20C3": (3, 1, 1),
            "20C6": (3, 2),
            "30C4": (4, 1),
            "24C5": (5,),
        },
        "chars": {
            "A": {"E": 1, "10C2": 1, "15C2'": 1, "20C3": 1, "20C6": 1, "30C4": 1, "24C5": 1},
            "B": {"E": 1, "10C2": -1, "15C2'": 1, "20C3": 1, "20C6": -1, "30C4": -1, "24C5": 1},
            "T": {"E": 4, "10C2": 2, "15C2'": 0, "20C3": 1, "20C6": -1, "30C4": 0, "24C5": -1},
            "T'": {"E": 4, "10C2": -2, "15C2'": 0, "20C3": 1, "20C6": 1, "30C4": 0, "24C5": -1},
            "H": {"E": 5, "10C2": 1, "15C2'": 1, "20C3": -1, "20C6": 1, "30C4": -1, "24C5": 0},
            "H'": {"E": 5, "10C2": -1, "15C2'": 1, "20C3": -1, "20C6": -1, "30C4": 1, "24C5": 0},
            "I": {"E": 6, "10C2": 0, "15C2'": -2, "20C3": 0, "20C6": 0, "30C4": 0, "24C5": 1},
        },
    },
}

# Dihedral tables keyed by (is_reflection, parameter); see _dihedral_class_of.
_DN_TABLES = {
    2: {
        "class_names": ("E", "C2", "C2'", "C2''"),
        "chars": {
            "A": {"E": 1, "C2": 1, "C2'": 1, "C2''": 1},
            "B_1": {"E": 1, "C2": 1, "C2'": -1, "C2''": -1},
            "B_2": {"E": 1, "C2": -1, "C2'": 1, "C2''": -1},
            "B_3": {"E": 1, "C2": -1, "C2'": -1, "C2''": 1},
        },
    },
    3: {
        "class_names": ("E", "2C3", "3C2"),
        "chars": {
            "A_1": {"E": 1, "2C3": 1, "3C2": 1},
            "A_2": {"E": 1, "2C3": 1, "3C2": -1},
            "E": {"E": 2, "2C3": -1, "3C2": 0},
        },
    },
    4: {
        "class_names": ("E", "2C4", "C2", "2C2'", "2C2''"),
        "chars": {
            "A_1": {"E": 1, "2C4": 1, "C2": 1, "2C2'": 1, "2C2''": 1},
            "A_2": {"E": 1, "2C4": 1, "C2": 1, "2C2'": -1, "2C2''": -1},
            "B_1": {"E": 1, "2C4": -1, "C2": 1, "2C2'": 1, "2C2''": -1},
            "B_2": {"E": 1, "2C4": -1, "C2": 1, "2C2'": -1, "2C2''": 1},
            "E": {"E": 2, "2C4": 0, "C2": -2, "2C2'": 0, "2C2''": 0},
        },
    },
    5: {
        "class_names": ("E", "2C5", "2C5^2", "5C2"),
        "chars": {
            "A_1": {"E": 1, "2C5": 1, "2C5^2": 1, "5C2": 1},
            "A_2": {"E": 1, "2C5": 1, "2C5^2": 1, "5C2": -1},
            "E_1": {"E": 2, "2C5": _PHI_A, "2C5^2": _PHI_B, "5C2": 0},
            "E_2": {"E": 2, "2C5": _PHI_B, "2C5^2": _PHI_A, "5C2": 0},
        },
    },
}

_CS_TABLE = {
    "class_names": ("E", "sigma"),
    "chars": {
        "A'": {"E": 1, "sigma": 1},
        "A''": {"E": 1, "sigma": -1},
    },
}


def _sn_class_of(n: int, elem: GroupElement) -> str:
    ct = _cycle_type(elem.perm)
    for name, pattern in _SN_TABLES[n]["classes"].items():
        if pattern == ct:
            return name
    raise KeyError(f"cycle type {ct} not in S_{n} table")


def _dihedral_class_of(n: int, elem: GroupElement) -> str:
    kind, k = elem.key
    if kind == "rot":
        if k == 0:
            return "E"
        if n == 2:
            return "C2'"
        if n == 3:
            return "2C3"
        if n == 4:
            return "2C4" if k in (1, 3) else "C2"
        if n == 5:
            return "2C5" if k in (1, 4) else "2C5^2"
    else:
        if n == 2:
            # shift * mirror acts trivially on two atoms and plays the role
            # of the principal axis, so it lands in C2; the bare mirror and
            # the bare shift both transpose the atoms.
            return "C2''" if k == 0 else "C2"
        if n == 3:
            return "3C2"
        if n == 4:
            # Even shifts give mirrors through edge midpoints (no fixed
            # atoms), odd shifts pass through two atoms.
            return "2C2'" if k % 2 == 0 else "2C2''"
        if n == 5:
            return "5C2"
    raise KeyError(f"cannot classify dihedral element {elem.key} for N={n}")


def build_group(kind: str, atom_count: int) -> PermGroup:
    """Symmetry group acting on atom labels, with its character table.

    ``kind`` is "S" (all permutations), "D" (ring: shifts and mirrors) or
    "Cs" (open chain: identity and the end-to-end mirror).
    """
    n = atom_count
    if kind not in GROUP_KINDS:
        raise ValueError(f"kind must be one of {GROUP_KINDS}, got {kind!r}")
    if kind == "Cs":
        if n < 2:
            raise ValueError("the chain mirror group needs at least 2 atoms")
        elements = [
            GroupElement(key=("e",), perm=tuple(range(n))),
            GroupElement(key=("m",), perm=_mirror(n)),
        ]
        classes = {"E": (elements[0],), "sigma": (elements[1],)}
        return PermGroup(
            kind=kind,
            atom_count=n,
            elements=tuple(elements),
            class_names=_CS_TABLE["class_names"],
            classes=classes,
            characters=_CS_TABLE["chars"],
        )

    if not 2 <= n <= 5:
        raise ValueError(f"tabulated character tables cover 2 <= N <= 5, got {n}")

    if kind == "S":
        from itertools import permutations

        elements = [GroupElement(key=p, perm=p) for p in permutations(range(n))]
        table = _SN_TABLES[n]
        class_names = tuple(table["classes"].keys())
        classes: dict[str, list[GroupElement]] = {name: [] for name in class_names}
        for elem in elements:
            classes[_sn_class_of(n, elem)].append(elem)
        return PermGroup(
            kind=kind,
            atom_count=n,
            elements=tuple(elements),
            class_names=class_names,
            classes={k: tuple(v) for k, v in classes.items()},
            characters=table["chars"],
        )

    # Dihedral group: 2N abstract elements shift^k * mirror^f even when the
    # realization on atom labels is not faithful (N = 2).
    elements = []
    for k in range(n):
        elements.append(GroupElement(key=("rot", k), perm=_shift(n, k)))
    for k in range(n):
        perm = _compose(_shift(n, k), _mirror(n))
        elements.append(GroupElement(key=("ref", k), perm=perm))
    table = _DN_TABLES[n]
    class_names = table["class_names"]
    classes = {name: [] for name in class_names}
    for elem in elements:
        classes[_dihedral_class_of(n, elem)].append(elem)
    return PermGroup(
        kind=kind,
        atom_count=n,
        elements=tuple(elements),
        class_names=class_names,
        classes={k: tuple(v) for k, v in classes.items()},
        characters=table["chars"],
    )


def dihedral_multiply(a: GroupElement, b: GroupElement, n: int) -> tuple:
    """Abstract product key for dihedral elements (shift^k mirror^f form)."""
    ka, fa = (a.key[1], 0) if a.key[0] == "rot" else (a.key[1], 1)
    kb, fb = (b.key[1], 0) if b.key[0] == "rot" else (b.key[1], 1)
    # mirror * shift^k = shift^{-k} * mirror
    k = (ka + (kb if fa == 0 else -kb)) % n
    f = (fa + fb) % 2
    return ("rot" if f == 0 else "ref", k)


def permutation_operator(perm: tuple[int, ...]) -> np.ndarray:
    """Unitary P_g with P_g |s_0 ... s_{N-1}> = |s_{g^-1(0)} ... s_{g^-1(N-1)}>.

    Atom i occupies bit position N-1-i (atom 1 most significant), and the
    convention makes g -> P_g a homomorphism.
    """
    n = len(perm)
    dim = 2**n
    op = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        bits = [(src >> (n - 1 - i)) & 1 for i in range(n)]
        dst = 0
        for i in range(n):
            # state of atom i moves to slot perm(i)
            dst |= bits[i] << (n - 1 - perm[i])
        op[dst, src] = 1.0
    return op


@dataclass(frozen=True)
class SectorDecomposition:
    """Irrep content of the multiplicity space of one spin sector."""

    j2: int
    entries: tuple[tuple[str, int, int], ...]  # (irrep, dimension, multiplicity)

    @property
    def block_count(self) -> int:
        return sum(mult for _, _, mult in self.entries)

    @property
    def total_dim(self) -> int:
        return sum(dim * mult for _, dim, mult in self.entries)

    def label(self) -> str:
        parts = []
        for name, _, mult in self.entries:
            parts.append(name if mult == 1 else f"{mult}{name}")
        return " + ".join(parts)


@dataclass(frozen=True)
class IrrepDecomposition:
    group: PermGroup
    sectors: tuple[SectorDecomposition, ...]

    def sector(self, j2: int) -> SectorDecomposition:
        for s in self.sectors:
            if s.j2 == j2:
                return s
        raise KeyError(f"no sector with 2j = {j2}")


def highest_weight_characters(
    basis: DickeBasis, group: PermGroup, j2: int
) -> dict[str, complex]:
    """Trace of each class representative on the (j, m=j) multiplicity space."""
    hw = basis.highest_weight(j2)
    block = np.column_stack([s.vector for s in hw])
    out = {}
    for name in group.class_names:
        rep = group.classes[name][0]
        pg = permutation_operator(rep.perm)
        out[name] = complex(np.trace(block.conj().T @ pg @ block))
    return out


def irrep_multiplicities(
    basis: DickeBasis, group: PermGroup, j2: int, *, integer_tol: float = 1e-6
) -> SectorDecomposition:
    """Project the spin-j multiplicity space onto the group's irreps."""
    if basis.atom_count != group.atom_count:
        raise ValueError("basis and group refer to different atom counts")
    chi = highest_weight_characters(basis, group, j2)
    sizes = group.class_sizes()
    order = group.order
    entries = []
    for irrep in group.irrep_names:
        acc = 0.0 + 0.0j
        for cname in group.class_names:
            acc += sizes[cname] * np.conj(group.characters[irrep][cname]) * chi[cname]
        mult = acc / order
        if abs(mult.imag) > integer_tol or abs(mult.real - round(mult.real)) > integer_tol:
            raise ValueError(
                f"non-integer multiplicity {mult} for irrep {irrep} at 2j={j2}; "
                "basis or convention bug"
            )
        m = int(round(mult.real))
        if m < 0:
            raise ValueError(f"negative multiplicity {m} for irrep {irrep} at 2j={j2}")
        if m:
            entries.append((irrep, group.irrep_dim(irrep), m))
    sector = SectorDecomposition(j2=j2, entries=tuple(entries))
    d_j = degeneracy_dj(basis.atom_count, j2)
    if sector.total_dim != d_j:
        raise ValueError(
            f"decomposition at 2j={j2} sums to {sector.total_dim}, expected {d_j}"
        )
    return sector


def decompose_ladder(group: PermGroup, basis: DickeBasis | None = None) -> IrrepDecomposition:
    """Irrep decomposition of every spin sector's multiplicity space."""
    if basis is None:
        basis = dicke_basis(group.atom_count, "z")
    sectors = tuple(
        irrep_multiplicities(basis, group, j2) for j2 in spin_sectors(group.atom_count)
    )
    return IrrepDecomposition(group=group, sectors=sectors)


def count_strong_drive(atom_count: int) -> int:
    """Long-living correlations of the fully symmetric strongly driven model.

    4^N Gamma(N+1/2) / (sqrt(pi) Gamma(N+2)) reduces to the Catalan number
    binom(2N, N) / (N + 1), which also equals the sum of squared ladder
    multiplicities.
    """
    n = atom_count
    if n < 1:
        raise ValueError("atom_count must be >= 1")
    return math.comb(2 * n, n) // (n + 1)


def count_stationary(decomp: IrrepDecomposition) -> int:
    """Sum of dim^2 over the distinct irreps present anywhere in the ladder."""
    dims: dict[str, int] = {}
    for sector in decomp.sectors:
        for name, dim, _ in sector.entries:
            dims[name] = dim
    return sum(d * d for d in dims.values())


def count_oscillation_frequencies(decomp: IrrepDecomposition) -> int:
    """Pairs of irrep blocks within the same spin sector: sum_j C(n_j, 2)."""
    total = 0
    for sector in decomp.sectors:
        n_j = sector.block_count
        total += n_j * (n_j - 1) // 2
    return total


def group_for_boundary(boundary: str, atom_count: int) -> PermGroup:
    """Symmetry group of the coherent part for a declared chain geometry."""
    if boundary == "periodic":
        return build_group("D", atom_count)
    if boundary == "open":
        return build_group("Cs", atom_count)
    return build_group("S", atom_count)


def orthogonality_defect(group: PermGroup) -> float:
    """Largest deviation of the character rows from exact orthonormality."""
    sizes = group.class_sizes()
    worst = 0.0
    names = group.irrep_names
    for a in names:
        for b in names:
            acc = 0.0
            for cname in group.class_names:
                acc += sizes[cname] * group.characters[a][cname] * np.conj(
                    group.characters[b][cname]
                )
            target = group.order if a == b else 0.0
            worst = max(worst, abs(acc - target))
    return worst


def half_integer_str(j2: int) -> str:
    return str(Fraction(j2, 2))
