"""Projective covers, Heller lattices and the syzygy functor."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

import flint

from . import linalg as la
from .modk import ModK, SummandLabel, string_module
from .order import Lattice, LatticeMap, cover_matrix, regular, sublattice, top_generators, zero_lattice


class ProjectiveInput(ValueError):
    """Heller lattices are only taken of modules without free summands."""


@dataclass(eq=False)
class CoverData:
    """A^g -> target, sending e_i to the i-th lifted top vector."""

    g: int
    gens: List[int]
    cover: LatticeMap


def projective_cover(L: Lattice) -> CoverData:
    gens = top_generators(L)
    P = regular(len(gens), L.p) if gens else zero_lattice(L.p)
    return CoverData(len(gens), gens, LatticeMap(P, L, cover_matrix(L, gens)))


def syzygy(L: Lattice, name: str = "") -> Lattice:
    """Kernel of the projective cover; the zero lattice for projective L."""
    cov = projective_cover(L)
    if cov.g == 0:
        return zero_lattice(L.p)
    K = la.kernel_saturated(cov.cover.mat, L.p)
    if K.ncols() == 0:
        return zero_lattice(L.p)
    return sublattice(cov.cover.src, K, name or (f"tau({L.name})" if L.name else ""))


def heller_basis(M: ModK) -> la.OMatrix:
    """O-basis (columns, in A^g) of the kernel of A^g -> M.

    Coordinate j carries either the lifted echelon kernel vector pivoting at j
    or p * e_j; the result is ordered by j.
    """
    p = M.p
    if (M.X * M.Y).rank() != 0:
        raise ProjectiveInput("module has a projective summand")
    g, C = _cover_k(M)
    n4 = 4 * g
    K = la.kernel_k(C)
    B = la.zeros(n4, n4)
    pivots = {}
    if K.ncols():
        R, rk = K.transpose().rref()
        c = 0
        for i in range(rk):
            while R[i, c] == 0:
                c += 1
            pivots[c] = i
        for j in range(n4):
            if j in pivots:
                i = pivots[j]
                for r in range(n4):
                    x = int(R[i, r])
                    if x:
                        B[r, j] = x
            else:
                B[j, j] = p
    else:
        for j in range(n4):
            B[j, j] = p
    return B


def _cover_k(M: ModK):
    from .modk import projective_cover_k

    return projective_cover_k(M)


def heller(M: Union[ModK, SummandLabel], p: int = 3, name: str = "") -> Lattice:
    """Heller lattice: kernel of the projective A-cover of an A(x)F_p-module."""
    if isinstance(M, SummandLabel):
        if M.is_projective:
            raise ProjectiveInput("P has no Heller lattice")
        name = name or f"Z[{M}]"
        M = string_module(M, p)
    B = heller_basis(M)
    g = B.nrows() // 4
    if g == 0:
        return zero_lattice(M.p)
    return sublattice(regular(g, M.p), B, name)


def z_label(n: int) -> SummandLabel:
    """Label whose Heller lattice is Z_n: H:n for n >= 0, V:-n for n < 0."""
    return SummandLabel("H", n) if n >= 0 else SummandLabel("V", -n)


def heller_z(n: int, p: int = 3) -> Lattice:
    return heller(z_label(n), p, name=f"Z{n}")


def cosyzygy_rank(L: Lattice) -> int:
    return 4 * len(top_generators(L)) - L.rank
