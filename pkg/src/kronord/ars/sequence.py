"""Maps factoring through the projective cover, the choice of phi and the pullback."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import flint

from .. import linalg as la
from ..dvr import valuation
from ..heller import projective_cover
from ..order import HomSpace, Lattice, LatticeMap, direct_sum, integral_form, is_projective, sublattice
from .endo import EndAlgebra, end_algebra, radical_lattice


class NoPhiFound(RuntimeError):
    """No endomorphism outside T annihilating the radical modulo T was found."""


class NotAlmostSplit(RuntimeError):
    """A post-hoc check on a constructed sequence failed."""


class ColumnSpan:
    """O-span of a set of coordinate columns, with exact membership tests.

    The generators need not be independent.  They are made integral by unit
    scalings; a local echelon modulo p^N gives an O-basis of their span, and
    a Hermite normal form over Z covers the cases it cannot certify.
    """

    def __init__(self, gens: la.OMatrix, p: int):
        self.p = p
        self.n = gens.nrows()
        cols = []
        for j in range(gens.ncols()):
            col = [gens[i, j] for i in range(self.n)]
            den = 1
            for x in col:
                den = den * int(x.q) // _gcd(den, int(x.q))
            if den % p == 0:
                raise ValueError("generator is not defined over O")
            ints = [int(x * den) for x in col]
            if any(ints):
                cols.append(ints)
        rows: List[List[int]] = []
        if cols:
            local = la.span_basis_local([list(r) for r in zip(*cols)], p)
            if local is not None:
                rows = local
            else:
                H = flint.fmpz_mat(cols).hnf()
                rows = [r for r in H.tolist() if any(r)]
        self.basis = flint.fmpq_mat(rows).transpose() if rows else la.zeros(self.n, 0)
        self.rank = len(rows)
        if self.rank:
            piv = _independent_rows(self.basis)
            self._rows = piv
            self._inv = la.rows_of(self.basis, piv).inv()

    def coefficients(self, V: la.OMatrix) -> Optional[la.OMatrix]:
        """Rational c with basis * c = V, or None when V is outside the Q-span."""
        if self.rank == 0:
            return la.zeros(0, V.ncols()) if la.is_zero(V) else None
        c = self._inv * la.rows_of(V, self._rows)
        if self.basis * c != V:
            return None
        return c

    def contains_all(self, V: la.OMatrix) -> Optional[int]:
        """Index of the first column of V outside the O-span, or None."""
        if V.ncols() == 0:
            return None
        c = self.coefficients(V)
        if c is None:
            # locate a failing column one at a time
            for j in range(V.ncols()):
                if not self.contains(la.columns(V, [j])):
                    return j
            return None
        for j in range(c.ncols()):
            for i in range(c.nrows()):
                x = c[i, j]
                if x != 0 and valuation(x, self.p) < 0:
                    return j
        return None

    def contains(self, v: la.OMatrix) -> bool:
        c = self.coefficients(v)
        if c is None:
            return False
        return la.is_local_matrix(c, self.p)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _independent_rows(B: la.OMatrix) -> List[int]:
    R, rk = B.transpose().rref()
    piv, c = [], 0
    for i in range(rk):
        while R[i, c] == 0:
            c += 1
        piv.append(c)
    return piv


# ------------------------------------------------------------------- T


@dataclass(eq=False)
class FactorSpace:
    """T = {pi o psi : psi in Hom_A(L, P)} inside End_A(L), in End coordinates."""

    end: EndAlgebra
    span: ColumnSpan
    maps: List[la.OMatrix] = field(repr=False)

    def contains(self, coords: la.OMatrix) -> bool:
        return self.span.contains(coords)


def factor_space(E: EndAlgebra) -> FactorSpace:
    L = E.lattice
    cov = projective_cover(L)
    if cov.g == 0:
        return FactorSpace(E, ColumnSpan(la.zeros(E.dim, 0), L.p), [])
    H = HomSpace(L, cov.cover.src)
    comps = [cov.cover.mat * m for m in H.matrices]
    return FactorSpace(E, ColumnSpan(E.coords_many(comps), L.p), comps)


def factor_through_cover(L: Lattice) -> List[LatticeMap]:
    """O-basis of the endomorphisms of L factoring through its projective cover."""
    E = end_algebra(L)
    F = factor_space(E)
    B = F.span.basis
    return [LatticeMap(L, L, E.combination([B[i, j] for i in range(E.dim)])) for j in range(B.ncols())]


# ------------------------------------------------------------------- phi


@dataclass(eq=False)
class PhiChoice:
    phi: LatticeMap
    coords: la.OMatrix
    steps: List[str]
    start: int

    @property
    def left_needed(self) -> bool:
        """True when a left multiplication was required to reach both conditions."""
        return "left" in self.steps


def _mult_operator(E: EndAlgebra, phi: la.OMatrix, side: str) -> la.OMatrix:
    """Coordinates of phi o b_k (side 'right') or b_k o phi (side 'left') as columns."""
    if side == "right":
        prods = [phi * B for B in E.mats]
    else:
        prods = [B * phi for B in E.mats]
    return E.coords_many(prods)


def search_phi(E: EndAlgebra, T: Optional[FactorSpace] = None, max_steps: Optional[int] = None) -> PhiChoice:
    """Endomorphism phi outside T with phi o rad and rad o phi inside T.

    Starting from the first basis map outside T, the candidate is multiplied
    by a radical element whenever a product leaves T.  Each step keeps the
    candidate outside T; since rad^m lies in p End and p^k End lies in T,
    the descent stops.
    """
    L = E.lattice
    if is_projective(L):
        raise NoPhiFound("projective lattices have no almost split sequence ending at them")
    T = T if T is not None else factor_space(E)
    d = E.dim
    start = None
    for k in range(d):
        e = la.zeros(d, 1)
        e[k, 0] = 1
        if not T.contains(e):
            start = k
            break
    if start is None:
        raise NoPhiFound("every endomorphism factors through the cover")
    Rad = radical_lattice(E)
    coords = la.zeros(d, 1)
    coords[start, 0] = 1
    phi = E.mats[start]
    steps: List[str] = []
    limit = max_steps if max_steps is not None else 4 * L.rank + 8
    for _ in range(limit):
        moved = False
        for side in ("right", "left"):
            op = _mult_operator(E, phi, side)
            bad = T.span.contains_all(op * Rad)
            if bad is not None:
                f = E.combination([Rad[i, bad] for i in range(d)])
                phi = phi * f if side == "right" else f * phi
                coords = E.coords(phi)
                steps.append(side)
                moved = True
                break
        if not moved:
            return PhiChoice(LatticeMap(L, L, phi), coords, steps, start)
    raise NoPhiFound(f"descent did not settle within {limit} steps")


def phi_conditions(E: EndAlgebra, phi: la.OMatrix, T: Optional[FactorSpace] = None) -> bool:
    """phi lies outside T while phi o rad and rad o phi lie inside T."""
    T = T if T is not None else factor_space(E)
    if T.contains(E.coords(phi)):
        return False
    Rad = radical_lattice(E)
    return all(T.span.contains_all(_mult_operator(E, phi, side) * Rad) is None for side in ("right", "left"))


def find_phi(L: Lattice) -> LatticeMap:
    return search_phi(end_algebra(L)).phi


# ------------------------------------------------------------- sequences


@dataclass(eq=False)
class AlmostSplitSeq:
    tail: Lattice
    middle: Lattice
    head: Lattice
    inject: LatticeMap
    project: LatticeMap
    phi: LatticeMap
    cover_rank: int = 0
    phi_steps: List[str] = field(default_factory=list)

    @property
    def left_needed(self) -> bool:
        return "left" in self.phi_steps

    def to_json(self) -> dict:
        return {
            "tail": self.tail.to_json(),
            "middle": self.middle.to_json(),
            "head": self.head.to_json(),
            "inject": self.inject.to_json(),
            "project": self.project.to_json(),
            "phi": self.phi.to_json(),
        }


def almost_split(
    M: Lattice, name: str = "", check: bool = True, phi: Optional[LatticeMap] = None
) -> AlmostSplitSeq:
    """Almost split sequence ending at M as the pullback of the cover along phi.

    phi defaults to the result of search_phi; a caller-supplied phi is used
    as given, and check_sequence then decides whether the pullback is almost split.
    """
    if is_projective(M):
        raise NotAlmostSplit("projective lattices are not heads of almost split sequences")
    if not M.is_free_over_q():
        raise NotAlmostSplit("lattice is not free after tensoring with Q")
    E = end_algebra(M)
    if not E.is_local:
        raise NotAlmostSplit("End_A(M) is not local")
    if phi is None:
        choice = search_phi(E)
    else:
        if not phi_conditions(E, phi.mat):
            raise NotAlmostSplit("the given phi does not satisfy the factorization conditions")
        choice = PhiChoice(phi, E.coords(phi.mat), ["given"], -1)
    phi = choice.phi.mat
    cov = projective_cover(M)
    P, C = cov.cover.src, cov.cover.mat
    r, n4 = M.rank, C.ncols()
    Kmid = la.kernel_saturated(la.hstack([C, -phi]), M.p)
    big = direct_sum(P, M, name="")
    middle = sublattice(big, Kmid, name or (f"E({M.name})" if M.name else ""))
    middle, Bm = integral_form(middle)
    Kmid = Kmid * Bm
    Ktail = la.kernel_saturated(C, M.p)
    tail = sublattice(P, Ktail, f"tau({M.name})" if M.name else "")
    vt = la.vstack([Ktail, la.zeros(r, Ktail.ncols())])
    piv = la.pivot_rows_k(la.reduce_matrix(Kmid, M.p))
    inj = la.rows_of(Kmid, piv).inv() * la.rows_of(vt, piv)
    if Kmid * inj != vt:
        raise NotAlmostSplit("tail does not embed in the middle term")
    proj = la.rows_of(Kmid, list(range(n4, n4 + r)))
    seq = AlmostSplitSeq(
        tail,
        middle,
        M,
        LatticeMap(tail, middle, inj),
        LatticeMap(middle, M, proj),
        choice.phi,
        cov.g,
        choice.steps,
    )
    if check:
        check_sequence(seq)
    return seq


def check_sequence(seq: AlmostSplitSeq, tail_local: bool = True) -> None:
    """Exactness over O and after reduction, rank additivity, tail indecomposable."""
    p = seq.head.p
    seq.inject.check()
    seq.project.check()
    if not la.is_zero(seq.project.mat * seq.inject.mat):
        raise NotAlmostSplit("project o inject is not zero")
    if seq.middle.rank != seq.tail.rank + seq.head.rank:
        raise NotAlmostSplit("ranks are not additive")
    i_bar = la.reduce_matrix(seq.inject.mat, p)
    p_bar = la.reduce_matrix(seq.project.mat, p)
    if i_bar.rank() != seq.tail.rank or p_bar.rank() != seq.head.rank:
        raise NotAlmostSplit("reduced sequence is not exact at the ends")
    if tail_local and seq.tail.rank and not end_algebra(seq.tail).is_local:
        raise NotAlmostSplit("tail is not indecomposable")
