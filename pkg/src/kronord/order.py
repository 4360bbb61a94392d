"""Lattices over A = O[X, Y]/(X^2, Y^2) and homomorphisms between them.

A lattice is a free O-module of finite rank with two commuting square-zero
matrices.  Hom spaces are solved through a presentation of the source: a map
is determined by the images of the top generators, subject to the relations
that generate the syzygy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import flint
import numpy as np

from . import linalg as la
from .dvr import format_scalar, parse_scalar
from .modk import ModK


@dataclass(eq=False)
class Lattice:
    """Free O-module with actions X, Y given as O-matrices (column convention)."""

    X: la.OMatrix
    Y: la.OMatrix
    p: int = 3
    name: str = ""

    @property
    def rank(self) -> int:
        return self.X.nrows()

    @cached_property
    def XY(self) -> la.OMatrix:
        return self.X * self.Y

    def check(self) -> None:
        n = self.rank
        if not (la.is_local_matrix(self.X, self.p) and la.is_local_matrix(self.Y, self.p)):
            raise ValueError("actions are not defined over O")
        z = la.zeros(n, n)
        if self.X * self.X != z or self.Y * self.Y != z or self.XY != self.Y * self.X:
            raise ValueError("actions must commute and square to zero")

    @cached_property
    def reduction(self) -> ModK:
        return ModK(la.reduce_matrix(self.X, self.p), la.reduce_matrix(self.Y, self.p))

    def renamed(self, name: str) -> "Lattice":
        out = Lattice(self.X, self.Y, self.p, name)
        return out

    def transport(self, B: la.OMatrix, name: Optional[str] = None) -> "Lattice":
        """Same lattice in the basis given by the columns of B (unit determinant)."""
        if not la.is_unit_det(B, self.p):
            raise ValueError("base change is not invertible over O")
        Bi = B.inv()
        return Lattice(Bi * self.X * B, Bi * self.Y * B, self.p, self.name if name is None else name)

    def is_free_over_q(self) -> bool:
        """Rational ranks of X, Y, XY are rank/2, rank/2, rank/4."""
        n = self.rank
        if n % 4:
            return False
        return self.X.rank() == n // 2 and self.Y.rank() == n // 2 and self.XY.rank() == n // 4

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "actX": [[format_scalar(x) for x in row] for row in self.X.tolist()],
            "actY": [[format_scalar(x) for x in row] for row in self.Y.tolist()],
            "name": self.name,
        }

    @staticmethod
    def from_json(data: dict, p: int) -> "Lattice":
        n = int(data["rank"])
        X = la.omat([[parse_scalar(x) for x in r] for r in data["actX"]], n)
        Y = la.omat([[parse_scalar(x) for x in r] for r in data["actY"]], n)
        if n == 0:
            X = la.zeros(0, 0)
            Y = la.zeros(0, 0)
        L = Lattice(X, Y, p, data.get("name", "") or "")
        L.check()
        return L

    def __repr__(self) -> str:
        return f"Lattice({self.name or '?'}, rank={self.rank}, p={self.p})"


@dataclass(eq=False)
class LatticeMap:
    src: Lattice
    dst: Lattice
    mat: la.OMatrix

    def check(self) -> None:
        if self.mat * self.src.X != self.dst.X * self.mat or self.mat * self.src.Y != self.dst.Y * self.mat:
            raise ValueError("map is not A-linear")

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self o other."""
        return LatticeMap(other.src, self.dst, self.mat * other.mat)

    def to_json(self) -> List[List[str]]:
        return [[format_scalar(x) for x in row] for row in self.mat.tolist()]


# ------------------------------------------------------------ construction


def regular(n: int, p: int = 3) -> Lattice:
    """A^n with basis e_l, Xe_l, Ye_l, XYe_l for l = 1..n."""
    if n < 1:
        raise ValueError("regular(n) needs n >= 1")
    X = la.zeros(4 * n, 4 * n)
    Y = la.zeros(4 * n, 4 * n)
    for l in range(n):
        o = 4 * l
        X[o + 1, o] = 1
        X[o + 3, o + 2] = 1
        Y[o + 2, o] = 1
        Y[o + 3, o + 1] = 1
    return Lattice(X, Y, p, "A" if n == 1 else f"A^{n}")


def zero_lattice(p: int = 3) -> Lattice:
    return Lattice(la.zeros(0, 0), la.zeros(0, 0), p, "0")


def direct_sum(L1: Lattice, L2: Lattice, name: Optional[str] = None) -> Lattice:
    if L1.p != L2.p:
        raise ValueError("lattices over different primes")
    if L2.rank == 0:
        return L1 if name is None else L1.renamed(name)
    if L1.rank == 0:
        return L2 if name is None else L2.renamed(name)
    nm = name if name is not None else f"{L1.name or '?'}+{L2.name or '?'}"
    return Lattice(la.block_diag([L1.X, L2.X]), la.block_diag([L1.Y, L2.Y]), L1.p, nm)


def direct_sum_all(lats: Sequence[Lattice], name: Optional[str] = None) -> Lattice:
    out = lats[0]
    for L in lats[1:]:
        out = direct_sum(out, L)
    return out if name is None else out.renamed(name)


def sublattice(L: Lattice, B: la.OMatrix, name: str = "") -> Lattice:
    """Lattice spanned by the columns of B, which must be A-stable."""
    if B.ncols() == 0:
        return zero_lattice(L.p)
    piv = la.pivot_rows_k(la.reduce_matrix(B, L.p))
    if len(piv) == B.ncols():
        Si = la.rows_of(B, piv).inv()
        X = Si * la.rows_of(L.X * B, piv)
        Y = Si * la.rows_of(L.Y * B, piv)
    else:
        # independent over Q only: use a rational left inverse
        Bt = B.transpose()
        left = (Bt * B).inv() * Bt
        X = left * L.X * B
        Y = left * L.Y * B
    if B * X != L.X * B or B * Y != L.Y * B:
        raise ValueError("span is not A-stable")
    out = Lattice(X, Y, L.p, name)
    if not (la.is_local_matrix(X, L.p) and la.is_local_matrix(Y, L.p)):
        raise ValueError("span is not an A-lattice over O")
    return out


def integral_form(L: Lattice) -> Tuple[Lattice, la.OMatrix]:
    """L in a basis where X and Y are small integer matrices, with the base change.

    The Z-span of all e_i, X e_i, Y e_i, XY e_i is stable under X and Y and
    spans O^r over O, so an LLL-reduced Z-basis of it has unit determinant
    over O and makes both actions integral.
    """
    r = L.rank
    if r == 0:
        return L, la.identity(0)
    G = la.hstack([la.identity(r), L.X, L.Y, L.XY])
    num, den = G.numer_denom()
    rows = [row for row in num.transpose().hnf().tolist() if any(row)]
    B = flint.fmpq_mat(flint.fmpz_mat(rows).lll()).transpose() / den
    return L.transport(B), B


def tensor_k(L: Lattice) -> ModK:
    return L.reduction


# ------------------------------------------------------------ presentations


def top_generators(L: Lattice) -> List[int]:
    """Indices of basis vectors lifting a basis of L (x) F_p modulo its radical."""
    R = L.reduction
    n = L.rank
    if n == 0:
        return []
    XYs = flint.nmod_mat(n, 2 * n, L.p)
    for i in range(n):
        for j in range(n):
            XYs[i, j] = R.X[i, j]
            XYs[i, n + j] = R.Y[i, j]
    return la.complement_k(XYs)


def cover_matrix(L: Lattice, gens: Sequence[int]) -> la.OMatrix:
    """Matrix of A^g -> L sending e_i to the basis vector gens[i]."""
    n = L.rank
    C = la.zeros(n, 4 * len(gens))
    ops = [None, L.X, L.Y, L.XY]
    for i, g in enumerate(gens):
        for t, op in enumerate(ops):
            for r in range(n):
                x = (1 if r == g else 0) if op is None else op[r, g]
                if x:
                    C[r, 4 * i + t] = x
    return C


@dataclass(eq=False)
class Presentation:
    """Generators, cover, its O-right-inverse and A-generators of the relations."""

    lattice: Lattice
    gens: List[int]
    cover: la.OMatrix
    section: la.OMatrix
    kernel: la.OMatrix
    relations: la.OMatrix = field(repr=False)


def presentation(L: Lattice) -> Presentation:
    """Cached presentation of L by top generators and relations."""
    cached = L.__dict__.get("_presentation")
    if cached is not None:
        return cached
    gens = top_generators(L)
    C = cover_matrix(L, gens)
    K = la.kernel_saturated(C, L.p) if C.ncols() else la.zeros(0, 0)
    if K.ncols():
        omega = sublattice(regular(len(gens), L.p), K)
        rel = la.columns(K, top_generators(omega))
    else:
        rel = la.zeros(4 * len(gens), 0)
    sec = la.right_inverse(C, L.p) if L.rank else la.zeros(0, 0)
    pres = Presentation(L, gens, C, sec, K, rel)
    L.__dict__["_presentation"] = pres
    return pres


# ------------------------------------------------------------------- Hom


def _int_scaled(mats: Sequence[la.OMatrix]):
    """Integer numpy arrays and a common denominator for a list of O-matrices."""
    den = 1
    nd = []
    for m in mats:
        num, d = m.numer_denom()
        nd.append((num, int(d)))
        den = math.lcm(den, int(d))
    arrs = []
    big = False
    for num, d in nd:
        vals = [int(x) * (den // d) for x in num.entries()]
        if vals and max(abs(v) for v in vals) >= 1 << 28:
            big = True
        arrs.append((vals, num.nrows(), num.ncols()))
    dtype = object if big else np.int64
    return [np.array(v, dtype=dtype).reshape(r, c) for v, r, c in arrs], den


def _to_fmpz(a: np.ndarray) -> flint.fmpz_mat:
    r, c = a.shape
    if r == 0 or c == 0:
        return flint.fmpz_mat(r, c)
    return flint.fmpz_mat(a.tolist())


def _strip_p_content(E: np.ndarray, p: int) -> np.ndarray:
    """Divide each column by the largest power of p dividing all its entries."""
    E = E.copy()
    live = np.any(E != 0, axis=0)
    while True:
        div = live & np.all(E % p == 0, axis=0)
        if not div.any():
            return E
        E[:, div] //= p


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def _free_basis(L: Lattice) -> Optional[List[int]]:
    """Indices w with {w, Xw, Yw, XYw} a Q-basis, when L (x) Q is A-free."""
    if L.rank % 4:
        return None
    R, rk = L.XY.rref()
    if 4 * rk != L.rank:
        return None
    piv, c = [], 0
    for i in range(rk):
        while R[i, c] == 0:
            c += 1
        piv.append(c)
    W = cover_matrix(L, piv)
    return piv if W.rank() == L.rank else None


def _hom_via_free_basis(src: Lattice, gens: List[int], ops, p: int) -> Optional[la.OMatrix]:
    """Hom in generator coordinates as the saturation of the rational Hom.

    With src (x) Q free on w_1..w_a, a rational A-map is fixed by the images
    z_i of the w_i; the top generator e_j, written as sum_i c_ji(X, Y) w_i,
    goes to sum_i c_ji(X, Y) z_i.  Integral maps are exactly those sending the
    top generators into dst, so Hom is the saturation of that column space.
    """
    free = _free_basis(src)
    if free is None:
        return None
    r1, a = src.rank, len(free)
    Winv = cover_matrix(src, free).inv()
    coeff = []
    for t in range(4):
        C = la.zeros(len(gens), a)
        for j, gcol in enumerate(gens):
            for i in range(a):
                x = Winv[4 * i + t, gcol]
                if x:
                    C[j, i] = x
        coeff.append(C)
    arrs, _ = _int_scaled(coeff + list(ops))
    E = _strip_p_content(sum(_kron(arrs[t], arrs[4 + t]) for t in range(4)), p)
    return flint.fmpq_mat(la._saturate_integer(_to_fmpz(E), p))


def _hom_via_relations(pres: Presentation, ops, p: int) -> la.OMatrix:
    """Hom in generator coordinates as the kernel of the relation system."""
    g = len(pres.gens)
    r2 = ops[0].nrows()
    nrel = pres.relations.ncols()
    if not nrel:
        return la.identity(g * r2)
    coeff = []
    for t in range(4):
        C = la.zeros(nrel, g)
        for i in range(nrel):
            for j in range(g):
                x = pres.relations[4 * j + t, i]
                if x:
                    C[i, j] = x
        coeff.append(C)
    arrs, _ = _int_scaled(coeff + list(ops))
    E = sum(_kron(arrs[t], arrs[4 + t]) for t in range(4))
    return la.kernel_saturated(flint.fmpq_mat(_to_fmpz(E)), p, echelon=False)


class HomSpace:
    """O-basis of Hom_A(src, dst), stored through images of the top generators.

    A solution vector y stacks the images (in dst coordinates) of the top
    generators of src; ``sol`` holds a saturated O-basis of such vectors and
    ``pivots`` a set of rows on which it reduces to an invertible block.
    """

    def __init__(self, src: Lattice, dst: Lattice):
        if src.p != dst.p:
            raise ValueError("lattices over different primes")
        self.src, self.dst, self.p = src, dst, src.p
        r1, r2 = src.rank, dst.rank
        self.pres = pres = presentation(src)
        g = len(pres.gens)
        self.g = g
        if r1 == 0 or r2 == 0:
            self.sol = la.zeros(g * r2, 0)
            self.pivots: List[int] = []
            self._phi = la.zeros(r1 * r2, g * r2)
            return
        ops = [la.identity(r2), dst.X, dst.Y, dst.XY]
        sol = _hom_via_free_basis(src, pres.gens, ops, self.p)
        if sol is None:
            sol = _hom_via_relations(pres, ops, self.p)
        self.sol = sol
        self.pivots = la.pivot_rows_k(la.reduce_matrix(self.sol, self.p)) if self.sol.ncols() else []
        # vec(T) = Phi y, column-major vec
        secs = []
        for t in range(4):
            S = la.zeros(r1, g)
            for j in range(g):
                for c in range(r1):
                    x = pres.section[4 * j + t, c]
                    if x:
                        S[c, j] = x
            secs.append(S)
        arrs, den = _int_scaled(secs + ops)
        Phi = sum(_kron(arrs[t], arrs[4 + t]) for t in range(4))
        self._phi = flint.fmpq_mat(_to_fmpz(Phi)) / den

    @property
    def dim(self) -> int:
        return self.sol.ncols()

    def __len__(self) -> int:
        return self.dim

    def _unvec(self, v: la.OMatrix) -> la.OMatrix:
        r1, r2 = self.src.rank, self.dst.rank
        T = la.zeros(r2, r1)
        for c in range(r1):
            for i in range(r2):
                x = v[c * r2 + i, 0]
                if x:
                    T[i, c] = x
        return T

    def matrix_of(self, y: la.OMatrix) -> la.OMatrix:
        """Map matrix from a generator-image column vector."""
        return self._unvec(self._phi * y)

    def combination(self, coeffs: Sequence) -> LatticeMap:
        c = la.omat([[x] for x in coeffs], 1) if self.dim else la.zeros(0, 1)
        return LatticeMap(self.src, self.dst, self.matrix_of(self.sol * c))

    @cached_property
    def matrices(self) -> List[la.OMatrix]:
        """Exact matrices of all basis maps."""
        if self.dim == 0:
            return []
        V = (self._phi * self.sol).tolist()
        r1, r2 = self.src.rank, self.dst.rank
        out = []
        for k in range(self.dim):
            rows = [[V[c * r2 + i][k] for c in range(r1)] for i in range(r2)]
            out.append(flint.fmpq_mat(rows) if r2 else la.zeros(0, r1))
        return out

    def basis_map(self, k: int) -> LatticeMap:
        return LatticeMap(self.src, self.dst, self.matrices[k])

    def maps(self) -> List[LatticeMap]:
        return [self.basis_map(k) for k in range(self.dim)]

    def gen_vector(self, T: la.OMatrix) -> la.OMatrix:
        """Stacked images of the top generators under T."""
        r2 = self.dst.rank
        y = la.zeros(self.g * r2, 1)
        for j, gcol in enumerate(self.pres.gens):
            for i in range(r2):
                x = T[i, gcol]
                if x:
                    y[j * r2 + i, 0] = x
        return y

    @cached_property
    def _pivot_inverse(self) -> la.OMatrix:
        return la.rows_of(self.sol, self.pivots).inv()

    def coordinates(self, T: la.OMatrix) -> la.OMatrix:
        """Coefficients of an A-linear map in the O-basis (exact, checked)."""
        y = self.gen_vector(T)
        c = self._pivot_inverse * la.rows_of(y, self.pivots) if self.dim else la.zeros(0, 1)
        if self.sol * c != y:
            raise la.NoSolution("map is not in the span of the basis")
        return c

    @cached_property
    def reduced_vecs(self) -> la.KMatrix:
        """Residues of vec(T_k) as columns, one per basis element."""
        if self.dim == 0:
            return flint.nmod_mat(self.src.rank * self.dst.rank, 0, self.p)
        return la.reduce_matrix(self._phi, self.p) * la.reduce_matrix(self.sol, self.p)

    def reduced_matrix(self, k: int) -> la.KMatrix:
        v = self.reduced_vecs
        r1, r2 = self.src.rank, self.dst.rank
        T = flint.nmod_mat(r2, r1, self.p)
        for c in range(r1):
            for i in range(r2):
                T[i, c] = v[c * r2 + i, k]
        return T


def hom_space(L1: Lattice, L2: Lattice) -> List[LatticeMap]:
    """O-basis of Hom_A(L1, L2)."""
    return HomSpace(L1, L2).maps()


def is_projective(L: Lattice) -> bool:
    return L.rank == 4 * len(top_generators(L))


def lattice_from_rows(X, Y, p: int = 3, name: str = "") -> Lattice:
    L = Lattice(la.omat(X), la.omat(Y), p, name)
    L.check()
    return L


def dumps_lattice(L: Lattice) -> str:
    return json.dumps(L.to_json())
