"""Endomorphism algebras of lattices and the radical of their reductions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence

import flint
import numpy as np

from .. import linalg as la
from ..order import HomSpace, Lattice, LatticeMap


@dataclass
class LocalCertificate:
    """Evidence that End (x) F_p is local with residue field F_p.

    ``mu[k]`` is the unique eigenvalue of the k-th reduced basis map.  The
    flag ``dims`` records dim J^i V for J spanned by the shifted basis maps;
    it reaches 0, so J generates a nilpotent ideal of codimension one.
    ``ell`` and ``vec`` read off the residue character: chi(a) = ell a vec.
    """

    mu: np.ndarray
    dims: List[int]
    ell: np.ndarray
    vec: np.ndarray

    def character(self, a: np.ndarray, p: int) -> int:
        return int(self.ell @ (a % p) @ self.vec % p)


class EndAlgebra:
    """O-basis of End_A(L) with its reduction inside M_r(F_p)."""

    def __init__(self, L: Lattice, hom: Optional[HomSpace] = None):
        self.lattice = L
        self.p = L.p
        self.hom = hom if hom is not None else HomSpace(L, L)

    @property
    def dim(self) -> int:
        return self.hom.dim

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @cached_property
    def mats(self) -> List[la.OMatrix]:
        return self.hom.matrices

    @property
    def basis(self) -> List[LatticeMap]:
        return [LatticeMap(self.lattice, self.lattice, m) for m in self.mats]

    def combination(self, coeffs) -> la.OMatrix:
        return self.hom.combination(list(coeffs)).mat

    @cached_property
    def red(self) -> np.ndarray:
        """Reduced basis maps as an array of shape (d, r, r)."""
        d, r = self.dim, self.rank
        if d == 0:
            return np.zeros((0, r, r), dtype=np.int64)
        V = la.to_numpy_k(self.hom.reduced_vecs)
        return V.T.reshape(d, r, r).transpose(0, 2, 1).copy()

    @cached_property
    def _red_solver(self):
        d, r = self.dim, self.rank
        flat = self.red.transpose(0, 2, 1).reshape(d, r * r)
        # positions of vec(T) on which the reduced basis is invertible
        piv = la.pivot_rows_k(self.hom.reduced_vecs)
        inv = la.to_numpy_k(la.from_numpy_k(flat[:, piv].T, self.p).inv())
        return piv, inv

    def red_coords(self, mats: np.ndarray) -> np.ndarray:
        """F_p coordinates (rows) of reduced endomorphisms given as (m, r, r)."""
        mats = np.asarray(mats, dtype=np.int64)
        if mats.ndim == 2:
            mats = mats[None]
        piv, inv = self._red_solver
        m, r = mats.shape[0], self.rank
        flat = mats.transpose(0, 2, 1).reshape(m, r * r) % self.p
        c = flat[:, piv] @ inv.T % self.p
        back = np.einsum("mk,kij->mij", c, self.red) % self.p
        if not np.array_equal(back, mats % self.p):
            raise la.NoSolution("matrix is not the reduction of an endomorphism")
        return c

    def coords(self, T: la.OMatrix) -> la.OMatrix:
        return self.hom.coordinates(T)

    def coords_many(self, mats: Sequence[la.OMatrix]) -> la.OMatrix:
        """Exact coordinates of several endomorphisms, one column each."""
        if not mats:
            return la.zeros(self.dim, 0)
        H = self.hom
        r2 = self.rank
        Y = la.zeros(len(H.pivots), len(mats))
        # pivot rows of the generator vector: generator j, row i
        loc = [(q // r2, q % r2) for q in H.pivots]
        for c, T in enumerate(mats):
            for t, (j, i) in enumerate(loc):
                x = T[i, H.pres.gens[j]]
                if x:
                    Y[t, c] = x
        return H._pivot_inverse * Y

    @cached_property
    def reduced_structure(self) -> np.ndarray:
        """Structure constants c[i, j, k] of End (x) F_p: b_i b_j = sum_k c[i,j,k] b_k."""
        d, red = self.dim, self.red
        prods = np.einsum("iab,jbc->ijac", red, red) % self.p
        return self.red_coords(prods.reshape(d * d, self.rank, self.rank)).reshape(d, d, d)

    @cached_property
    def local(self) -> Optional[LocalCertificate]:
        return local_certificate(self.red, self.p)

    @property
    def is_local(self) -> bool:
        return self.local is not None

    @cached_property
    def radical_red(self) -> np.ndarray:
        """Rows: F_p coordinates of a basis of rad(End (x) F_p)."""
        cert = self.local
        if cert is not None:
            return _kernel_rows(cert.mu[None, :], self.p)
        return radical_general(self.red, self.p)

    @property
    def semisimple_dim(self) -> int:
        return self.dim - self.radical_red.shape[0]


def end_algebra(L: Lattice) -> EndAlgebra:
    return EndAlgebra(L)


# --------------------------------------------------------------- locality


def _eigenvalue(a: np.ndarray, p: int) -> Optional[int]:
    """The unique eigenvalue of a in F_p, or None if there is none."""
    r = a.shape[0]
    if p > r:
        mu = int(np.trace(a)) * pow(r, -1, p) % p
    else:
        lead, facs = la.from_numpy_k(a, p).charpoly().factor()
        if len(facs) != 1 or facs[0][0].degree() != 1:
            return None
        f = facs[0][0]
        mu = int(-f[0]) % p
    return mu


def local_certificate(red: np.ndarray, p: int) -> Optional[LocalCertificate]:
    """Certify that the span of the matrices red[k] is a local algebra.

    With mu_k the eigenvalue of red[k], the shifted maps red[k] - mu_k span a
    subspace J.  If J^m F_p^r = 0 for some m, the algebra generated by J is
    nilpotent, misses the identity and contains the span of the red[k] up to
    scalars, so it is the radical and the quotient is F_p.
    """
    d, r, _ = red.shape
    if d == 0 or r == 0:
        return None
    mu = np.zeros(d, dtype=np.int64)
    for k in range(d):
        m = _eigenvalue(red[k], p)
        if m is None:
            return None
        mu[k] = m
    J = (red - mu[:, None, None] * np.eye(r, dtype=np.int64)) % p
    V = np.eye(r, dtype=np.int64)
    dims = [r]
    first = None
    while V.shape[1]:
        W = np.einsum("kab,bs->aks", J, V).reshape(r, -1) % p
        R, piv = la.np_rref(W.T.copy(), p)
        if len(piv) >= V.shape[1]:
            return None
        V = R.T.copy()
        if first is None:
            first = V
        dims.append(V.shape[1])
    # residue character: a functional vanishing on JV and a vector off it
    basis1 = first if first is not None else np.zeros((r, 0), dtype=np.int64)
    ells = la.np_kernel(basis1.T.copy(), p) if basis1.shape[1] else np.eye(r, dtype=np.int64)
    ell = ells[:, 0]
    j = int(np.flatnonzero(ell)[0])
    vec = np.zeros(r, dtype=np.int64)
    vec[j] = pow(int(ell[j]), -1, p)
    return LocalCertificate(mu, dims, ell, vec)


def _kernel_rows(A: np.ndarray, p: int) -> np.ndarray:
    return la.np_kernel(A, p).T.copy()


# ------------------------------------------------------------- general case


def radical_general(red: np.ndarray, p: int, chunk: int = 4096) -> np.ndarray:
    """Radical of the F_p-algebra spanned by red[k], by iterated trace forms.

    I_{-1} is the whole algebra; I_i keeps the a in I_{i-1} with
    g_i(ab) = 0 for every basis element b, where g_i(x) is the trace of
    lift(x)^(p^i) divided by p^i.  For a representation of degree r the
    radical is I_l with l = floor(log_p r).
    """
    d, r, _ = red.shape
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64)
    l = int(math.floor(math.log(r, p) + 1e-9)) if r > 1 else 0
    coords = np.eye(d, dtype=np.int64)
    for i in range(l + 1):
        if coords.shape[0] == 0:
            break
        elems = np.einsum("sk,kab->sab", coords, red) % p
        mod = p ** (i + 1)
        G = np.zeros((d, coords.shape[0]), dtype=np.int64)
        pairs = [(j, s) for j in range(d) for s in range(coords.shape[0])]
        for start in range(0, len(pairs), chunk):
            block = pairs[start:start + chunk]
            js = np.array([b[0] for b in block])
            ss = np.array([b[1] for b in block])
            x = np.einsum("nab,nbc->nac", elems[ss], red[js]) % p
            y = _power_mod(x, p ** i, mod)
            tr = np.trace(y, axis1=1, axis2=2) % mod
            G[js, ss] = (tr // p ** i) % p
        K = la.np_kernel(G, p)
        coords = (K.T @ coords) % p
        if coords.shape[0]:
            R, _ = la.np_rref(coords, p)
            coords = R
    return coords


def _power_mod(x: np.ndarray, e: int, mod: int) -> np.ndarray:
    out = np.broadcast_to(np.eye(x.shape[1], dtype=np.int64), x.shape).copy()
    base = x % mod
    while e:
        if e & 1:
            out = np.matmul(out, base) % mod
        e >>= 1
        if e:
            base = np.matmul(base, base) % mod
    return out


# --------------------------------------------------------------- lattices


def lattice_from_subspace(rows: np.ndarray, d: int, p: int) -> la.OMatrix:
    """O-basis (columns) of the preimage in O^d of an F_p-subspace given by rows."""
    B = la.zeros(d, d)
    R, piv = la.np_rref(rows, p) if rows.shape[0] else (rows, [])
    where = {c: i for i, c in enumerate(piv)}
    for j in range(d):
        if j in where:
            row = R[where[j]]
            for t in np.flatnonzero(row):
                B[int(t), j] = int(row[t])
        else:
            B[j, j] = p
    return B


def radical_lattice(E: EndAlgebra) -> la.OMatrix:
    """Coordinates (columns) of an O-basis of the radical of End_A(L)."""
    return lattice_from_subspace(E.radical_red, E.dim, E.p)


def radical_endos(E: EndAlgebra) -> List[LatticeMap]:
    """O-basis of {f in End_A(L) : f mod p lies in the radical of End (x) F_p}."""
    C = radical_lattice(E)
    out = []
    for j in range(C.ncols()):
        coeffs = [C[i, j] for i in range(E.dim)]
        out.append(LatticeMap(E.lattice, E.lattice, E.combination(coeffs)))
    return out
