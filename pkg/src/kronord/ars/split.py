"""Exact direct-sum decompositions of lattices with unit-determinant witnesses."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import flint
import numpy as np

from .. import linalg as la
from ..heller import heller
from ..modk import Decomposition, decompose
from ..order import HomSpace, Lattice, LatticeMap, cover_matrix, integral_form, regular, sublattice
from .endo import EndAlgebra, end_algebra


class SplitFailed(RuntimeError):
    """No certified decomposition was found; carries the last precision tried."""

    def __init__(self, message: str, precision: int = 0, semisimple_dim: int = 0):
        super().__init__(message)
        self.precision = precision
        self.semisimple_dim = semisimple_dim


@dataclass(eq=False)
class SplitCertificate:
    """Summands with embeddings whose concatenation is an isomorphism onto L."""

    lattice: Lattice
    summands: List[Lattice]
    embeddings: List[LatticeMap]
    witness: la.OMatrix
    methods: List[str] = field(default_factory=list)

    @property
    def nonprojective(self) -> List[Lattice]:
        return [S for S, how in zip(self.summands, self.methods) if how != "projective"]

    @property
    def projective_count(self) -> int:
        return sum(1 for how in self.methods if how == "projective")

    def verify(self) -> bool:
        """Pure matrix identities: unit determinant and intertwining."""
        L = self.lattice
        if not la.is_unit_det(self.witness, L.p):
            return False
        if not self.summands:
            return L.rank == 0
        X = la.block_diag([S.X for S in self.summands])
        Y = la.block_diag([S.Y for S in self.summands])
        W = self.witness
        return W * X == L.X * W and W * Y == L.Y * W


# ---------------------------------------------------------- projective part


def split_projective(L: Lattice) -> Tuple[int, la.OMatrix, la.OMatrix]:
    """Split A^s off L, s = rank of XY mod p.

    Returns (s, iota, K): iota (r x 4s) embeds A^s, K (r x (r - 4s)) is an
    O-basis of the kernel of an A-linear retraction.  The retraction sends m
    to sum_i lambda_i(XY m) e_i + lambda_i(Y m) X e_i + lambda_i(X m) Y e_i
    + lambda_i(m) XY e_i with lambda_i(XY v_j) = delta_ij.
    """
    p = L.p
    r = L.rank
    XYb = la.reduce_matrix(L.XY, p)
    s = XYb.rank()
    if s == 0:
        return 0, la.zeros(r, 0), la.identity(r)
    vs = la.pivot_rows_k(XYb.transpose())
    iota = cover_matrix(L, vs)
    W = la.columns(L.XY, vs)
    rows = la.pivot_rows_k(la.reduce_matrix(W, p))
    Wi = la.rows_of(W, rows).inv()
    Lam = la.zeros(s, r)
    for i in range(s):
        for k, row in enumerate(rows):
            x = Wi[i, k]
            if x:
                Lam[i, row] = x
    F = la.zeros(4 * s, r)
    parts = [Lam * L.XY, Lam * L.Y, Lam * L.X, Lam]
    for i in range(s):
        for t in range(4):
            for c in range(r):
                x = parts[t][i, c]
                if x:
                    F[4 * i + t, c] = x
    if not la.is_unit_det(F * iota, p):
        raise SplitFailed("projective retraction is not split")
    K = la.kernel_saturated(F, p) if r > 4 * s else la.zeros(r, 0)
    return s, iota, K


# ---------------------------------------------------------- candidate part


def _reduced_mats(H: HomSpace) -> np.ndarray:
    d, r1, r2 = H.dim, H.src.rank, H.dst.rank
    V = la.to_numpy_k(H.reduced_vecs)
    return V.T.reshape(d, r1, r2).transpose(0, 2, 1).copy()


def split_off(
    X: Lattice, Q: Lattice, rng: random.Random, samples: int = 32
) -> Optional[Tuple[la.OMatrix, la.OMatrix]]:
    """Try to exhibit X as a direct summand of Q.

    Looks for f: X -> Q and g: Q -> X with g o f invertible; then
    Q = f(X) + ker g.  Returns (f, basis of ker g) or None.
    """
    p = Q.p
    if X.rank == 0 or X.rank > Q.rank:
        return None
    H1 = HomSpace(X, Q)
    if H1.dim == 0:
        return None
    H2 = HomSpace(Q, X)
    if H2.dim == 0:
        return None
    F = _reduced_mats(H1)
    G = _reduced_mats(H2)
    for _ in range(samples):
        a = np.array([rng.randrange(p) for _ in range(H1.dim)], dtype=np.int64)
        b = np.array([rng.randrange(p) for _ in range(H2.dim)], dtype=np.int64)
        fb = np.tensordot(a, F, axes=1) % p
        gb = np.tensordot(b, G, axes=1) % p
        if la.np_rank(gb @ fb % p, p) < X.rank:
            continue
        f = H1.combination([int(x) for x in a]).mat
        g = H2.combination([int(x) for x in b]).mat
        if not la.is_unit_det(g * f, p):
            continue
        K = la.kernel_saturated(g, p) if Q.rank > X.rank else la.zeros(Q.rank, 0)
        if la.is_unit_det(la.hstack([f, K]), p):
            return f, K
    return None


def default_candidates(Q: Lattice) -> List[Lattice]:
    """Heller lattices of the non-projective summands of Q (x) F_p, smallest first."""
    out = []
    seen = set()
    for lab, _ in decompose(Q.reduction).sorted_items():
        if lab.is_projective or lab in seen:
            continue
        seen.add(lab)
        Z = heller(lab, Q.p)
        if Z.rank and Z.rank < Q.rank:
            out.append(Z)
    out.sort(key=lambda Z: Z.rank)
    return out


def _contained(small: Decomposition, big: Decomposition) -> bool:
    return all(big.get(k, 0) >= v for k, v in small.items())


# --------------------------------------------------------- idempotent part


def _charpoly_split(a: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Projection onto one generalized eigenspace of a, when a has two."""
    A = la.from_numpy_k(a, p)
    lead, facs = A.charpoly().factor()
    if len(facs) < 2:
        return None
    q1 = facs[0][0] ** facs[0][1]
    h = flint.nmod_poly([1], p)
    for f, e in facs[1:]:
        h = h * f ** e
    g, s, t = q1.xgcd(h)
    u = t * h
    n = a.shape[0]
    out = la.kzeros(n, n, p)
    powk = la.kidentity(n, p)
    for c in u.coeffs():
        if int(c):
            out = out + powk * int(c)
        powk = powk * A
    return la.to_numpy_k(out)


def reduced_idempotent(E: EndAlgebra, rng: random.Random, tries: int = 64) -> Optional[np.ndarray]:
    """F_p coordinates of a nontrivial idempotent of End (x) F_p, if found."""
    p, d = E.p, E.dim
    for _ in range(tries):
        c = np.array([rng.randrange(p) for _ in range(d)], dtype=np.int64)
        a = np.tensordot(c, E.red, axes=1) % p
        e = _charpoly_split(a, p)
        if e is not None and e.any() and not np.array_equal(e, np.eye(E.rank, dtype=np.int64)):
            return E.red_coords(e)[0]
    return None


def _mod_matrix(M: la.OMatrix, q: int) -> np.ndarray:
    num, den = M.numer_denom()
    inv = pow(int(den), -1, q)
    rows = num.tolist()
    return np.array([[int(x) * inv % q for x in row] for row in rows], dtype=object)


def _ratrecon(a: int, m: int) -> Optional[Tuple[int, int]]:
    """Rational reconstruction of a mod m with |num|, den below sqrt(m/2)."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    return r1, s1


def lift_idempotent(E: EndAlgebra, coords: np.ndarray, precision: int) -> Optional[la.OMatrix]:
    """Newton-lift a reduced idempotent to p^precision and try to make it exact.

    e <- 3e^2 - 2e^3 converges p-adically to an idempotent; when that limit
    is rational, rational reconstruction recovers it and the identities
    e^2 = e, eX = Xe, eY = Ye are then checked exactly.
    """
    p = E.p
    q = p ** precision
    e0 = E.combination([int(x) for x in coords])
    e = _mod_matrix(e0, q)
    k = 1
    while k < precision:
        e2 = e.dot(e) % q
        e = (3 * e2 - 2 * e2.dot(e)) % q
        k *= 2
    rows = []
    for row in e.tolist():
        out = []
        for x in row:
            rr = _ratrecon(int(x), q)
            if rr is None or rr[1] % p == 0:
                return None
            out.append(flint.fmpq(rr[0], rr[1]))
        rows.append(out)
    ex = flint.fmpq_mat(rows)
    L = E.lattice
    if ex * ex != ex or ex * L.X != L.X * ex or ex * L.Y != L.Y * ex:
        return None
    return ex


# ----------------------------------------------------------------- driver


def split_lattice(
    L: Lattice,
    candidates: Optional[Sequence[Lattice]] = None,
    rng: Optional[random.Random] = None,
    samples: int = 32,
    precision: int = 20,
    precision_max: int = 60,
) -> SplitCertificate:
    """Decompose L into summands whose endomorphism rings are certified local.

    Free summands split off through a retraction.  The rest is processed as a
    queue: a candidate summand is split off by a pair of maps with invertible
    composite when possible; otherwise a piece with local End is final, and
    failing that an idempotent is made exact by a rational Fitting
    decomposition or by Newton lifting.
    """
    rng = rng if rng is not None else random.Random(0)
    p = L.p
    summands: List[Lattice] = []
    embeds: List[la.OMatrix] = []
    methods: List[str] = []
    s, iota, K = split_projective(L)
    for i in range(s):
        summands.append(regular(1, p))
        embeds.append(la.columns(iota, list(range(4 * i, 4 * i + 4))))
        methods.append("projective")
    queue: List[Tuple[Lattice, la.OMatrix, str]] = []
    if K.ncols():
        rest = L if s == 0 else sublattice(L, K, L.name)
        queue.append((rest, K, "local"))
    cand_cache: Dict[int, List[Lattice]] = {}
    while queue:
        Q, emb, how = queue.pop(0)
        # candidate splits are cheap next to End of a large piece, so they go first
        pieces = _split_by_candidates(Q, candidates, rng, samples, cand_cache)
        if pieces is None:
            E = end_algebra(Q)
            if E.is_local:
                summands.append(Q)
                embeds.append(emb)
                methods.append(how)
                continue
            pieces = _split_by_idempotent(E, rng, precision, precision_max)
        if pieces is None:
            raise SplitFailed(
                f"could not split {Q.name or 'lattice'} of rank {Q.rank}",
                precision_max,
                E.semisimple_dim,
            )
        for X, f, tag in pieces:
            if tag != "candidate":
                X, B = integral_form(X)
                f = f * B
            queue.append((X, emb * f, tag))
    W = la.hstack(embeds) if embeds else la.zeros(L.rank, 0)
    maps = []
    for S, m in zip(summands, embeds):
        maps.append(LatticeMap(S, L, m))
    cert = SplitCertificate(L, summands, maps, W, methods)
    if not cert.verify():
        raise SplitFailed("assembled decomposition failed exact verification")
    return cert


def _split_by_candidates(Q, candidates, rng, samples, cache):
    pool = list(candidates) if candidates is not None else []
    pool += default_candidates(Q)
    dq = decompose(Q.reduction)
    for X in pool:
        if X.rank >= Q.rank or X.p != Q.p:
            continue
        if not _contained(decompose(X.reduction), dq):
            continue
        res = split_off(X, Q, rng, samples)
        if res is None:
            continue
        f, K = res
        rest = sublattice(Q, K, "")
        return [(X, f, "candidate"), (rest, K, "complement")]
    return None


def _reduce_poly(f: flint.fmpq_poly, p: int) -> flint.nmod_poly:
    return flint.nmod_poly([la.reduce_scalar(c, p) for c in f.coeffs()], p)


def _poly_at(f: flint.fmpq_poly, a: la.OMatrix) -> la.OMatrix:
    n = a.nrows()
    out = la.zeros(n, n)
    for c in reversed(f.coeffs()):
        out = out * a + la.identity(n) * c
    return out


def rational_fitting(a: la.OMatrix, p: int) -> Optional[la.OMatrix]:
    """Exact idempotent polynomial in a separating its mod-p eigenvalue clusters.

    The rational characteristic polynomial is factored; factors whose
    reductions share an irreducible factor mod p are grouped.  With two or
    more groups, F = first group and G = the rest are coprime mod p, so the
    Bezout identity sF + tG = 1 has p-integral coefficients and t(a)G(a) is
    the projection onto ker F(a).
    """
    chi = a.charpoly()
    _, facs = chi.factor()
    if len(facs) < 2:
        return None
    keys = []
    for f, _ in facs:
        _, mf = _reduce_poly(f, p).factor()
        keys.append({tuple(int(c) for c in g.coeffs()) for g, _ in mf})
    group = [0]
    reach = set(keys[0])
    changed = True
    while changed:
        changed = False
        for i in range(1, len(facs)):
            if i not in group and keys[i] & reach:
                group.append(i)
                reach |= keys[i]
                changed = True
    if len(group) == len(facs):
        return None
    F = flint.fmpq_poly([1])
    G = flint.fmpq_poly([1])
    for i, (f, e) in enumerate(facs):
        if i in group:
            F = F * f ** e
        else:
            G = G * f ** e
    g, s_, t = F.xgcd(G)
    e_mat = _poly_at(t * G, a)
    if e_mat * e_mat != e_mat or not la.is_local_matrix(e_mat, p):
        return None
    return e_mat


def _split_by_fitting(E: EndAlgebra, rng: random.Random, tries: int = 48):
    """Exact idempotents from rational Fitting decompositions of sparse elements."""
    Q = E.lattice
    d, p = E.dim, E.p
    trials: List[List[int]] = [[1 if j == k else 0 for j in range(d)] for k in range(d)]
    for _ in range(tries):
        c = [0] * d
        for k in rng.sample(range(d), min(d, 2)):
            c[k] = rng.randrange(1, p + 2)
        trials.append(c)
    for c in trials:
        a = E.combination(c)
        e = rational_fitting(a, p)
        if e is None:
            continue
        B1 = la.kernel_saturated(la.identity(Q.rank) - e, p)
        B2 = la.kernel_saturated(e, p)
        if B1.ncols() == 0 or B2.ncols() == 0:
            continue
        return [
            (sublattice(Q, B1, ""), B1, "idempotent"),
            (sublattice(Q, B2, ""), B2, "idempotent"),
        ]
    return None


def _split_by_idempotent(E: EndAlgebra, rng, precision, precision_max):
    found = _split_by_fitting(E, rng)
    if found is not None:
        return found
    e_bar = reduced_idempotent(E, rng)
    if e_bar is None:
        return None
    N = precision
    Q = E.lattice
    while N <= precision_max:
        e = lift_idempotent(E, e_bar, N)
        if e is not None:
            B1 = la.kernel_saturated(la.identity(Q.rank) - e, Q.p)
            B2 = la.kernel_saturated(e, Q.p)
            return [
                (sublattice(Q, B1, ""), B1, "idempotent"),
                (sublattice(Q, B2, ""), B2, "idempotent"),
            ]
        N *= 2
    return None
