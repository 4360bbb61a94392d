"""Exact matrices over Z_(p), F_p and Q.

O-matrices are :class:`flint.fmpq_mat` with every denominator prime to p;
F_p-matrices are :class:`flint.nmod_mat`.  Kernels are read off a rational
reduced echelon form and then p-saturated; :func:`smith_local` is a plain
Fraction implementation kept for small inputs and as an independent check.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import flint
import numpy as np

from .dvr import NotLocal, as_fraction, reduce, valuation

OMatrix = flint.fmpq_mat
KMatrix = flint.nmod_mat


class NoSolution(ValueError):
    """The right-hand side is not in the O-span of the columns."""


# ---------------------------------------------------------------- building


def omat(rows: Sequence[Sequence], ncols: Optional[int] = None) -> OMatrix:
    """O-matrix from nested rows of ints, Fractions or "a/b" strings."""
    rows = [list(r) for r in rows]
    if not rows:
        return flint.fmpq_mat(0, ncols or 0)
    entries = []
    for r in rows:
        for x in r:
            f = as_fraction(x)
            entries.append(flint.fmpq(f.numerator, f.denominator))
    return flint.fmpq_mat(len(rows), len(rows[0]), entries)


def zeros(r: int, c: int) -> OMatrix:
    return flint.fmpq_mat(r, c)


def identity(n: int) -> OMatrix:
    m = flint.fmpq_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def kmat(rows: Sequence[Sequence[int]], p: int, ncols: Optional[int] = None) -> KMatrix:
    rows = [list(r) for r in rows]
    if not rows:
        return flint.nmod_mat(0, ncols or 0, p)
    return flint.nmod_mat(len(rows), len(rows[0]), [int(x) % p for r in rows for x in r], p)


def kzeros(r: int, c: int, p: int) -> KMatrix:
    return flint.nmod_mat(r, c, p)


def kidentity(n: int, p: int) -> KMatrix:
    m = flint.nmod_mat(n, n, p)
    for i in range(n):
        m[i, i] = 1
    return m


def to_fractions(M) -> List[List[Fraction]]:
    return [[as_fraction(x) for x in row] for row in M.tolist()]


def block_diag(mats: Sequence[OMatrix]) -> OMatrix:
    n = sum(m.nrows() for m in mats)
    c = sum(m.ncols() for m in mats)
    out = flint.fmpq_mat(n, c)
    r0 = c0 = 0
    for m in mats:
        for i in range(m.nrows()):
            for j in range(m.ncols()):
                x = m[i, j]
                if x:
                    out[r0 + i, c0 + j] = x
        r0 += m.nrows()
        c0 += m.ncols()
    return out


def hstack(mats: Sequence[OMatrix]) -> OMatrix:
    n = mats[0].nrows()
    c = sum(m.ncols() for m in mats)
    out = flint.fmpq_mat(n, c)
    c0 = 0
    for m in mats:
        for i in range(n):
            for j in range(m.ncols()):
                x = m[i, j]
                if x:
                    out[i, c0 + j] = x
        c0 += m.ncols()
    return out


def vstack(mats: Sequence[OMatrix]) -> OMatrix:
    return hstack([m.transpose() for m in mats]).transpose()


def columns(M: OMatrix, idx: Sequence[int]) -> OMatrix:
    out = flint.fmpq_mat(M.nrows(), len(idx))
    for k, j in enumerate(idx):
        for i in range(M.nrows()):
            x = M[i, j]
            if x:
                out[i, k] = x
    return out


def rows_of(M: OMatrix, idx: Sequence[int]) -> OMatrix:
    return columns(M.transpose(), idx).transpose()


def is_zero(M) -> bool:
    return all(x == 0 for x in M.entries())


# ----------------------------------------------------------- local checks


def is_local_matrix(M: OMatrix, p: int) -> bool:
    _, d = M.numer_denom()
    return int(d) % p != 0


def mat_valuation(M: OMatrix, p: int):
    """Minimum valuation over the entries (inf for the zero matrix)."""
    return min((valuation(x, p) for x in M.entries()), default=float("inf"))


def reduce_matrix(M: OMatrix, p: int) -> KMatrix:
    """Entrywise residue map O -> F_p."""
    num, den = M.numer_denom()
    den = int(den)
    if den % p == 0:
        raise NotLocal("matrix has p in a denominator")
    R = flint.nmod_mat(num, p)
    if den % p != 1:
        R = R * pow(den, -1, p)
    return R


def reduce_scalar(x, p: int) -> int:
    """Residue of a local rational (fmpq, Fraction or int) in [0, p)."""
    return reduce(as_fraction(x), p)


def lift_k(M: KMatrix) -> OMatrix:
    """Lift with entries in [0, p)."""
    return flint.fmpq_mat(M.nrows(), M.ncols(), [int(x) for x in M.entries()])


def to_numpy_k(M: KMatrix) -> np.ndarray:
    return np.array([int(x) for x in M.entries()], dtype=np.int64).reshape(M.nrows(), M.ncols())


def from_numpy_k(a: np.ndarray, p: int) -> KMatrix:
    a = np.asarray(a)
    r, c = a.shape
    return flint.nmod_mat(r, c, (a % p).astype(np.int64).ravel().tolist(), p)


def integral_rows(M: OMatrix) -> flint.fmpz_mat:
    """Integer matrix with the same row and column spaces over Q."""
    num, _ = M.numer_denom()
    return num


def integral_columns(M: OMatrix, p: int) -> flint.fmpz_mat:
    return integral_rows(M)


# ---------------------------------------------------------------- over F_p


def rank_k(M: KMatrix) -> int:
    return M.rank()


def kernel_k(M: KMatrix) -> KMatrix:
    """Columns spanning the null space of M over F_p."""
    p = int(M.modulus())
    if M.ncols() == 0:
        return flint.nmod_mat(0, 0, p)
    if M.nrows() == 0:
        return kidentity(M.ncols(), p)
    X, nul = M.nullspace()
    out = flint.nmod_mat(M.ncols(), nul, p)
    for i in range(M.ncols()):
        for j in range(nul):
            out[i, j] = X[i, j]
    return out


def pivot_rows_k(M: KMatrix) -> List[int]:
    """Greedy lexicographically-first rows forming a basis of the row space."""
    if M.nrows() == 0 or M.ncols() == 0:
        return []
    R, rk = M.transpose().rref()
    piv = []
    c = 0
    for i in range(rk):
        while R[i, c] == 0:
            c += 1
        piv.append(c)
    return piv


def complement_k(M: KMatrix) -> List[int]:
    """Indices of standard basis vectors completing the column space of M."""
    n = M.nrows()
    p = int(M.modulus())
    aug = flint.nmod_mat(n, M.ncols() + n, p)
    for i in range(n):
        for j in range(M.ncols()):
            aug[i, j] = M[i, j]
        aug[i, M.ncols() + i] = 1
    R, rk = aug.rref()
    out, c = [], 0
    for i in range(rk):
        while R[i, c] == 0:
            c += 1
        if c >= M.ncols():
            out.append(c - M.ncols())
    return out


# ------------------------------------------------- batched F_p via numpy


def np_rref(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form over F_p of an integer array; returns nonzero rows."""
    A = np.array(A, dtype=np.int64) % p
    m, n = A.shape
    piv: List[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        f = A[:, c].copy()
        f[r] = 0
        rows = np.flatnonzero(f)
        if rows.size:
            A[rows] = (A[rows] - np.outer(f[rows], A[r])) % p
        piv.append(c)
        r += 1
    return A[:r], piv


def np_kernel(A: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning {x : A x = 0} over F_p."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    R, piv = np_rref(A, p)
    taken = set(piv)
    free = [j for j in range(n) if j not in taken]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for t, j in enumerate(free):
        K[j, t] = 1
        for i, c in enumerate(piv):
            K[c, t] = -R[i, j] % p
    return K


def np_inv(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    R, piv = np_rref(np.hstack([A, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("matrix is singular mod p")
    return R[:, n:]


def np_rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(np_rref(A, p)[1])


# ------------------------------------------------------------------ Smith


def smith_local(M: OMatrix, p: int) -> Tuple[OMatrix, OMatrix, OMatrix]:
    """Smith form over Z_(p): U*M*V = D with D = diag(p^a1, p^a2, ...).

    Pivots are entries of minimal valuation, ties broken by lowest row then
    lowest column.  U and V have unit determinant.
    """
    a = to_fractions(M)
    m, n = M.nrows(), M.ncols()
    U = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    V = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0:
                    v = valuation(a[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        a[t], a[i] = a[i], a[t]
        U[t], U[i] = U[i], U[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        piv = a[t][t]
        # normalise pivot to p^v exactly
        scale = Fraction(p) ** v / piv
        a[t] = [x * scale for x in a[t]]
        U[t] = [x * scale for x in U[t]]
        for i2 in range(t + 1, m):
            f = a[i2][t] / a[t][t]
            if f:
                a[i2] = [x - f * y for x, y in zip(a[i2], a[t])]
                U[i2] = [x - f * y for x, y in zip(U[i2], U[t])]
        for j2 in range(t + 1, n):
            f = a[t][j2] / a[t][t]
            if f:
                for row in a:
                    row[j2] -= f * row[t]
                for row in V:
                    row[j2] -= f * row[t]
    return omat(U, m), omat(a, n), omat(V, n)


# --------------------------------------------------- local spans mod p^N


def span_basis_local(G: Sequence[Sequence[int]], p: int) -> Optional[List[List[int]]]:
    """Integer O-basis (columns) of the O-span of the integer columns of G.

    Column echelon with minimal-valuation pivots modulo p^N, N as large as
    int64 products allow.  The lift is exact when the span has full rank and
    its index p^v has v < N, since then p^N O^d lies in the span; otherwise
    None is returned and the caller falls back to a Hermite form.
    """
    N = 1
    while p ** (N + 1) < 2 ** 31:
        N += 1
    q = p**N
    A = np.array([[x % q for x in row] for row in G], dtype=np.int64)
    d, m = A.shape
    if d == 0:
        return []
    rows_left = np.ones(d, dtype=bool)
    cols_left = np.ones(m, dtype=bool)
    basis: List[np.ndarray] = []
    total = 0
    for _ in range(d):
        sub = A[np.ix_(rows_left, cols_left)]
        if not sub.any():
            return None
        found = None
        pv = 1
        for v in range(N):
            hit = np.argwhere(sub % (pv * p) != 0)
            if hit.size:
                found = (v, hit[0])
                break
            pv *= p
        if found is None:
            return None
        v, (a, b) = found
        i = int(np.flatnonzero(rows_left)[a])
        j = int(np.flatnonzero(cols_left)[b])
        unit = int(A[i, j]) // pv
        A[:, j] = A[:, j] * pow(unit, -1, q) % q
        f = A[i] // pv
        f[j] = 0
        f[~cols_left] = 0
        live = np.flatnonzero(f)
        if live.size:
            A[:, live] = (A[:, live] - np.outer(A[:, j], f[live])) % q
        total += v
        basis.append(A[:, j].copy())
        rows_left[i] = False
        cols_left[j] = False
    if total >= N:
        return None
    return [[int(x) for x in col] for col in basis]


# ------------------------------------------------------- saturated kernels


def _fmpz_columns(K: flint.fmpz_mat, idx: Sequence[int]) -> flint.fmpz_mat:
    rows = K.tolist()
    return flint.fmpz_mat([[r[j] for j in idx] for r in rows]) if rows else flint.fmpz_mat(0, len(idx))


def _saturate_integer(K: flint.fmpz_mat, p: int) -> flint.fmpz_mat:
    """Grow an integer column basis to the p-saturation of its Q-span."""
    n, k = K.nrows(), K.ncols()
    if k == 0 or n == 0:
        return K
    while True:
        X, nul = flint.nmod_mat(K, p).nullspace()
        if nul == 0:
            return K
        C = flint.nmod_mat([row[:nul] for row in X.tolist()], p)
        R, rk = C.transpose().rref()
        Rl = [[int(x) for x in row] for row in R.tolist()[:rk]]
        pivs = [next(c for c, x in enumerate(row) if x) for row in Rl]
        # pivot column c becomes K * row / p, which is integral
        U = (K * flint.fmpz_mat(Rl).transpose()) / p
        for j, c in enumerate(pivs):
            for i in range(n):
                K[i, c] = U[i, j]


def saturate(K: OMatrix, p: int) -> OMatrix:
    """O-basis of (Q-span of the columns of K) intersected with O^n.

    Columns of K must be linearly independent over Q.
    """
    if K.ncols() == 0:
        return K
    Kz = integral_columns(K, p)
    # strip common p-power content from each column so the loop starts small
    return flint.fmpq_mat(_saturate_integer(Kz, p))


def echelon_columns(K: OMatrix, p: int) -> Tuple[OMatrix, List[int]]:
    """Canonical O-basis K * K[piv]^-1 of a saturated column lattice.

    piv are the lexicographically first rows whose residues are independent;
    the result is the identity on those rows.
    """
    if K.ncols() == 0:
        return K, []
    piv = pivot_rows_k(reduce_matrix(K, p))
    if len(piv) != K.ncols():
        raise ValueError("columns are not saturated")
    S = rows_of(K, piv)
    return K * S.inv(), piv


def _rref_kernel(M: OMatrix) -> flint.fmpz_mat:
    """Integer kernel basis read off the reduced echelon form, one column per free variable.

    Entries stay far smaller than those of a fraction-free null space.
    """
    n = M.ncols()
    R, rk = M.rref()
    rows = R.tolist()[:rk]
    piv = [next(j for j, x in enumerate(row) if x) for row in rows]
    free = [j for j in range(n) if j not in set(piv)]
    cols = []
    for f in free:
        col = [flint.fmpq(0)] * n
        col[f] = flint.fmpq(1)
        for row, c in zip(rows, piv):
            col[c] = -row[f]
        den = 1
        for x in col:
            den = math.lcm(den, int(x.q))
        cols.append([int(x * den) for x in col])
    if not cols:
        return flint.fmpz_mat(n, 0)
    return flint.fmpz_mat(cols).transpose()


def kernel_saturated(M: OMatrix, p: int, echelon: bool = True) -> OMatrix:
    """O-basis of {x : M x = 0}, saturated, in canonical echelon form."""
    n = M.ncols()
    if n == 0:
        return flint.fmpq_mat(0, 0)
    if M.nrows() == 0 or is_zero(M):
        return identity(n)
    K = _rref_kernel(M)
    if K.ncols() == 0:
        return flint.fmpq_mat(n, 0)
    K = flint.fmpq_mat(_saturate_integer(K, p))
    if echelon:
        K, _ = echelon_columns(K, p)
    return K


def solve(M: OMatrix, b: OMatrix, p: int) -> OMatrix:
    """Some x over O with M x = b (b a column); NoSolution otherwise."""
    n = M.ncols()
    aug = hstack([M, -b])
    K = kernel_saturated(aug, p)
    for j in range(K.ncols()):
        t = K[n, j]
        if t != 0 and valuation(t, p) == 0:
            col = columns(K, [j])
            x = rows_of(col, list(range(n))) * (1 / t)
            return x
    raise NoSolution("right-hand side not in the O-span")


def right_inverse(M: OMatrix, p: int) -> OMatrix:
    """R over O with M R = I, for M whose residue has full row rank."""
    r, m = M.nrows(), M.ncols()
    cols = pivot_rows_k(reduce_matrix(M, p).transpose())
    if len(cols) != r:
        raise NoSolution("matrix is not surjective over O")
    S = columns(M, cols).inv()
    R = flint.fmpq_mat(m, r)
    for k, c in enumerate(cols):
        for j in range(r):
            x = S[k, j]
            if x:
                R[c, j] = x
    return R


def is_unit_det(M: OMatrix, p: int) -> bool:
    if M.nrows() != M.ncols():
        return False
    if M.nrows() == 0:
        return True
    d = M.det()
    return d != 0 and valuation(d, p) == 0


def rank_q(M: OMatrix) -> int:
    return M.rank()
