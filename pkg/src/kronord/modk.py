"""Modules over A (x) F_p = F_p[X, Y]/(X^2, Y^2).

Indecomposables are the projective module, the horizontal strings M(m), the
vertical strings M(-n) and the bands M(lam)_n, M(inf)_n.  Decomposition first
splits off free summands and then reads the remaining Kronecker pencil
(top -> radical) through rank sequences.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import flint

from .linalg import (
    KMatrix,
    complement_k,
    kernel_k,
    kidentity,
    kzeros,
    pivot_rows_k,
)


class IrreducibleOverPrimeField(ValueError):
    """The regular part of the pencil has eigenvalues outside P^1(F_p)."""

    def __init__(self, message: str, factor=None):
        super().__init__(message)
        self.factor = factor


class LabelError(ValueError):
    pass


# ------------------------------------------------------------------ labels

KINDS = ("P", "H", "V", "B", "Binf")


@dataclass(frozen=True, order=True)
class SummandLabel:
    """Tag of an indecomposable A(x)F_p-module.

    kind is one of P, H (horizontal M(m), m >= 0), V (vertical M(-n), n >= 1),
    B (band M(lam)_n) and Binf (band M(inf)_n).
    """

    kind: str
    n: int = 0
    lam: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LabelError(f"unknown label kind {self.kind!r}")
        if self.kind == "P" and self.n != 0:
            raise LabelError("P carries no parameter")
        if self.kind == "H" and self.n < 0:
            raise LabelError("H:m needs m >= 0")
        if self.kind in ("V", "B", "Binf") and self.n < 1:
            raise LabelError(f"{self.kind} needs a parameter >= 1")
        if (self.kind == "B") != (self.lam is not None):
            raise LabelError("only bands B carry an eigenvalue")

    @property
    def dim(self) -> int:
        if self.kind == "P":
            return 4
        if self.kind in ("H", "V"):
            return 2 * self.n + 1
        return 2 * self.n

    @property
    def top_dim(self) -> int:
        return {"P": 1, "H": max(self.n, 1), "V": self.n + 1, "B": self.n, "Binf": self.n}[self.kind]

    @property
    def is_projective(self) -> bool:
        return self.kind == "P"

    def __str__(self) -> str:
        if self.kind == "P":
            return "P"
        if self.kind == "B":
            return f"B:{self.lam}:{self.n}"
        return f"{self.kind}:{self.n}"


def Proj() -> SummandLabel:
    return SummandLabel("P")


def Horizontal(m: int) -> SummandLabel:
    return SummandLabel("H", m)


def Vertical(n: int) -> SummandLabel:
    return SummandLabel("V", n)


def Band(lam: int, n: int) -> SummandLabel:
    return SummandLabel("B", n, lam)


def BandInf(n: int) -> SummandLabel:
    return SummandLabel("Binf", n)


Simple = Horizontal(0)


def parse_label(text: str, p: Optional[int] = None) -> SummandLabel:
    """Parse "P", "H:m", "V:n", "B:lam:n" or "Binf:n"."""
    parts = text.strip().split(":")
    try:
        kind = parts[0]
        if kind == "P" and len(parts) == 1:
            return Proj()
        if kind in ("H", "V", "Binf") and len(parts) == 2:
            return SummandLabel(kind, int(parts[1]))
        if kind == "B" and len(parts) == 3:
            lam = int(parts[1])
            if p is not None:
                lam %= p
            return Band(lam, int(parts[2]))
    except ValueError as exc:
        raise LabelError(f"cannot parse label {text!r}: {exc}") from None
    raise LabelError(f"cannot parse label {text!r}")


# ------------------------------------------------------------------ modules


@dataclass(eq=False)
class ModK:
    """A(x)F_p-module given by two commuting square-zero matrices."""

    X: KMatrix
    Y: KMatrix

    @property
    def p(self) -> int:
        return int(self.X.modulus())

    @property
    def dim(self) -> int:
        return self.X.nrows()

    def check(self) -> None:
        n = self.dim
        z = kzeros(n, n, self.p)
        if self.X * self.X != z or self.Y * self.Y != z or self.X * self.Y != self.Y * self.X:
            raise ValueError("actions must commute and square to zero")

    def conjugate(self, g: KMatrix) -> "ModK":
        """Module in the basis given by the columns of g."""
        gi = g.inv()
        return ModK(gi * self.X * g, gi * self.Y * g)

    def to_json(self) -> dict:
        return {"dim": self.dim, "actX": _rows(self.X), "actY": _rows(self.Y)}

    @staticmethod
    def from_json(data: dict, p: int) -> "ModK":
        d = int(data["dim"])
        X = _kmat(data["actX"], d, p)
        Y = _kmat(data["actY"], d, p)
        M = ModK(X, Y)
        M.check()
        return M


def _rows(M: KMatrix) -> List[List[int]]:
    return [[int(x) for x in row] for row in M.tolist()]


def _kmat(rows, d: int, p: int) -> KMatrix:
    if d == 0:
        return flint.nmod_mat(0, 0, p)
    return flint.nmod_mat(d, d, [int(x) % p for r in rows for x in r], p)


def direct_sum_k(mods: Sequence[ModK], p: int) -> ModK:
    n = sum(m.dim for m in mods)
    X = kzeros(n, n, p)
    Y = kzeros(n, n, p)
    o = 0
    for m in mods:
        for i in range(m.dim):
            for j in range(m.dim):
                X[o + i, o + j] = m.X[i, j]
                Y[o + i, o + j] = m.Y[i, j]
        o += m.dim
    return ModK(X, Y)


def string_module(label: SummandLabel, p: int) -> ModK:
    """Canonical-basis module for a label: top vectors u first, then v."""
    n = label.dim
    X = kzeros(n, n, p)
    Y = kzeros(n, n, p)
    k = label.n
    if label.kind == "P":
        X[1, 0] = 1
        X[3, 2] = 1
        Y[2, 0] = 1
        Y[3, 1] = 1
    elif label.kind == "H":
        # u_1..u_m -> 0..m-1, v_0..v_m -> m..2m
        for i in range(1, k + 1):
            X[k + i - 1, i - 1] = 1
            Y[k + i, i - 1] = 1
    elif label.kind == "V":
        # u_1..u_{n+1} -> 0..n, v_1..v_n -> n+1..2n
        for i in range(1, k + 1):
            X[k + i, i - 1] = 1
            Y[k + i, i] = 1
    elif label.kind == "B":
        # u_1..u_n -> 0..n-1, v_1..v_n -> n..2n-1
        for i in range(1, k + 1):
            X[k + i - 1, i - 1] = 1
            Y[k + i - 1, i - 1] = label.lam % p
            if i >= 2:
                Y[k + i - 2, i - 1] = 1
    else:
        for i in range(1, k + 1):
            if i >= 2:
                X[k + i - 2, i - 1] = 1
            Y[k + i - 1, i - 1] = 1
    return ModK(X, Y)


# ----------------------------------------------------------- decomposition


class Decomposition(Counter):
    """Multiset of summand labels."""

    def total_dim(self) -> int:
        return sum(lab.dim * k for lab, k in self.items())

    def nonprojective_count(self) -> int:
        return sum(k for lab, k in self.items() if not lab.is_projective)

    def sorted_items(self) -> List[Tuple[SummandLabel, int]]:
        return sorted(((lab, k) for lab, k in self.items() if k), key=lambda t: _label_key(t[0]))

    def to_json(self) -> List[dict]:
        out = []
        for lab, k in self.sorted_items():
            entry = {"label": lab.kind, "param": lab.n, "mult": k}
            if lab.kind == "P":
                entry["param"] = None
            if lab.kind == "B":
                entry["lambda"] = lab.lam
            out.append(entry)
        return out

    @staticmethod
    def from_json(data: Iterable[dict]) -> "Decomposition":
        d = Decomposition()
        for e in data:
            kind = e["label"]
            if kind == "P":
                lab = Proj()
            elif kind == "B":
                lab = Band(int(e["lambda"]), int(e["param"]))
            else:
                lab = SummandLabel(kind, int(e["param"]))
            d[lab] += int(e["mult"])
        return d

    def signature(self) -> Tuple:
        return tuple((str(lab), k) for lab, k in self.sorted_items())

    def __str__(self) -> str:
        parts = []
        for lab, k in self.sorted_items():
            parts.append(str(lab) if k == 1 else f"{lab}x{k}")
        return "{" + ", ".join(parts) + "}"


def _label_key(lab: SummandLabel):
    return (KINDS.index(lab.kind), lab.lam if lab.lam is not None else -1, lab.n)


def _block(rows: int, cols: int, p: int) -> KMatrix:
    return flint.nmod_mat(rows, cols, p)


def _put(M: KMatrix, B: KMatrix, r0: int, c0: int) -> None:
    for i in range(B.nrows()):
        for j in range(B.ncols()):
            x = B[i, j]
            if x != 0:
                M[r0 + i, c0 + j] = x


def _restrict(A: KMatrix, C: KMatrix) -> KMatrix:
    """Matrix of A on the invariant subspace spanned by the columns of C."""
    piv = pivot_rows_k(C)
    k = C.ncols()
    p = int(C.modulus())
    S = flint.nmod_mat(k, k, p)
    for a, r in enumerate(piv):
        for j in range(k):
            S[a, j] = C[r, j]
    AC = A * C
    T = flint.nmod_mat(k, k, p)
    for a, r in enumerate(piv):
        for j in range(k):
            T[a, j] = AC[r, j]
    return S.inv() * T


def split_projective_k(M: ModK) -> Tuple[int, ModK]:
    """Multiplicity of the free summand and an A-stable complement."""
    p, n = M.p, M.dim
    XY = M.X * M.Y
    k = XY.rank()
    if k == 0:
        return 0, M
    gens = pivot_rows_k(XY.transpose())
    F = flint.nmod_mat(n, 4 * k, p)
    ops = [kidentity(n, p), M.X, M.Y, XY]
    for i, g in enumerate(gens):
        for t, op in enumerate(ops):
            for r in range(n):
                F[r, 4 * i + t] = op[r, g]
    # functionals lam_i with lam_i(XY u_j) = delta_ij and zero on the rest of F
    Ft = F.transpose()
    cols = pivot_rows_k(Ft.transpose())
    S = flint.nmod_mat(4 * k, 4 * k, p)
    for a, c in enumerate(cols):
        for r in range(4 * k):
            S[r, a] = Ft[r, c]
    G = flint.nmod_mat(4 * k, k, p)
    for i in range(k):
        G[4 * i + 3, i] = 1
    sol = S.inv() * G
    Lam = flint.nmod_mat(k, n, p)
    for a, c in enumerate(cols):
        for i in range(k):
            Lam[i, c] = sol[a, i]
    # kernel of m -> (lam(XYm), lam(Ym), lam(Xm), lam(m))
    E = flint.nmod_mat(4 * k, n, p)
    for t, op in enumerate([XY, M.Y, M.X, kidentity(n, p)]):
        _put(E, Lam * op, t * k, 0)
    C = kernel_k(E)
    if C.ncols() == 0:
        return k, ModK(flint.nmod_mat(0, 0, p), flint.nmod_mat(0, 0, p))
    return k, ModK(_restrict(M.X, C), _restrict(M.Y, C))


def kronecker_pencil(M: ModK) -> Tuple[KMatrix, KMatrix]:
    """The pair X, Y : top -> radical of a module with XY = 0."""
    p, n = M.p, M.dim
    XYs = flint.nmod_mat(n, 2 * n, p)
    _put(XYs, M.X, 0, 0)
    _put(XYs, M.Y, 0, n)
    wcols = pivot_rows_k(XYs.transpose())
    W = flint.nmod_mat(n, len(wcols), p)
    for a, c in enumerate(wcols):
        for r in range(n):
            W[r, a] = XYs[r, c]
    tops = complement_k(W)
    b, a = len(wcols), len(tops)
    if b == 0:
        return flint.nmod_mat(0, a, p), flint.nmod_mat(0, a, p)
    piv = pivot_rows_k(W)
    Wp = flint.nmod_mat(b, b, p)
    for i, r in enumerate(piv):
        for j in range(b):
            Wp[i, j] = W[r, j]
    Wi = Wp.inv()
    alpha = flint.nmod_mat(b, a, p)
    beta = flint.nmod_mat(b, a, p)
    for j, t in enumerate(tops):
        for i, r in enumerate(piv):
            alpha[i, j] = M.X[r, t]
            beta[i, j] = M.Y[r, t]
    return Wi * alpha, Wi * beta


def _chain_matrix(diag: KMatrix, sub: KMatrix, k: int) -> KMatrix:
    """Block lower bidiagonal k x k matrix with diag on the diagonal."""
    b, a = diag.nrows(), diag.ncols()
    p = int(diag.modulus())
    T = flint.nmod_mat(k * b, k * a, p)
    for i in range(k):
        _put(T, diag, i * b, i * a)
        if i:
            _put(T, sub, i * b, (i - 1) * a)
    return T


def _right_kernel_dims(alpha: KMatrix, beta: KMatrix, kmax: int) -> List[int]:
    """dim ker of the (k+2)b x (k+1)a matrix encoding degree-k kernel polynomials."""
    b, a = alpha.nrows(), alpha.ncols()
    p = int(alpha.modulus())
    out = []
    for k in range(kmax + 1):
        T = flint.nmod_mat((k + 2) * b, (k + 1) * a, p)
        for i in range(k + 1):
            _put(T, alpha, i * b, i * a)
            _put(T, beta, (i + 1) * b, i * a)
        out.append((k + 1) * a - T.rank())
    return out


def _minimal_indices(alpha: KMatrix, beta: KMatrix) -> Dict[int, int]:
    """Column minimal indices eps -> multiplicity of the pencil."""
    b, a = alpha.nrows(), alpha.ncols()
    p = int(alpha.modulus())
    if a == 0:
        return {}
    if b == 0:
        return {0: a}
    # a lower bound on the generic rank bounds the number of blocks from above
    best = max((beta - alpha * lam).rank() for lam in range(p))
    best = max(best, alpha.rank())
    upper = a - best
    found: Dict[int, int] = {}
    count = used = 0
    prev_n = 0
    prev_c = 0
    k = 0
    while count < upper and a - used >= k + 1:
        T = flint.nmod_mat((k + 2) * b, (k + 1) * a, p)
        for i in range(k + 1):
            _put(T, alpha, i * b, i * a)
            _put(T, beta, (i + 1) * b, i * a)
        nk = (k + 1) * a - T.rank()
        ck = nk - prev_n
        if ck > prev_c:
            found[k] = ck - prev_c
            count += ck - prev_c
            used += (k + 1) * (ck - prev_c)
        prev_n, prev_c = nk, ck
        k += 1
    return found


def _jordan_sizes(diag: KMatrix, sub: KMatrix, nsing: int, limit: int) -> Dict[int, int]:
    """Jordan block sizes at one eigenvalue; nsing = number of column blocks."""
    sizes: Dict[int, int] = {}
    prev_j = 0
    ge = []
    k = 1
    while True:
        T = _chain_matrix(diag, sub, k)
        jk = T.ncols() - T.rank() - k * nsing
        g = jk - prev_j
        ge.append(g)
        if g == 0 or k > limit:
            break
        prev_j = jk
        k += 1
    ge.append(0)
    for s in range(1, len(ge)):
        c = ge[s - 1] - ge[s]
        if c:
            sizes[s] = c
    return sizes


def decompose(M: ModK) -> Decomposition:
    """Krull-Schmidt decomposition into labelled indecomposables."""
    p = M.p
    out = Decomposition()
    k, rest = split_projective_k(M)
    if k:
        out[Proj()] = k
    if rest.dim == 0:
        return out
    alpha, beta = kronecker_pencil(rest)
    b, a = alpha.nrows(), alpha.ncols()
    cols = _minimal_indices(alpha, beta)
    rows = _minimal_indices(alpha.transpose(), beta.transpose())
    for eps, m in cols.items():
        out[Horizontal(0) if eps == 0 else Vertical(eps)] += m
    for eta, m in rows.items():
        if eta == 0:
            raise ValueError("radical not spanned by the images of X and Y")
        out[Horizontal(eta)] += m
    nsing = sum(cols.values())
    reg = a - sum((e + 1) * m for e, m in cols.items()) - sum(e * m for e, m in rows.items())
    seen = 0
    if reg > 0:
        for lam in range(p):
            P = beta - alpha * lam
            for s, m in _jordan_sizes(P, alpha, nsing, reg).items():
                out[Band(lam, s)] += m
                seen += s * m
        for s, m in _jordan_sizes(alpha, beta, nsing, reg).items():
            out[BandInf(s)] += m
            seen += s * m
    if seen != reg:
        raise IrreducibleOverPrimeField(
            f"regular part of dimension {reg - seen} has no eigenvalue in P^1(F_{p})",
            _regular_factor(alpha, beta, p),
        )
    assert out.total_dim() == M.dim
    return out


def _regular_factor(alpha: KMatrix, beta: KMatrix, p: int):
    """Characteristic polynomial of alpha^-1 beta when alpha is invertible."""
    if alpha.nrows() == alpha.ncols() and alpha.rank() == alpha.nrows():
        cp = (alpha.inv() * beta).charpoly()
        return [str(f) for f, _ in cp.factor()[1] if f.degree() > 1]
    return None


def projective_cover_k(M: ModK) -> Tuple[int, KMatrix]:
    """Number of generators and the cover (A(x)F_p)^g -> M as a dim x 4g matrix."""
    p, n = M.p, M.dim
    XYs = flint.nmod_mat(n, 2 * n, p)
    _put(XYs, M.X, 0, 0)
    _put(XYs, M.Y, 0, n)
    tops = complement_k(XYs)
    g = len(tops)
    C = flint.nmod_mat(n, 4 * g, p)
    XY = M.X * M.Y
    for i, t in enumerate(tops):
        for r in range(n):
            C[r, 4 * i] = 1 if r == t else 0
            C[r, 4 * i + 1] = M.X[r, t]
            C[r, 4 * i + 2] = M.Y[r, t]
            C[r, 4 * i + 3] = XY[r, t]
    return g, C


def mods_isomorphic(M: ModK, N: ModK) -> bool:
    if M.dim != N.dim:
        return False
    return decompose(M) == decompose(N)


def module_of(dec: Dict[SummandLabel, int], p: int) -> ModK:
    mods = []
    for lab, k in sorted(dec.items(), key=lambda t: _label_key(t[0])):
        mods.extend([string_module(lab, p)] * k)
    return direct_sum_k(mods, p)


def random_invertible(n: int, p: int, rng: random.Random) -> KMatrix:
    while True:
        g = flint.nmod_mat(n, n, [rng.randrange(p) for _ in range(n * n)], p)
        if n == 0 or g.det() != 0:
            return g


def shuffled(M: ModK, rng: random.Random) -> ModK:
    return M.conjugate(random_invertible(M.dim, M.p, rng))


def dumps_decomposition(d: Decomposition) -> str:
    return json.dumps(d.to_json())
