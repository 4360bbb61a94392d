"""Isomorphism tests between lattices with exact witnesses."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .. import linalg as la
from ..modk import decompose
from ..order import HomSpace, Lattice, LatticeMap
from .endo import EndAlgebra, end_algebra
from .split import _reduced_mats


class Inconclusive(RuntimeError):
    """Invariants agree but neither a witness nor a certificate of difference was found."""


@dataclass
class IsoResult:
    iso: bool
    witness: Optional[LatticeMap] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.iso


def invariants(L: Lattice) -> Tuple:
    """Rank, residue ranks of X, Y, X + Y, XY and the reduced decomposition."""
    R = L.reduction
    p = L.p
    ranks = tuple(int(M.rank()) for M in (R.X, R.Y, R.X + R.Y, R.X * R.Y)) if L.rank else (0, 0, 0, 0)
    sig = decompose(R).signature() if L.rank else ()
    return (L.rank,) + ranks + (sig,)


def _witness(H: HomSpace, coeffs) -> Optional[LatticeMap]:
    f = H.combination(list(coeffs))
    if not la.is_unit_det(f.mat, H.p):
        return None
    f.check()
    return f


def iso_test(
    L1: Lattice,
    L2: Lattice,
    rng: Optional[random.Random] = None,
    samples: int = 32,
    end1: Optional[EndAlgebra] = None,
) -> IsoResult:
    """Decide L1 ~ L2 with a unit-determinant witness or a certificate.

    After the invariant gate, random F_p combinations of Hom(L1, L2) are
    tried.  If none is invertible and End(L1) is certified local, the
    residue character chi(g f) over basis pairs decides: a nonzero value
    makes f an isomorphism (equal ranks), all zeros rule one out.
    """
    if L1.p != L2.p:
        raise ValueError("lattices over different primes")
    if invariants(L1) != invariants(L2):
        return IsoResult(False, None, "invariants")
    p = L1.p
    if L1.rank == 0:
        return IsoResult(True, LatticeMap(L1, L2, la.zeros(0, 0)), "zero")
    rng = rng if rng is not None else random.Random(0)
    H = HomSpace(L1, L2)
    if H.dim == 0:
        return IsoResult(False, None, "no maps")
    F = _reduced_mats(H)
    r = L1.rank
    for _ in range(samples):
        c = np.array([rng.randrange(p) for _ in range(H.dim)], dtype=np.int64)
        fb = np.tensordot(c, F, axes=1) % p
        if la.np_rank(fb, p) == r:
            w = _witness(H, [int(x) for x in c])
            if w is not None:
                return IsoResult(True, w, "witness")
    E = end1 if end1 is not None else end_algebra(L1)
    cert = E.local
    if cert is None:
        raise Inconclusive(
            f"no invertible map among {samples} samples and End({L1.name or 'L1'}) is not local"
        )
    H2 = HomSpace(L2, L1)
    if H2.dim == 0:
        return IsoResult(False, None, "no maps back")
    G = _reduced_mats(H2)
    left = np.einsum("a,jab->jb", cert.ell, G) % p
    right = np.einsum("iba,a->ib", F, cert.vec) % p
    gram = left @ right.T % p
    hits = np.argwhere(gram)
    if hits.size == 0:
        return IsoResult(False, None, "character")
    j, i = (int(x) for x in hits[0])
    coeffs = [1 if k == i else 0 for k in range(H.dim)]
    w = _witness(H, coeffs)
    if w is None:
        raise Inconclusive("character is nonzero but the lifted map is not invertible")
    return IsoResult(True, w, "character")
