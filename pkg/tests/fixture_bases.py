"""Hand-written bases of Z_n and of the kernels of their covers.

Vectors live in A^g with coordinates (e_l, Xe_l, Ye_l, XYe_l) per block.
A term is written like ``eps*Xe2`` or ``-Ye3``; ``eps`` is the uniformizer.
"""

from __future__ import annotations

import re
from typing import Dict, List, Sequence

from kronord import linalg as la
from kronord.order import Lattice, regular

MONO = {"": 0, "X": 1, "Y": 2, "XY": 3}
TERM = re.compile(r"([+-]?)\s*(eps\*)?(XY|X|Y|)e(\d+)")


def vec(text: str, g: int, p: int) -> List[int]:
    v = [0] * (4 * g)
    pos = 0
    text = text.replace(" ", "")
    while pos < len(text):
        m = TERM.match(text, pos)
        if m is None:
            raise ValueError(f"bad term in {text!r} at {pos}")
        sign = -1 if m.group(1) == "-" else 1
        c = sign * (p if m.group(2) else 1)
        l = int(m.group(4))
        if not 1 <= l <= g:
            raise ValueError(f"e{l} outside A^{g}")
        v[4 * (l - 1) + MONO[m.group(3)]] += c
        pos = m.end()
    return v


def basis(terms: Sequence[str], g: int, p: int) -> la.OMatrix:
    cols = [vec(t, g, p) for t in terms]
    return la.omat([[c[i] for c in cols] for i in range(4 * g)], len(cols))


def lattice_on(terms: Sequence[str], g: int, p: int, name: str = "") -> Lattice:
    """Lattice with the given basis, actions read off in that basis (no reordering)."""
    B = basis(terms, g, p)
    A = regular(g, p)
    left = (B.transpose() * B).inv() * B.transpose()
    X, Y = left * A.X * B, left * A.Y * B
    if B * X != A.X * B or B * Y != A.Y * B:
        raise ValueError("span is not A-stable")
    return Lattice(X, Y, p, name)


# -------------------------------------------------------------- Z_n bases


def bases_pos(n: int) -> List[str]:
    """The basis B_n of Z_n inside A^n (n >= 1), or of Z_0 inside A."""
    if n == 0:
        return ["eps*e1", "Xe1", "Ye1", "XYe1"]
    out = []
    for k in range(1, n):
        out += [f"eps*e{k}", f"eps*Xe{k}", f"Ye{k}-Xe{k + 1}", f"XYe{k}"]
    out += [f"eps*e{n}", f"eps*Xe{n}", f"eps*Ye{n}", f"XYe{n}"]
    return out


def bases_neg_first(n: int) -> List[str]:
    """B^1_(-1) inside A^2, the basis matched vector by vector with the kernel for Z_0."""
    if n != -1:
        raise ValueError("only the case n = -1 is used")
    return ["eps*e1", "eps*Xe1", "Ye1", "XYe1", "eps*e2", "Xe2", "Ye2-Xe1", "XYe2"]


def bases_neg_second(n: int) -> List[str]:
    """B^2_n for n < 0, inside A^(|n|+1)."""
    m = -n
    out = ["eps*e1", "Xe1-Ye2", "Ye1", "XYe1"]
    for k in range(2, m + 1):
        out += [f"eps*e{k}", f"Xe{k}-Ye{k + 1}", f"eps*Ye{k}", f"XYe{k}"]
    out += [f"eps*e{m + 1}", f"Xe{m + 1}", f"eps*Ye{m + 1}", f"XYe{m + 1}"]
    return out


def bases_inf(n: int) -> List[str]:
    """Basis of the Heller lattice of Binf:n inside A^n (n >= 1)."""
    out = []
    for k in range(1, n):
        x = "Xe1" if k == 1 else f"eps*Xe{k}"
        out += [f"eps*e{k}", x, f"Ye{k}-Xe{k + 1}", f"XYe{k}"]
    x = "Xe1" if n == 1 else f"eps*Xe{n}"
    out += [f"eps*e{n}", x, f"eps*Ye{n}", f"XYe{n}"]
    return out


def z_rank(n: int) -> int:
    return 4 * max(n, 1) if n >= 0 else 4 * (-n + 1)


def z_generators(n: int) -> int:
    return max(n, 1) if n >= 0 else -n + 1


# ------------------------------------------------- covers and their kernels


def cover_images(n: int) -> List[str]:
    """Images of the free generators e_1, e_2, ... under the cover of Z_n."""
    if n == 1:
        return ["eps*e1", "XYe1"]
    if n > 1:
        out: Dict[int, str] = {}
        for k in range(1, n):
            out[2 * k - 1] = f"eps*e{k}"
            out[2 * k] = f"Ye{k}-Xe{k + 1}"
        out[2 * n - 1] = f"-eps*e{n}"
        return [out[i] for i in range(1, 2 * n)]
    if n == 0:
        return ["eps*e1", "Xe1", "Ye1"]
    m = -n
    out = {}
    for k in range(1, m + 2):
        out[2 * k - 1] = f"eps*e{k}"
    out[2] = "Ye1"
    for k in range(2, m + 1):
        out[2 * k] = f"Ye{k}-Xe{k - 1}"
    out[2 * m + 2] = f"Xe{m + 1}"
    out[2 * m + 3] = f"Ye{m + 1}-Xe{m}"
    return [out[i] for i in range(1, 2 * m + 4)]


def kernel_terms(n: int) -> List[str]:
    """Ordered O-basis of the kernel of the cover of Z_n."""
    if n == 1:
        return ["-XYe1+eps*e2", "Xe2", "Ye2", "XYe2"]
    if n > 1:
        out = []
        for k in range(1, n - 1):
            out += [
                f"Ye{2 * k - 1}-Xe{2 * k + 1}-eps*e{2 * k}",
                f"XYe{2 * k - 1}-eps*Xe{2 * k}",
                f"-Xe{2 * k + 2}-Ye{2 * k}",
                f"-XYe{2 * k}",
            ]
        out += [
            f"Ye{2 * n - 3}+Xe{2 * n - 1}-eps*e{2 * n - 2}",
            f"XYe{2 * n - 3}-eps*Xe{2 * n - 2}",
            f"XYe{2 * n - 1}-eps*Ye{2 * n - 2}",
            f"-XYe{2 * n - 2}",
        ]
        return out
    if n == 0:
        return [
            "-Ye1+eps*e3", "-XYe1+eps*Xe3", "Ye3", "XYe3",
            "-Xe1+eps*e2", "Xe2", "Ye2-Xe3", "XYe2",
        ]
    if n == -1:
        return [
            "eps*e2-Ye1", "Xe2+Ye5", "Ye2", "XYe2",
            "Ye3-Xe1-eps*e5", "-Ye4+Xe5", "XYe1+eps*Ye5", "XYe5",
            "Xe3-eps*e4", "Xe4", "XYe3-eps*Ye4", "XYe4",
        ]
    m = -n
    out = ["Ye1-eps*e2", "Ye4+Xe2", "Ye2", "XYe2"]
    for k in range(1, m):
        out += [
            f"Ye{2 * k + 1}-Xe{2 * k - 1}-eps*e{2 * k + 2}",
            f"Ye{2 * k + 4}+Xe{2 * k + 2}" if k < m - 1 else f"Ye{2 * m + 3}+Xe{2 * m}",
            f"XYe{2 * k - 1}+eps*Ye{2 * k + 2}",
            f"XYe{2 * k + 2}",
        ]
    out += [
        f"Ye{2 * m + 1}-Xe{2 * m - 1}-eps*e{2 * m + 3}",
        f"-Ye{2 * m + 2}+Xe{2 * m + 3}",
        f"XYe{2 * m - 1}+eps*Ye{2 * m + 3}",
        f"XYe{2 * m + 3}",
        f"Xe{2 * m + 1}-eps*e{2 * m + 2}",
        f"Xe{2 * m + 2}",
        f"XYe{2 * m + 1}-eps*Ye{2 * m + 2}",
        f"XYe{2 * m + 2}",
    ]
    return out


def sign_change(n: int, printed: bool = False) -> la.OMatrix:
    """Diagonal base change taking the kernel basis to the basis of Z_(n-1).

    For n = -1 the printed matrix is diag(E_4, P, P) with P = diag(-1, 1, -1, 1);
    the one that intertwines is diag(-E_4, A, P) with A = diag(-1, 1, 1, 1).
    """
    if n == 1 or n == 0:
        d = [1] * (4 if n == 1 else 8)
    elif n > 1:
        d = []
        for k in range(n - 1):
            d += [(-1) ** (k + 1)] * 4
    elif n == -1 and printed:
        d = [1, 1, 1, 1] + [-1, 1, -1, 1] * 2
    elif n == -1:
        d = [-1, -1, -1, -1] + [-1, 1, 1, 1] + [-1, 1, -1, 1]
    else:
        m = -n
        d = []
        for k in range(m + 1):
            d += [(-1) ** k * s for s in (-1, 1, 1, 1)]
        d += [(-1) ** m * s for s in (-1, 1, -1, 1)]
    M = la.zeros(len(d), len(d))
    for i, s in enumerate(d):
        M[i, i] = s
    return M


def target_terms(n: int) -> List[str]:
    """Basis of Z_(n-1) matching the kernel basis after the sign change."""
    if n >= 1:
        return bases_pos(n - 1)
    if n == 0:
        return bases_neg_first(-1)
    return bases_neg_second(n - 1)


def cover_generators(n: int) -> int:
    return len(cover_images(n))


