"""The twelve acceptance criteria, one summary line each.

Run with ``pytest tests/test_acceptance.py``; the lines appear in the
terminal summary.  Three clauses that contradict direct computation are kept
verbatim as strict xfails: their criterion line reads FAIL.
"""

import random
from collections import Counter

import pytest

from conftest import ACCEPTANCE
from fixture_bases import (
    basis,
    bases_neg_second,
    bases_pos,
    cover_images,
    kernel_terms,
    lattice_on,
    sign_change,
    target_terms,
    z_generators,
    z_rank,
)
from kronord import linalg as la
from kronord.ars import almost_split, end_algebra, iso_test, split_lattice
from kronord.heller import heller, heller_z, syzygy
from kronord.modk import (
    Band,
    BandInf,
    Decomposition,
    Horizontal,
    Vertical,
    decompose,
    module_of,
    parse_label,
    random_invertible,
    string_module,
)
from kronord.order import regular, tensor_k, top_generators
from kronord.quiver import d_prime, tree_class_ledger


def record(k: int, ok: bool, detail: str) -> None:
    """Merge a partial result into the criterion line; any failing part fails the line."""
    prev = ACCEPTANCE.get(k)
    if prev is None:
        ACCEPTANCE[k] = (ok, detail)
    else:
        ACCEPTANCE[k] = (prev[0] and ok, prev[1] + "; " + detail)


def dec_of(L) -> Decomposition:
    return decompose(tensor_k(L))


def D(*labels) -> Decomposition:
    return Decomposition(Counter(labels))


# ---------------------------------------------------------------- 1


def _c1_cases():
    out = []
    for p in (3, 5):
        lams = (0, 1, 2, 4) if p == 5 else (0, 1, 2)
        for n in (1, 2, 3, 4):
            out.append((p, Horizontal(n), D(Horizontal(n), Horizontal(n - 1))))
            out.append((p, Vertical(n), D(Vertical(n), Vertical(n + 1))))
            for lam in lams:
                out.append((p, Band(lam, n), D(Band(lam, n), Band((-lam) % p, n))))
    return out


def test_criterion_01_heller_decompositions():
    bad = [(p, str(lab)) for p, lab, want in _c1_cases() if dec_of(heller(lab, p)) != want]
    record(1, not bad, f"H/V/B clauses: {len(_c1_cases()) - len(bad)}/{len(_c1_cases())} exact")
    assert not bad


@pytest.mark.xfail(strict=True, reason="reduction of heller(Binf:n) is {Binf:n x2}; see decisions ledger")
def test_criterion_01_binf_clause_as_stated():
    got = {}
    for p in (3, 5):
        for n in (1, 2, 3, 4):
            got[(p, n)] = dec_of(heller(BandInf(n), p))
    ok = all(d == D(Horizontal(n), Horizontal(n - 1)) for (p, n), d in got.items())
    record(1, ok, "Binf clause {H:n, H:n-1}: " + ("exact" if ok else f"got {got[(3, 1)]} for n=1, p=3"))
    assert ok


# ---------------------------------------------------------------- 2


def test_criterion_02_rank_law():
    rng = random.Random(2)
    lats = []
    for _ in range(30):
        p = rng.choice((3, 5))
        kind = rng.choice(("H", "V", "B", "Binf"))
        n = rng.randint(0 if kind == "H" else 1, 4)
        lab = Band(rng.randrange(p), n) if kind == "B" else parse_label(f"{kind}:{n}")
        lats.append(("heller", heller(lab, p)))
    for _, L in list(lats)[:16]:
        lats.append(("syzygy", syzygy(L)))
    for n in (-2, -1, 0, 1, 2):
        lats.append(("middle", almost_split(heller_z(n)).middle))
    for lab in ("B:0:1", "Binf:1", "B:1:2"):
        lats.append(("middle", almost_split(heller(parse_label(lab), 3)).middle))
    bad = [(how, L.rank) for how, L in lats if L.rank % 4]
    record(2, not bad and len(lats) >= 50, f"{len(lats) - len(bad)}/{len(lats)} lattices of rank 0 mod 4")
    assert len(lats) >= 50 and not bad


# ---------------------------------------------------------------- 3


def test_criterion_03_tau_orbit():
    ok = 0
    for n in range(-3, 4):
        res = iso_test(syzygy(heller_z(n)), heller_z(n - 1), rng=random.Random(n))
        assert res.iso and res.witness is not None, n
        res.witness.check()
        assert la.is_unit_det(res.witness.mat, 3)
        ok += 1
    record(3, ok == 7, f"tau Z_n ~ Z_(n-1) with unit-det witness for {ok}/7 n in [-3, 3]")


def _intertwines(n: int, printed: bool = False) -> bool:
    p = 3
    T = lattice_on(kernel_terms(n), len(cover_images(n)), p)
    tgt = lattice_on(target_terms(n), z_generators(n - 1), p)
    S = sign_change(n, printed)
    return S * tgt.X == T.X * S and S * tgt.Y == T.Y * S


def _kernel_ok(n: int) -> bool:
    """The listed vectors lie in the kernel of the listed cover and span it."""
    p = 3
    g, gz = len(cover_images(n)), z_generators(n)
    C = basis(cover_images(n), gz, p)
    A = regular(gz, p)
    cols = []
    for i in range(g):
        c = la.columns(C, [i])
        cols += [M * c for M in (la.identity(4 * gz), A.X, A.Y, A.XY)]
    K = basis(kernel_terms(n), g, p)
    return (
        la.is_zero(la.hstack(cols) * K)
        and la.reduce_matrix(K, p).rank() == K.ncols()
        and K.ncols() == 4 * g - z_rank(n)
    )


def test_criterion_03_base_change_fixtures():
    ns = [1, 2, 3, 4, 0, -1, -2, -3, -4]
    bad = [n for n in ns if not (_kernel_ok(n) and _intertwines(n))]
    z_ok = all(
        iso_test(lattice_on(bases_pos(n) if n >= 0 else bases_neg_second(n), z_generators(n), 3), heller_z(n)).iso
        for n in range(-3, 4)
    )
    record(3, not bad and z_ok, f"P (n=2..4), case (e) P (n=-2..-4), corrected P~ (n=-1): {len(ns) - len(bad)}/{len(ns)}")
    assert not bad and z_ok


@pytest.mark.xfail(strict=True, reason="printed P~ = diag(E4, P, P) does not intertwine; see decisions ledger")
def test_criterion_03_printed_p_tilde():
    ok = _intertwines(-1, printed=True)
    record(3, ok, "printed P~ = diag(E4, P, P): " + ("intertwines" if ok else "does not intertwine"))
    assert ok


# ---------------------------------------------------------------- 4


def _fixed(lab) -> bool:
    Z = heller(lab, 3)
    return iso_test(syzygy(Z), Z, rng=random.Random(0)).iso


def test_criterion_04_band_fixed_points_inf_and_zero():
    labs = [BandInf(n) for n in (1, 2, 3)] + [Band(0, n) for n in (1, 2, 3)]
    bad = [str(lab) for lab in labs if not _fixed(lab)]
    record(4, not bad, f"lambda in {{inf, 0}}: {len(labs) - len(bad)}/{len(labs)} fixed")
    assert not bad


@pytest.mark.xfail(strict=True, reason="tau Z^1 ~ Z^-1, not Z^1, at p = 3; see decisions ledger")
def test_criterion_04_band_fixed_points_lambda_one():
    labs = [Band(1, n) for n in (1, 2, 3)]
    bad = [str(lab) for lab in labs if not _fixed(lab)]
    record(4, not bad, f"lambda = 1: {len(labs) - len(bad)}/{len(labs)} fixed (tau Z^1 ~ Z^-1 instead)")
    assert not bad


# ---------------------------------------------------------------- 5, 6


@pytest.fixture(scope="module")
def e1():
    seq = almost_split(heller_z(1))
    cert = split_lattice(seq.middle, candidates=[seq.tail, seq.head])
    assert cert.verify()
    return cert


def test_criterion_05_middle_of_z1(e1):
    (E1,) = e1.nonprojective
    ok = e1.projective_count == 1 and E1.rank == 4 and dec_of(E1) == D(*[Horizontal(0)] * 4)
    record(5, ok, f"summands A x{e1.projective_count} + rank-{E1.rank} {dec_of(E1)}")
    assert ok


def test_criterion_06_middle_of_e1(e1):
    (E1,) = e1.nonprojective
    seq = almost_split(E1)
    cert = split_lattice(seq.middle, candidates=[seq.tail, E1, heller_z(0)])
    assert cert.verify()
    pieces = sorted(cert.nonprojective, key=lambda L: L.rank)
    assert cert.projective_count == 0 and [L.rank for L in pieces] == [4, 12]
    Z0, F1 = pieces
    z_ok = iso_test(Z0, heller_z(0)).iso
    E = end_algebra(F1)
    ok = z_ok and E.is_local and E.semisimple_dim == 1
    record(6, ok, f"Z0 + F1, rank(F1) = {F1.rank}, End(F1) local with semisimple quotient of dim {E.semisimple_dim}")
    assert ok


# ---------------------------------------------------------------- 7, 8, 9, 10


def test_criterion_07_en_reductions(window):
    rows = []
    for n in (0, -1, -2):
        L = window.at((1, n)).lattice
        want = D(*[Vertical(1 - n)] * 4)
        gens = len(top_generators(L))
        rows.append((n, dec_of(L) == want, gens == 4 * abs(n) + 8, gens))
    ok = all(a and b for _, a, b, _ in rows)
    record(7, ok, "E_n ~ M(n-1) x4 and 4|n|+8 generators: " + ", ".join(f"n={n}: {g}" for n, _, _, g in rows))
    assert ok


def test_criterion_08_dprime(window):
    z = [d_prime(window.at((0, m)).lattice) for m in range(-3, 4)]
    e = [d_prime(window.at((1, n)).lattice) for n in range(-2, 2)]
    inv = all(
        d_prime(window.vertices[a].lattice) == d_prime(window.vertices[b].lattice)
        for a, b in window.tau_edges.items()
    )
    ok = z == [2] * 7 and e == [4] * 4 and inv
    record(8, ok, f"d'(Z_-3..3) = {z}, d'(E_-2..1) = {e}, tau-invariant on {len(window.tau_edges)} tau pairs")
    assert ok


def test_criterion_09_split_reduction(window):
    seqs = [s for vid, s in window.sequences.items() if window.vertices[vid].coord[0] >= 1]
    bad = [s.head for s in seqs if s.middle_dec != s.head_dec + s.tail_dec]
    ok = bool(seqs) and not bad
    record(9, ok, f"{len(seqs) - len(bad)}/{len(seqs)} sequences with non-Heller head split after reduction")
    assert ok


def test_criterion_10_za_infinity(report):
    names = [
        "(a) d' = 2(r+1)",
        "(b) row 0 middles have one non-projective summand",
        "(c) row r >= 1 middles are (r-1, n-1) + (r+1, n)",
        "valuations (1,1), no multiple arrows",
        "no loops",
    ]
    ok = report.passed and all(report[n].passed for n in names)
    record(10, ok, f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks, {report.stats}")
    assert ok, report.text()


# ---------------------------------------------------------------- 11


def test_criterion_11_tree_class():
    e6, e7, e8 = (tree_class_ledger(s) for s in ("E6", "E7", "E8"))
    stmts6 = [str(s.statement) for s in e6.steps]
    stmts7 = [str(s.statement) for s in e7.steps]
    stmts8 = [str(s.statement) for s in e8.steps]
    checks = [
        e6.verified and "α′ + β′ = 4" in stmts6,
        e7.verified and {"x′ + x″ = 68", "x′ + x″ = 48"} <= set(stmts7),
        e7.derived == {"α": 24, "α′": 24, "α″": 20},
        e8.verified and "x′ = 64" in stmts8,
        e8.derived["α"] == 32 and e8.derived["β"] == 32 and e8.derived["x′"] == 64,
        "x′ + y′ = 60" in e8.certificate,
    ]
    ok = all(checks)
    record(11, ok, f"E6: {e6.certificate} | E7: {e7.certificate} | E8: {e8.certificate}")
    assert ok


# ---------------------------------------------------------------- 12


def _random_multiset(rng: random.Random, p: int):
    labs = []
    total = 0
    while True:
        kind = rng.choice("PHVBI")
        n = rng.randint(0 if kind == "H" else 1, 4)
        lab = {
            "P": lambda: parse_label("P"),
            "H": lambda: Horizontal(n),
            "V": lambda: Vertical(n),
            "B": lambda: Band(rng.randrange(p), n),
            "I": lambda: BandInf(n),
        }[kind]()
        if total + lab.dim > 40:
            break
        labs.append(lab)
        total += lab.dim
    return Decomposition(Counter(labs))


def test_criterion_12_decomposition_oracle():
    rng = random.Random(12)
    recovered = 0
    for i in range(200):
        p = (3, 5)[i % 2]
        want = _random_multiset(rng, p)
        M = module_of(want, p).conjugate(random_invertible(module_of(want, p).dim, p, rng))
        recovered += decompose(M) == want
    fixed = [string_module(Band(1, 3), 3), module_of(D(Horizontal(2), Vertical(1), BandInf(2)), 3)]
    invariant = 0
    for i in range(200):
        M = fixed[i % 2]
        invariant += decompose(M.conjugate(random_invertible(M.dim, 3, rng))) == decompose(M)
    ok = recovered == 200 and invariant == 200
    record(12, ok, f"{recovered}/200 shuffled multisets recovered, {invariant}/200 conjugates invariant")
    assert ok
