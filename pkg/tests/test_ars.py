import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronord import linalg as la
from kronord.ars import (
    NotAlmostSplit,
    almost_split,
    end_algebra,
    iso_test,
    phi_conditions,
    radical_endos,
    split_lattice,
)
from kronord.heller import heller, heller_z, syzygy
from kronord.modk import Band, decompose
from kronord.order import LatticeMap, direct_sum, direct_sum_all, regular, tensor_k


def _unit_det(r, seed):
    rng = random.Random(seed)
    while True:
        B = la.omat([[rng.randint(-1, 1) for _ in range(r)] for _ in range(r)], r)
        if la.is_unit_det(B, 3):
            return B


@pytest.fixture(scope="module")
def z1_seq():
    return almost_split(heller_z(1))


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
def test_end_of_z_is_local(n):
    E = end_algebra(heller_z(n))
    assert E.is_local and E.semisimple_dim == 1


def test_end_of_sum_is_not_local():
    E = end_algebra(direct_sum(heller_z(0), heller_z(1)))
    assert not E.is_local
    assert E.semisimple_dim == 2


def test_radical_endos_are_nilpotent_mod_p():
    Z = heller_z(2)
    for f in radical_endos(end_algebra(Z)):
        f.check()
        red = la.reduce_matrix(f.mat, 3)
        pw = red
        for _ in range(Z.rank):
            pw = pw * red
        assert pw.rank() == 0


@settings(max_examples=6)
@given(st.integers(0, 2**31))
def test_split_recovers_hidden_sum(seed):
    parts = [heller_z(0), heller_z(1), regular(1)]
    S = direct_sum_all(parts)
    L = S.transport(_unit_det(S.rank, seed))
    cert = split_lattice(L, rng=random.Random(seed))
    assert cert.verify()
    assert cert.projective_count == 1
    got = sorted(cert.nonprojective, key=lambda X: X.rank)
    assert [X.rank for X in got] == [4, 4]
    assert sorted(str(decompose(tensor_k(X))) for X in got) == sorted(
        str(decompose(tensor_k(Z))) for Z in parts[:2]
    )
    for X in got:
        assert any(iso_test(X, Z).iso for Z in parts[:2])


def test_corrupted_certificate_fails():
    cert = split_lattice(direct_sum(heller_z(0), heller_z(-1)))
    assert cert.verify()
    cert.witness = cert.witness * 3
    assert not cert.verify()


def test_almost_split_shape(z1_seq):
    seq = z1_seq
    assert seq.head.rank == 4 and seq.tail.rank == syzygy(seq.head).rank
    assert seq.middle.rank == seq.tail.rank + seq.head.rank
    assert la.is_zero(seq.project.mat * seq.inject.mat)
    assert iso_test(seq.tail, heller_z(0)).iso
    assert isinstance(seq.left_needed, bool)


def test_phi_is_not_split(z1_seq):
    E = end_algebra(z1_seq.head)
    assert phi_conditions(E, z1_seq.phi.mat)
    assert not phi_conditions(E, la.identity(z1_seq.head.rank))


def test_identity_phi_rejected():
    Z = heller_z(1)
    with pytest.raises(NotAlmostSplit):
        almost_split(Z, phi=LatticeMap(Z, Z, la.identity(Z.rank)))


@pytest.mark.parametrize("n", [0, 1])
def test_middle_independent_of_phi(n):
    Z = heller_z(n)
    seq = almost_split(Z)
    E = end_algebra(Z)
    rad = radical_endos(E)
    u = la.identity(Z.rank) * 2 + (rad[0].mat if rad else la.zeros(Z.rank, Z.rank))
    other = almost_split(Z, phi=LatticeMap(Z, Z, seq.phi.mat * u))
    assert iso_test(seq.middle, other.middle, rng=random.Random(n)).iso


def test_projective_head_rejected():
    with pytest.raises(NotAlmostSplit):
        almost_split(regular(1))


def test_non_isomorphic_bands():
    a, b = heller(Band(1, 1), 3), heller(Band(0, 1), 3)
    res = iso_test(a, b)
    assert not res.iso and res.witness is None


def test_iso_witness_after_base_change():
    Z = heller_z(-1)
    W = Z.transport(_unit_det(Z.rank, 5))
    res = iso_test(Z, W)
    assert res.iso
    res.witness.check()
    assert la.is_unit_det(res.witness.mat, 3)


def test_iso_rejects_rank_mismatch():
    assert not iso_test(heller_z(0), heller_z(2)).iso
