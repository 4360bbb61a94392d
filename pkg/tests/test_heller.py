import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixture_bases import bases_inf, lattice_on, z_rank
from kronord.ars import iso_test
from kronord.heller import (
    ProjectiveInput,
    cosyzygy_rank,
    heller,
    heller_z,
    projective_cover,
    syzygy,
    z_label,
)
from kronord.modk import Band, BandInf, Decomposition, Proj, decompose, module_of, projective_cover_k, string_module
from kronord.order import Lattice, is_projective, regular, tensor_k


@pytest.mark.parametrize("n", range(-4, 4))
def test_z_rank_table(n):
    Z = heller_z(n)
    Z.check()
    assert Z.rank == z_rank(n)
    assert Z.is_free_over_q()


def test_z_label():
    assert str(z_label(2)) == "H:2" and str(z_label(0)) == "H:0" and str(z_label(-3)) == "V:3"


def test_projective_input_rejected():
    with pytest.raises(ProjectiveInput):
        heller(Proj())
    with pytest.raises(ProjectiveInput):
        heller(module_of(Decomposition({Proj(): 1, Band(0, 1): 1}), 3))


@settings(max_examples=25)
@given(
    st.sampled_from(["H", "V", "B", "Binf"]),
    st.integers(1, 3),
    st.sampled_from([3, 5]),
    st.data(),
)
def test_heller_rank_and_cover(kind, n, p, data):
    if kind == "H":
        lab = z_label(n)
    elif kind == "V":
        lab = z_label(-n)
    elif kind == "Binf":
        lab = BandInf(n)
    else:
        lab = Band(data.draw(st.integers(0, p - 1)), n)
    Z = heller(lab, p)
    Z.check()
    M = string_module(lab, p)
    # the kernel of A^g -> M has full rank 4g
    assert Z.rank == 4 * projective_cover_k(M)[0]
    assert Z.rank % 4 == 0 and Z.is_free_over_q()
    assert not is_projective(Z)
    cov = projective_cover(Z)
    cov.cover.check()
    assert cosyzygy_rank(Z) == 4 * cov.g - Z.rank


@pytest.mark.parametrize("n", [1, 2, 3])
def test_syzygy_rank_is_cosyzygy_rank(n):
    Z = heller_z(n)
    assert syzygy(Z).rank == cosyzygy_rank(Z)


def test_syzygy_of_projective_is_zero():
    assert syzygy(regular(2)).rank == 0


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_binf_reduction_as_computed(n, p):
    assert decompose(tensor_k(heller(BandInf(n), p))) == Decomposition({BandInf(n): 2})


def _twist(L: Lattice) -> Lattice:
    """Swap the roles of X and Y."""
    return Lattice(L.Y, L.X, L.p)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_twist_swaps_zero_and_infinity(n):
    Z0 = heller(Band(0, n), 3)
    Zinf = heller(BandInf(n), 3)
    assert decompose(tensor_k(Z0)) == Decomposition({Band(0, n): 2})
    assert decompose(tensor_k(_twist(Z0))) == decompose(tensor_k(Zinf))
    assert iso_test(_twist(Z0), Zinf, rng=random.Random(n)).iso


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hand_basis_of_binf_heller(n):
    L = lattice_on(bases_inf(n), n, 3)
    assert decompose(tensor_k(L)) == Decomposition({BandInf(n): 2})
    assert iso_test(L, heller(BandInf(n), 3), rng=random.Random(0)).iso


@pytest.mark.parametrize("lam", [0, 1, 2])
@pytest.mark.parametrize("n", [1, 2])
def test_tau_negates_band_parameter(lam, n):
    Z = heller(Band(lam, n), 3)
    res = iso_test(syzygy(Z), heller(Band((-lam) % 3, n), 3), rng=random.Random(lam))
    assert res.iso and res.witness is not None
    res.witness.check()


@pytest.mark.parametrize("n", [1, 2])
def test_tau_moves_band_one(n):
    Z = heller(Band(1, n), 3)
    res = iso_test(syzygy(Z), Z, rng=random.Random(0))
    assert not res.iso


@pytest.mark.parametrize("n", range(-3, 4))
def test_reduction_of_z(n):
    want = Decomposition({z_label(n): 1}) + Decomposition({z_label(n - 1): 1})
    assert decompose(tensor_k(heller_z(n))) == want
