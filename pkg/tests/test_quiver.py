import copy
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronord.modk import Band
from kronord.quiver import (
    build_component,
    d_prime,
    emit_dot,
    emit_json,
    ledger_system,
    parse,
    solve_ledger,
    tree_class_ledger,
    verify_za_infinity,
)
from kronord.quiver.emit import window_to_dict
from kronord.quiver.ledger import CONSTANTS, custom_ledger

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def small():
    return build_component(0, 1, 2)


def test_depth_one_is_a_tau_chain():
    W = build_component(-1, 1, 1)
    assert sorted(W.vertices) == ["Z-1", "Z0", "Z1"]
    assert W.tau_edges == {"Z1": "Z0", "Z0": "Z-1"}
    assert not W.edges and W.frontier == ["Z-1", "Z0", "Z1"]
    assert verify_za_infinity(W).passed


def test_small_window(small):
    rep = verify_za_infinity(small)
    assert rep.passed, rep.text()
    assert small.at((1, 1)).rank == 4 and small.at((1, 1)).dprime == 4
    assert {(e.src, e.dst) for e in small.edges.values()} == {
        ("Z0", "E1"), ("E1", "Z1"), ("Z-1", "E0"), ("E0", "Z0"),
    }


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_component(0, 1, 0)
    with pytest.raises(ValueError):
        build_component(2, 1, 1)


def test_band_seeds_need_flag():
    with pytest.raises(ValueError):
        build_component(0, 0, 1, band_seeds=[Band(0, 1)])


def test_experimental_band_seed():
    W = build_component(0, 0, 1, band_seeds=[Band(0, 1)], experimental_bands=True)
    (rec,) = W.experimental
    assert rec.head_dec == rec.tail_dec


def test_window_shape(window):
    stats = verify_za_infinity(window).stats
    assert stats["vertices"] == 21 and stats["expanded"] == 13 and stats["frontier"] == 8
    assert len(window.edges) == 26 and len(window.tau_edges) == 18


def test_golden_dot(window):
    assert emit_dot(window) == (GOLDEN / "quiver_m3_3_d3.dot").read_text()


def test_json_round_trip(window):
    text = emit_json(window)
    back = parse(text)
    assert window_to_dict(back) == window_to_dict(window)
    assert emit_dot(back) == emit_dot(window)


def test_json_with_lattices(small):
    back = parse(emit_json(small, lattices=True))
    for vid, v in small.vertices.items():
        assert back.vertices[vid].lattice.X == v.lattice.X


def test_deleted_edge_is_caught(window):
    W = copy.copy(window)
    W.edges = dict(window.edges)
    key = next(k for k, e in W.edges.items() if e.dst == "E0" and e.src == "F0")
    del W.edges[key]
    rep = verify_za_infinity(W)
    assert not rep.passed
    assert not rep["(c) row r >= 1 middles are (r-1, n-1) + (r+1, n)"].passed


def test_moved_vertex_is_caught(window):
    W = copy.copy(window)
    W.vertices = dict(window.vertices)
    v = copy.copy(W.vertices["E1"])
    v.dprime = 2
    W.vertices["E1"] = v
    assert not verify_za_infinity(W)["(a) d' = 2(r+1)"].passed


def test_ledger_constants_match_window(window):
    seen = 0
    for consts in CONSTANTS.values():
        for name, rank in consts.items():
            v = window.vertices.get(name)
            if v is not None:
                assert v.rank == rank, name
                seen += 1
    assert seen >= 10


def test_dprime_matches_vertices(window):
    for v in window.vertices.values():
        if v.lattice is not None:
            assert d_prime(v.lattice) == v.dprime


@pytest.mark.parametrize("shape", ["E6", "E7", "E8"])
def test_tree_class_infeasible(shape):
    proof = tree_class_ledger(shape)
    assert proof.verified and all(s.holds for s in proof.steps)
    assert not solve_ledger(ledger_system(shape)).feasible


def test_unknown_shape():
    with pytest.raises(ValueError):
        ledger_system("D4")


@given(st.integers(1, 30), st.integers(1, 30))
def test_feasible_ledger(a, b):
    sol = solve_ledger(custom_ledger([f"x = {4 * a}", f"x + y = {4 * (a + b)}"]))
    assert sol.feasible
    assert sol.forced["y"] == Fraction(4 * b)


def test_ledger_divisibility_violation():
    sol = solve_ledger(custom_ledger(["x = 6"]))
    assert sol.consistent and not sol.feasible


def test_ledger_farkas():
    sol = solve_ledger(custom_ledger(["x + y = 4", "x + y = 8"]))
    assert not sol.consistent and sol.farkas is not None
