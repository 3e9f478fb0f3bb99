"""Addresses, sparse functions, levels, inner products."""
import pytest
from hypothesis import given, strategies as st

from treejacobi.errors import KindMismatch, PatchTooLarge
from treejacobi.treecore import (GAMMA, LambdaPatch, SparseFunction, TreeKind,
                                 children, format_address, inner, level,
                                 level_indicator, level_vertices, parent,
                                 parse_address, subtree_vertices)


def test_address_text_forms():
    assert format_address(()) == "e"
    assert format_address((1, 3, 2)) == "1.3.2"
    assert parse_address("e") == ()
    assert parse_address("1.3.2") == (1, 3, 2)
    assert parse_address("12.3") == (12, 3)
    with pytest.raises(ValueError):
        parse_address("1..2")
    with pytest.raises(ValueError):
        parse_address("a.b")


addresses = st.lists(st.integers(min_value=1, max_value=12),
                     max_size=8).map(tuple)


@given(addresses)
def test_address_round_trip(x):
    assert parse_address(format_address(x)) == x


@given(addresses, st.integers(min_value=2, max_value=5))
def test_parent_of_children(x, d):
    kids = children(x, d)
    assert len(kids) == d
    for c in kids:
        assert parent(c) == x
        assert level(c) == level(x) + 1


def test_children_of_root():
    assert children((), 3) == [(1,), (2,), (3,)]
    assert parent(()) is None


def test_level_vertices_counts():
    for d in (2, 3):
        for n in range(4):
            assert len(list(level_vertices(n, d))) == d ** n


def test_level_vertices_budget():
    with pytest.raises(PatchTooLarge):
        list(level_vertices(30, 2, budget=1000))


def test_patch_cardinality_matches_enumeration():
    for d in (2, 3, 4):
        for n in range(7):
            patch = LambdaPatch(n, d)
            assert patch.size() == (d ** (n + 1) - 1) // (d - 1)
            assert len(list(patch.vertices())) == patch.size()


def test_patch_levels():
    patch = LambdaPatch(3, 2)
    assert patch.level(()) == 3
    assert patch.level((1, 2)) == 1
    assert patch.level((1, 2, 1)) == 0


def test_delta_inner_products():
    dx = SparseFunction.delta((1, 2))
    dy = SparseFunction.delta((1, 1))
    assert inner(dx, dx) == 1.0
    assert inner(dx, dy) == 0.0


def test_inner_kind_mismatch():
    f = SparseFunction.delta(())
    g = SparseFunction.delta((), kind=TreeKind("lambda", 2))
    with pytest.raises(KindMismatch):
        inner(f, g)


def test_zero_entries_dropped():
    f = SparseFunction({(1,): 0.0, (2,): 1.0})
    assert f.support() == [(2,)]


sparse_entries = st.dictionaries(
    st.lists(st.integers(min_value=1, max_value=2), max_size=4).map(tuple),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    max_size=8)


@given(sparse_entries, sparse_entries)
def test_inner_conjugate_symmetry(a, b):
    f, g = SparseFunction(dict(a)), SparseFunction(dict(b))
    lhs = complex(inner(f, g))
    rhs = complex(inner(g, f)).conjugate()
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


@given(sparse_entries, sparse_entries,
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_inner_sesquilinear(a, b, c):
    f, g = SparseFunction(dict(a)), SparseFunction(dict(b))
    lhs = complex(inner(f.scaled(c), g))
    rhs = c * complex(inner(f, g))
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_level_indicator_values():
    chi0 = level_indicator(0, 2)
    assert chi0.entries == {(): 1.0}
    for n in range(6):
        mu = level_indicator(n, 2, normalized=True)
        assert abs(inner(mu, mu) - 1.0) < 1e-12
    mu2 = level_indicator(2, 2, normalized=True)
    mu3 = level_indicator(3, 2, normalized=True)
    assert inner(mu2, mu3) == 0.0


def test_json_round_trip():
    f = SparseFunction({(1, 2): 1 + 2j, (): -0.5})
    g = SparseFunction.from_json_obj(f.to_json_obj())
    assert g.entries == {(1, 2): 1 + 2j, (): complex(-0.5)}


def test_subtree_vertices():
    vs = list(subtree_vertices((2,), 2, 2))
    assert (2,) in vs and (2, 1, 2) in vs
    assert len(vs) == 7
