import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from galkan.corpus import SMALL_GROUPS
from galkan.errors import OrderBound
from galkan.fingrp import abelian_invariants, abelianization
from galkan.homology import (
    IntMatrix,
    bar_boundaries,
    h2_report,
    h2_sparse,
    homology,
    homology_report,
    order_of,
    smith_normal_form,
)
from oracles import h2_by_cocycles


def test_snf_examples():
    assert smith_normal_form(IntMatrix.from_dense([[2, 0], [0, 3]])).diag == (1, 6)
    r = smith_normal_form(IntMatrix.from_dense([[4, 6], [6, 9]]))
    assert r.rank == 1 and r.diag == (1,)
    assert smith_normal_form(IntMatrix.from_dense([[0, 0], [0, 0]])).rank == 0
    assert smith_normal_form(IntMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])).diag \
        == (2, 6, 12)


def test_boundary_of_boundary_vanishes(reg):
    for name in ("s3", "q8", "z4xz2"):
        d2, d3 = bar_boundaries(reg.group(name))
        assert d2.matmul(d3).entries == {}


H2_VALUES = {
    "trivial": [], "z2": [], "z6": [], "s3": [], "q8": [], "dic3": [],
    "v4": [2], "d4": [2], "z4xz2": [2], "z2cubed": [2, 2, 2], "a4": [2],
}


@pytest.mark.parametrize("name,inv", sorted(H2_VALUES.items()))
def test_h2_values(reg, name, inv):
    G = reg.group(name)
    assert homology(G, 2).as_list() == inv
    assert h2_sparse(G).as_list() == inv


@pytest.mark.parametrize("name", ["s4", "sl23"])
def test_sparse_h2_larger_groups(reg, name):
    assert h2_sparse(reg.group(name)).as_list() == ([2] if name == "s4" else [])


def test_h1_is_abelianization(reg):
    for name in ("s3", "q8", "a4", "z6", "d4"):
        G = reg.group(name)
        assert homology(G, 1).as_list() == abelian_invariants(abelianization(G)[0]).as_list()


def test_report_and_bounds(reg):
    G = reg.group("v4")
    rep = h2_report(G)
    assert rep == {"H1": [2, 2], "H2": [2], "dims": {"C1": 3, "C2": 9, "C3": 27}, "mode": "dense"}
    assert homology_report(reg.group("a4"), sparse=True).mode == "sparse"
    with pytest.raises(OrderBound):
        homology(reg.group("s4"), 2, max_order=12, sparse=False)
    with pytest.raises(ValueError):
        homology(G, 3)
    assert order_of(homology(reg.group("z2cubed"), 2)) == 8


def test_h2_matches_cocycle_oracle(reg):
    for name in SMALL_GROUPS:
        G = reg.group(name)
        assert h2_sparse(G).as_list() == h2_by_cocycles(G), name


def _det(rows):
    return round(abs(np.linalg.det(np.array(rows, dtype=float))))


matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))


@given(matrices)
def test_snf_against_det_and_rank(rows):
    r = smith_normal_form(IntMatrix.from_dense(rows))
    assert r.rank == np.linalg.matrix_rank(np.array(rows, dtype=float))
    for a, b in zip(r.diag, r.diag[1:]):
        assert b % a == 0
    if r.rank == len(rows):
        assert math.prod(r.diag) == _det(rows)


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=1, max_size=5))
def test_snf_gcd_of_entries(rows):
    r = smith_normal_form(IntMatrix.from_dense(rows))
    g = math.gcd(*[v for row in rows for v in row])
    if r.rank:
        assert r.diag[0] == g
