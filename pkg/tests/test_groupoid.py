import numpy as np
import pytest
from hypothesis import given, strategies as st

from galkan.errors import AxiomViolation, NotAGroupoidAfterReflection
from galkan.fingrp import Extension, enumerate_homs
from galkan.galois_group import galois_group
from galkan.galois_structure import is_central
from galkan.groupoid import (
    Carrier,
    apply_I_groupoid,
    are_naturally_isomorphic,
    aut_at_zero,
    check_nat_trans,
    discrete_groupoid,
    identity_functor,
    induced_map_on_aut,
    kernel_pair_functor,
    kernel_pair_groupoid,
    mk_internal_functor,
    mk_internal_groupoid,
    reflect_functor,
    unit_law_maps,
)


def indiscrete(n):
    """Codiscrete groupoid on n points: one arrow i -> j for every pair."""
    obj = Carrier.pointed(n)
    arr = Carrier.pointed(n * n)
    d = [i for i in range(n) for _ in range(n)]
    c = [j for _ in range(n) for j in range(n)]
    e = [i * n + i for i in range(n)]
    return mk_internal_groupoid(obj, arr, d, c, e, lambda a, b: (a // n) * n + b % n)


def test_discrete_groupoid(reg):
    R = discrete_groupoid(reg.group("s3"))
    assert R.arr.size == R.obj.size == 6
    assert aut_at_zero(R).order == 1


def test_indiscrete_pointed_groupoid():
    R = indiscrete(3)
    assert R.comp.size == 27
    assert list(R.s) == [0, 3, 6, 1, 4, 7, 2, 5, 8]
    assert aut_at_zero(R).order == 1
    right, left = unit_law_maps(R)
    assert (right == np.arange(9)).all() and (left == np.arange(9)).all()


def test_kernel_pair_sizes(reg):
    assert kernel_pair_groupoid(reg.extension("z4_to_z2")).arr.size == 8
    assert kernel_pair_groupoid(reg.extension("q8_to_v4")).arr.size == 16
    assert kernel_pair_groupoid(reg.extension("sl25_to_a5")).arr.size == 240


def test_kernel_pair_loops_and_kernel_of_d(reg):
    p = reg.extension("s4_to_s3")
    R = kernel_pair_groupoid(p)
    # before reflection only the identity is a loop; Ker d carries the kernel of p
    assert aut_at_zero(R).order == 1
    assert int((R.d == 0).sum()) == p.kernel.order


def test_missing_composite_is_named():
    R = indiscrete(2)
    m = {(int(a), int(b)): int(x) for a, b, x in zip(R.p1, R.p2, R.m)}
    del m[(1, 2)]
    with pytest.raises(AxiomViolation) as info:
        mk_internal_groupoid(R.obj, R.arr, R.d, R.c, R.e, m)
    assert info.value.diagram == "composition defined"
    assert info.value.witness == (1, 2)


def test_non_associative_one_object_groupoid():
    loop = [[0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0]]
    obj = Carrier.pointed(1)
    arr = Carrier.pointed(5)
    with pytest.raises(AxiomViolation) as info:
        mk_internal_groupoid(obj, arr, [0] * 5, [0] * 5, [0], lambda a, b: loop[a][b])
    assert info.value.diagram == "associativity"


def test_bad_unit_is_rejected():
    obj = Carrier.pointed(1)
    arr = Carrier.pointed(2)
    with pytest.raises(AxiomViolation) as info:
        mk_internal_groupoid(obj, arr, [0, 0], [0, 0], [0], lambda a, b: a, s=[0, 1])
    assert info.value.diagram == "unit m<ed,1> = 1"
    assert info.value.witness == 1


def test_reflection_of_central_kernel_pair(reg):
    p = reg.extension("q8_to_v4")
    IR = apply_I_groupoid(kernel_pair_groupoid(p))
    assert aut_at_zero(IR).order == galois_group(p).order == 2


@pytest.mark.parametrize("name", ["s3_to_z2", "a4_to_z3", "s4_to_s3"])
def test_reflection_fails_or_matches_for_non_central(reg, name):
    p = reg.extension(name)
    R = kernel_pair_groupoid(p)
    try:
        IR = apply_I_groupoid(R)
    except NotAGroupoidAfterReflection:
        return
    assert IR.obj.group.is_abelian and IR.arr.group.is_abelian


def test_functor_and_nat_trans(reg):
    p = reg.extension("q8_to_v4")
    R = kernel_pair_groupoid(p)
    one = identity_functor(R)
    mu = are_naturally_isomorphic(one, one)
    assert mu is not None
    assert (R.d[mu.mu] == np.arange(8)).all() and (R.c[mu.mu] == np.arange(8)).all()
    with pytest.raises(AxiomViolation):
        check_nat_trans(one, one, np.zeros(8, dtype=np.int64) + R.e[1])


def test_kernel_pair_functor_and_its_reflection(reg):
    p = reg.extension("q8_to_v4")
    R = kernel_pair_groupoid(p)
    F = kernel_pair_functor(R, R, p.dom.identity_hom(), p.cod.identity_hom())
    IR = apply_I_groupoid(R)
    IF = reflect_functor(F, IR, IR)
    h = induced_map_on_aut(IF)
    assert np.array_equal(h.map, np.arange(h.dom.order))


def test_no_natural_transformation_between_different_object_maps(reg):
    z2 = reg.group("z2")
    R = discrete_groupoid(z2)
    f = identity_functor(R)
    g = mk_internal_functor(R, R, [0, 0], [0, 0])
    assert are_naturally_isomorphic(f, g) is None


def test_functor_must_commute_with_structure(reg):
    p = reg.extension("z4_to_z2")
    R = kernel_pair_groupoid(p)
    with pytest.raises(AxiomViolation):
        mk_internal_functor(R, R, np.arange(4), np.zeros(8, dtype=np.int64))


@given(st.sampled_from(["z2", "z3", "v4", "z4", "s3", "q8", "d4", "z6"]),
       st.sampled_from(["z2", "v4", "trivial", "z3"]))
def test_kernel_pair_axioms_and_loops(reg, a, b):
    A, B = reg.group(a), reg.group(b)
    for h in enumerate_homs(A, B, surjective=True, limit=3):
        p = Extension(h)
        R = kernel_pair_groupoid(p)
        assert R.arr.size == sum(int((h.map == v).sum()) ** 2 for v in range(B.order))
        assert aut_at_zero(R).order == 1
        assert int((R.d == 0).sum()) == p.kernel.order
        right, left = unit_law_maps(R)
        assert (right == np.arange(R.arr.size)).all() and (left == right).all()
        if is_central(p):
            IR = apply_I_groupoid(R)
            assert aut_at_zero(IR).order == galois_group(p).order
