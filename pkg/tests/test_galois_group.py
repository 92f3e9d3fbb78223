import numpy as np
import pytest

from galkan.corpus import group_specs
from galkan.errors import NoLifting, NotNormal, SquareDoesNotCommute
from galkan.fingrp import abelian_invariants, enumerate_homs, liftings
from galkan.galois_group import (
    ExtMorphism,
    baer_check,
    gal_of,
    gal_on_morphism,
    galois_group,
    is_stem,
    kappa,
    pi1_morphism,
    pi1_object,
    pi1_report,
    verify_weakly_universal,
)
from galkan.galois_structure import pullback_square
from galkan.kan_check import _inclusion_of_perm_groups, certificate_for

GAL_ORDERS = {
    "q8_to_v4": 2, "d4_to_v4": 2, "d4xz2_to_v4": 2, "v4xz2_to_v4": 1, "v4xz3_to_v4": 1,
    "z4_to_z2": 1, "sl23_to_a4": 2, "sl25_to_a5": 2, "sl25xz2_to_a5": 2,
    "a5xz2_to_a5": 1, "a5xz3_to_a5": 1, "id_a5": 1,
}


@pytest.mark.parametrize("name,order", sorted(GAL_ORDERS.items()))
def test_galois_group_orders(reg, name, order):
    r = galois_group(reg.extension(name))
    assert r.order == order
    assert r.comparison.is_bijective


def test_galois_group_needs_normal(reg):
    with pytest.raises(NotNormal):
        galois_group(reg.extension("s3_to_z2"))


def test_gal_on_identity_morphism(reg):
    p = reg.extension("q8_to_v4")
    h = gal_on_morphism(p, p, p.dom.identity_hom(), p.cod.identity_hom())
    assert np.array_equal(h.map, np.arange(2))


def test_gal_along_pullback_of_a4_into_a5(reg):
    u = reg.extension("sl25_to_a5")
    incl = _inclusion_of_perm_groups(group_specs(), "a4", "a5", reg)
    pulled, top = pullback_square(u, incl)
    h = gal_of(ExtMorphism(pulled, u, top, incl))
    assert h.is_injective and h.dom.order == 2


def test_square_must_commute(reg):
    p = reg.extension("d4_to_v4")
    twist = next(f for f in enumerate_homs(p.cod, p.cod) if f.is_bijective and f.map[1] != 1)
    with pytest.raises(SquareDoesNotCommute):
        ExtMorphism(p, p, p.dom.identity_hom(), twist)


# SL(2,3) has no quotient of order 2, so the identity is its only self-lifting
@pytest.mark.parametrize("name,lifts", [("q8_to_v4", 4), ("d4_to_v4", 4), ("sl23_to_a4", 1)])
def test_baer_invariance(reg, name, lifts):
    p = reg.extension(name)
    rep = baer_check(p, p, p.cod.identity_hom())
    assert rep.ok and rep.tested == lifts


def test_weak_universality_failure(reg):
    with pytest.raises(NoLifting):
        verify_weakly_universal(reg.extension("id_a5"), [reg.extension("sl25_to_a5")])


def test_stem(reg):
    assert is_stem(reg.extension("sl25_to_a5"))
    assert not is_stem(reg.extension("sl25xz2_to_a5"))


def test_pi1_values(reg):
    for base, inv in (("a5", [2]), ("v4", [2]), ("a4", [2])):
        cert = certificate_for(base, reg)
        assert abelian_invariants(pi1_object(reg.group(base), cert)).as_list() == inv
    rep = pi1_report(certificate_for("a5", reg))
    assert rep["pi1_invariants"] == [2] and rep["stem"]


def test_pi1_independent_of_certificate(reg):
    a5 = reg.group("a5")
    cert = certificate_for("a5", reg)
    other = verify_weakly_universal(reg.extension("sl25xz2_to_a5"),
                                    [reg.extension("sl25_to_a5")])
    assert pi1_object(a5, cert, [other]).order == 2


def test_pi1_functoriality(reg):
    c4, c5 = certificate_for("a4", reg), certificate_for("a5", reg)
    ident = pi1_morphism(reg.group("a5").identity_hom(), c5, c5)
    assert np.array_equal(ident.map, np.arange(2))
    incl = _inclusion_of_perm_groups(group_specs(), "a4", "a5", reg)
    h = pi1_morphism(incl, c4, c5)
    assert h.is_bijective


def test_kappa_of_certified_cover_is_bijective(reg):
    for base in ("a5", "v4", "a4"):
        cert = certificate_for(base, reg)
        assert kappa(cert.u, cert).is_bijective


def test_kappa_on_the_family(reg):
    cert = certificate_for("a5", reg)
    for p in cert.family:
        k = kappa(p, cert)
        assert k.dom.order == 2 and k.cod.order == galois_group(p).order
        if k.cod.order == 2:
            assert k.is_bijective


def test_kappa_naturality(reg):
    """Gal(f) . kappa_p = kappa_q for every f: p -> q over B."""
    cert = certificate_for("v4", reg)
    p, q = reg.extension("d4xz2_to_v4"), reg.extension("d4_to_v4")
    for f in liftings(p, q, limit=4):
        g = gal_on_morphism(p, q, f, p.cod.identity_hom())
        assert np.array_equal(g.map[kappa(p, cert).map], kappa(q, cert).map)
