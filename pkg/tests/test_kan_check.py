import copy
import json

import numpy as np
import pytest

from galkan.corpus import DATA, MUTATIONS
from galkan.errors import NaturalityViolation, SchemaError
from galkan.galois_group import galois_group
from galkan.galois_structure import is_central
from galkan.kan_check import (
    KerComponent,
    certificate_for,
    check_iota_factorization,
    check_kappa_kan,
    delta_component,
    kan_via_reflection,
    load_scenario,
)


def spec(name):
    path = DATA / "scenarios" / f"{name}.json"
    if not path.exists():
        path = MUTATIONS / f"{name}.json"
    return json.loads(path.read_text(encoding="utf-8"))


def test_empty_scenario_passes():
    v = check_kappa_kan(load_scenario("empty"))
    assert v.ok and v.alpha == {} and v.witnesses == []


def test_sources_are_interchangeable():
    path = DATA / "scenarios" / "v4.json"
    for src in (path, str(path), path.read_text(encoding="utf-8"), spec("v4"), "v4"):
        s = load_scenario(src)
        assert s.name == "v4" and len(s.extensions) == 5


def test_verdict_json(reg):
    out = check_kappa_kan(load_scenario("a5")).to_json()
    assert out["pass"] and set(out["alpha"]) == {"A5", "A4"}
    assert json.loads(json.dumps(out)) == out


@pytest.mark.parametrize("mutate,fragment", [
    (lambda d: d.update(kind="hom"), "kind"),
    (lambda d: d["extensions"].append("nope_to_v4"), "unknown extension"),
    (lambda d: d["gamma"].pop("d4_to_v4"), "no component"),
    (lambda d: d["gamma"].update(d4_to_v4=[0]), "expected 2 entries"),
    (lambda d: d["gamma"].update(d4_to_v4=[0, 2]), "leaves"),
    (lambda d: d["functor"]["objects"].pop("V4"), "no value on base"),
    (lambda d: d["morphisms"][0].update(bottom="sideways"), "unknown bottom"),
    (lambda d: d.pop("gamma"), "no component at id_v4"),
])
def test_schema_errors(mutate, fragment):
    d = copy.deepcopy(spec("v4"))
    mutate(d)
    with pytest.raises(SchemaError, match=fragment):
        load_scenario(d)


def test_malformed_json_text():
    with pytest.raises(SchemaError):
        load_scenario("{not json")


def test_constant_trivial_functor():
    d = spec("v4")
    d["functor"]["objects"]["V4"] = "trivial"
    d["gamma"] = {e: [0] for e in d["gamma"]}
    v = check_kappa_kan(load_scenario(d))
    assert v.ok
    assert v.alpha["V4"].dom.order == 1


def test_mutation_witness_names_the_square():
    v = check_kappa_kan(load_scenario("v4_mutated"))
    assert not v.factorization_ok
    assert any(w["square"].startswith("kappa(d4xz2_to_v4)") for w in v.witnesses)


def test_unnatural_gamma_is_rejected():
    with pytest.raises(NaturalityViolation) as info:
        load_scenario("v4_unnatural")
    assert info.value.square == "d4xz2_onto_d4"


def test_kernel_component_outside_commutator():
    with pytest.raises(NaturalityViolation) as info:
        load_scenario("a5_ker_outside_commutator")
    assert info.value.square == "a5xz2_to_a5 -> (Ia5xz2 -> 0)"


def test_iota_factorization_on_kernel_scenario():
    rep = check_iota_factorization(load_scenario("a5_ker"))
    assert rep.ok and set(rep.lifts) >= {"sl25_to_a5", "id_a5"}


def test_delta_components(reg):
    cert = certificate_for("a5", reg)
    for p in cert.family:
        dc = delta_component(p, cert)
        assert dc.is_injective == (galois_group(p).order == 2)
        assert dc.is_zero == (galois_group(p).order == 1)
        assert dc == delta_component(p, cert)
        assert set(dc.images.tolist()) <= set(p.kernel.elements)


def test_ker_component_equality(reg):
    cert = certificate_for("v4", reg)
    a = delta_component(reg.extension("d4_to_v4"), cert)
    b = KerComponent(a.source, a.extension, a.images.copy())
    assert a == b
    assert a != KerComponent(a.source, a.extension, np.zeros_like(a.images))
    assert a != "not a component"


@pytest.mark.parametrize("name", ["d4_to_v4", "d4xz2_to_v4", "v4xz2_to_v4", "v4xz3_to_v4"])
def test_reflection_path_is_delta_on_central_extensions(reg, name):
    p = reg.extension(name)
    assert is_central(p)
    cert = certificate_for("v4", reg)
    assert np.array_equal(kan_via_reflection(p, cert).images, delta_component(p, cert).images)
