"""The Galois structure of groups over abelian groups.

The reflector is abelianisation, fibrations are surjections. This module
classifies extensions (trivial covering, central, normal) and computes the
central reflection ``E/[K,E] -> B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CodMismatch, ComparisonFailure
from .fingrp import (
    Extension,
    Hom,
    abelianization,
    center,
    commutator_subgroup,
    induced_on_quotients,
    intersection,
    pullback,
    quotient,
    whole,
)


@dataclass(frozen=True)
class GaloisClassification:
    is_fibration: bool
    is_trivial_covering: bool
    is_central: bool
    is_normal: bool

    def to_json(self, name=""):
        out = {"extension": name}
        out.update({
            "fibration": self.is_fibration,
            "trivial_covering": self.is_trivial_covering,
            "central": self.is_central,
            "normal": self.is_normal,
        })
        return out


def reflect_hom(f: Hom) -> tuple[Hom, Hom, Hom]:
    """``I(f)`` together with the units of its domain and codomain."""
    _, eta_a = abelianization(f.dom)
    _, eta_b = abelianization(f.cod)
    return induced_on_quotients(f, eta_a, eta_b), eta_a, eta_b


def _pair_count(f: np.ndarray, g: np.ndarray, size: int) -> int:
    """``|{(x, y) : f(x) = g(y)}|`` for maps into a set of ``size`` points."""
    return int(np.dot(np.bincount(f, minlength=size), np.bincount(g, minlength=size)))


def unit_square_is_pullback(f: Hom) -> bool:
    """Whether ``A -> B x_{I(B)} I(A)``, ``a -> (f a, eta_A a)`` is bijective."""
    If, eta_a, eta_b = reflect_hom(f)
    target = _pair_count(eta_b.map, If.map, If.cod.order)
    if target != f.dom.order:
        return False
    pairs = f.map * eta_a.cod.order + eta_a.map
    return len(np.unique(pairs)) == f.dom.order


def is_trivial_covering(p: Extension | Hom) -> bool:
    """The unit naturality square of ``p`` is a pullback.

    Computed from the comparison map and cross-checked against the
    characterisation for groups: ``p`` restricts to an isomorphism
    ``[A,A] -> [B,B]``.
    """
    hom = p.hom if isinstance(p, Extension) else p
    by_square = unit_square_is_pullback(hom)
    derived = commutator_subgroup(hom.dom)
    # p maps [A,A] onto [B,B]; it is an isomorphism iff the kernel misses [A,A]
    by_commutators = intersection(derived, hom.kernel).order == 1
    if hom.is_surjective and by_square != by_commutators:
        raise ComparisonFailure(f"trivial-covering tests disagree on {hom}")
    return by_square


def is_central(p: Extension) -> bool:
    return bool(center(p.dom).mask[list(p.kernel.elements)].all())


def kernel_pair(p: Extension):
    """``Eq(p) = E x_B E`` with its two projections."""
    return pullback(p.hom, p.hom, name=f"Eq({p.name or p.dom.name})")


def is_normal_extension(p: Extension) -> bool:
    """Both kernel-pair projections are trivial coverings."""
    _, p1, p2 = kernel_pair(p)
    return is_trivial_covering(p1) and is_trivial_covering(p2)


def classify(p: Extension | Hom) -> GaloisClassification:
    hom = p.hom if isinstance(p, Extension) else p
    if not hom.is_surjective:
        return GaloisClassification(False, False, False, False)
    ext = p if isinstance(p, Extension) else Extension(hom)
    return GaloisClassification(
        True, is_trivial_covering(ext), is_central(ext), is_normal_extension(ext)
    )


def central_reflection(p: Extension) -> tuple[Extension, Hom]:
    """``I1(p): E/[K,E] -> B`` and the quotient ``E -> E/[K,E]``."""
    E = p.dom
    K = p.kernel
    KE = commutator_subgroup(E, K, whole(E))
    Q, q = quotient(E, KE, name=f"{E.name}/[K,E]")
    reps = np.full(Q.order, -1, dtype=np.int64)
    reps[q.map[::-1]] = np.arange(E.order)[::-1]
    hom = Hom(Q, p.cod, p.hom.map[reps])
    return Extension(hom, name=f"I1({p.name})"), q


def pullback_square(p: Extension, f: Hom) -> tuple[Extension, Hom]:
    """``f*(p)`` and the projection of its domain onto ``dom(p)``."""
    if f.cod is not p.cod:
        raise CodMismatch(f"{f} does not land in the codomain of {p}")
    P, to_a, to_e = pullback(f, p.hom, name=f"{f.dom.name}x_{p.cod.name}{p.dom.name}")
    return Extension(to_a, name=f"pb({p.name})"), to_e


def pullback_extension(p: Extension, f: Hom) -> Extension:
    return pullback_square(p, f)[0]


def reflection_preserves_pullback(f: Hom, g: Hom) -> bool:
    """Whether ``I(A x_B C) -> I(A) x_{I(B)} I(C)`` is bijective.

    Holds whenever one leg is a trivial covering.
    """
    P, pa, pc = pullback(f, g)
    Ipa, eta_p, _ = reflect_hom(pa)
    Ipc, _, _ = reflect_hom(pc)
    If, _, _ = reflect_hom(f)
    Ig, _, _ = reflect_hom(g)
    target = _pair_count(If.map, Ig.map, If.cod.order)
    if target != eta_p.cod.order:
        return False
    pairs = Ipa.map * Ipc.cod.order + Ipc.map
    return len(np.unique(pairs)) == eta_p.cod.order


def classification_report(p: Extension) -> dict:
    return classify(p).to_json(p.name)


__all__ = [
    "GaloisClassification",
    "central_reflection",
    "classification_report",
    "classify",
    "is_central",
    "is_normal_extension",
    "is_trivial_covering",
    "kernel_pair",
    "pullback_extension",
    "pullback_square",
    "reflect_hom",
    "reflection_preserves_pullback",
    "unit_square_is_pullback",
]
