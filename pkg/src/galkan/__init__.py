"""Galois groups, fundamental groups and Kan-extension checks at desk scale.

The engine works with the Galois structure of groups over abelian groups
(abelianisation as reflector, surjections as fibrations) and with coverings of
finite graphs (connected components as reflector).
"""
from . import kernels
from .errors import GalkanError
from .fingrp import (
    AbelianInvariants,
    Extension,
    Group,
    Hom,
    Subgroup,
    abelian_invariants,
    abelianization,
    center,
    commutator_subgroup,
    enumerate_homs,
    is_isomorphic,
    mk_group,
    mk_hom,
    pullback,
    quotient,
    subgroup_generated,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianInvariants",
    "Extension",
    "GalkanError",
    "Group",
    "Hom",
    "Subgroup",
    "abelian_invariants",
    "abelianization",
    "center",
    "commutator_subgroup",
    "enumerate_homs",
    "is_isomorphic",
    "kernels",
    "mk_group",
    "mk_hom",
    "pullback",
    "quotient",
    "subgroup_generated",
]
