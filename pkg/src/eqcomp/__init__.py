"""Doctrines over finite categories, their quotient completions and the checks
that tell whether the completed structure behaves as it should."""

from .completions import (
    comprehension_completion,
    eqc,
    extensional_collapse,
    functional_completion,
    intensional_qc,
)
from .corpus import PowerDoctrine, SubDoctrine, WeakSubobjects
from .doctrine import PROPERTIES, verify, verify_all
from .kernel import FinSet, Fragment, PresentedCategory, PropertyReport
from .lattice import InfSemilattice, boolean, chain, h3

__all__ = [
    "FinSet",
    "Fragment",
    "InfSemilattice",
    "PROPERTIES",
    "PowerDoctrine",
    "PresentedCategory",
    "PropertyReport",
    "SubDoctrine",
    "WeakSubobjects",
    "boolean",
    "chain",
    "comprehension_completion",
    "eqc",
    "extensional_collapse",
    "functional_completion",
    "h3",
    "intensional_qc",
    "verify",
    "verify_all",
]
