"""Interpolants and explicit definitions for EL-family description logics.

The package decides whether a Craig interpolant (or an explicit signature
definition) exists for a subsumption between two ontologies, synthesizes the
interpolating concept when there is one, and re-verifies every concept it
emits.  Supported logics are EL and its extensions with nominals, role
inclusions, inverse roles, the universal role, and bottom.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    ABox,
    And,
    Bot,
    BOT,
    CI,
    Dialect,
    DialectError,
    ElinterpError,
    Exists,
    FeatureError,
    Name,
    Nominal,
    Ontology,
    PointedABox,
    ResourceLimit,
    RI,
    Role,
    ShapeViolation,
    ShapeWitness,
    Signature,
    Top,
    TOP,
    UniversalRoleRequired,
    UnknownSymbol,
    concept_size,
    concept_to_pointed_abox,
    conj,
    pointed_abox_to_concept,
    signature_of,
)

__all__ = [
    "ABox",
    "And",
    "Bot",
    "BOT",
    "CI",
    "Dialect",
    "DialectError",
    "ElinterpError",
    "Exists",
    "FeatureError",
    "Name",
    "Nominal",
    "Ontology",
    "PointedABox",
    "ResourceLimit",
    "RI",
    "Role",
    "ShapeViolation",
    "ShapeWitness",
    "Signature",
    "Top",
    "TOP",
    "UniversalRoleRequired",
    "UnknownSymbol",
    "concept_size",
    "concept_to_pointed_abox",
    "conj",
    "pointed_abox_to_concept",
    "signature_of",
    "__version__",
]
