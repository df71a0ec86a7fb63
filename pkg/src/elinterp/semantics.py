"""Finite interpretations: concept evaluation, model checking, greatest
signature simulations, and the diagram encoding of an interpretation as
an ontology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .core import (
    And,
    Bot,
    CI,
    Concept,
    Dialect,
    Exists,
    Forall,
    Implies,
    Name,
    Nominal,
    Not,
    Ontology,
    Or,
    RI,
    Role,
    Signature,
    Top,
    UNIVERSAL_ROLE_NAME,
    UnknownSymbol,
    conj,
)


@dataclass(frozen=True)
class Interpretation:
    """A finite interpretation.

    Elements are strings.  The universal role is never stored; it is
    implicitly the full product of the domain with itself.
    """

    domain: frozenset[str]
    concepts: dict[str, frozenset[str]] = field(default_factory=dict)
    roles: dict[str, frozenset[tuple[str, str]]] = field(default_factory=dict)
    individuals: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if UNIVERSAL_ROLE_NAME in self.roles:
            raise UnknownSymbol("the universal role is implicit; do not "
                                "store it")
        for a, d in self.individuals.items():
            if d not in self.domain:
                raise UnknownSymbol(f"individual {a} maps outside the domain")

    def concept_ext(self, name: str) -> frozenset[str]:
        if name not in self.concepts:
            raise UnknownSymbol(f"concept name not interpreted: {name}")
        return self.concepts[name]

    def role_ext(self, role: Role) -> frozenset[tuple[str, str]]:
        if role.is_universal:
            return frozenset((d, e) for d in self.domain for e in self.domain)
        if role.name not in self.roles:
            raise UnknownSymbol(f"role name not interpreted: {role.name}")
        pairs = self.roles[role.name]
        if role.inverse:
            return frozenset((e, d) for d, e in pairs)
        return pairs

    def individual_elem(self, a: str) -> str:
        if a not in self.individuals:
            raise UnknownSymbol(f"individual not interpreted: {a}")
        return self.individuals[a]

    def reduct(self, sigma: Signature) -> "Interpretation":
        return Interpretation(
            self.domain,
            {k: v for k, v in self.concepts.items()
             if k in sigma.concept_names},
            {k: v for k, v in self.roles.items() if k in sigma.role_names},
            {k: v for k, v in self.individuals.items()
             if k in sigma.individuals},
        )

    def signature(self) -> Signature:
        return Signature(frozenset(self.concepts),
                         frozenset(self.roles),
                         frozenset(self.individuals))


def make_interpretation(
    domain: Iterable[str],
    concepts: dict[str, Iterable[str]] | None = None,
    roles: dict[str, Iterable[tuple[str, str]]] | None = None,
    individuals: dict[str, str] | None = None,
) -> Interpretation:
    return Interpretation(
        frozenset(domain),
        {k: frozenset(v) for k, v in (concepts or {}).items()},
        {k: frozenset((d, e) for d, e in v) for k, v in (roles or {}).items()},
        dict(individuals or {}),
    )


def interpretation_to_json(i: Interpretation) -> dict:
    return {
        "domain": sorted(i.domain),
        "concepts": {k: sorted(v) for k, v in sorted(i.concepts.items())},
        "roles": {k: sorted(map(list, v)) for k, v in sorted(i.roles.items())},
        "individuals": dict(sorted(i.individuals.items())),
    }


def interpretation_from_json(data: dict) -> Interpretation:
    return make_interpretation(
        data["domain"],
        data.get("concepts", {}),
        {k: [tuple(p) for p in v] for k, v in data.get("roles", {}).items()},
        data.get("individuals", {}),
    )


# ============================================================================
# Concept evaluation and model checking
# ============================================================================


def eval_concept(i: Interpretation, c: Concept) -> frozenset[str]:
    if isinstance(c, Top):
        return i.domain
    if isinstance(c, Bot):
        return frozenset()
    if isinstance(c, Name):
        return i.concept_ext(c.name)
    if isinstance(c, Nominal):
        return frozenset({i.individual_elem(c.individual)})
    if isinstance(c, Exists):
        filler = eval_concept(i, c.filler)
        if c.role.is_universal:
            return i.domain if filler else frozenset()
        pairs = i.role_ext(c.role)
        return frozenset(d for d, e in pairs if e in filler)
    if isinstance(c, And):
        out = i.domain
        for part in c.conjuncts:
            out = out & eval_concept(i, part)
        return out
    if isinstance(c, Forall):
        filler = eval_concept(i, c.filler)
        if c.role.is_universal:
            return i.domain if filler == i.domain else frozenset()
        pairs = i.role_ext(c.role)
        bad = frozenset(d for d, e in pairs if e not in filler)
        return i.domain - bad
    if isinstance(c, Or):
        out: frozenset[str] = frozenset()
        for part in c.disjuncts:
            out = out | eval_concept(i, part)
        return out
    if isinstance(c, Implies):
        return (i.domain - eval_concept(i, c.lhs)) | eval_concept(i, c.rhs)
    if isinstance(c, Not):
        return i.domain - eval_concept(i, c.arg)
    raise TypeError(f"not a concept: {c!r}")


def _compose(pairs1, pairs2):
    by_left = {}
    for d, e in pairs2:
        by_left.setdefault(d, set()).add(e)
    return frozenset(
        (d, f) for d, e in pairs1 for f in by_left.get(e, ())
    )


def check_model(
    i: Interpretation, o: Ontology,
) -> tuple[bool, Optional[Union[CI, RI]]]:
    """Whether ``i`` satisfies every axiom; on failure, also the first
    violated axiom (in ontology order, CIs before RIs)."""
    for ci in o.cis:
        if not eval_concept(i, ci.lhs) <= eval_concept(i, ci.rhs):
            return False, ci
    for ri in o.ris:
        pairs = i.role_ext(Role(ri.chain[0]))
        for r in ri.chain[1:]:
            pairs = _compose(pairs, i.role_ext(Role(r)))
        if not pairs <= i.role_ext(Role(ri.target)):
            return False, ri
    return True, None


# ============================================================================
# Greatest signature simulations
# ============================================================================


@dataclass(frozen=True)
class SimulationRelation:
    pairs: frozenset[tuple[str, str]]
    dialect: Dialect
    sigma: Signature
    total: Optional[bool] = None  # for _u dialects: domain(S) = Δ^I?

    def simulates(self, d: str, e: str) -> bool:
        return (d, e) in self.pairs


def max_simulation(
    i: Interpretation, j: Interpretation, sigma: Signature, dialect: Dialect,
) -> SimulationRelation:
    """The greatest Σ-simulation between two finite interpretations.

    Conditions: Σ-concept-name preservation; for nominal dialects,
    Σ-individual preservation; for every Σ-role edge (and, with inverse
    roles, every inverse Σ-role edge) a matching successor.  For
    universal-role dialects the relation itself is unchanged, but
    ``total`` reports whether every element of ``i`` is simulated.
    """
    concept_names = sorted(sigma.concept_names)
    start = []
    for d in i.domain:
        d_names = {a for a in concept_names
                   if d in i.concepts.get(a, frozenset())}
        d_inds = {x for x, e in i.individuals.items()
                  if e == d and x in sigma.individuals}
        for e in j.domain:
            if any(e not in j.concepts.get(a, frozenset()) for a in d_names):
                continue
            if dialect.nominals and any(
                    j.individuals.get(x) != e for x in d_inds):
                continue
            start.append((d, e))

    pairs = set(start)
    roles = [Role(r) for r in sorted(sigma.role_names)]
    if dialect.inverse_roles:
        roles += [Role(r, inverse=True) for r in sorted(sigma.role_names)]

    # successor maps, with missing roles read as empty
    def succs(interp: Interpretation, role: Role):
        out: dict[str, set[str]] = {}
        base = interp.roles.get(role.name, frozenset())
        for d, e in base:
            if role.inverse:
                d, e = e, d
            out.setdefault(d, set()).add(e)
        return out

    i_succ = {r: succs(i, r) for r in roles}
    j_succ = {r: succs(j, r) for r in roles}

    changed = True
    while changed:
        changed = False
        for (d, e) in sorted(pairs):
            ok = True
            for r in roles:
                for d2 in i_succ[r].get(d, ()):
                    targets = j_succ[r].get(e, ())
                    if not any((d2, e2) in pairs for e2 in targets):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                pairs.discard((d, e))
                changed = True

    total = None
    if dialect.universal_role:
        total = {d for d, _ in pairs} == set(i.domain)
    return SimulationRelation(frozenset(pairs), dialect, sigma, total)


def is_simulation(
    pairs: Iterable[tuple[str, str]],
    i: Interpretation, j: Interpretation,
    sigma: Signature, dialect: Dialect,
) -> bool:
    """Check the simulation conditions for an explicitly given relation."""
    pairs = frozenset(pairs)
    sim = max_simulation(i, j, sigma, dialect)
    if not pairs <= sim.pairs:
        return False
    if dialect.universal_role and {d for d, _ in pairs} != set(i.domain):
        return False
    return True


# ============================================================================
# Diagram of an interpretation
# ============================================================================


def diagram(
    i: Interpretation, sigma: Signature, with_universal: bool,
) -> tuple[Ontology, dict[str, str]]:
    """Encode (the Σ-reduct of) an interpretation as an ontology over one
    fresh concept name per element.

    Returns the ontology and the element → fresh-name map.  With
    ``with_universal`` every ordered pair of elements gets a u-link, so
    that universal-role concepts evaluate over the whole diagram.
    """
    var = {d: f"_X_{d}" for d in sorted(i.domain)}
    cis = []
    for a in sorted(sigma.concept_names):
        for d in sorted(i.concepts.get(a, frozenset())):
            cis.append(CI(Name(var[d]), Name(a)))
    for b in sorted(sigma.individuals):
        if b in i.individuals:
            cis.append(CI(Name(var[i.individuals[b]]), Nominal(b)))
    for r in sorted(sigma.role_names):
        for d, e in sorted(i.roles.get(r, frozenset())):
            cis.append(CI(Name(var[d]), Exists(Role(r), Name(var[e]))))
    if with_universal:
        from .core import U
        for d in sorted(i.domain):
            for e in sorted(i.domain):
                cis.append(CI(Name(var[d]), Exists(U, Name(var[e]))))
    return Ontology(tuple(cis)), var


def interpolant_exists_via_diagram(
    o1: Ontology, o2: Ontology, a: str, b: str, with_universal: bool = True,
) -> bool:
    """Decide interpolant existence for ``a <= b`` by the diagram method:
    build the canonical model of the joint ontology for ``a``, take its
    shared-signature reduct, encode it as a diagram, and ask whether the
    diagram variable of the root is pushed into ``b``.

    Used as an independent cross-check of the canonical-ABox method.
    """
    from . import el_engine
    from .core import ABox, signature_of
    from .normalize import to_normal_form

    o = o1 | o2
    sigma = signature_of(o1, Name(a)) & signature_of(o2, Name(b))
    onf = to_normal_form(o)
    seed = ABox()
    x = seed.new_var()
    seed.add_concept(x, a)
    interp, assign = el_engine.canonical_model_abox(onf, seed)
    d, var = diagram(interp.reduct(sigma), sigma, with_universal)
    return el_engine.entails_ci(onf | d, Name(var[assign[x]]), Name(b))
