"""Shared helpers and hypothesis strategies for the test suite."""

from __future__ import annotations

import os

from hypothesis import HealthCheck, settings, strategies as st

from elinterp.core import (
    CI,
    Exists,
    Name,
    Nominal,
    Ontology,
    RI,
    Role,
    TOP,
    U,
    conj,
)

SKIP_SLOW = os.environ.get("ELINTERP_SKIP_SLOW") == "1"

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


# ---------------------------------------------------------------------------
# concept strategies
# ---------------------------------------------------------------------------

CONCEPT_NAMES = ["A", "B", "C", "D", "E"]
ROLE_NAMES = ["r", "s", "t"]
INDIVIDUALS = ["a", "b", "c"]


def concepts(max_size=10, inverse=False, nominals=False, universal=False,
             names=CONCEPT_NAMES, roles=ROLE_NAMES, individuals=INDIVIDUALS):
    """Random concepts in canonical form, within the given feature set."""
    atoms = [st.just(TOP), st.sampled_from(names).map(Name)]
    if nominals:
        atoms.append(st.sampled_from(individuals).map(Nominal))
    leaf = st.one_of(*atoms)

    role_pool = [Role(r) for r in roles]
    if inverse:
        role_pool += [Role(r, inverse=True) for r in roles]
    if universal:
        role_pool.append(U)

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(role_pool), children).map(
                lambda t: Exists(t[0], t[1])),
            st.lists(children, min_size=2, max_size=3).map(conj),
        )

    return st.recursive(leaf, extend, max_leaves=max_size)


def random_el_ontologies(n_cis=(1, 6), with_ris=False, depth=6,
                         names=CONCEPT_NAMES, roles=ROLE_NAMES,
                         nominals=False, universal=False, inverse=False):
    """Random ontologies whose CIs relate small concepts."""
    c = concepts(max_size=depth, nominals=nominals, universal=universal,
                 inverse=inverse, names=names, roles=roles)
    ci = st.tuples(c, c).map(lambda t: CI(t[0], t[1]))
    cis = st.lists(ci, min_size=n_cis[0], max_size=n_cis[1])
    if not with_ris:
        return cis.map(lambda xs: Ontology(tuple(xs)))
    ri = st.tuples(
        st.lists(st.sampled_from(roles), min_size=1, max_size=2),
        st.sampled_from(roles),
    ).map(lambda t: RI(tuple(t[0]), t[1]))
    ris = st.lists(ri, min_size=0, max_size=2)
    return st.tuples(cis, ris).map(
        lambda t: Ontology(tuple(t[0]), tuple(t[1])))
