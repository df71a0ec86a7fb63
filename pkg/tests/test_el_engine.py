import itertools
import random

import pytest

from elinterp.core import (
    ABox,
    And,
    CI,
    Dialect,
    Exists,
    FeatureError,
    Name,
    Nominal,
    Ontology,
    PointedABox,
    RI,
    ResourceLimit,
    Role,
    ShapeViolation,
    Signature,
    TOP,
    U,
    exists,
    signature_of,
)
from elinterp.normalize import to_normal_form, horn_to_normal_form
from elinterp.semantics import check_model, eval_concept, max_simulation
from elinterp import el_engine as engine
from elinterp.textio import (
    load_corpus,
    parse_concept,
    parse_ontology,
    role_chain_ontology,
    role_chain_sigma,
)

import fixtures_models as figs

A, B, C, D, E = (Name(x) for x in "ABCDE")


def corpus_entry(name):
    (entry,) = [e for e in load_corpus() if e.name == name]
    return entry


def nf(o):
    return to_normal_form(o)


def seed_abox(*names):
    ab = ABox()
    x = ab.new_var()
    for a in names:
        ab.add_concept(x, a)
    return ab, x


O_U = nf(corpus_entry("no_def_universal").ontology())
O_NOM6 = nf(corpus_entry("nominal_needs_universal").ontology())


# ---------------------------------------------------------------------------
# saturation: shape and the individual rules
# ---------------------------------------------------------------------------


def test_saturate_empty_ontology_is_exact():
    ab, x = seed_abox("A")
    st = engine.saturate(Ontology(), ab)
    assert set(st.derived) == {
        (("var", x), TOP),
        (("var", x), A),
        (("name", "A"), TOP),
        (("name", "A"), A),
    }


def test_saturate_requires_normal_form():
    o = Ontology((CI(A, And((B, C))),))
    with pytest.raises(FeatureError):
        engine.saturate(o, seed_abox("A")[0])


def test_saturate_rejects_inverse_roles():
    o = Ontology((CI(Exists(Role("r", inverse=True), B), A),))
    with pytest.raises(FeatureError):
        engine.saturate(o, seed_abox("A")[0])


def test_saturate_rejects_bot_assertions():
    ab, x = seed_abox()
    ab.add_concept(x, "⊥")
    with pytest.raises(FeatureError):
        engine.saturate(Ontology(), ab)


def test_rule_1_and_2_realize_names_at_anchors():
    o = Ontology((CI(A, Exists(U, B)),))
    ab, x = seed_abox("A")
    st = engine.saturate(o, ab)
    assert st.realized("A") and st.realized("B")
    assert st.derived[(("name", "B"), B)][0] == "r2"
    assert not st.holds(x, B)


def test_rule_3_conjunction():
    o = Ontology((CI(And((A, B)), C),))
    ab, x = seed_abox("A", "B")
    st = engine.saturate(o, ab)
    assert st.holds(x, C)
    tag, c1, c2 = st.derived[(("var", x), C)]
    assert tag == "r3" and {c1, c2} == {A, B}


def test_rule_4_copies_labels_across_a_shared_nominal():
    ab = ABox()
    x, y = ab.new_var(), ab.new_var()
    ab.add_concept(x, "C")
    ab.add_nominal(x, "a")
    ab.add_nominal(y, "a")
    st = engine.saturate(Ontology(), ab)
    assert st.holds(y, C)
    assert st.derived[(("var", y), C)][0] == "r4"
    assert st.equal(x, y)
    assert not st.equal(x, ("name", "C"))


def test_rule_6_universal_conclusions_land_everywhere():
    o = Ontology((CI(Exists(U, B), C),))
    ab = ABox()
    x, y = ab.new_var(), ab.new_var()
    ab.add_concept(x, "B")
    st = engine.saturate(o, ab)
    assert st.holds(x, C) and st.holds(y, C)
    assert st.holds(("name", "B"), C)


# -- rule 5 -------------------------------------------------------------------


def test_rule_5_chain_word_for_squared_roles():
    # r0 o r0 <= r1 and exists r1.B <= A: a two-step r0-path into B fires A
    o = Ontology((CI(exists("r1", B), A),), (RI(("r0", "r0"), "r1"),))
    ab = ABox()
    v0, v1, v2 = ab.new_var(), ab.new_var(), ab.new_var()
    ab.add_role("r0", v0, v1)
    ab.add_role("r0", v1, v2)
    ab.add_concept(v2, "B")
    st = engine.saturate(o, ab)
    assert st.holds(v0, A)
    tag, chain = st.derived[(("var", v0), A)]
    assert tag == "r5"
    assert chain.super_role == "r1"
    assert chain.word == ("r0", "r0")
    assert chain.final_label == B
    assert chain.elems[0] == ("var", v0) and chain.elems[-1] == ("var", v2)
    assert all(g is None for g in chain.glue)
    assert chain.steps == (("abox", "r0", v0, v1), ("abox", "r0", v1, v2))


def test_rule_5_glue_through_a_shared_nominal():
    o = Ontology((CI(exists("t", B), Name("Q")),), (RI(("r", "r"), "t"),))
    ab = ABox()
    x, y, z, w = (ab.new_var() for _ in range(4))
    ab.add_role("r", x, y)
    ab.add_nominal(y, "a")
    ab.add_nominal(z, "a")
    ab.add_role("r", z, w)
    ab.add_concept(w, "B")
    # not factorized on purpose: the chain has to bridge y and z
    st = engine.saturate(o, ab)
    assert st.holds(x, Name("Q"))
    tag, chain = st.derived[(("var", x), Name("Q"))]
    assert tag == "r5"
    assert chain.word == ("r", "r")
    assert "a" in chain.glue


def test_rule_5_hop_steps_through_entailed_edges():
    # the middle letter of the chain is not an ABox edge: it is an entailed
    # successor of the label C, landing on the class of b, from where the
    # ABox continues (z also interprets b)
    o = Ontology(
        (CI(C, exists("s", Name("B3"))), CI(Name("B3"), Nominal("b")),
         CI(exists("t", Name("B4")), Name("Q"))),
        (RI(("r", "s", "s2"), "t"),),
    )
    ab = ABox()
    x, y, z, w = (ab.new_var() for _ in range(4))
    ab.add_role("r", x, y)
    ab.add_concept(y, "C")
    ab.add_nominal(z, "b")
    ab.add_role("s2", z, w)
    ab.add_concept(w, "B4")
    st = engine.saturate(o, ab)
    assert st.holds(x, Name("Q"))
    tag, chain = st.derived[(("var", x), Name("Q"))]
    assert tag == "r5"
    assert chain.word == ("r", "s", "s2")
    assert chain.steps[0] == ("abox", "r", x, y)
    assert chain.steps[1][0] == "hop" and chain.steps[1][1] == "s"
    assert chain.steps[2] == ("abox", "s2", z, w)
    assert chain.elems[-1] == ("var", w)
    assert chain.final_label == Name("B4")
    assert "b" in chain.glue


def squaring_ontology(n):
    """exists rn.B <= A over RIs that square r0 n times, and nothing else:
    the only way to A is a genuine r0-chain of 2^n steps."""
    ris = tuple(RI((f"r{i}", f"r{i}"), f"r{i + 1}") for i in range(n))
    return Ontology((CI(exists(f"r{n}", B), A),), ris)


def loop_abox():
    ab = ABox()
    v0, v1 = ab.new_var(), ab.new_var()
    ab.add_role("r0", v0, v1)
    ab.add_role("r0", v1, v1)
    ab.add_concept(v1, "B")
    return ab, v0, v1


def test_rule_5_chain_cap_raises_resource_limit():
    o = squaring_ontology(2)
    ab, v0, v1 = loop_abox()
    with pytest.raises(ResourceLimit) as exc:
        engine.saturate(o, ab, chain_cap=2)
    assert exc.value.stats["cap"] == 2
    engine.saturate(o, ab, chain_cap=4)  # the real chain fits exactly


@pytest.mark.parametrize("n", [1, 2, 3])
def test_role_chain_loop_needs_exponential_words(n):
    # with two variables forming an r0-loop, deriving A at the entry
    # requires a chain of 2^n letters
    o = squaring_ontology(n)
    ab, v0, v1 = loop_abox()
    st = engine.saturate(o, ab)
    assert st.holds(v0, A)
    tag, chain = st.derived[(("var", v0), A)]
    assert tag == "r5" and chain.word == ("r0",) * (2 ** n)


def test_rule_5_fires_via_entailed_final_condition():
    # the corpus family also contains B <= exists r0.B, which already makes
    # any single r0-step into B enough for A; the recorded chain is short
    o = role_chain_ontology(2)
    ab, v0, v1 = loop_abox()
    st = engine.saturate(o, ab, chain_cap=2)  # no ResourceLimit needed
    assert st.holds(v0, A)
    assert engine.entails_ci(o, exists("r0", B), A)


def test_saturation_round_count_is_bounded():
    ab = ABox()
    vs = [ab.new_var() for _ in range(3)]
    ab.add_concept(vs[0], "A")
    ab.add_role("r", vs[0], vs[1])
    st = engine.saturate(O_U, ab)
    assert st.rounds <= len(st.elements) * (len(st.elements) + 2)


# ---------------------------------------------------------------------------
# entailment
# ---------------------------------------------------------------------------


def test_entails_assertion_simple():
    o = Ontology((CI(A, exists("r", B)),))
    ab, x = seed_abox("A")
    assert engine.entails_assertion(o, ab, exists("r", B), x)
    assert not engine.entails_assertion(o, ab, exists("r", C), x)


def test_entails_assertion_universal_ontology():
    ab, x = seed_abox("A")
    c = parse_concept("B & exists r . (C & E)")
    assert engine.entails_assertion(O_U, ab, c, x)


def test_entails_assertion_rejects_unknown_variable():
    ab, x = seed_abox("A")
    with pytest.raises(ValueError):
        engine.entails_assertion(Ontology(), ab, A, x + 7)


def test_entails_assertion_rejects_non_el_concepts():
    ab, x = seed_abox("A")
    with pytest.raises(FeatureError):
        engine.entails_assertion(Ontology(), ab, parse_concept("forall r . A"), x)


def test_entails_ci_trivia():
    assert engine.entails_ci(Ontology(), A, TOP)
    assert engine.entails_ci(Ontology(), A, A)
    assert not engine.entails_ci(Ontology(), TOP, A)
    assert not engine.entails_ci(Ontology(), A, B)


def test_entails_ci_through_universal_lhs():
    # a left-hand universal restriction becomes a disconnected part
    o = Ontology((CI(Exists(U, A), B),))
    assert engine.entails_ci(o, Exists(U, A), B)
    assert engine.entails_ci(o, And((C, Exists(U, A))), B)
    assert not engine.entails_ci(o, C, B)


def test_entails_ci_accepts_unnormalized_ontologies():
    o = corpus_entry("no_def_universal").ontology()
    assert engine.entails_ci(o, A, parse_concept("B & exists r . (C & E)"))


@pytest.mark.parametrize(
    "name",
    ["no_def_universal", "no_def_nominals", "no_def_role_chain",
     "no_def_role_hierarchy", "nominal_needs_universal", "binary_tree_2",
     "role_chain_power_1"],
)
def test_implicit_definability_on_corpus(name):
    entry = corpus_entry(name)
    got = engine.implicitly_definable(entry.ontology(), entry.target,
                                      entry.sigma)
    assert got is entry.implicitly_definable


def test_horn_translation_is_out_of_scope_here():
    # forall-on-the-right turns into exists-inverse-on-the-left, which this
    # engine rejects; the inverse-role engine owns that entry
    entry = corpus_entry("horn_no_def")
    o = horn_to_normal_form(entry.ontology())
    with pytest.raises(FeatureError):
        engine.implicitly_definable(o, entry.target, entry.sigma)


def test_implicit_definability_negative():
    o = corpus_entry("no_def_universal").ontology()
    assert not engine.implicitly_definable(
        o, "A", Signature(frozenset("B"), frozenset(), frozenset()))


def test_implicit_definability_trivial_in_sigma():
    sigma = Signature(frozenset("A"), frozenset(), frozenset())
    assert engine.implicitly_definable(Ontology(), "A", sigma)


# ---------------------------------------------------------------------------
# the least model of an ABox
# ---------------------------------------------------------------------------


def reduct_pair(i, names, roles):
    sigma = Signature(frozenset(names), frozenset(roles), frozenset())
    return i.reduct(sigma)


def isomorphic(i, j):
    """Brute-force interpretation isomorphism (tiny domains only)."""
    if len(i.domain) != len(j.domain):
        return False
    if set(i.individuals) != set(j.individuals):
        return False
    cnames = set(i.concepts) | set(j.concepts)
    rnames = set(i.roles) | set(j.roles)

    def cext(k, a):
        return set(k.concepts.get(a, frozenset()))

    def rext(k, r):
        return set(k.roles.get(r, frozenset()))

    src = sorted(i.domain)
    for perm in itertools.permutations(sorted(j.domain)):
        m = dict(zip(src, perm))
        if (all({m[d] for d in cext(i, a)} == cext(j, a) for a in cnames)
                and all({(m[d], m[e]) for (d, e) in rext(i, r)} == rext(j, r)
                        for r in rnames)
                and all(m[i.individuals[b]] == j.individuals[b]
                        for b in i.individuals)):
            return True
    return False


def test_least_model_of_universal_ontology_is_figure_left():
    ab, x = seed_abox("A")
    interp, assign = engine.canonical_model_abox(O_U, ab)
    got = reduct_pair(interp, "ABCDE", "r")
    assert isomorphic(got, figs.FIG1_I)
    assert check_model(interp, O_U)[0]
    assert assign[x] in eval_concept(interp, A)


def test_least_model_of_the_reduct_is_figure_right():
    ab, x = seed_abox("A")
    interp, assign = engine.canonical_model_abox(O_U, ab)
    sigma = Signature(frozenset("BDE"), frozenset(["r"]), frozenset())
    red = engine.sigma_reduct_abox(interp, sigma, root=assign[x])
    interp2, assign2 = engine.canonical_model_abox(O_U, red.abox)
    got = reduct_pair(interp2, "ABCDE", "r")
    assert isomorphic(got, figs.FIG1_J)
    assert assign2[red.root] not in eval_concept(interp2, A)


def test_least_model_of_a_bare_variable_is_a_point():
    ab = ABox()
    ab.new_var()
    interp, _ = engine.canonical_model_abox(Ontology(), ab)
    assert len(interp.domain) == 1
    assert all(not ext for ext in interp.concepts.values())
    assert all(not ext for ext in interp.roles.values())


def test_least_model_merges_variables_into_nominals():
    o = nf(parse_ontology("A <= {a}"))
    ab = ABox()
    x, y = ab.new_var(), ab.new_var()
    ab.add_concept(x, "A")
    ab.add_concept(y, "A")
    interp, assign = engine.canonical_model_abox(o, ab)
    assert assign[x] == assign[y] == interp.individuals["a"]


def test_least_model_closes_roles_under_chain_inclusions():
    o = nf(parse_ontology("r o s <= t\nA <= exists r . B\nB <= exists s . C"))
    ab, x = seed_abox("A")
    interp, assign = engine.canonical_model_abox(o, ab)
    assert check_model(interp, o)[0]
    assert assign[x] in eval_concept(interp, exists("t", C))


# ---------------------------------------------------------------------------
# the name-seeded canonical model
# ---------------------------------------------------------------------------


def test_canonical_model_of_empty_ontology():
    cm = engine.canonical_model(Ontology(), "A0")
    assert len(cm.interpretation.domain) == 1
    (d,) = cm.interpretation.domain
    assert cm.root == d
    assert cm.interpretation.concepts["A0"] == {d}
    assert cm.provenance[d] == ("concept-name", "A0")


def test_canonical_model_root_of_nominal_ontology_is_the_individual():
    cm = engine.canonical_model(O_NOM6, "A")
    assert cm.root == cm.interpretation.individuals["b"]
    assert cm.provenance[cm.root][0] == "individuals"
    # besides the class of b, only B is realized and not absorbed
    others = [d for d in cm.interpretation.domain if d != cm.root]
    assert len(others) == 1
    assert cm.provenance[others[0]] == ("concept-name", "B")


def test_canonical_model_satisfies_ontology_and_root_name():
    for name in ["no_def_universal", "no_def_nominals", "no_def_role_chain",
                 "no_def_role_hierarchy", "binary_tree_2",
                 "role_chain_power_1", "nominal_needs_universal"]:
        o = nf(corpus_entry(name).ontology())
        cm = engine.canonical_model(o, "A")
        ok, why = check_model(cm.interpretation, o)
        assert ok, (name, why)
        assert cm.root in eval_concept(cm.interpretation, A), name


def test_canonical_model_root_memberships_match_entailment():
    probes = [
        A, B, exists("r", C), exists("r", And((C, E))),
        parse_concept("B & exists r . (C & E)"),
        Exists(U, A), Exists(U, And((D, E))),
        parse_concept("exists r . exists r . Top"),
    ]
    cm = engine.canonical_model(O_U, "A")
    for c in probes:
        lhs = cm.root in eval_concept(cm.interpretation, c)
        rhs = engine.entails_ci(O_U, A, c)
        assert lhs == rhs, c


# ---------------------------------------------------------------------------
# signature reducts and the rooted part
# ---------------------------------------------------------------------------


def test_sigma_reduct_of_figure_left_is_exact():
    sigma = Signature(frozenset("BDE"), frozenset(["r"]), frozenset())
    red = engine.sigma_reduct_abox(figs.FIG1_I, sigma, root="a")
    ab = red.abox
    by_label = {ab.label(x): x for x in ab.vars}
    a, b = by_label["a"], by_label["b"]
    assert red.root == a
    assert ab.concept_facts == {(a, "B"), (b, "D"), (b, "E")}
    assert ab.nominal_facts == set()
    assert ab.role_facts == {("r", a, b)}


def test_sigma_reduct_and_rooted_part_nominal_example():
    cm = engine.canonical_model(O_NOM6, "A")
    sigma = Signature(frozenset(["B"]), frozenset(), frozenset(["b"]))
    red = engine.sigma_reduct_abox(cm, sigma)
    ab = red.abox
    assert ab.nominals_at(red.root) == {"b"}
    others = [x for x in ab.vars if x != red.root]
    assert len(others) == 1 and ab.names_at(others[0]) == {"B"}
    assert ab.role_facts == set()

    down = engine.rooted_part(red)
    assert down.abox.vars == {red.root}
    assert down.abox.nominal_facts == {(red.root, "b")}
    assert down.abox.concept_facts == set()


def test_sigma_reduct_with_full_signature_keeps_everything():
    sigma = figs.FIG1_J.signature()
    red = engine.sigma_reduct_abox(figs.FIG1_J, sigma, root="a'")
    ab = red.abox
    assert len(ab.vars) == 3
    assert len(ab.concept_facts) == 5
    assert len(ab.role_facts) == 2


def test_sigma_reduct_requires_a_root():
    with pytest.raises(ValueError):
        engine.sigma_reduct_abox(figs.FIG1_I, figs.FIG1_I.signature())
    with pytest.raises(ValueError):
        engine.sigma_reduct_abox(figs.FIG1_I, figs.FIG1_I.signature(),
                                 root="nope")


def test_rooted_part_drops_unreachable_components():
    ab = ABox()
    x, y, z = ab.new_var(), ab.new_var(), ab.new_var()
    ab.add_role("r", x, y)
    ab.add_concept(z, "B")
    out = engine.rooted_part(PointedABox(ab, x))
    assert out.abox.vars == {x, y}


# ---------------------------------------------------------------------------
# directed unfoldings
# ---------------------------------------------------------------------------


def test_unfolding_of_a_self_loop_is_a_path():
    ab = ABox()
    x = ab.new_var(display="x")
    ab.add_role("r", x, x)
    sl = engine.directed_unfolding(PointedABox(ab, x), depth=3)
    names = sorted(sl.pointed.abox.label(v) for v in sl.pointed.abox.vars)
    assert names == ["x", "x·r·x", "x·r·x·r·x"]
    assert len(sl.truncated) == 1
    deeper = sl.deepen(1)
    assert len(deeper.pointed.abox.vars) == 4


def test_unfolding_of_the_role_chain_reduct():
    # the reduct {r0(rho,y), r0(y,y), B(y)} unfolds into an r0-path with B
    # on every non-root variable
    o = role_chain_ontology(1)
    ab, x = seed_abox("A")
    interp, assign = engine.canonical_model_abox(o, ab)
    red = engine.sigma_reduct_abox(interp, role_chain_sigma(1), root=assign[x])
    sl = engine.directed_unfolding(red, depth=4, rooted=True)
    ab2 = sl.pointed.abox
    assert len(ab2.vars) == 4
    non_root = [v for v in ab2.vars if v != sl.pointed.root]
    assert all(ab2.names_at(v) == {"B"} for v in non_root)
    assert ab2.names_at(sl.pointed.root) == set()
    # a single r0-path
    assert len(ab2.role_facts) == 3
    assert all(r == "r0" for (r, _, _) in ab2.role_facts)


def test_unfolding_keeps_anchored_steps_direct():
    ab = ABox()
    x = ab.new_var(display="x")
    y = ab.new_var(display="y")
    ab.add_role("r", x, y)
    ab.add_role("r", y, x)
    ab.add_nominal(y, "a")
    sl = engine.directed_unfolding(PointedABox(ab, x), gamma={"a"}, depth=4)
    ab2 = sl.pointed.abox
    by_label = {ab2.label(v): v for v in ab2.vars}
    # y is never copied; x is copied once below y
    assert set(by_label) == {"x", "y", "y·r·x"}
    assert ab2.nominals_at(by_label["y"]) == {"a"}
    edges = {(r, ab2.label(p), ab2.label(q)) for (r, p, q) in ab2.role_facts}
    assert ("r", "x", "y") in edges and ("r", "y·r·x", "y") in edges


def test_unfolding_without_anchors_copies_nominal_variables():
    ab = ABox()
    x = ab.new_var(display="x")
    y = ab.new_var(display="y")
    ab.add_role("r", x, y)
    ab.add_nominal(y, "a")
    sl = engine.directed_unfolding(PointedABox(ab, x), gamma=(), depth=2)
    ab2 = sl.pointed.abox
    copies = [v for v in ab2.vars if ab2.label(v) == "x·r·y"]
    assert len(copies) == 1
    # the copy does not carry the nominal; the original variable does
    assert ab2.nominals_at(copies[0]) == set()
    originals = [v for v in ab2.vars if ab2.label(v) == "y"]
    assert ab2.nominals_at(originals[0]) == {"a"}


def test_unfolding_rooted_variant_drops_other_components():
    ab = ABox()
    x = ab.new_var(display="x")
    y = ab.new_var(display="y")
    z = ab.new_var(display="z")
    ab.add_role("r", x, y)
    ab.add_concept(z, "B")
    sl = engine.directed_unfolding(PointedABox(ab, x), depth=3, rooted=True)
    labels = {sl.pointed.abox.label(v) for v in sl.pointed.abox.vars}
    assert labels == {"x", "x·r·y"}
    # without rooted=True every variable starts its own word tree
    sl_all = engine.directed_unfolding(PointedABox(ab, x), depth=3)
    all_labels = {sl_all.pointed.abox.label(v)
                  for v in sl_all.pointed.abox.vars}
    assert all_labels == {"x", "y", "z", "x·r·y"}


def test_unfolding_requires_factorized_input():
    ab = ABox()
    x, y = ab.new_var(), ab.new_var()
    ab.add_nominal(x, "a")
    ab.add_nominal(y, "a")
    with pytest.raises(ShapeViolation):
        engine.directed_unfolding(PointedABox(ab, x), depth=2)


def test_unfolding_rejects_nonpositive_depth():
    ab = ABox()
    x = ab.new_var()
    with pytest.raises(ValueError):
        engine.directed_unfolding(PointedABox(ab, x), depth=0)


@pytest.mark.parametrize("n", [1, 2])
def test_unfolding_preserves_bounded_entailment(n):
    # saturating the unfolded loop gives the same verdict at the root as
    # the loop itself once the slice spans the full 2^n-step chain, and
    # loses it one variable short of that
    o = squaring_ontology(n)
    ab, v0, v1 = loop_abox()
    p = PointedABox(ab, v0)
    assert engine.saturate(o, ab).holds(v0, A)
    deep = engine.directed_unfolding(p, depth=2 ** n + 1, rooted=True)
    assert engine.saturate(o, deep.pointed.abox).holds(deep.pointed.root, A)
    shallow = engine.directed_unfolding(p, depth=2 ** n, rooted=True)
    assert not engine.saturate(o, shallow.pointed.abox).holds(
        shallow.pointed.root, A)


# ---------------------------------------------------------------------------
# the two routes agree (evaluation over the least model vs saturation)
# ---------------------------------------------------------------------------

_NAMES = ["A", "B", "C", "D"]
_ROLES = ["r", "s"]
_INDS = ["a", "b"]


def _rand_concept(rng, depth, allow_nom):
    kinds = ["name", "top"] + (["nom"] if allow_nom else [])
    if depth > 0:
        kinds += ["ex", "ex", "and", "exu"]
    k = rng.choice(kinds)
    if k == "name":
        return Name(rng.choice(_NAMES))
    if k == "top":
        return TOP
    if k == "nom":
        return Nominal(rng.choice(_INDS))
    if k == "ex":
        return exists(rng.choice(_ROLES), _rand_concept(rng, depth - 1, allow_nom))
    if k == "exu":
        return Exists(U, _rand_concept(rng, depth - 1, allow_nom))
    return And((_rand_concept(rng, depth - 1, allow_nom),
                _rand_concept(rng, depth - 1, allow_nom)))


def _rand_instance(rng):
    cis = [CI(_rand_concept(rng, 2, True), _rand_concept(rng, 2, True))
           for _ in range(rng.randrange(1, 6))]
    ris = []
    if rng.random() < 0.5:
        for _ in range(rng.randrange(1, 3)):
            ris.append(RI(tuple(rng.choice(_ROLES)
                                for _ in range(rng.randrange(1, 3))),
                          rng.choice(_ROLES)))
    o = nf(Ontology(tuple(cis), tuple(ris)))
    ab = ABox()
    vs = [ab.new_var() for _ in range(rng.randrange(1, 4))]
    for _ in range(rng.randrange(0, 4)):
        ab.add_concept(rng.choice(vs), rng.choice(_NAMES))
    for _ in range(rng.randrange(0, 3)):
        ab.add_role(rng.choice(_ROLES), rng.choice(vs), rng.choice(vs))
    if rng.random() < 0.4:
        ab.add_nominal(rng.choice(vs), rng.choice(_INDS))
    return o, ab, vs


def _probe_for(rng, sig):
    while True:
        c = _rand_concept(rng, 2, bool(sig.individuals))
        cs = signature_of(c)
        if (cs.concept_names <= sig.concept_names
                and cs.role_names - {"u"} <= sig.role_names
                and cs.individuals <= sig.individuals):
            return c


def test_eval_and_saturation_agree_on_random_instances():
    rng = random.Random(20260817)
    hits = 0
    for _ in range(500):
        o, ab, vs = _rand_instance(rng)
        x = rng.choice(vs)
        sig = signature_of(o) | signature_of(ab)
        c = _probe_for(rng, sig)
        interp, assign = engine.canonical_model_abox(o, ab)
        ok, why = check_model(interp, o)
        assert ok, why
        lhs = assign[x] in eval_concept(interp, c)
        rhs = engine.entails_assertion(o, ab, c, x)
        assert lhs == rhs, (o, sorted(ab.concept_facts), c)
        hits += rhs
    # sanity: the sample is not one-sided
    assert 20 < hits < 480


def test_eval_and_saturation_agree_on_corpus_reducts():
    for name in ["no_def_universal", "no_def_nominals", "no_def_role_chain",
                 "no_def_role_hierarchy", "nominal_needs_universal"]:
        entry = corpus_entry(name)
        o = nf(entry.ontology())
        ab, x = seed_abox("A")
        interp, assign = engine.canonical_model_abox(o, ab)
        red = engine.sigma_reduct_abox(interp, entry.sigma, root=assign[x])
        interp2, assign2 = engine.canonical_model_abox(o, red.abox)
        full = signature_of(o) | signature_of(red.abox)
        probes = [A, B, exists("r", C), Exists(U, E),
                  parse_concept("B & exists r . (C & E)")]
        for c in probes:
            csig = signature_of(c)
            if not (csig.concept_names <= full.concept_names
                    and csig.role_names - {"u"} <= full.role_names):
                continue
            lhs = assign2[red.root] in eval_concept(interp2, c)
            rhs = engine.entails_assertion(o, red.abox, c, red.root)
            assert lhs == rhs, (name, c)


def test_canonical_model_simulates_into_every_model():
    rng = random.Random(99)
    elo_u = Dialect.named("elo_u")
    for trial in range(50):
        cis = [CI(_rand_concept(rng, 2, trial % 2 == 0),
                  _rand_concept(rng, 2, trial % 2 == 0))
               for _ in range(rng.randrange(1, 5))]
        o = nf(Ontology(tuple(cis)))
        cm = engine.canonical_model(o, "A")
        ab = ABox()
        vs = [ab.new_var() for _ in range(rng.randrange(1, 3))]
        ab.add_concept(vs[0], "A")
        for _ in range(rng.randrange(0, 3)):
            ab.add_concept(rng.choice(vs), rng.choice(_NAMES))
        for _ in range(rng.randrange(0, 3)):
            ab.add_role(rng.choice(_ROLES), rng.choice(vs), rng.choice(vs))
        other, _ = engine.canonical_model_abox(o, ab)
        sig = signature_of(o) | signature_of(ab)
        sim = max_simulation(cm.interpretation, other, sig, elo_u)
        for d in eval_concept(other, A):
            assert (cm.root, d) in sim.pairs


def test_default_chain_cap_grows_with_input():
    o = role_chain_ontology(1)
    ab, _ = seed_abox("A")
    small = engine.default_chain_cap(Ontology(), ab)
    big = engine.default_chain_cap(o, ab)
    assert big > small > 1
