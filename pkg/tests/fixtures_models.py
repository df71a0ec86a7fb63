"""Hand-written finite models used across test modules.

Each pair (I, J) witnesses that a concept name has no explicit
signature definition under the matching corpus ontology: both are
models, the root of I satisfies the name, the root of J does not, and
J simulates I on the signature.
"""

from elinterp.semantics import make_interpretation

# -- models for the universal-role ontology (also for its inverse variant) --

FIG1_I = make_interpretation(
    domain=["a", "b"],
    concepts={"A": ["a"], "B": ["a"], "C": ["b"], "D": ["b"], "E": ["b"]},
    roles={"r": [("a", "b")]},
)

FIG1_J = make_interpretation(
    domain=["a'", "b'", "b''"],
    concepts={"A": [], "B": ["a'"], "C": ["b''"], "D": ["b'", "b''"],
              "E": ["b'"]},
    roles={"r": [("a'", "b'"), ("a'", "b''")]},
)

FIG1_SIM = {("a", "a'"), ("b", "b'")}

# -- models for the nominal ontology ----------------------------------------
# (The published picture draws only the r-edge out of a, but b and c also
#  satisfy A, so A <= exists r.(E & {c}) forces r-edges from them to c.)

FIG_NOM_I = make_interpretation(
    domain=["a", "b", "c"],
    concepts={"A": ["a", "b", "c"], "Q1": ["b"], "Q2": ["b"], "E": ["c"]},
    roles={"s": [("a", "b"), ("b", "c"), ("c", "b"), ("b", "b")],
           "r": [("a", "c"), ("b", "c"), ("c", "c")]},
    individuals={"c": "c"},
)

FIG_NOM_J = make_interpretation(
    domain=["a'", "b'", "b''", "c'"],
    concepts={"A": [], "Q1": ["b'"], "Q2": ["b''"], "E": []},
    roles={"s": [("a'", "b'"), ("c'", "b'"), ("b'", "c'"), ("b'", "b'"),
                 ("b''", "b''"), ("b'", "b''"), ("a'", "b''"),
                 ("b''", "c'"), ("c'", "b''")],
           "r": []},
    individuals={"c": "c'"},
)

FIG_NOM_SIM = {("a", "a'"), ("b", "b'"), ("c", "c'")}

# -- models for the role-inclusion ontology (r o s <= s) ---------------------

FIG_RI_I = make_interpretation(
    domain=["a", "b", "c"],
    concepts={"A": ["a", "c"], "B": ["b"], "E": ["c"]},
    roles={"s": [("a", "b"), ("c", "b")],
           "r": [("a", "c"), ("c", "c")]},
)

FIG_RI_J = make_interpretation(
    domain=["a'", "b'", "b''", "c'", "c''"],
    concepts={"A": ["c'", "c''"], "B": ["b''"], "E": ["c'", "c''"]},
    roles={"s": [("a'", "b'"), ("c'", "b'"), ("c'", "b''"), ("c''", "b''")],
           "r": [("c'", "c''"), ("c''", "c''")]},
)

FIG_RI_SIM = {("a", "a'"), ("b", "b'"), ("c", "c'")}

# -- models for the role-hierarchy ontology ----------------------------------
# (The published picture omits s1 on the c'->b'' edge; without it J fails
#  E <= exists s1.B, so the edge carries s1 here.)

FIG_RH_I = make_interpretation(
    domain=["a", "b", "c"],
    concepts={"A": ["a", "c"], "B": ["b"], "E": ["c"]},
    roles={"s": [("a", "b"), ("a", "c"), ("c", "b"), ("c", "c")],
           "s2": [("a", "b"), ("a", "c"), ("c", "b"), ("c", "c")],
           "s1": [("c", "b")]},
)

FIG_RH_J = make_interpretation(
    domain=["a'", "b'", "b''", "c'", "c''"],
    concepts={"A": ["c'", "c''"], "B": ["b''"], "E": ["c'", "c''"]},
    roles={
        "s2": [("a'", "b'"), ("a'", "c'"), ("c'", "b'"), ("c'", "b''"),
               ("c'", "c''"), ("c'", "c'"), ("c''", "b''"), ("c''", "c''")],
        "s": [("c'", "b'"), ("c'", "b''"), ("c'", "c''"), ("c''", "b''"),
              ("c''", "c''")],
        "s1": [("c'", "b'"), ("c'", "b''"), ("c''", "b''")],
    },
)

FIG_RH_SIM = {("a", "a'"), ("b", "b'"), ("c", "c'")}
