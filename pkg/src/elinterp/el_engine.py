"""Entailment, canonical models, and unfoldings for normal-form ELRO_u.

Everything in this module works over ontologies in normal form whose role
constructors are plain role names or the universal role.  Inverse roles are
out of scope here (the context engine handles them) and ``Bot`` must have
been eliminated upstream.

Two constructions do the heavy lifting:

* a model-level fixpoint (:func:`canonical_model_abox`) that completes an
  ABox into a least model of the ontology, reusing one witness element per
  concept name and physically merging variables that are forced into the
  same nominal;

* an assertion-level saturation (:func:`saturate`) over the ABox variables
  plus one anchor element per individual and per concept name.  Its six
  rules derive exactly the assertions that admit a derivation tree, and the
  recorded justifications are what the tree builder later replays.  Rule 5
  (role-inclusion chains) is decided with a context-free reachability table
  over the current edge graph; the extracted chain length is capped.

:func:`canonical_model` is the name-seeded variant whose elements are the
merge-classes of individuals plus one element per realized, non-absorbed
concept name.  It agrees with the ABox-seeded model on the root's concept
memberships but keeps every concept name as its own element.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .core import (
    ABox,
    And,
    BOT_ATOM,
    Bot,
    CI,
    Concept,
    Exists,
    FeatureError,
    Name,
    Nominal,
    Ontology,
    PointedABox,
    ResourceLimit,
    Role,
    ShapeViolation,
    Signature,
    TOP,
    Top,
    concept_key,
    concept_to_pointed_abox,
    ontology_size,
    signature_of,
)
from . import normalize as _nf
from .semantics import Interpretation, make_interpretation

__all__ = [
    "SaturationState",
    "Rule5Chain",
    "CanonicalModel",
    "saturate",
    "entails_assertion",
    "entails_ci",
    "implicitly_definable",
    "canonical_model",
    "canonical_model_abox",
    "sigma_reduct_abox",
    "rooted_part",
    "directed_unfolding",
    "UnfoldingSlice",
    "default_chain_cap",
]


# Elements of the saturation domain: ABox variables, one anchor per
# individual, one anchor per concept name.
Elem = tuple  # ("var", int) | ("ind", str) | ("name", str)


def _as_elem(x) -> Elem:
    if isinstance(x, int):
        return ("var", x)
    if isinstance(x, tuple) and len(x) == 2 and x[0] in ("var", "ind", "name"):
        return x
    raise TypeError(f"not a saturation element: {x!r}")


def default_chain_cap(o: Ontology, abox: ABox) -> int:
    """Default bound on the length of an extracted role-inclusion chain."""
    n = ontology_size(o)
    return 2 ** ((abox.size() + n) * max(n, 1))


def _check_engine_input(o: Ontology) -> None:
    """This engine wants normal form, no inverse roles, and no Bot."""
    for ci in o.cis:
        if not _nf.is_normal_ci(ci):
            raise FeatureError(
                f"ontology not in normal form (run to_normal_form first): {ci!r}")
        for c in (ci.lhs, ci.rhs):
            if isinstance(c, Exists) and c.role.inverse:
                raise FeatureError(
                    "inverse roles are not supported by this engine")


def _check_concept(c: Concept) -> None:
    """Reject anything outside ELO_u (and Bot, which is eliminated upstream)."""
    todo = [c]
    while todo:
        cur = todo.pop()
        if isinstance(cur, (Top, Name, Nominal)):
            continue
        if isinstance(cur, Bot):
            raise FeatureError("Bot is not supported here; run eliminate_bot first")
        if isinstance(cur, And):
            todo.extend(cur.conjuncts)
        elif isinstance(cur, Exists):
            if cur.role.inverse:
                raise FeatureError("inverse roles are not supported by this engine")
            todo.append(cur.filler)
        else:
            raise FeatureError(f"not an ELO_u concept: {cur!r}")


# ============================================================================
# Union-find
# ============================================================================


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        keep, drop = (rx, ry) if rx <= ry else (ry, rx)
        self.parent[drop] = keep
        return keep

    def same(self, x, y) -> bool:
        return self.find(x) == self.find(y)


# ============================================================================
# Role-inclusion chains as a grammar
# ============================================================================

# A chain inclusion r1∘…∘rn ⊑ r is read as a production r → r1 … rn.  The
# language of r (over role names) is then exactly the set of words w with
# O ⊨ w ⊑ r.  Long chains are binarized with shared suffix symbols so that
# reachability stays quadratic in the number of graph nodes.


class _RoleGrammar:
    def __init__(self, ris: Iterable):
        self.unit: dict = defaultdict(set)      # B -> {A}        for A → B
        self.by_left: dict = defaultdict(list)  # B -> [(C, A)]   for A → B C
        self.by_right: dict = defaultdict(list)  # C -> [(B, A)]
        self.has_rules = False
        for ri in ris:
            self.has_rules = True
            self._add(ri.target, tuple(ri.chain))

    def _suffix(self, rest: tuple) -> object:
        if len(rest) == 1:
            return rest[0]
        sym = ("»",) + rest
        if sym not in self._seen_suffixes:
            self._seen_suffixes.add(sym)
            self._binary(sym, rest[0], self._suffix(rest[1:]))
        return sym

    def _binary(self, a, b, c) -> None:
        self.by_left[b].append((c, a))
        self.by_right[c].append((b, a))

    def _add(self, target: str, chain: tuple) -> None:
        if not hasattr(self, "_seen_suffixes"):
            self._seen_suffixes: set = set()
        if len(chain) == 1:
            self.unit[chain[0]].add(target)
        else:
            self._binary(target, chain[0], self._suffix(chain[1:]))

    def word_derives(self, target: str, word: tuple) -> bool:
        """CYK check: does ``target`` rewrite to ``word`` (both role names)?"""
        n = len(word)
        if n == 0:
            return False
        table = [[set() for _ in range(n + 1)] for _ in range(n)]
        for i, sym in enumerate(word):
            cell = {sym}
            grown = True
            while grown:
                grown = False
                for s in list(cell):
                    for a in self.unit.get(s, ()):
                        if a not in cell:
                            cell.add(a)
                            grown = True
            table[i][i + 1] = cell
        for width in range(2, n + 1):
            for i in range(0, n - width + 1):
                j = i + width
                cell = table[i][j]
                for k in range(i + 1, j):
                    for b in table[i][k]:
                        for c, a in self.by_left.get(b, ()):
                            if c in table[k][j]:
                                cell.add(a)
                grown = True
                while grown:
                    grown = False
                    for s in list(cell):
                        for a in self.unit.get(s, ()):
                            if a not in cell:
                                cell.add(a)
                                grown = True
        return target in table[0][n] or (n == 1 and word[0] == target)


def _cfl_closure(grammar: _RoleGrammar, edges, want_back: bool):
    """All derivable facts (x, symbol, y) from labelled base edges.

    ``edges`` yields (x, sym, y, evidence).  Returns (facts, back) where
    ``back`` maps each fact to ("edge", evidence), ("unit", fact) or
    ("concat", fact, fact); ``back`` is None unless requested.
    """
    facts: set = set()
    back: Optional[dict] = {} if want_back else None
    by_start: dict = defaultdict(set)  # (sym, x) -> {y}
    by_end: dict = defaultdict(set)    # (sym, y) -> {x}
    agenda: deque = deque()

    def add(x, s, y, how) -> None:
        f = (x, s, y)
        if f in facts:
            return
        facts.add(f)
        if back is not None:
            back[f] = how
        agenda.append(f)

    for (x, s, y, ev) in edges:
        add(x, s, y, ("edge", ev))
    while agenda:
        f = agenda.popleft()
        x, s, y = f
        by_start[(s, x)].add(y)
        by_end[(s, y)].add(x)
        for a in grammar.unit.get(s, ()):
            add(x, a, y, ("unit", f))
        for c, a in grammar.by_left.get(s, ()):
            for z in tuple(by_start[(c, y)]):
                add(x, a, z, ("concat", f, (y, c, z)))
        for b, a in grammar.by_right.get(s, ()):
            for w in tuple(by_end[(b, x)]):
                add(w, a, y, ("concat", (w, b, x), f))
    return facts, back


# ============================================================================
# Rule tables for a normal-form ontology
# ============================================================================


class _Rules:
    def __init__(self, o: Ontology):
        self.sig = signature_of(o)
        self.tops: set = set()                    # ⊤ ⊑ A
        self.subs: dict = defaultdict(set)        # A ⊑ B
        self.conj: dict = defaultdict(set)        # (A1, A2) ⊑ B, both orders
        self.nom_lhs: dict = defaultdict(set)     # {a} ⊑ A
        self.nom_rhs: dict = defaultdict(set)     # A ⊑ {a}
        self.ex_rhs: dict = defaultdict(set)      # A ⊑ ∃ρ.B  (ρ name or None=u)
        self.ex_lhs_role: dict = defaultdict(set)  # (r, B) ⊑-lhs -> A
        self.ex_lhs_u: dict = defaultdict(set)    # ∃u.B ⊑ A
        for ci in o.cis:
            lhs, rhs = ci.lhs, ci.rhs
            if isinstance(rhs, Name):
                b = rhs.name
                if isinstance(lhs, Top):
                    self.tops.add(b)
                elif isinstance(lhs, Name):
                    self.subs[lhs.name].add(b)
                elif isinstance(lhs, Nominal):
                    self.nom_lhs[lhs.individual].add(b)
                elif isinstance(lhs, And):
                    a1, a2 = (c.name for c in lhs.conjuncts)
                    self.conj[(a1, a2)].add(b)
                    self.conj[(a2, a1)].add(b)
                elif isinstance(lhs, Exists):
                    if lhs.role.is_universal:
                        self.ex_lhs_u[lhs.filler.name].add(b)
                    else:
                        self.ex_lhs_role[(lhs.role.name, lhs.filler.name)].add(b)
            elif isinstance(rhs, Nominal):
                self.nom_rhs[lhs.name].add(rhs.individual)
            elif isinstance(rhs, Exists):
                rho = None if rhs.role.is_universal else rhs.role.name
                self.ex_rhs[lhs.name].add((rho, rhs.filler.name))
        self.grammar = _RoleGrammar(o.ris)


@lru_cache(maxsize=64)
def _rules_for(o: Ontology) -> _Rules:
    _check_engine_input(o)
    return _Rules(o)


# ============================================================================
# The model-level fixpoint (compressed chase)
# ============================================================================

# Node keys: ("v", var) for ABox variables, ("i", a) for individuals,
# ("w", B) for the shared existential witness of concept name B.  A witness
# is created only once some node actually needs a ρ-successor in B, so every
# node that exists is realized.


class _Chase:
    def __init__(self, o: Ontology, abox: ABox):
        self.rules = _rules_for(o)
        self.uf = _UnionFind()
        self.names: dict = {}
        self.noms: dict = {}
        self.base: set = set()      # (node, rolename, node), raw keys
        self._closure_cache = None
        for a in sorted(self.rules.sig.individuals | {n for _, n in abox.nominal_facts}):
            self._node(("i", a))
            self.noms[("i", a)].add(a)
        for x in sorted(abox.vars):
            self._node(("v", x))
        for x, a in abox.concept_facts:
            if a == BOT_ATOM:
                raise FeatureError("Bot assertions are not supported by this engine")
            self.names[self.uf.find(("v", x))].add(a)
        for x, a in abox.nominal_facts:
            self._merge(("v", x), ("i", a))
        for r, x, y in abox.role_facts:
            self.base.add((("v", x), r, ("v", y)))
        self._run()

    def _node(self, key) -> None:
        if key not in self.uf.parent:
            self.uf.add(key)
            self.names[key] = set()
            self.noms[key] = set()

    def _merge(self, p, q):
        rp, rq = self.uf.find(p), self.uf.find(q)
        if rp == rq:
            return rp
        keep = self.uf.union(rp, rq)
        drop = rq if keep == rp else rp
        self.names[keep] |= self.names.pop(drop)
        self.noms[keep] |= self.noms.pop(drop)
        self._closure_cache = None
        return keep

    def _witness(self, b: str):
        key = ("w", b)
        if key not in self.uf.parent:
            self._node(key)
            self.names[key].add(b)
            self._closure_cache = None
        return self.uf.find(key)

    def closure(self) -> set:
        """Role-name edge facts closed under the chain inclusions."""
        if self._closure_cache is None:
            find = self.uf.find
            canon = {(find(x), r, find(y)) for (x, r, y) in self.base}
            if self.rules.grammar.has_rules:
                edges = ((x, r, y, None) for (x, r, y) in canon)
                facts, _ = _cfl_closure(self.rules.grammar, edges, want_back=False)
                canon = {(x, r, y) for (x, r, y) in facts if isinstance(r, str)}
            self._closure_cache = canon
        return self._closure_cache

    def _run(self) -> None:
        rules = self.rules
        while True:
            changed = False
            closed = self.closure()
            # ∃ρ.B ⊑ A for role names ρ
            for (x, r, y) in closed:
                ly = self.names.get(y)
                if ly is None:
                    continue
                for (rr, b), heads in rules.ex_lhs_role.items():
                    if rr == r and b in ly:
                        lx = self.names[self.uf.find(x)]
                        if not heads <= lx:
                            lx |= heads
                            changed = True
            realized = set()
            for labels in self.names.values():
                realized |= labels
            # per-node label rules
            for root in list(self.names):
                if root not in self.names:    # merged away mid-loop
                    continue
                labels = self.names[root]
                add = set(rules.tops)
                for a in tuple(labels):
                    add.update(rules.subs.get(a, ()))
                for pair, heads in rules.conj.items():
                    if pair[0] in labels and pair[1] in labels:
                        add |= heads
                for a in self.noms[root]:
                    add.update(rules.nom_lhs.get(a, ()))
                for b, heads in rules.ex_lhs_u.items():
                    if b in realized:
                        add |= heads
                if not add <= labels:
                    labels |= add
                    changed = True
            # A ⊑ {a}: physical merge
            for root in list(self.names):
                if root not in self.names:
                    continue
                for a in tuple(self.names[root]):
                    for ind in rules.nom_rhs.get(a, ()):
                        if not self.uf.same(root, ("i", ind)):
                            self._merge(root, ("i", ind))
                            changed = True
            # A ⊑ ∃ρ.B: witnesses and edges
            for root in list(self.names):
                if root not in self.names:
                    continue
                for a in tuple(self.names[root]):
                    for rho, b in rules.ex_rhs.get(a, ()):
                        before = len(self.uf.parent)
                        w = self._witness(b)
                        if len(self.uf.parent) != before:
                            changed = True
                        if rho is not None:
                            edge = (self.uf.find(root), rho, w)
                            if edge not in self.base:
                                self.base.add(edge)
                                self._closure_cache = None
                                changed = True
            if not changed:
                return

    # ---- queries ------------------------------------------------------

    def root_of(self, key):
        return self.uf.find(key)

    def names_of(self, key) -> frozenset:
        return frozenset(self.names[self.uf.find(key)])

    def noms_of(self, key) -> frozenset:
        return frozenset(self.noms[self.uf.find(key)])

    def out_edges(self, key):
        root = self.uf.find(key)
        return [(r, y) for (x, r, y) in self.closure() if x == root]

    def satisfies(self, key, c: Concept) -> bool:
        root = self.uf.find(key)
        if isinstance(c, Top):
            return True
        if isinstance(c, Bot):
            return False
        if isinstance(c, Name):
            return c.name in self.names[root]
        if isinstance(c, Nominal):
            other = ("i", c.individual)
            return other in self.uf.parent and self.uf.find(other) == root
        if isinstance(c, And):
            return all(self.satisfies(root, d) for d in c.conjuncts)
        if isinstance(c, Exists):
            if c.role.inverse:
                raise FeatureError("inverse roles are not supported by this engine")
            if c.role.is_universal:
                return any(self.satisfies(n, c.filler) for n in self.names)
            return any(self.satisfies(y, c.filler)
                       for (x, r, y) in self.closure()
                       if x == root and r == c.role.name)
        raise FeatureError(f"not an ELO_u concept: {c!r}")


# ============================================================================
# Ontology oracle: entailment rows behind the saturation rules
# ============================================================================

# Each saturation rule asks ontology-level questions of the shape
# "O ⊨ C1 ⊓ C2 ⊑ ?", "O ⊨ C ⊑ ∃r.?", and so on, where the C are labels from
# the saturation (⊤, concept names, nominals).  One small chase per distinct
# seed answers the whole row of questions for that seed, and the chases are
# memoized per ontology.


def _label_abox(*labels: Concept) -> tuple[ABox, int]:
    abox = ABox()
    x = abox.new_var()
    for lab in labels:
        if isinstance(lab, Name):
            abox.add_concept(x, lab.name)
        elif isinstance(lab, Nominal):
            abox.add_nominal(x, lab.individual)
        elif not isinstance(lab, Top):
            raise TypeError(f"not a saturation label: {lab!r}")
    return abox, x


def _labels_at(chase: _Chase, key) -> tuple[Concept, ...]:
    out = [Name(a) for a in sorted(chase.names_of(key))]
    out += [Nominal(a) for a in sorted(chase.noms_of(key))]
    return tuple(out)


class _Oracle:
    def __init__(self, o: Ontology):
        self.o = o
        self.sig = signature_of(o)
        self._memo: dict = {}
        self._rows: dict = {}

    def _row(self, key, compute):
        hit = self._rows.get(key)
        if hit is None:
            hit = self._rows[key] = compute()
        return hit

    def _chase(self, kind: str, *labels: Concept) -> tuple[_Chase, int]:
        key = (kind,) + labels
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if kind == "at":
            abox, x = _label_abox(*labels)
        elif kind == "ex":
            role, lab = labels
            abox, y = _label_abox(lab)
            x = abox.new_var()
            abox.add_role(role.name, x, y)
        elif kind == "u":
            abox, _ = _label_abox(labels[0])
            x = abox.new_var()
        else:  # pragma: no cover
            raise AssertionError(kind)
        hit = (_Chase(self.o, abox), x)
        self._memo[key] = hit
        return hit

    def conj_conclusions(self, c1: Concept, c2: Concept) -> tuple[Concept, ...]:
        """All C with O ⊨ C1 ⊓ C2 ⊑ C, for label concepts C."""
        c1, c2 = sorted((c1, c2), key=concept_key)

        def compute():
            chase, x = self._chase("at", c1, c2)
            return _labels_at(chase, ("v", x))
        return self._row(("conj", c1, c2), compute)

    def u_names(self, c: Concept) -> tuple[str, ...]:
        """All names A with O ⊨ C ⊑ ∃u.A."""
        def compute():
            chase, _ = self._chase("at", c)
            seen: set = set()
            for labels in chase.names.values():
                seen |= labels
            return tuple(sorted(seen))
        return self._row(("u-names", c), compute)

    def hops(self, c: Concept) -> tuple[tuple, ...]:
        """Entailed single steps O ⊨ C ⊑ ∃s.{b} / ∃s.T into anchors of sig(O)."""
        def compute():
            chase, x = self._chase("at", c)
            out = []
            for (s, y) in chase.out_edges(("v", x)):
                for b in sorted(chase.noms[y] & self.sig.individuals):
                    out.append((s, ("ind", b)))
                for t in sorted(chase.names[y] & self.sig.concept_names):
                    out.append((s, ("name", t)))
            return tuple(sorted(set(out)))
        return self._row(("hops", c), compute)

    def exists_conclusions(self, role: str, c: Concept) -> tuple[Concept, ...]:
        """All labels A with O ⊨ ∃role.C ⊑ A."""
        def compute():
            chase, x = self._chase("ex", Role(role), c)
            return _labels_at(chase, ("v", x))
        return self._row(("ex", role, c), compute)

    def univ_conclusions(self, c: Concept) -> tuple[Concept, ...]:
        """All labels A with O ⊨ ∃u.C ⊑ A."""
        def compute():
            chase, x = self._chase("u", c)
            return _labels_at(chase, ("v", x))
        return self._row(("univ", c), compute)


_ORACLES: dict = {}


def _oracle_for(o: Ontology) -> _Oracle:
    oracle = _ORACLES.get(o)
    if oracle is None:
        if len(_ORACLES) > 64:
            _ORACLES.clear()
        oracle = _ORACLES[o] = _Oracle(o)
    return oracle


# ============================================================================
# Saturation
# ============================================================================


@dataclass(frozen=True)
class Rule5Chain:
    """Evidence for one firing of the chain rule.

    ``elems`` is the alternating sequence a_1, …, a_2k: odd pairs
    (a_1,a_2), (a_3,a_4), … are glued (equal, or sharing the nominal
    recorded in ``glue``), the even steps a_2j → a_2j+1 are the role steps
    recorded in ``steps`` (an original ABox edge or an entailed hop), and
    the ontology entails ``word ⊑ super_role`` as well as
    ∃super_role.final_label ⊑ the derived name.
    """

    super_role: str
    word: tuple
    elems: tuple
    glue: tuple      # one entry per odd pair: None (equal) or a nominal
    steps: tuple     # ("abox", r, x, y) or ("hop", r, src_label, anchor)
    final_label: Concept


Justification = tuple


@dataclass
class SaturationState:
    """Result of saturating an ABox: derived assertions with justifications.

    Assertions range over the ABox variables plus one anchor element per
    individual and per concept name; they are keyed by (element, concept)
    where the concept is ⊤, a name, or a nominal.  Justifications are
    tagged tuples — ("abox",), ("init-top",), ("init-nominal",), ("r1", b),
    ("r2", b, C), ("r3", C1, C2), ("r4", b, c), ("r5", Rule5Chain),
    ("r6", b, C) — naming the premises each rule consumed.
    """

    ontology: Ontology
    abox: ABox
    elements: tuple
    derived: dict
    rounds: int = 0
    stopped: bool = False
    _labels: dict = field(default_factory=dict, repr=False)
    _oracle: object = field(default=None, repr=False)

    def holds(self, elem, concept: Concept) -> bool:
        return (_as_elem(elem), concept) in self.derived

    def labels_of(self, elem) -> frozenset:
        return frozenset(self._labels.get(_as_elem(elem), ()))

    def realized(self, name: str) -> bool:
        """Was ∃u.name derived somewhere (equivalently: at its anchor)?"""
        return (("name", name), Name(name)) in self.derived

    def equal(self, e1, e2) -> bool:
        """Derived equality: the two elements share a derived nominal."""
        e1, e2 = _as_elem(e1), _as_elem(e2)
        if e1 == e2:
            return True
        noms1 = {c for c in self._labels.get(e1, ()) if isinstance(c, Nominal)}
        return any(c in self._labels.get(e2, ()) for c in noms1)

    def assertions(self):
        return sorted(self.derived, key=lambda ec: (repr(ec[0]), concept_key(ec[1])))


class _Stop(Exception):
    pass


def saturate(o: Ontology, abox: ABox, *, chain_cap: Optional[int] = None,
             stop_at: Optional[tuple] = None) -> SaturationState:
    """Close the ABox under the six derivation rules.

    ``o`` must be in normal form.  The derived assertions live on the ABox
    variables together with one anchor per individual and per concept name
    of the combined signature.  ``chain_cap`` bounds the length of the role
    chain extracted for a rule-5 firing (:func:`default_chain_cap` if
    None); exceeding it raises :class:`ResourceLimit`.  ``stop_at`` is an
    optional (element, concept) pair: saturation returns early once that
    assertion is derived, with ``state.stopped`` set.
    """
    _check_engine_input(o)
    if chain_cap is None:
        chain_cap = default_chain_cap(o, abox)
    sig_o = signature_of(o)
    sig_all = sig_o | signature_of(abox)
    names = sorted(sig_all.concept_names)
    inds = sorted(sig_all.individuals)
    elements: list = [("var", x) for x in sorted(abox.vars)]
    elements += [("ind", a) for a in inds]
    elements += [("name", a) for a in names]
    elements = tuple(elements)

    oracle = _oracle_for(o)
    state = SaturationState(o, abox, elements, {}, _oracle=oracle)
    labels = state._labels
    target = None
    if stop_at is not None:
        target = (_as_elem(stop_at[0]), stop_at[1])

    def add(elem: Elem, c: Concept, why: Justification) -> bool:
        key = (elem, c)
        if key in state.derived:
            return False
        state.derived[key] = why
        labels.setdefault(elem, set()).add(c)
        if key == target:
            raise _Stop
        return True

    try:
        # initial assertions
        for e in elements:
            add(e, TOP, ("init-top",))
        for a in inds:
            add(("ind", a), Nominal(a), ("init-nominal",))
        for x, a in sorted(abox.concept_facts):
            if a == BOT_ATOM:
                raise FeatureError("Bot assertions are not supported by this engine")
            add(("var", x), Name(a), ("abox",))
        for x, a in sorted(abox.nominal_facts):
            add(("var", x), Nominal(a), ("abox",))
        _saturate_loop(state, oracle, sig_o, chain_cap, add)
    except _Stop:
        state.stopped = True
    return state


def _saturate_loop(state: SaturationState, oracle: _Oracle, sig_o: Signature,
                   chain_cap: int, add) -> None:
    abox = state.abox
    labels = state._labels
    elements = state.elements
    grammar = _rules_for(state.ontology).grammar
    bound = len(elements) * (len(elements) + 2)
    while True:
        changed = False
        state.rounds += 1
        if state.rounds > bound:  # the rules are monotone over a finite space
            raise AssertionError("saturation failed to reach a fixpoint")
        snapshot = [(e, c) for e, cs in labels.items() for c in tuple(cs)]
        # rules 1 and 2: realization at name anchors
        for e, c in snapshot:
            if isinstance(c, Name):
                changed |= add(("name", c.name), c, ("r1", e))
            for a in oracle.u_names(c):
                changed |= add(("name", a), Name(a), ("r2", e, c))
        # rule 3: conjunctions at one element
        for e in elements:
            here = sorted(labels.get(e, ()), key=concept_key)
            for i, c1 in enumerate(here):
                for c2 in here[i:]:
                    for c in oracle.conj_conclusions(c1, c2):
                        changed |= add(e, c, ("r3", c1, c2))
        # rule 4: copy labels across a shared nominal
        by_nominal: dict = defaultdict(list)
        for e, cs in labels.items():
            for c in cs:
                if isinstance(c, Nominal):
                    by_nominal[c.individual].append(e)
        for nom, group in sorted(by_nominal.items()):
            group = sorted(group, key=repr)
            pooled: set = set()
            for e in group:
                pooled |= labels[e]
            for e in group:
                for c in sorted(pooled - labels[e], key=concept_key):
                    donor = next(d for d in group if c in labels[d])
                    changed |= add(e, c, ("r4", donor, nom))
        # rule 5: role-inclusion chains
        changed |= _apply_rule5(state, oracle, sig_o, grammar, chain_cap,
                                by_nominal, add)
        # rule 6: universal-role conclusions propagate everywhere
        for e, c in snapshot:
            concls = oracle.univ_conclusions(c)
            if concls:
                for e2 in elements:
                    for d in concls:
                        changed |= add(e2, d, ("r6", e, c))
        if not changed:
            return


class _StitchFail(Exception):
    pass


def _apply_rule5(state: SaturationState, oracle: _Oracle, sig_o: Signature,
                 grammar, chain_cap: int, by_nominal: dict, add) -> bool:
    """One pass of the chain rule over the current assertion set.

    Elements are first quotiented by shared nominals; the quotient graph has
    the original ABox role edges plus every entailed hop into an anchor.
    A context-free reachability table then finds, for each super-role r,
    all pairs connected by a word with O ⊨ word ⊑ r.  For every firing the
    witnessing chain is rebuilt from reachability backpointers; its length
    is capped by ``chain_cap``.
    """
    labels = state._labels
    quf = _UnionFind()
    for e in state.elements:
        quf.add(e)
    for group in by_nominal.values():
        first = group[0]
        for e in group[1:]:
            quf.union(first, e)

    sig_labels = []
    for e, cs in labels.items():
        for c in cs:
            if isinstance(c, Name) and c.name in sig_o.concept_names:
                sig_labels.append((e, c))
            elif isinstance(c, Nominal) and c.individual in sig_o.individuals:
                sig_labels.append((e, c))

    edges = []
    for (r, x, y) in sorted(state.abox.role_facts):
        edges.append((quf.find(("var", x)), r, quf.find(("var", y)),
                      ("abox", r, x, y)))
    for e, c in sig_labels:
        for (s, anchor) in oracle.hops(c):
            edges.append((quf.find(e), s, quf.find(anchor),
                          ("hop", s, e, c, anchor)))
    if not edges:
        return False
    facts, back = _cfl_closure(grammar, edges, want_back=True)

    members: dict = defaultdict(list)
    for e in state.elements:
        members[quf.find(e)].append(e)
    holders: dict = defaultdict(list)   # (class, label) -> elements carrying it
    for e, c in sig_labels:
        holders[(quf.find(e), c)].append(e)

    by_role: dict = defaultdict(list)
    for f in facts:
        if isinstance(f[1], str):
            by_role[f[1]].append(f)

    changed = False
    wanted_labels = sorted({c for _, c in sig_labels}, key=concept_key)
    for r in sorted(sig_o.role_names):
        for c in wanted_labels:
            concls = [d for d in oracle.exists_conclusions(r, c)
                      if not isinstance(d, Top)]
            if not concls:
                continue
            for f in by_role.get(r, ()):
                x_cls, _, y_cls = f
                finals = holders.get((y_cls, c))
                if not finals:
                    continue
                for start in members[x_cls]:
                    if all((start, d) in state.derived for d in concls):
                        continue
                    try:
                        chain = _extract_chain(state, back, f, start, finals[0],
                                               c, chain_cap)
                    except _StitchFail:
                        continue    # glue labels not propagated yet; retry later
                    for d in concls:
                        changed |= add(start, d, ("r5", chain))
    return changed


def _extract_chain(state: SaturationState, back: dict, fact, start: Elem,
                   final: Elem, final_label: Concept, cap: int) -> Rule5Chain:
    evs = _flatten(back, fact, cap)

    def elem_of_src(ev):
        return ("var", ev[2]) if ev[0] == "abox" else ev[2]

    def elem_of_tgt(ev):
        return ("var", ev[3]) if ev[0] == "abox" else ev[4]

    def glue_between(p: Elem, q: Elem):
        if p == q:
            return None
        shared = sorted(c.individual
                        for c in state._labels.get(p, ())
                        if isinstance(c, Nominal)
                        and c in state._labels.get(q, ()))
        if not shared:
            raise _StitchFail
        return shared[0]

    elems = [start]
    glue = []
    steps = []
    word = []
    cur = start
    for ev in evs:
        src, tgt = elem_of_src(ev), elem_of_tgt(ev)
        glue.append(glue_between(cur, src))
        if ev[0] == "abox":
            steps.append(("abox", ev[1], ev[2], ev[3]))
        else:
            steps.append(("hop", ev[1], ev[3], ev[4]))
        word.append(ev[1])
        elems.extend((src, tgt))
        cur = tgt
    glue.append(glue_between(cur, final))
    elems.append(final)
    return Rule5Chain(super_role=fact[1], word=tuple(word), elems=tuple(elems),
                      glue=tuple(glue), steps=tuple(steps),
                      final_label=final_label)


def _flatten(back: dict, fact, cap: int) -> list:
    """Base-edge evidence of a reachability fact, in path order."""
    out: list = []
    stack = [fact]
    while stack:
        f = stack.pop()
        how = back[f]
        if how[0] == "edge":
            out.append(how[1])
            if len(out) > cap:
                raise ResourceLimit(
                    "role chain exceeds the extraction cap",
                    stats={"cap": cap, "super_role": fact[1], "length": len(out)})
        elif how[0] == "unit":
            stack.append(how[1])
        else:
            stack.append(how[2])
            stack.append(how[1])
    return out


# ============================================================================
# Entailment
# ============================================================================


def _ensure_normal(o: Ontology) -> Ontology:
    if _nf.is_normal_form(o):
        return o
    return _nf.to_normal_form(o)


def entails_assertion(o: Ontology, abox: ABox, c: Concept, x: int) -> bool:
    """Does O together with the ABox entail C(x)?

    Decided by reserving a fresh name F, adding the normalized form of
    C ⊑ F to the ontology, and saturating: the answer is whether F(x) is
    derived.
    """
    _check_concept(c)
    if x not in abox.vars:
        raise ValueError(f"x{x} is not a variable of the ABox")
    o = _ensure_normal(o)
    taken = (signature_of(o) | signature_of(abox) | signature_of(c)).all_names()
    f = _nf._fresh_plain("_Q", taken)
    query = _nf.to_normal_form(Ontology((CI(c, Name(f)),)), prefix="_Qd")
    state = saturate(o | query, abox, stop_at=(("var", x), Name(f)))
    return state.holds(x, Name(f))


@lru_cache(maxsize=4096)
def _entails_ci_cached(o: Ontology, c: Concept, d: Concept) -> bool:
    pab = concept_to_pointed_abox(c)
    return entails_assertion(o, pab.abox, d, pab.root)


def entails_ci(o: Ontology, c: Concept, d: Concept) -> bool:
    """Does O entail C ⊑ D?  (C, D in ELO_u; O any ELRO_u ontology.)"""
    _check_concept(c)
    _check_concept(d)
    return _entails_ci_cached(_ensure_normal(o), c, d)


def implicitly_definable(o: Ontology, a: str, sigma: Signature) -> bool:
    """Is the name ``a`` implicitly defined by ``sigma`` under O?

    Checked by renaming every non-sigma symbol of O to a primed copy and
    asking whether the union of the two copies forces a ≡ a'.
    """
    if a in sigma.concept_names:
        return True
    o2, rmap = _nf.rename_outside_sigma(o, sigma)
    a2 = rmap.concept_name(a)
    joint = o | o2
    return (entails_ci(joint, Name(a), Name(a2))
            and entails_ci(joint, Name(a2), Name(a)))


# ============================================================================
# Canonical models
# ============================================================================


@dataclass(frozen=True)
class CanonicalModel:
    """Name-seeded canonical model: interpretation, root, and provenance.

    ``provenance`` maps each domain element to ("individuals", frozenset)
    for a merge-class of individuals or ("concept-name", A) for the element
    standing for the concept name A.
    """

    interpretation: Interpretation
    root: str
    provenance: Mapping[str, tuple]

    def __iter__(self):
        yield self.interpretation
        yield self.root


def canonical_model(o: Ontology, a0: str) -> CanonicalModel:
    """The canonical model of a normal-form ontology seeded with the name a0.

    Elements are the classes of individuals that O forces to be equal in
    the presence of an a0-instance, plus one element per concept name that
    is realized (O ⊨ a0 ⊑ ∃u.A) and not absorbed into an individual class.
    Concept and role memberships are read off entailments relative to an
    a0-context.
    """
    o = _ensure_normal(o)
    sig = signature_of(o)
    inds = sorted(sig.individuals)
    cnames = sorted(sig.concept_names | {a0})

    # context chase: one node carrying `seed`, one disconnected a0-node
    def ctx(seed: Concept) -> tuple[_Chase, int]:
        abox, x = _label_abox(seed)
        z = abox.new_var()
        abox.add_concept(z, a0)
        return _Chase(o, abox), x

    base, _ = ctx(Name(a0))
    realized: set = set()
    for labels in base.names.values():
        realized |= labels
    realized &= set(cnames)

    ind_rows = {a: ctx(Nominal(a)) for a in inds}
    name_rows = {a: ctx(Name(a)) for a in sorted(realized | {a0})}

    classes = _UnionFind()
    for a in inds:
        classes.add(a)
    for a in inds:
        chase, x = ind_rows[a]
        for b in chase.noms_of(("v", x)):
            if b in sig.individuals:
                classes.union(a, b)
    class_members: dict = defaultdict(list)
    for a in inds:
        class_members[classes.find(a)].append(a)

    def absorbing_class(name: str) -> Optional[str]:
        chase, x = name_rows[name]
        hit = sorted(chase.noms_of(("v", x)) & sig.individuals)
        return classes.find(hit[0]) if hit else None

    absorbed = {a: absorbing_class(a) for a in name_rows}
    delta_c = sorted(a for a in realized if absorbed.get(a) is None)

    ids: dict = {}
    for cls, members in sorted(class_members.items()):
        ids[("ind", cls)] = min(members)
    for a in delta_c:
        base_id = a
        while base_id in ids.values():
            base_id += "′"
        ids[("name", a)] = base_id

    nodes = sorted(ids)
    concepts = {a: set() for a in cnames}
    roles = {r: set() for r in sorted(sig.role_names)}

    def row_for(node) -> tuple[_Chase, int]:
        return ind_rows[node[1]] if node[0] == "ind" else name_rows[node[1]]

    for node in nodes:
        chase, x = row_for(node)
        me = ids[node]
        for a in chase.names_of(("v", x)):
            if a in concepts:
                concepts[a].add(me)
        for (r, y) in chase.out_edges(("v", x)):
            if r not in roles:
                continue
            for b in chase.noms[y] & sig.individuals:
                roles[r].add((me, ids[("ind", classes.find(b))]))
            for t in chase.names[y]:
                if ("name", t) in ids:
                    roles[r].add((me, ids[("name", t)]))

    individuals = {a: ids[("ind", classes.find(a))] for a in inds}
    interp = make_interpretation(
        domain=[ids[n] for n in nodes],
        concepts={a: sorted(v) for a, v in concepts.items()},
        roles={r: sorted(v) for r, v in roles.items()},
        individuals=individuals,
    )
    if absorbed.get(a0) is not None:
        root = ids[("ind", absorbed[a0])]
    else:
        root = ids[("name", a0)]
    provenance = {}
    for node in nodes:
        if node[0] == "ind":
            provenance[ids[node]] = ("individuals",
                                     frozenset(class_members[node[1]]))
        else:
            provenance[ids[node]] = ("concept-name", node[1])
    return CanonicalModel(interp, root, provenance)


def canonical_model_abox(o: Ontology, abox: ABox):
    """Least model of a normal-form ontology over an ABox.

    Returns (interpretation, assignment) where the assignment maps every
    ABox variable to its domain element.  One witness element is shared per
    concept name, variables forced into a nominal are merged with it, and
    the role extensions are closed under the chain inclusions.
    """
    o = _ensure_normal(o)
    chase = _Chase(o, abox)
    sig = signature_of(o) | signature_of(abox)

    roots = sorted(chase.names, key=repr)
    members: dict = defaultdict(list)
    for key in chase.uf.parent:
        members[chase.uf.find(key)].append(key)

    ids: dict = {}
    taken: set = set()
    for root in roots:
        ms = members[root]
        ind = sorted(m[1] for m in ms if m[0] == "i")
        var = sorted(m[1] for m in ms if m[0] == "v")
        wit = sorted(m[1] for m in ms if m[0] == "w")
        if ind:
            base = ind[0]
        elif var:
            base = min(abox.label(x) for x in var)
        else:
            base = "_w_" + wit[0]
        while base in taken:
            base += "′"
        taken.add(base)
        ids[root] = base

    concepts = {a: set() for a in sorted(sig.concept_names)}
    for root in roots:
        for a in chase.names[root]:
            concepts.setdefault(a, set()).add(ids[root])
    roles = {r: set() for r in sorted(sig.role_names)}
    for (x, r, y) in chase.closure():
        roles.setdefault(r, set()).add((ids[x], ids[y]))
    individuals = {a: ids[chase.root_of(("i", a))]
                   for a in sorted(sig.individuals)}
    interp = make_interpretation(
        domain=[ids[r] for r in roots],
        concepts={a: sorted(v) for a, v in concepts.items()},
        roles={r: sorted(v) for r, v in roles.items()},
        individuals=individuals,
    )
    assignment = {x: ids[chase.root_of(("v", x))] for x in abox.vars}
    return interp, assignment


# ============================================================================
# Σ-reducts and unfoldings
# ============================================================================


def sigma_reduct_abox(m, sigma: Signature, root=None) -> PointedABox:
    """View an interpretation as a Σ-ABox: one variable per element, with
    exactly the Σ-assertions that hold in the model."""
    if isinstance(m, CanonicalModel):
        interp = m.interpretation
        if root is None:
            root = m.root
    else:
        interp = m
    if root is None:
        raise ValueError("a root element is required")
    if root not in interp.domain:
        raise ValueError(f"root {root!r} not in the domain")
    abox = ABox()
    var = {d: abox.new_var(display=d) for d in sorted(interp.domain)}
    for a in sorted(sigma.concept_names & set(interp.concepts)):
        for d in interp.concepts[a]:
            abox.add_concept(var[d], a)
    for b in sorted(sigma.individuals & set(interp.individuals)):
        abox.add_nominal(var[interp.individuals[b]], b)
    for r in sorted(sigma.role_names & set(interp.roles)):
        for (d, e) in interp.roles[r]:
            abox.add_role(r, var[d], var[e])
    return PointedABox(abox, var[root])


def rooted_part(p: PointedABox) -> PointedABox:
    """Restrict to the variables reachable from the root along role edges."""
    seen = {p.root}
    todo = deque([p.root])
    out: dict = defaultdict(list)
    for (r, x, y) in p.abox.role_facts:
        out[x].append(y)
    while todo:
        x = todo.popleft()
        for y in out[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return PointedABox(p.abox.restrict(seen), p.root)


@dataclass
class UnfoldingSlice:
    """A finite, depth-bounded part of a directed unfolding.

    ``pointed`` is the materialized ABox; ``words`` maps each of its
    variables to the word it stands for (a tuple alternating original
    variables and role names); ``truncated`` flags the variables whose
    children were cut off by the depth bound.  ``deepen`` materializes a
    larger slice of the same unfolding on demand.
    """

    pointed: PointedABox
    words: dict
    truncated: frozenset
    _gen: object = field(repr=False)
    depth: int = 0

    def deepen(self, extra: int = 1) -> "UnfoldingSlice":
        return self._gen.slice(self.depth + extra)


class _DirectedUnfolding:
    """Lazy word generator for the directed unfolding of a pointed ABox.

    Words are sequences x0 r1 x1 … rn xn over the original variables such
    that consecutive pairs are role edges and no xi with i ≥ 1 carries a
    Γ-nominal; a step into a Γ-anchored variable is kept as a direct edge
    to that variable's length-zero word instead of producing a copy.
    """

    def __init__(self, p: PointedABox, gamma: frozenset, rooted: bool):
        if not p.abox.is_factorized():
            raise ShapeViolation("directed unfolding expects a factorized ABox")
        self.abox = p.abox
        self.root = p.root
        self.gamma = gamma
        self.rooted = rooted
        self.anchored = {x for (x, a) in p.abox.nominal_facts if a in gamma}
        self._out: dict = defaultdict(list)
        for (r, x, y) in sorted(p.abox.role_facts):
            self._out[x].append((r, y))

    def children(self, word: tuple):
        """Successor words / direct anchor targets of a word."""
        tail = word[-1]
        for (r, y) in self._out[tail]:
            if y in self.anchored:
                yield (r, (y,), True)
            else:
                yield (r, word + (r, y), False)

    def slice(self, depth: int) -> UnfoldingSlice:
        if depth < 1:
            raise ValueError("depth must be at least 1")
        if self.rooted:
            starts = [(self.root,)]
        else:
            starts = [(x,) for x in sorted(self.abox.vars)]
        abox = ABox()
        var: dict = {}
        truncated: set = set()

        def materialize(word: tuple) -> int:
            if word not in var:
                name = "·".join(
                    self.abox.label(t) if isinstance(t, int) else t
                    for t in word)
                v = abox.new_var(display=name)
                var[word] = v
                tail = word[-1]
                for a in self.abox.names_at(tail):
                    abox.add_concept(v, a)
                if len(word) == 1:    # nominals survive only on original vars
                    for a in self.abox.nominals_at(tail):
                        abox.add_nominal(v, a)
            return var[word]

        agenda = deque()
        seen = set(starts)
        for w in starts:
            materialize(w)
            agenda.append(w)
        while agenda:
            word = agenda.popleft()
            steps = (len(word) - 1) // 2
            if steps >= depth - 1:
                if any(True for _ in self.children(word)):
                    truncated.add(var[word])
                continue
            for (r, child, direct) in self.children(word):
                abox.add_role(r, var[word], materialize(child))
                if child not in seen:
                    seen.add(child)
                    agenda.append(child)
        root_var = var[(self.root,)]
        return UnfoldingSlice(PointedABox(abox, root_var),
                              words=dict(var), truncated=frozenset(truncated),
                              _gen=self, depth=depth)


def directed_unfolding(p: PointedABox, gamma: Optional[Iterable[str]] = None,
                       depth: int = 8, rooted: bool = False) -> UnfoldingSlice:
    """Materialize the directed unfolding of a factorized pointed ABox.

    ``gamma`` is the set of anchor individuals (defaults to every nominal in
    the ABox): steps into a Γ-anchored variable stay direct edges rather
    than spawning copies, so unfolding is modulo those anchors.  ``depth``
    bounds the number of variables along any branch (the root counts as
    one); branches cut short are reported in ``truncated``.  With
    ``rooted=True`` only the part reachable from the root is kept.
    """
    if gamma is None:
        gamma = {a for (_, a) in p.abox.nominal_facts}
    gen = _DirectedUnfolding(p, frozenset(gamma), rooted)
    return gen.slice(depth)
