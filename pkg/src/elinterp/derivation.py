"""Derivation trees: checkable evidence for entailed assertions.

A derivation tree explains why ``O, A ⊨ C(x)`` holds: every node carries
an (element, concept) assertion, leaves are ABox facts or trivial
assertions, and inner nodes name the saturation rule that produced them
together with the child assertions the rule consumed.

Trees are built by replaying the justifications recorded during
saturation (:func:`build_tree_el`), re-checked on their own merits by
:func:`validate_tree_el`, and replanted over the directed unfolding of
the input ABox by :func:`lift_tree_el` — the step where role-inclusion
chains fan out and the tree, unlike its depth, may grow exponentially.
:func:`support_abox` cuts the (unfolded) ABox down to the part a tree
actually stands on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .core import (
    TOP,
    U,
    ABox,
    Concept,
    Exists,
    FeatureError,
    Name,
    Nominal,
    Ontology,
    PointedABox,
    Role,
    ShapeViolation,
    Top,
    concept_size,
    conj,
    signature_of,
)
from .el_engine import (
    Rule5Chain,
    SaturationState,
    _as_elem,
    _ensure_normal,
    _rules_for,
    entails_ci,
    saturate,
)
from .textio import print_concept

__all__ = [
    "DerivationNode",
    "DerivationTree",
    "build_tree_el",
    "validate_tree_el",
    "lift_tree_el",
    "support_abox",
    "tree_to_dot",
    "tree_to_json",
]


# ============================================================================
# Data model
# ============================================================================


@dataclass(frozen=True, eq=False)
class DerivationNode:
    """One assertion (element, concept) plus the rule that yielded it.

    ``rule`` is "abox", "top" or "nominal" for leaves and "r1" … "r6" for
    inner nodes; chain firings ("r5") carry their :class:`Rule5Chain`
    evidence.  Nodes compare by identity, so shared subtrees stay shared.
    """

    elem: tuple
    concept: Concept
    rule: str
    children: tuple = ()
    chain: Optional[Rule5Chain] = None


@dataclass
class DerivationTree:
    """A derivation rooted at ``root`` over the given ontology and ABox.

    ``words`` is set on lifted trees only: it maps each variable of the
    materialized unfolding back to the word that names it (a tuple
    alternating original variables and role names).
    """

    root: DerivationNode
    ontology: Ontology
    abox: ABox
    words: Optional[dict] = None
    flavor: str = "el"

    def goal(self) -> tuple:
        return (self.root.elem, self.root.concept)

    def nodes(self) -> Iterator[DerivationNode]:
        """Every distinct node, parents before their children."""
        seen: set = set()
        stack = [self.root]
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            yield n
            stack.extend(n.children)

    def depth(self) -> int:
        """Longest root-to-leaf path, in edges."""
        memo: dict = {}
        stack = [self.root]
        while stack:
            n = stack.pop()
            if id(n) in memo:
                continue
            missing = [c for c in n.children if id(c) not in memo]
            if missing:
                stack.append(n)
                stack.extend(missing)
            else:
                memo[id(n)] = 1 + max(
                    (memo[id(c)] for c in n.children), default=-1)
        return memo[id(self.root)]

    def outdegree(self) -> int:
        return max((len(n.children) for n in self.nodes()), default=0)

    def size(self) -> int:
        """Number of node occurrences (shared subtrees counted per use)."""
        memo: dict = {}
        stack = [self.root]
        while stack:
            n = stack.pop()
            if id(n) in memo:
                continue
            missing = [c for c in n.children if id(c) not in memo]
            if missing:
                stack.append(n)
                stack.extend(missing)
            else:
                memo[id(n)] = 1 + sum(memo[id(c)] for c in n.children)
        return memo[id(self.root)]


def _goal_pair(goal) -> tuple:
    elem, c = goal
    if isinstance(c, str):
        c = Name(c)
    if not isinstance(c, (Top, Name, Nominal)):
        raise FeatureError("derivable assertions are ⊤, names and nominals")
    return _as_elem(elem), c


def _dedup(pairs: list) -> list:
    return list(dict.fromkeys(pairs))


def _elem_str(e: tuple) -> str:
    kind, v = e
    if kind == "var":
        return f"x{v}"
    if kind == "ind":
        return "{%s}" % v
    return f"[{v}]"


def _ontology_size(o: Ontology) -> int:
    n = 0
    for ci in o.cis:
        n += concept_size(ci.lhs) + concept_size(ci.rhs) + 1
    for ri in o.ris:
        n += len(ri.chain) + 2
    return n


# ============================================================================
# Building trees from the saturation trace
# ============================================================================


def build_tree_el(o: Ontology, abox: ABox, goal, *,
                  chain_cap: Optional[int] = None,
                  state: Optional[SaturationState] = None
                  ) -> Optional[DerivationTree]:
    """Derivation tree witnessing O, A ⊨ C(x), or None if not entailed.

    ``goal`` is an (element, concept) pair; a bare int is read as an ABox
    variable and a bare string as a concept name.  Saturation justifies
    every derived assertion by strictly earlier ones, so replaying them
    terminates and yields a DAG whose depth is bounded by the number of
    distinct assertions; the bound is asserted on every call.  Pass a
    pre-computed ``state`` (for the same ontology and ABox) to avoid
    re-saturating; ``chain_cap`` is handed through to :func:`saturate`.
    """
    o = _ensure_normal(o)
    elem, c = _goal_pair(goal)
    if state is None:
        state = saturate(o, abox, chain_cap=chain_cap)
    if (elem, c) not in state.derived:
        return None

    memo: dict = {}
    building: set = set()

    def node_for(e: tuple, cc: Concept) -> DerivationNode:
        key = (e, cc)
        done = memo.get(key)
        if done is not None:
            return done
        assert key not in building, f"cyclic justification at {key!r}"
        building.add(key)
        why = state.derived[key]
        kind = why[0]
        if kind == "abox":
            node = DerivationNode(e, cc, "abox")
        elif kind == "init-top":
            node = DerivationNode(e, cc, "top")
        elif kind == "init-nominal":
            node = DerivationNode(e, cc, "nominal")
        elif kind == "r1":
            node = DerivationNode(e, cc, "r1", (node_for(why[1], cc),))
        elif kind == "r2":
            node = DerivationNode(e, cc, "r2", (node_for(why[1], why[2]),))
        elif kind == "r3":
            need = _dedup([(e, why[1]), (e, why[2])])
            node = DerivationNode(e, cc, "r3",
                                  tuple(node_for(*p) for p in need))
        elif kind == "r4":
            donor, nom = why[1], why[2]
            need = _dedup([(donor, cc), (e, Nominal(nom)),
                           (donor, Nominal(nom))])
            node = DerivationNode(e, cc, "r4",
                                  tuple(node_for(*p) for p in need))
        elif kind == "r5":
            ch = why[1]
            node = DerivationNode(e, cc, "r5",
                                  tuple(node_for(*p) for p in _chain_need(ch)),
                                  ch)
        elif kind == "r6":
            node = DerivationNode(e, cc, "r6", (node_for(why[1], why[2]),))
        else:  # pragma: no cover
            raise AssertionError(f"unknown justification {why!r}")
        building.discard(key)
        memo[key] = node
        return node

    tree = DerivationTree(node_for(elem, c), o, abox)
    _assert_depth_bound(tree, state)
    return tree


def _chain_need(ch: Rule5Chain) -> list:
    """Child assertions a chain firing rests on: the final label, the hop
    sources, the glue nominals, and a label for every other chain element."""
    need: dict = {}

    def want(e: tuple, c: Concept) -> None:
        need.setdefault((e, c), None)

    want(ch.elems[-1], ch.final_label)
    for j, st in enumerate(ch.steps):
        if st[0] == "hop":
            want(ch.elems[2 * j + 1], st[2])
    for j, g in enumerate(ch.glue):
        if g is not None:
            want(ch.elems[2 * j], Nominal(g))
            want(ch.elems[2 * j + 1], Nominal(g))
    covered = {e for (e, _) in need}
    for e in ch.elems[1:]:
        if e != ch.elems[0] and e not in covered:
            want(e, TOP)
            covered.add(e)
    return list(need)


def _assert_depth_bound(tree: DerivationTree, state: SaturationState) -> None:
    d = tree.depth()
    sig_o = signature_of(tree.ontology)
    sig_all = sig_o | signature_of(tree.abox)
    theta = 1 + len(sig_all.concept_names) + len(sig_all.individuals)
    assert d <= len(state.elements) * theta, \
        "depth exceeds the assertion count"
    sig_a = signature_of(tree.abox)
    if (sig_a.concept_names <= sig_o.concept_names
            and sig_a.role_names <= sig_o.role_names
            and sig_a.individuals <= sig_o.individuals):
        osize = _ontology_size(tree.ontology)
        assert d <= (tree.abox.size() + osize) * osize, \
            "depth exceeds (‖A‖+‖O‖)·‖O‖"


# ============================================================================
# Validation
# ============================================================================


def validate_tree_el(t: DerivationTree) -> tuple[bool, Optional[str]]:
    """Re-check every node of an EL-family derivation tree.

    Returns ``(True, None)`` or ``(False, reason)``.  The checks mirror
    the rule side-conditions but are decided through :func:`entails_ci`
    and the role grammar rather than the saturation trace, so a tree
    assembled by hand is judged on its own merits.
    """
    if t.flavor != "el":
        return False, f"not an EL-family tree: {t.flavor!r}"
    o = _ensure_normal(t.ontology)
    grammar = _rules_for(o).grammar
    seen: set = set()
    stack = [t.root]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        msg = _check_node_el(o, grammar, t.abox, n)
        if msg is not None:
            where = f"({_elem_str(n.elem)}, {print_concept(n.concept)})"
            return False, f"{where} [{n.rule}]: {msg}"
        stack.extend(n.children)
    return True, None


def _check_node_el(o: Ontology, grammar, abox: ABox,
                   n: DerivationNode) -> Optional[str]:
    e, c, kids = n.elem, n.concept, n.children
    have = {(k.elem, k.concept) for k in kids}
    if n.rule == "top":
        if kids:
            return "leaves have no children"
        if c != TOP:
            return "a trivial leaf asserts ⊤"
    elif n.rule == "abox":
        if kids:
            return "leaves have no children"
        if e[0] != "var":
            return "ABox facts live on ABox variables"
        if isinstance(c, Name):
            if (e[1], c.name) not in abox.concept_facts:
                return "fact not in the ABox"
        elif isinstance(c, Nominal):
            if (e[1], c.individual) not in abox.nominal_facts:
                return "fact not in the ABox"
        else:
            return "an ABox leaf is a name or nominal fact"
    elif n.rule == "nominal":
        if kids:
            return "leaves have no children"
        if e[0] != "ind" or c != Nominal(e[1]):
            return "a nominal leaf asserts {a} at the anchor of a"
    elif n.rule == "r1":
        if e[0] != "name" or c != Name(e[1]):
            return "realization lands on the matching name anchor"
        if not any(k.concept == c for k in kids):
            return "no child carries the realized name"
    elif n.rule == "r2":
        if e[0] != "name" or c != Name(e[1]):
            return "realization lands on the matching name anchor"
        if not any(entails_ci(o, k.concept, Exists(U, c)) for k in kids):
            return "no child label entails ∃u.(the realized name)"
    elif n.rule == "r3":
        here = [k.concept for k in kids if k.elem == e]
        if not any(entails_ci(o, conj((c1, c2)), c)
                   for i, c1 in enumerate(here) for c2 in here[i:]):
            return "no pair of labels here entails the conclusion"
    elif n.rule == "r4":
        noms_here = {k.concept for k in kids
                     if k.elem == e and isinstance(k.concept, Nominal)}
        if not any(k.concept == c
                   and any((k.elem, nm) in have for nm in noms_here)
                   for k in kids):
            return "no donor shares a nominal with this element"
    elif n.rule == "r5":
        if n.chain is None:
            return "a chain firing carries its chain"
        msg = _check_chain(o, grammar, abox, n, have)
        if msg is not None:
            return msg
    elif n.rule == "r6":
        if not any(entails_ci(o, Exists(U, k.concept), c) for k in kids):
            return "no child label entails the conclusion under ∃u"
    else:
        return f"unknown rule {n.rule!r}"
    return None


def _anchor_concept(e: tuple) -> Optional[Concept]:
    if e[0] == "ind":
        return Nominal(e[1])
    if e[0] == "name":
        return Name(e[1])
    return None


def _check_chain(o: Ontology, grammar, abox: ABox, n: DerivationNode,
                 have: set) -> Optional[str]:
    ch = n.chain
    k = len(ch.steps)
    if len(ch.elems) != 2 * k + 2 or len(ch.glue) != k + 1:
        return "a chain has 2k+2 elements and k+1 glue entries"
    if ch.elems[0] != n.elem:
        return "the chain starts at the node's element"
    if ch.word != tuple(st[1] for st in ch.steps):
        return "the chain word lists the step roles"
    if not grammar.word_derives(ch.super_role, ch.word):
        return "the word is not included in the super-role"
    if not entails_ci(o, Exists(Role(ch.super_role), ch.final_label),
                      n.concept):
        return "∃super.final does not entail the conclusion"
    for j in range(k + 1):
        p, q, g = ch.elems[2 * j], ch.elems[2 * j + 1], ch.glue[j]
        if g is None:
            if p != q:
                return "an unglued pair must be equal"
        else:
            nm = Nominal(g)
            if (p, nm) not in have or (q, nm) not in have:
                return "glue nominal not among the children"
    for j, st in enumerate(ch.steps):
        src, tgt = ch.elems[2 * j + 1], ch.elems[2 * j + 2]
        if st[0] == "abox":
            r, x, y = st[1], st[2], st[3]
            if src != ("var", x) or tgt != ("var", y):
                return "ABox step endpoints disagree with the chain"
            if (r, x, y) not in abox.role_facts:
                return "ABox step is not an edge of the ABox"
        elif st[0] == "hop":
            r, label, anchor = st[1], st[2], st[3]
            target = _anchor_concept(anchor)
            if target is None:
                return "hop targets are anchors"
            if tgt != anchor:
                return "hop target disagrees with the chain"
            if (src, label) not in have:
                return "hop source label not among the children"
            if not entails_ci(o, label, Exists(Role(r), target)):
                return "hop step is not entailed"
        else:
            return f"unknown step kind {st[0]!r}"
    if (ch.elems[-1], ch.final_label) not in have:
        return "final label not among the children"
    child_elems = {kk.elem for kk in n.children}
    for e2 in ch.elems[1:]:
        if e2 != ch.elems[0] and e2 not in child_elems:
            return "chain element without a child assertion"
    return None


# ============================================================================
# Lifting to the directed unfolding
# ============================================================================


def lift_tree_el(t: DerivationTree, gamma=None) -> DerivationTree:
    """Replant an EL derivation tree over the directed unfolding of its ABox.

    ``gamma`` is the set of individuals whose variables survive unfolding
    as anchors (by default: every individual asserted in the ABox).
    Variables become words — tuples alternating original variables and
    role names, re-entering at length one whenever an anchored variable
    is reached — while individual and name elements stay as they are.

    The result carries the materialized part of the unfolding as its
    ABox, with :attr:`DerivationTree.words` mapping each new variable to
    its word.  Role-inclusion chains are re-threaded step by step, which
    plants a fresh copy of the subtree below every chain element the
    chain passes through: depth is preserved, but the tree may grow
    exponentially in the chain length.
    """
    if t.flavor != "el":
        raise FeatureError("lift_tree_el lifts EL-family trees")
    base = t.abox
    if not base.is_factorized():
        raise ShapeViolation("unfolding expects a factorized ABox")
    if t.root.elem[0] != "var":
        raise FeatureError("only goals at ABox variables are lifted")
    if gamma is None:
        gamma = {a for (_, a) in base.nominal_facts}
    gamma = frozenset(gamma)
    anchored = {x for (x, a) in base.nominal_facts if a in gamma}

    out = ABox()
    word_var: dict = {}

    def var_for(word: tuple) -> int:
        v = word_var.get(word)
        if v is None:
            disp = "·".join(tok if isinstance(tok, str) else base.label(tok)
                            for tok in word)
            v = word_var[word] = out.new_var(display=disp)
            tail = word[-1]
            for a in sorted(base.names_at(tail)):
                out.add_concept(v, a)
            if len(word) == 1:
                for a in sorted(base.nominals_at(tail) & gamma):
                    out.add_nominal(v, a)
        return v

    def entry(e: tuple) -> Optional[tuple]:
        # the word standing for an element entered afresh
        return (e[1],) if e[0] == "var" else None

    def step(word: tuple, r: str, y: int) -> tuple:
        return (y,) if y in anchored else word + (r, y)

    memo: dict = {}

    def lift(n: DerivationNode, word: Optional[tuple]) -> DerivationNode:
        key = (id(n), word)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if n.elem[0] == "var":
            assert word is not None
            new_elem = ("var", var_for(word))
        else:
            new_elem = n.elem
        if n.rule == "r5":
            node = _lift_chain_node(n, new_elem, word)
        else:
            if (n.rule == "abox" and isinstance(n.concept, Nominal)
                    and n.concept.individual not in gamma):
                raise FeatureError(
                    "the unfolding forgets {%s}; cannot lift this tree"
                    % n.concept.individual)
            children = tuple(
                lift(k, word if k.elem == n.elem else entry(k.elem))
                for k in n.children)
            node = DerivationNode(new_elem, n.concept, n.rule, children)
        memo[key] = node
        return node

    def _lift_chain_node(n: DerivationNode, new_elem: tuple,
                         word: Optional[tuple]) -> DerivationNode:
        ch = n.chain
        by_label = {(k.elem, k.concept): k for k in n.children}
        by_elem: dict = {}
        for k in n.children:
            by_elem.setdefault(k.elem, k)

        # thread a word (or anchor) through every chain position
        pos: list = [None] * len(ch.elems)
        pos[0] = word
        for j in range(len(ch.glue)):
            p, q = ch.elems[2 * j], ch.elems[2 * j + 1]
            pos[2 * j + 1] = pos[2 * j] if ch.glue[j] is None else entry(q)
            if j < len(ch.steps):
                st = ch.steps[j]
                if st[0] == "abox":
                    src_w = pos[2 * j + 1]
                    if src_w is None:
                        raise ValueError(
                            "malformed chain: an ABox step leaves a variable")
                    pos[2 * j + 2] = step(src_w, st[1], st[3])
                else:
                    pos[2 * j + 2] = None  # hop targets are anchors

        new_elems = tuple(
            ("var", var_for(pos[i])) if e2[0] == "var" else e2
            for i, e2 in enumerate(ch.elems))
        new_steps = []
        for j, st in enumerate(ch.steps):
            if st[0] == "abox":
                sv = new_elems[2 * j + 1][1]
                tv = new_elems[2 * j + 2][1]
                out.add_role(st[1], sv, tv)
                new_steps.append(("abox", st[1], sv, tv))
            else:
                new_steps.append(st)
        new_chain = Rule5Chain(super_role=ch.super_role, word=ch.word,
                               elems=new_elems, glue=ch.glue,
                               steps=tuple(new_steps),
                               final_label=ch.final_label)

        def place(i: int) -> tuple:
            return pos[i] if ch.elems[i][0] == "var" else ch.elems[i]

        kid_nodes: dict = {}

        def add_kid(i: int, cpt: Concept, orig: DerivationNode) -> None:
            kk = (place(i), cpt)
            if kk not in kid_nodes:
                kid_nodes[kk] = lift(orig, pos[i])

        last = len(ch.elems) - 1
        add_kid(last, ch.final_label,
                by_label[(ch.elems[-1], ch.final_label)])
        for j, st in enumerate(ch.steps):
            if st[0] == "hop":
                add_kid(2 * j + 1, st[2], by_label[(ch.elems[2 * j + 1], st[2])])
        for j, g in enumerate(ch.glue):
            if g is not None:
                nm = Nominal(g)
                add_kid(2 * j, nm, by_label[(ch.elems[2 * j], nm)])
                add_kid(2 * j + 1, nm, by_label[(ch.elems[2 * j + 1], nm)])
        covered = {x for (x, _) in kid_nodes}
        start = place(0)
        for i in range(1, len(ch.elems)):
            x = place(i)
            if x == start or x in covered:
                continue
            orig = by_elem.get(ch.elems[i])
            if orig is None:
                raise ValueError(
                    "chain element without a successor; validate the tree "
                    "before lifting")
            add_kid(i, orig.concept, orig)
            covered.add(x)
        return DerivationNode(new_elem, n.concept, "r5",
                              tuple(kid_nodes.values()), new_chain)

    root = lift(t.root, entry(t.root.elem))
    words = {v: w for w, v in word_var.items()}
    lifted = DerivationTree(root, t.ontology, out, words=words, flavor="el")

    n_max = max((len(n.chain.elems) for n in lifted.nodes()
                 if n.chain is not None), default=1)
    assert lifted.outdegree() <= max(3, 3 * n_max), \
        "lift exceeded the out-degree bound"
    assert lifted.depth() == t.depth(), "lifting must preserve depth"
    return lifted


# ============================================================================
# Support
# ============================================================================


def support_abox(t: DerivationTree,
                 pointed: Optional[PointedABox] = None) -> PointedABox:
    """The sub-ABox a derivation tree actually stands on.

    Keeps the root and every variable named by a tree label, plus — on
    lifted trees — every prefix of a kept word, so the result is a
    prefix-closed rooted part of the unfolding.  The tree itself remains
    valid over the result.  When ``pointed`` is given it is the ambient
    ABox to restrict and must share the tree's variable ids; by default
    the tree's own ABox is used.
    """
    if t.root.elem[0] != "var":
        raise FeatureError("support is rooted at an ABox variable")
    base = pointed.abox if pointed is not None else t.abox
    root = pointed.root if pointed is not None else t.root.elem[1]
    keep = {root}
    for n in t.nodes():
        if n.elem[0] == "var":
            keep.add(n.elem[1])
    if t.words:
        by_word = {w: v for v, w in t.words.items()}
        for v in sorted(keep):
            w = t.words.get(v)
            if not w:
                continue
            for i in range(1, len(w), 2):
                pv = by_word.get(w[:i])
                if pv is not None:
                    keep.add(pv)
    return PointedABox(base.restrict(keep), root)


# ============================================================================
# Export
# ============================================================================


def _elem_json(abox: ABox, e: tuple) -> dict:
    kind, v = e
    if kind == "var":
        return {"kind": "var", "id": v, "name": abox.label(v)}
    if kind == "ind":
        return {"kind": "individual", "name": v}
    return {"kind": "concept-name", "name": v}


def tree_to_json(t: DerivationTree) -> dict:
    """A JSON-ready view of the tree; shared subtrees are stored once.

    ``nodes`` lists every node with child indices, ``root`` is the index
    of the root (always 0).
    """
    nodes: list = []
    idx: dict = {}

    def visit(n: DerivationNode) -> int:
        k = id(n)
        if k in idx:
            return idx[k]
        i = idx[k] = len(nodes)
        nodes.append(None)
        entry = {
            "elem": _elem_json(t.abox, n.elem),
            "concept": print_concept(n.concept),
            "rule": n.rule,
            "children": [visit(c) for c in n.children],
        }
        if n.chain is not None:
            ch = n.chain
            entry["chain"] = {
                "super_role": ch.super_role,
                "word": list(ch.word),
                "elems": [_elem_json(t.abox, e) for e in ch.elems],
                "glue": list(ch.glue),
                "steps": [
                    list(st) if st[0] == "abox"
                    else [st[0], st[1], print_concept(st[2]),
                          _elem_json(t.abox, st[3])]
                    for st in ch.steps
                ],
                "final": print_concept(ch.final_label),
            }
        nodes[i] = entry
        return i

    visit(t.root)
    out = {
        "flavor": t.flavor,
        "goal": {"elem": _elem_json(t.abox, t.root.elem),
                 "concept": print_concept(t.root.concept)},
        "root": 0,
        "nodes": nodes,
        "depth": t.depth(),
        "size": t.size(),
    }
    if t.words is not None:
        out["words"] = {str(v): [tok if isinstance(tok, str) else f"x{tok}"
                                 for tok in w]
                        for v, w in sorted(t.words.items())}
    return out


def _dot_quote(s: str) -> str:
    return '"%s"' % s.replace("\\", "\\\\").replace('"', '\\"')


def tree_to_dot(t: DerivationTree) -> str:
    """Graphviz source for the tree (shared subtrees drawn once)."""
    lines = ["digraph derivation {", "  node [shape=box];"]
    idx: dict = {}

    def name_of(e: tuple) -> str:
        if e[0] == "var":
            return t.abox.label(e[1])
        return _elem_str(e)

    def visit(n: DerivationNode) -> str:
        k = id(n)
        if k in idx:
            return idx[k]
        me = idx[k] = f"n{len(idx)}"
        label = f"{name_of(n.elem)} : {print_concept(n.concept)}\\n{n.rule}"
        if n.chain is not None:
            word = "∘".join(n.chain.word)
            label += f" [{word} ⊑ {n.chain.super_role}]"
        lines.append(f"  {me} [label={_dot_quote(label)}];")
        for c in n.children:
            lines.append(f"  {me} -> {visit(c)};")
        return me

    visit(t.root)
    lines.append("}")
    return "\n".join(lines)
