"""Core syntax: concepts, axioms, ontologies, signatures, ABoxes.

Concepts are immutable, hashable trees.  Conjunctions are kept in a canonical
form (flattened, sorted, duplicate-free, never containing Top) so that
syntactic equality is meaningful; always build them through :func:`conj`.

ABoxes here are sets of facts over integer variables.  A *pointed* ABox (an
ABox with a distinguished root) is the bridge between concepts and structures:
``concept_to_pointed_abox`` turns a concept into its tree-shaped ABox and
``pointed_abox_to_concept`` reads a concept back off a tree-shaped ABox,
using inverse roles and the universal role only when the dialect allows them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union


# ============================================================================
# Errors
# ============================================================================


class ElinterpError(Exception):
    """Base class for all errors raised by this package."""


class FeatureError(ElinterpError):
    """A construct is outside the feature set of the requested operation."""


class DialectError(ElinterpError):
    """Input uses constructors that the chosen dialect does not admit."""


class UnknownSymbol(ElinterpError):
    """A symbol is not part of the expected signature."""


class ShapeViolation(ElinterpError):
    """An ABox is not tree-shaped in the sense required by a conversion."""


class UniversalRoleRequired(ElinterpError):
    """The ABox cannot be expressed as a concept without the universal role."""


class ResourceLimit(ElinterpError):
    """A configured size/depth cap was exceeded before an answer was found.

    Carries a ``stats`` dict describing which cap was hit and how far the
    computation got, so callers can report a meaningful partial outcome.
    """

    def __init__(self, message: str, stats: Optional[dict] = None):
        super().__init__(message)
        self.stats = dict(stats or {})


# ============================================================================
# Roles
# ============================================================================

UNIVERSAL_ROLE_NAME = "u"

# Internal pseudo-atom used to mark inconsistency inside engines; it is not a
# parseable concept name, so it can never collide with user input.
BOT_ATOM = "⊥"


@dataclass(frozen=True)
class Role:
    """A role expression: a role name, possibly inverted.

    The reserved name ``u`` denotes the universal role; it cannot be
    inverted (it is symmetric anyway) and cannot occur in role inclusions.
    """

    name: str
    inverse: bool = False

    def __post_init__(self):
        if self.name == UNIVERSAL_ROLE_NAME and self.inverse:
            raise FeatureError("the universal role has no inverse")

    @property
    def is_universal(self) -> bool:
        return self.name == UNIVERSAL_ROLE_NAME

    def inv(self) -> "Role":
        if self.is_universal:
            raise FeatureError("the universal role has no inverse")
        return Role(self.name, not self.inverse)

    def __repr__(self):
        return f"inv({self.name})" if self.inverse else self.name


U = Role(UNIVERSAL_ROLE_NAME)


# ============================================================================
# Concepts
# ============================================================================


class Concept:
    """Base class for concept expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Concept):
    def __repr__(self):
        return "Top"


@dataclass(frozen=True)
class Bot(Concept):
    def __repr__(self):
        return "Bot"


@dataclass(frozen=True)
class Name(Concept):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Nominal(Concept):
    individual: str

    def __repr__(self):
        return "{%s}" % self.individual


@dataclass(frozen=True)
class Exists(Concept):
    role: Role
    filler: Concept

    def __repr__(self):
        return f"exists {self.role!r} . {self.filler!r}"


@dataclass(frozen=True)
class And(Concept):
    """Canonical conjunction: flat, sorted, duplicate-free, len >= 2.

    Do not construct directly; use :func:`conj`.
    """

    conjuncts: tuple[Concept, ...]

    def __repr__(self):
        return "(" + " & ".join(repr(c) for c in self.conjuncts) + ")"


# --- extended constructors, admitted only as normalization *input* ----------


@dataclass(frozen=True)
class Forall(Concept):
    role: Role
    filler: Concept

    def __repr__(self):
        return f"forall {self.role!r} . {self.filler!r}"


@dataclass(frozen=True)
class Or(Concept):
    disjuncts: tuple[Concept, ...]

    def __repr__(self):
        return "(" + " | ".join(repr(c) for c in self.disjuncts) + ")"


@dataclass(frozen=True)
class Implies(Concept):
    lhs: Concept
    rhs: Concept

    def __repr__(self):
        return f"({self.lhs!r} -> {self.rhs!r})"


@dataclass(frozen=True)
class Not(Concept):
    arg: Concept

    def __repr__(self):
        return f"not {self.arg!r}"


TOP = Top()
BOT = Bot()

_KIND_RANK = {
    Top: 0,
    Bot: 1,
    Name: 2,
    Nominal: 3,
    Exists: 4,
    And: 5,
    Forall: 6,
    Or: 7,
    Implies: 8,
    Not: 9,
}


@lru_cache(maxsize=None)
def concept_key(c: Concept) -> tuple:
    """A total order on concepts, used for canonical conjunct ordering."""
    rank = _KIND_RANK[type(c)]
    if isinstance(c, (Top, Bot)):
        return (rank,)
    if isinstance(c, Name):
        return (rank, c.name)
    if isinstance(c, Nominal):
        return (rank, c.individual)
    if isinstance(c, (Exists, Forall)):
        return (rank, c.role.name, c.role.inverse, concept_key(c.filler))
    if isinstance(c, And):
        return (rank, tuple(concept_key(x) for x in c.conjuncts))
    if isinstance(c, Or):
        return (rank, tuple(concept_key(x) for x in c.disjuncts))
    if isinstance(c, Implies):
        return (rank, concept_key(c.lhs), concept_key(c.rhs))
    if isinstance(c, Not):
        return (rank, concept_key(c.arg))
    raise TypeError(f"not a concept: {c!r}")


def conj(parts: Iterable[Concept]) -> Concept:
    """Build the canonical conjunction of ``parts``.

    Flattens nested conjunctions, drops Top and duplicates, sorts the rest.
    Returns TOP for an empty conjunction and the sole conjunct for a
    singleton.  A Bot conjunct collapses the whole conjunction to BOT.
    """
    flat: list[Concept] = []
    stack = list(parts)
    stack.reverse()
    while stack:
        c = stack.pop()
        if isinstance(c, And):
            stack.extend(reversed(c.conjuncts))
        elif isinstance(c, Top):
            continue
        elif isinstance(c, Bot):
            return BOT
        elif isinstance(c, Concept):
            flat.append(c)
        else:
            raise TypeError(f"not a concept: {c!r}")
    seen = set()
    uniq = []
    for c in sorted(flat, key=concept_key):
        if c not in seen:
            seen.add(c)
            uniq.append(c)
    if not uniq:
        return TOP
    if len(uniq) == 1:
        return uniq[0]
    return And(tuple(uniq))


def exists(role: Union[Role, str], filler: Concept) -> Exists:
    if isinstance(role, str):
        role = Role(role)
    return Exists(role, filler)


@lru_cache(maxsize=None)
def concept_size(c: Concept) -> int:
    """Size of a concept: number of symbol occurrences.

    Top, Bot, names and nominals count 1; each ``exists r`` (and
    ``forall r``, ``not``) counts 1 plus its filler; a k-ary conjunction
    (or disjunction) adds k-1 for its connectives.
    """
    if isinstance(c, (Top, Bot, Name, Nominal)):
        return 1
    if isinstance(c, (Exists, Forall)):
        return 1 + concept_size(c.filler)
    if isinstance(c, And):
        return sum(concept_size(x) for x in c.conjuncts) + len(c.conjuncts) - 1
    if isinstance(c, Or):
        return sum(concept_size(x) for x in c.disjuncts) + len(c.disjuncts) - 1
    if isinstance(c, Implies):
        return concept_size(c.lhs) + concept_size(c.rhs) + 1
    if isinstance(c, Not):
        return 1 + concept_size(c.arg)
    raise TypeError(f"not a concept: {c!r}")


def subconcepts(c: Concept) -> Iterator[Concept]:
    """All subconcepts of ``c``, including ``c`` itself (pre-order)."""
    yield c
    if isinstance(c, (Exists, Forall)):
        yield from subconcepts(c.filler)
    elif isinstance(c, And):
        for x in c.conjuncts:
            yield from subconcepts(x)
    elif isinstance(c, Or):
        for x in c.disjuncts:
            yield from subconcepts(x)
    elif isinstance(c, Implies):
        yield from subconcepts(c.lhs)
        yield from subconcepts(c.rhs)
    elif isinstance(c, Not):
        yield from subconcepts(c.arg)


# ============================================================================
# Axioms and ontologies
# ============================================================================


@dataclass(frozen=True)
class CI:
    """Concept inclusion ``lhs <= rhs``."""

    lhs: Concept
    rhs: Concept

    def __repr__(self):
        return f"{self.lhs!r} <= {self.rhs!r}"


@dataclass(frozen=True)
class RI:
    """Role inclusion ``chain[0] o ... o chain[-1] <= target``.

    Only plain role names may occur: neither inverses nor the universal
    role are admitted in role inclusions.
    """

    chain: tuple[str, ...]
    target: str

    def __post_init__(self):
        if not self.chain:
            raise FeatureError("role inclusion with empty chain")
        if UNIVERSAL_ROLE_NAME in self.chain or self.target == UNIVERSAL_ROLE_NAME:
            raise FeatureError("the universal role cannot occur in role inclusions")

    def __repr__(self):
        return " o ".join(self.chain) + f" <= {self.target}"


@dataclass(frozen=True)
class Ontology:
    cis: tuple[CI, ...] = ()
    ris: tuple[RI, ...] = ()

    def __or__(self, other: "Ontology") -> "Ontology":
        cis = list(self.cis)
        for ci in other.cis:
            if ci not in cis:
                cis.append(ci)
        ris = list(self.ris)
        for ri in other.ris:
            if ri not in ris:
                ris.append(ri)
        return Ontology(tuple(cis), tuple(ris))

    def __iter__(self):
        return itertools.chain(self.cis, self.ris)

    def __len__(self):
        return len(self.cis) + len(self.ris)

    def __repr__(self):
        return f"Ontology({len(self.cis)} CIs, {len(self.ris)} RIs)"


def ontology_size(o: Ontology) -> int:
    """Total number of symbol occurrences in the ontology."""
    n = 0
    for ci in o.cis:
        n += concept_size(ci.lhs) + concept_size(ci.rhs)
    for ri in o.ris:
        n += len(ri.chain) + 1
    return n


# ============================================================================
# Signatures
# ============================================================================


@dataclass(frozen=True)
class Signature:
    """Concept names, role names and individual names, kept separately.

    The universal role and Top/Bot are logical symbols and never belong
    to a signature.
    """

    concept_names: frozenset[str] = frozenset()
    role_names: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()

    def __and__(self, other: "Signature") -> "Signature":
        return Signature(
            self.concept_names & other.concept_names,
            self.role_names & other.role_names,
            self.individuals & other.individuals,
        )

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(
            self.concept_names | other.concept_names,
            self.role_names | other.role_names,
            self.individuals | other.individuals,
        )

    def __le__(self, other: "Signature") -> bool:
        return (
            self.concept_names <= other.concept_names
            and self.role_names <= other.role_names
            and self.individuals <= other.individuals
        )

    def __bool__(self) -> bool:
        return bool(self.concept_names or self.role_names or self.individuals)

    def all_names(self) -> frozenset[str]:
        return self.concept_names | self.role_names | self.individuals

    def __repr__(self):
        parts = []
        if self.concept_names:
            parts.append("C:" + ",".join(sorted(self.concept_names)))
        if self.role_names:
            parts.append("R:" + ",".join(sorted(self.role_names)))
        if self.individuals:
            parts.append("I:" + ",".join(sorted(self.individuals)))
        return "Signature(" + " ".join(parts) + ")"


def _sig_into(obj, cn: set, rn: set, ind: set) -> None:
    if obj is None:
        return
    if isinstance(obj, Signature):
        cn |= obj.concept_names
        rn |= obj.role_names
        ind |= obj.individuals
    elif isinstance(obj, (Top, Bot)):
        pass
    elif isinstance(obj, Name):
        if obj.name != BOT_ATOM:
            cn.add(obj.name)
    elif isinstance(obj, Nominal):
        ind.add(obj.individual)
    elif isinstance(obj, (Exists, Forall)):
        if not obj.role.is_universal:
            rn.add(obj.role.name)
        _sig_into(obj.filler, cn, rn, ind)
    elif isinstance(obj, And):
        for c in obj.conjuncts:
            _sig_into(c, cn, rn, ind)
    elif isinstance(obj, Or):
        for c in obj.disjuncts:
            _sig_into(c, cn, rn, ind)
    elif isinstance(obj, Implies):
        _sig_into(obj.lhs, cn, rn, ind)
        _sig_into(obj.rhs, cn, rn, ind)
    elif isinstance(obj, Not):
        _sig_into(obj.arg, cn, rn, ind)
    elif isinstance(obj, Role):
        if not obj.is_universal:
            rn.add(obj.name)
    elif isinstance(obj, CI):
        _sig_into(obj.lhs, cn, rn, ind)
        _sig_into(obj.rhs, cn, rn, ind)
    elif isinstance(obj, RI):
        rn.update(obj.chain)
        rn.add(obj.target)
    elif isinstance(obj, Ontology):
        for ax in obj:
            _sig_into(ax, cn, rn, ind)
    elif isinstance(obj, ABox):
        for _, a in obj.concept_facts:
            if a != BOT_ATOM:
                cn.add(a)
        for _, a in obj.nominal_facts:
            ind.add(a)
        for r, _, _ in obj.role_facts:
            rn.add(r)
    elif isinstance(obj, PointedABox):
        _sig_into(obj.abox, cn, rn, ind)
    elif isinstance(obj, (list, tuple, set, frozenset)):
        for x in obj:
            _sig_into(x, cn, rn, ind)
    else:
        raise TypeError(f"cannot take the signature of {obj!r}")


def signature_of(*objects) -> Signature:
    """Union of the signatures of the given concepts/axioms/ontologies/ABoxes."""
    cn: set = set()
    rn: set = set()
    ind: set = set()
    for obj in objects:
        _sig_into(obj, cn, rn, ind)
    return Signature(frozenset(cn), frozenset(rn), frozenset(ind))


# ============================================================================
# Dialects
# ============================================================================

_NAMED_DIALECTS = {}


@dataclass(frozen=True)
class Dialect:
    """Feature flags describing which constructors a logic admits."""

    inverse_roles: bool = False
    nominals: bool = False
    universal_role: bool = False
    role_inclusions: bool = False
    bottom: bool = False

    @staticmethod
    def named(name: str) -> "Dialect":
        try:
            return _NAMED_DIALECTS[name]
        except KeyError:
            raise DialectError(
                f"unknown dialect {name!r}; expected one of "
                + ", ".join(sorted(_NAMED_DIALECTS))
            ) from None

    @property
    def name(self) -> str:
        for n, d in _NAMED_DIALECTS.items():
            if d == self:
                return n
        return "custom"

    def with_universal(self, flag: bool = True) -> "Dialect":
        return Dialect(self.inverse_roles, self.nominals, flag,
                       self.role_inclusions, self.bottom)

    def with_bottom(self, flag: bool = True) -> "Dialect":
        return Dialect(self.inverse_roles, self.nominals, self.universal_role,
                       self.role_inclusions, flag)

    def admits(self, other: "Dialect") -> bool:
        """Does this dialect allow every feature used by ``other``?"""
        return (
            (self.inverse_roles or not other.inverse_roles)
            and (self.nominals or not other.nominals)
            and (self.universal_role or not other.universal_role)
            and (self.role_inclusions or not other.role_inclusions)
            and (self.bottom or not other.bottom)
        )

    @staticmethod
    def infer(*objects) -> "Dialect":
        """The minimal dialect whose features cover the given objects."""
        inv = nom = uni = ris = bot = False

        def scan_concept(c: Concept):
            nonlocal inv, nom, uni, bot
            for s in subconcepts(c):
                if isinstance(s, Bot):
                    bot = True
                elif isinstance(s, Nominal):
                    nom = True
                elif isinstance(s, (Exists, Forall)):
                    if s.role.is_universal:
                        uni = True
                    elif s.role.inverse:
                        inv = True

        def scan(obj):
            nonlocal ris
            if obj is None:
                return
            if isinstance(obj, Concept):
                scan_concept(obj)
            elif isinstance(obj, CI):
                scan_concept(obj.lhs)
                scan_concept(obj.rhs)
            elif isinstance(obj, RI):
                ris = True
            elif isinstance(obj, Ontology):
                for ax in obj:
                    scan(ax)
            elif isinstance(obj, (list, tuple, set, frozenset)):
                for x in obj:
                    scan(x)
            else:
                raise TypeError(f"cannot infer a dialect from {obj!r}")

        for obj in objects:
            scan(obj)
        return Dialect(inv, nom, uni, ris, bot)


_NAMED_DIALECTS.update(
    el=Dialect(),
    el_u=Dialect(universal_role=True),
    elo=Dialect(nominals=True),
    elo_u=Dialect(nominals=True, universal_role=True),
    elr=Dialect(role_inclusions=True),
    elr_u=Dialect(role_inclusions=True, universal_role=True),
    elro_u=Dialect(nominals=True, universal_role=True, role_inclusions=True),
    eli=Dialect(inverse_roles=True),
    eli_u=Dialect(inverse_roles=True, universal_role=True),
    elio_u=Dialect(inverse_roles=True, nominals=True, universal_role=True),
)


# ============================================================================
# ABoxes
# ============================================================================


class ABox:
    """A set of facts over integer variables.

    Facts are concept-name assertions ``A(x)``, nominal assertions
    ``{a}(x)`` and role assertions ``r(x, y)`` where ``r`` is always a
    plain role name (never inverted, never the universal role --
    disconnectedness is how "somewhere" is represented).
    """

    __slots__ = ("vars", "concept_facts", "nominal_facts", "role_facts",
                 "display", "_next")

    def __init__(self):
        self.vars: set[int] = set()
        self.concept_facts: set[tuple[int, str]] = set()
        self.nominal_facts: set[tuple[int, str]] = set()
        self.role_facts: set[tuple[str, int, int]] = set()
        self.display: dict[int, str] = {}
        self._next = 0

    # -- construction --------------------------------------------------

    def new_var(self, display: Optional[str] = None) -> int:
        x = self._next
        self._next += 1
        self.vars.add(x)
        if display is not None:
            self.display[x] = display
        return x

    def ensure_var(self, x: int) -> int:
        self.vars.add(x)
        if x >= self._next:
            self._next = x + 1
        return x

    def add_concept(self, x: int, name: str) -> None:
        self.ensure_var(x)
        self.concept_facts.add((x, name))

    def add_nominal(self, x: int, individual: str) -> None:
        self.ensure_var(x)
        self.nominal_facts.add((x, individual))

    def add_role(self, role: str, x: int, y: int) -> None:
        if role == UNIVERSAL_ROLE_NAME:
            raise FeatureError("the universal role is never stored as an edge")
        self.ensure_var(x)
        self.ensure_var(y)
        self.role_facts.add((role, x, y))

    # -- queries --------------------------------------------------------

    def names_at(self, x: int) -> set[str]:
        return {a for (v, a) in self.concept_facts if v == x}

    def nominals_at(self, x: int) -> set[str]:
        return {a for (v, a) in self.nominal_facts if v == x}

    def out_edges(self, x: int) -> list[tuple[str, int]]:
        return sorted((r, y) for (r, v, y) in self.role_facts if v == x)

    def in_edges(self, x: int) -> list[tuple[str, int]]:
        return sorted((r, y) for (r, y, v) in self.role_facts if v == x)

    def anchored_vars(self) -> set[int]:
        return {x for (x, _) in self.nominal_facts}

    def label(self, x: int) -> str:
        return self.display.get(x, f"x{x}")

    def size(self) -> int:
        return (len(self.concept_facts) + len(self.nominal_facts)
                + len(self.role_facts) + len(self.vars))

    def __eq__(self, other):
        if not isinstance(other, ABox):
            return NotImplemented
        return (self.vars == other.vars
                and self.concept_facts == other.concept_facts
                and self.nominal_facts == other.nominal_facts
                and self.role_facts == other.role_facts)

    def __repr__(self):
        return (f"ABox({len(self.vars)} vars, {len(self.concept_facts)}+"
                f"{len(self.nominal_facts)} unary, {len(self.role_facts)} edges)")

    # -- transformations -------------------------------------------------

    def copy(self) -> "ABox":
        b = ABox()
        b.vars = set(self.vars)
        b.concept_facts = set(self.concept_facts)
        b.nominal_facts = set(self.nominal_facts)
        b.role_facts = set(self.role_facts)
        b.display = dict(self.display)
        b._next = self._next
        return b

    def restrict(self, keep: Iterable[int]) -> "ABox":
        """The sub-ABox over the given variables."""
        keep = set(keep)
        b = ABox()
        for x in keep:
            b.ensure_var(x)
            if x in self.display:
                b.display[x] = self.display[x]
        b.concept_facts = {(x, a) for (x, a) in self.concept_facts if x in keep}
        b.nominal_facts = {(x, a) for (x, a) in self.nominal_facts if x in keep}
        b.role_facts = {(r, x, y) for (r, x, y) in self.role_facts
                        if x in keep and y in keep}
        return b

    def factorize(self) -> tuple["ABox", dict[int, int]]:
        """Merge variables that share a nominal; returns (ABox, var map).

        The result interprets each nominal at a single variable, which is
        the invariant all engines expect of their input.
        """
        parent = {x: x for x in self.vars}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        rep_of_nominal: dict[str, int] = {}
        for (x, a) in sorted(self.nominal_facts):
            if a in rep_of_nominal:
                rx, ry = find(rep_of_nominal[a]), find(x)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
            else:
                rep_of_nominal[a] = x
        mapping = {x: find(x) for x in self.vars}
        b = ABox()
        for x in sorted(set(mapping.values())):
            b.ensure_var(x)
            if x in self.display:
                b.display[x] = self.display[x]
        b.concept_facts = {(mapping[x], a) for (x, a) in self.concept_facts}
        b.nominal_facts = {(mapping[x], a) for (x, a) in self.nominal_facts}
        b.role_facts = {(r, mapping[x], mapping[y])
                        for (r, x, y) in self.role_facts}
        b._next = self._next
        return b, mapping

    def is_factorized(self) -> bool:
        owner: dict[str, int] = {}
        for (x, a) in self.nominal_facts:
            if owner.setdefault(a, x) != x:
                return False
        return True


@dataclass
class PointedABox:
    abox: ABox
    root: int

    def to_concept(self, dialect: Dialect) -> Concept:
        return pointed_abox_to_concept(self.abox, self.root, dialect)


@dataclass(frozen=True)
class ShapeWitness:
    """Evidence that an ABox is tree-shaped modulo its nominal anchors.

    ``kind`` is ``ditree`` (directed) or ``tree`` (undirected);
    ``modulus`` lists the nominals whose variables were treated as anchors;
    ``dropped_edges`` are the facts exempted from the tree conditions;
    ``rooted`` tells whether every variable is reachable from the root
    (directed reachability for ditrees, connectivity for trees).
    """

    kind: str
    modulus: frozenset[str]
    dropped_edges: frozenset[tuple[str, int, int]]
    rooted: bool


def shape_of(abox: ABox, root: int, directed: bool) -> ShapeWitness:
    """Check that ``abox`` is (di)tree-shaped modulo its nominal anchors.

    Raises :class:`ShapeViolation` if it is not.
    """
    anchored = abox.anchored_vars()
    modulus = frozenset(a for (_, a) in abox.nominal_facts)
    if directed:
        dropped = {(r, x, y) for (r, x, y) in abox.role_facts if y in anchored}
    else:
        dropped = {(r, x, y) for (r, x, y) in abox.role_facts
                   if x in anchored or y in anchored}
    kept = abox.role_facts - dropped

    if directed:
        pairs = {}
        indeg: dict[int, int] = {}
        for (r, x, y) in kept:
            if pairs.setdefault((x, y), r) != r:
                raise ShapeViolation(
                    f"parallel edges {pairs[(x, y)]} and {r} between "
                    f"{abox.label(x)} and {abox.label(y)}")
            indeg[y] = indeg.get(y, 0) + 1
            if indeg[y] > 1:
                raise ShapeViolation(
                    f"{abox.label(y)} has two parents outside the anchors")
        # acyclicity of the kept digraph
        succ: dict[int, list[int]] = {}
        for (_, x, y) in kept:
            succ.setdefault(x, []).append(y)
        state: dict[int, int] = {}

        def dfs(v):
            state[v] = 1
            for w in succ.get(v, ()):
                if state.get(w) == 1:
                    raise ShapeViolation("cycle outside the anchors")
                if state.get(w, 0) == 0:
                    dfs(w)
            state[v] = 2

        for v in sorted(abox.vars):
            if state.get(v, 0) == 0:
                dfs(v)
    else:
        seen_pairs: set[frozenset] = set()
        for (r, x, y) in kept:
            if x == y:
                raise ShapeViolation(
                    f"self-loop {r} at {abox.label(x)} outside the anchors")
            key = frozenset((x, y))
            if key in seen_pairs:
                raise ShapeViolation(
                    f"multiple edges between {abox.label(x)} and "
                    f"{abox.label(y)} outside the anchors")
            seen_pairs.add(key)
        # undirected acyclicity via union-find
        parent = {x: x for x in abox.vars}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (r, x, y) in kept:
            rx, ry = find(x), find(y)
            if rx == ry:
                raise ShapeViolation("cycle outside the anchors")
            parent[rx] = ry

    # reachability from the root over *all* edges
    adj: dict[int, set[int]] = {x: set() for x in abox.vars}
    for (_, x, y) in abox.role_facts:
        adj[x].add(y)
        if not directed:
            adj[y].add(x)
    seen = {root}
    todo = [root]
    while todo:
        v = todo.pop()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    rooted = seen >= abox.vars

    return ShapeWitness(
        kind="ditree" if directed else "tree",
        modulus=modulus,
        dropped_edges=frozenset(dropped),
        rooted=rooted,
    )


# ============================================================================
# Concepts <-> pointed ABoxes
# ============================================================================


def concept_to_pointed_abox(c: Concept, sigma: Optional[Signature] = None) -> PointedABox:
    """The tree-shaped ABox of a concept, with nominals factorized.

    ``exists u . C`` contributes a disconnected subtree.  If ``sigma``
    is given, the concept is first checked to use only its symbols.
    """
    if sigma is not None:
        used = signature_of(c)
        if not used <= sigma:
            extra = (used.all_names() - sigma.all_names())
            raise UnknownSymbol(
                "concept uses symbols outside the signature: "
                + ", ".join(sorted(extra)))
    abox = ABox()

    def build(concept: Concept, x: int) -> None:
        if isinstance(concept, Top):
            return
        if isinstance(concept, Bot):
            abox.add_concept(x, BOT_ATOM)
        elif isinstance(concept, Name):
            abox.add_concept(x, concept.name)
        elif isinstance(concept, Nominal):
            abox.add_nominal(x, concept.individual)
        elif isinstance(concept, And):
            for part in concept.conjuncts:
                build(part, x)
        elif isinstance(concept, Exists):
            y = abox.new_var()
            if concept.role.is_universal:
                pass  # disconnected: "somewhere"
            elif concept.role.inverse:
                abox.add_role(concept.role.name, y, x)
            else:
                abox.add_role(concept.role.name, x, y)
            build(concept.filler, y)
        else:
            raise FeatureError(
                f"{type(concept).__name__} cannot be turned into an ABox")

    root = abox.new_var()
    build(c, root)
    factored, mapping = abox.factorize()
    return PointedABox(factored, mapping[root])


def pointed_abox_to_concept(abox: ABox, root: int, dialect: Dialect) -> Concept:
    """Read a concept off a tree-shaped pointed ABox.

    The ABox must be ditree-shaped modulo its anchors when the dialect has
    no inverse roles, tree-shaped modulo its anchors otherwise.  Parts not
    reachable from the root (and anchored variables whose content is not
    otherwise covered) are expressed with ``exists u``; if the dialect
    forbids the universal role, this raises :class:`UniversalRoleRequired`.
    """
    if not abox.is_factorized():
        raise ShapeViolation("ABox interprets a nominal at two variables")
    if abox.nominal_facts and not dialect.nominals:
        raise DialectError("ABox uses nominals but the dialect has none")
    directed = not dialect.inverse_roles
    shape_of(abox, root, directed)  # raises ShapeViolation if malformed

    anchored = abox.anchored_vars()
    out_of: dict[int, list[tuple[str, int, int]]] = {x: [] for x in abox.vars}
    in_of: dict[int, list[tuple[str, int, int]]] = {x: [] for x in abox.vars}
    for fact in sorted(abox.role_facts):
        out_of[fact[1]].append(fact)
        in_of[fact[2]].append(fact)

    # Phase 1: a BFS forest assigns every edge an emission site.  Each
    # variable's first-reaching edge becomes its entry (emitted at the
    # parent, inverted if traversed backwards); every other edge has an
    # anchored endpoint and is emitted at an unanchored endpoint when one
    # exists, referencing the anchor by its nominals alone.
    children: dict[int, list[tuple[tuple[str, int, int], bool, int]]] = \
        {x: [] for x in abox.vars}
    extras_at: dict[int, list[tuple[tuple[str, int, int], bool, int]]] = \
        {x: [] for x in abox.vars}
    assigned: set[tuple[str, int, int]] = set()
    visited: set[int] = set()

    def incident(v: int):
        for f in out_of[v]:
            yield f, False, f[2]  # forward: v == f[1]
        if not directed:
            for f in in_of[v]:
                yield f, True, f[1]  # backward: v == f[2]

    def assign_extra(f, at: int, backwards: bool, other: int) -> None:
        if other not in anchored:
            raise ShapeViolation(
                f"edge {f[0]} re-enters {abox.label(other)}, which carries "
                "no nominal to refer back to")
        extras_at[at].append((f, backwards, other))

    def bfs(start: int) -> None:
        visited.add(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            for f, backwards, other in incident(v):
                if f in assigned:
                    continue
                assigned.add(f)
                if other not in visited:
                    visited.add(other)
                    children[v].append((f, backwards, other))
                    queue.append(other)
                elif v not in anchored or other in anchored:
                    assign_extra(f, v, backwards, other)
                elif directed:
                    # an edge from an anchor back into the emitted region
                    # would need an inverse to be expressed
                    raise ShapeViolation(
                        f"edge {f[0]} re-enters {abox.label(other)}, which "
                        "carries no nominal to refer back to")
                else:
                    # v is an anchor, other is unanchored and visited:
                    # the unanchored side must carry the reference
                    assign_extra(f, other, not backwards, v)

    bfs(root)

    # leftover components are expressed under the universal role
    component_entries: list[int] = []
    progress = True
    while progress:
        progress = False
        for v in sorted(abox.vars):
            if v in visited:
                continue
            if directed and v not in anchored and \
                    any(f not in assigned for f in in_of[v]):
                continue  # wait until its parent's component claims it
            component_entries.append(v)
            bfs(v)
            progress = True
    if visited != abox.vars:
        raise ShapeViolation("some variables could not be scheduled "
                             "for emission")

    # Phase 2: emit concepts along the BFS forest.
    def emit(v: int) -> Concept:
        parts: list[Concept] = [Nominal(a) for a in sorted(abox.nominals_at(v))]
        parts += [Name(a) if a != BOT_ATOM else BOT
                  for a in sorted(abox.names_at(v))]
        for f, backwards, child in children[v]:
            parts.append(Exists(Role(f[0], backwards), emit(child)))
        for f, backwards, other in extras_at[v]:
            ref = conj(Nominal(a) for a in sorted(abox.nominals_at(other)))
            parts.append(Exists(Role(f[0], backwards), ref))
        return conj(parts)

    result = [emit(root)]
    for v in component_entries:
        c = emit(v)
        if c == TOP or isinstance(c, Nominal):
            continue  # an element exists anyway; nothing is asserted
        result.append(Exists(U, c))
    if len(result) > 1 and not dialect.universal_role:
        raise UniversalRoleRequired(
            "parts of the ABox are not reachable from the root; expressing "
            "them needs the universal role")
    return conj(result)
