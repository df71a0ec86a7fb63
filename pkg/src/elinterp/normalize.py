"""Normal-form transformation, interpolation-input preparation, bottom
elimination, signature renaming, and the Horn reduction.

An ontology is in *normal form* if every CI has one of the shapes

    Top <= A      A1 & A2 <= B      A <= {a}      {a} <= A
    A <= exists r . B                exists r . B <= A

where A, A1, A2, B are concept names, r is a role or the universal role,
and a is an individual name.  All engines in this package assume their
input ontology is in normal form.

Fresh names are drawn from a reserved namespace: a prefix (default
``_N``) followed by a stable hash of the printed defining subconcept, so
normalization is deterministic, idempotent, and diffable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    And,
    BOT,
    Bot,
    CI,
    Concept,
    Dialect,
    ElinterpError,
    Exists,
    FeatureError,
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
    TOP,
    U,
    conj,
    signature_of,
)


class PolarityError(ElinterpError):
    """The input is outside the Horn fragment."""


# ============================================================================
# Shape predicates
# ============================================================================


def _is_name(c: Concept) -> bool:
    return isinstance(c, Name)


def is_normal_ci(ci: CI, allow_bot: bool = False) -> bool:
    lhs, rhs = ci.lhs, ci.rhs
    lhs_ok = (
        isinstance(lhs, (Top, Name, Nominal))
        or (isinstance(lhs, And) and len(lhs.conjuncts) == 2
            and all(_is_name(x) for x in lhs.conjuncts))
        or (isinstance(lhs, Exists) and _is_name(lhs.filler))
    )
    if not lhs_ok:
        return False
    if isinstance(rhs, Name):
        return True
    if allow_bot and isinstance(rhs, Bot):
        return True
    # {a} on the right and exists on the right require a plain name left
    if isinstance(rhs, Nominal):
        return isinstance(lhs, Name)
    if isinstance(rhs, Exists) and _is_name(rhs.filler):
        return isinstance(lhs, Name)
    return False


def is_normal_form(o: Ontology, allow_bot: bool = False) -> bool:
    return all(is_normal_ci(ci, allow_bot) for ci in o.cis)


def assert_normal_form(o: Ontology) -> None:
    for ci in o.cis:
        if not is_normal_ci(ci):
            raise FeatureError(f"CI not in normal form: {ci!r}")


# ============================================================================
# Fresh names
# ============================================================================


def _stable_hash(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:10]


class FreshNames:
    """Deterministic definer names: prefix + stable hash of the concept."""

    def __init__(self, prefix: str = "_N"):
        self.prefix = prefix
        self._by_concept: dict[Concept, str] = {}

    def definer(self, c: Concept) -> str:
        name = self._by_concept.get(c)
        if name is None:
            name = self.prefix + _stable_hash(repr(c))
            self._by_concept[c] = name
        return name


# ============================================================================
# Bottom collapse (syntactic)
# ============================================================================


def _bot_collapse(c: Concept) -> Concept:
    """Push syntactic unsatisfiability up: exists r.Bot == Bot, etc."""
    if isinstance(c, Exists):
        f = _bot_collapse(c.filler)
        return BOT if isinstance(f, Bot) else Exists(c.role, f)
    if isinstance(c, And):
        return conj(_bot_collapse(x) for x in c.conjuncts)
    if isinstance(c, Or):
        parts = [_bot_collapse(x) for x in c.disjuncts]
        parts = [x for x in parts if not isinstance(x, Bot)]
        if not parts:
            return BOT
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))
    return c


def _contains_bot(c: Concept) -> bool:
    from .core import subconcepts
    return any(isinstance(x, Bot) for x in subconcepts(c))


# ============================================================================
# Normalization core
# ============================================================================


class _Normalizer:
    def __init__(self, prefix: str, horn: bool):
        self.fresh = FreshNames(prefix)
        self.horn = horn
        self.out: list[CI] = []
        self.seen: set[CI] = set()
        self._done_neg: set[str] = set()
        self._done_pos: set[str] = set()

    def emit(self, lhs: Concept, rhs: Concept) -> None:
        ci = CI(lhs, rhs)
        if ci not in self.seen:
            self.seen.add(ci)
            self.out.append(ci)

    # -- a concept name N with `C <= N` derivable ---------------------------

    def lhs_name(self, c: Concept) -> str:
        if isinstance(c, Name):
            return c.name
        n = self.fresh.definer(c)
        if n not in self._done_neg:
            self._done_neg.add(n)
            self.ci_to_name(c, n)
        return n

    # -- a concept name N with `N <= D` derivable ---------------------------

    def pos_name(self, d: Concept) -> str:
        if isinstance(d, Name):
            return d.name
        n = self.fresh.definer(d)
        if n not in self._done_pos:
            self._done_pos.add(n)
            self.ci(Name(n), d)
        return n

    # -- C <= A where A is a concept name ------------------------------------

    def ci_to_name(self, c: Concept, a: str) -> None:
        target = Name(a)
        if isinstance(c, Top):
            self.emit(TOP, target)
        elif isinstance(c, Name):
            self.emit(c, target)
        elif isinstance(c, Nominal):
            self.emit(c, target)
        elif isinstance(c, Exists):
            self.emit(Exists(c.role, Name(self.lhs_name(c.filler))), target)
        elif isinstance(c, And):
            atoms = [Name(self.lhs_name(p)) for p in c.conjuncts]
            acc = atoms[0]
            prefix = c.conjuncts[0]
            for atom, part in zip(atoms[1:-1], c.conjuncts[1:-1]):
                prefix = conj([prefix, part])
                step = Name(self.fresh.definer(prefix))
                self.emit(conj([acc, atom]), step)
                acc = step
            self.emit(conj([acc, atoms[-1]]), target)
        elif isinstance(c, Or) and self.horn:
            for part in c.disjuncts:
                self.ci_to_name(part, a)
        else:
            raise FeatureError(
                f"constructor not supported on the left of a CI: {c!r}")

    # -- general CI ----------------------------------------------------------

    def ci(self, c: Concept, d: Concept) -> None:
        c = _bot_collapse(c)
        d = _bot_collapse(d)
        if isinstance(c, Bot) or isinstance(d, Top):
            return  # tautology
        if isinstance(c, Or) and self.horn:
            for part in c.disjuncts:
                self.ci(part, d)
            return
        if isinstance(d, And):
            for part in d.conjuncts:
                self.ci(c, part)
            return
        if isinstance(d, Name):
            self.ci_to_name(c, d.name)
            return
        if isinstance(d, Nominal):
            self.emit(Name(self.lhs_name(c)), d)
            return
        if isinstance(d, Exists):
            filler = d.filler
            n = Name(self.pos_name(filler)) if not isinstance(filler, Name) \
                else filler
            self.emit(Name(self.lhs_name(c)), Exists(d.role, n))
            return
        if self.horn:
            if isinstance(d, Bot):
                self.emit(Name(self.lhs_name(c)), BOT)
                return
            if isinstance(d, Forall):
                role = d.role if d.role.is_universal else d.role.inv()
                self.ci(Exists(role, c), d.filler)
                return
            if isinstance(d, Implies):
                self.ci(conj([c, d.lhs]), d.rhs)
                return
            if isinstance(d, Not):
                neg = d.arg
                if isinstance(neg, (Name, Nominal)):
                    self.ci(conj([c, neg]), BOT)
                    return
                raise PolarityError(f"negation applies only to concept "
                                    f"names and nominals: {d!r}")
        if isinstance(d, Bot):
            raise FeatureError(
                "Bot on the right-hand side: run eliminate_bot first")
        raise FeatureError(
            f"constructor not supported on the right of a CI: {d!r}")


def to_normal_form(o: Ontology, prefix: str = "_N") -> Ontology:
    """A conservative extension of ``o`` in normal form.

    Fresh definer names start with ``prefix``.  Role inclusions pass
    through unchanged.  CIs that use Bot raise FeatureError (route
    bottom through :func:`eliminate_bot` first); CIs that use the Horn
    constructors raise FeatureError (use :func:`horn_to_normal_form`).
    """
    n = _Normalizer(prefix, horn=False)
    for ci in o.cis:
        n.ci(ci.lhs, ci.rhs)
    return Ontology(tuple(n.out), o.ris)


# ============================================================================
# Horn reduction
# ============================================================================


def _validate_r(c: Concept) -> None:
    if isinstance(c, (Top, Bot, Name, Nominal)):
        return
    if isinstance(c, Not):
        if not isinstance(c.arg, (Name, Nominal)):
            raise PolarityError(
                f"negation applies only to concept names and nominals: {c!r}")
        return
    if isinstance(c, And):
        for x in c.conjuncts:
            _validate_r(x)
        return
    if isinstance(c, Implies):
        _validate_l(c.lhs)
        _validate_r(c.rhs)
        return
    if isinstance(c, (Exists, Forall)):
        _validate_r(c.filler)
        return
    raise PolarityError(f"not allowed on the right of a Horn CI: {c!r}")


def _validate_l(c: Concept) -> None:
    if isinstance(c, (Top, Bot, Name)):
        return
    if isinstance(c, (And, Or)):
        parts = c.conjuncts if isinstance(c, And) else c.disjuncts
        for x in parts:
            _validate_l(x)
        return
    if isinstance(c, Exists):
        _validate_l(c.filler)
        return
    raise PolarityError(f"not allowed on the left of a Horn CI: {c!r}")


def horn_to_normal_form(o: Ontology, prefix: str = "_N") -> Ontology:
    """Reduce a Horn ontology to a normal-form conservative extension.

    Right-hand sides may use ``forall``, ``->``, and ``not`` on names and
    nominals; left-hand sides may use ``|``.  ``forall r . R`` becomes an
    ``exists inv(r)``-on-the-left rule, implications unfold into extra
    left conjuncts, and negations become CIs with Bot on the right (to be
    routed through :func:`eliminate_bot` afterwards).

    Raises PolarityError outside the Horn grammar.
    """
    for ci in o.cis:
        _validate_l(ci.lhs)
        _validate_r(ci.rhs)
    n = _Normalizer(prefix, horn=True)
    for ci in o.cis:
        n.ci(ci.lhs, ci.rhs)
    return Ontology(tuple(n.out), o.ris)


# ============================================================================
# Interpolation input preparation
# ============================================================================


def _fresh_plain(base: str, taken: frozenset[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def prepare_interpolation_input(
    o1: Ontology, c1: Concept, o2: Ontology, c2: Concept,
) -> tuple[Ontology, Ontology, str, str]:
    """Normal-form ontologies and fresh names A, B such that a concept is
    an interpolant for ``c1 <= c2`` under ``o1, o2`` iff it is one for
    ``A <= B`` under the returned pair.

    The two sides use disjoint fresh-name namespaces, so the shared
    signature of the results equals the shared signature of the inputs.
    """
    taken = signature_of(o1, c1, o2, c2).all_names()
    a = _fresh_plain("_A", taken)
    b = _fresh_plain("_B", taken | {a})
    o1x = Ontology(o1.cis + (CI(Name(a), c1), CI(c1, Name(a))), o1.ris)
    o2x = Ontology(o2.cis + (CI(Name(b), c2), CI(c2, Name(b))), o2.ris)
    return (to_normal_form(o1x, prefix="_N1"),
            to_normal_form(o2x, prefix="_N2"),
            a, b)


# ============================================================================
# Bottom elimination
# ============================================================================


@dataclass
class BotElimination:
    """Result of :func:`eliminate_bot`.

    If ``trivial`` is set, ``o1 + o2`` already force ``c1`` to be
    unsatisfiable and ``interpolant`` (Bot) is an interpolant for any
    right-hand side.  Otherwise the returned problem is Bot-free and has
    an interpolant iff the original does; ``bot_name`` (when not None) is
    the fresh concept name standing in for Bot — substitute Bot back for
    it in any computed interpolant.
    """

    o1: Ontology
    o2: Ontology
    c1: Concept
    c2: Concept
    trivial: bool = False
    interpolant: Optional[Concept] = None
    bot_name: Optional[str] = None


def _replace_bot(c: Concept, by: Concept) -> Concept:
    if isinstance(c, Bot):
        return by
    if isinstance(c, Exists):
        return Exists(c.role, _replace_bot(c.filler, by))
    if isinstance(c, And):
        return conj(_replace_bot(x, by) for x in c.conjuncts)
    return c


def eliminate_bot(
    o1: Ontology, o2: Ontology, c1: Concept, c2: Concept,
    dialect: Optional[Dialect] = None,
) -> BotElimination:
    """Remove Bot from an interpolation problem, preserving the answer.

    If the combined ontologies entail ``c1 <= Bot``, an interpolant
    (namely Bot) trivially exists.  Otherwise CIs with an unsatisfiable
    left-hand side are dropped, every remaining Bot becomes a fresh
    concept name, and that name is axiomatized to propagate like
    unsatisfiability (up through every role, and down into every name).

    ``dialect`` is the language interpolants may be drawn from; the
    propagation axioms must cover every constructor it admits.  Defaults
    to the dialect inferred from the inputs.
    """
    uses_bot = any(
        _contains_bot(x)
        for ont in (o1, o2) for ci in ont.cis for x in (ci.lhs, ci.rhs)
    ) or _contains_bot(c1) or _contains_bot(c2)
    if not uses_bot:
        return BotElimination(o1, o2, c1, c2)

    if _entails_bot(o1, o2, c1):
        return BotElimination(o1, o2, c1, c2, trivial=True, interpolant=BOT)

    taken = signature_of(o1, o2, c1, c2).all_names()
    bot_name = _fresh_plain("_Bot", taken)
    by = Name(bot_name)
    if dialect is None:
        dialect = Dialect.infer(o1, o2, c1, c2)

    def rewrite(ont: Ontology) -> Ontology:
        cis = []
        for ci in ont.cis:
            lhs = _bot_collapse(ci.lhs)
            if isinstance(lhs, Bot):
                continue  # redundant: unsatisfiable left-hand side
            cis.append(CI(_replace_bot(lhs, by),
                          _replace_bot(_bot_collapse(ci.rhs), by)))
        sig = signature_of(ont)
        roles = [Role(r) for r in sorted(sig.role_names)]
        if dialect.inverse_roles:
            roles += [Role(r, inverse=True) for r in sorted(sig.role_names)]
        if dialect.universal_role:
            roles.append(U)
        for r in roles:
            cis.append(CI(Exists(r, by), by))
            cis.append(CI(by, Exists(r, by)))
        for a in sorted(sig.concept_names):
            cis.append(CI(by, Name(a)))
        if dialect.nominals:
            for ind in sorted(sig.individuals):
                cis.append(CI(by, Nominal(ind)))
        return Ontology(tuple(cis), ont.ris)

    return BotElimination(
        rewrite(o1), rewrite(o2),
        _replace_bot(_bot_collapse(c1), by),
        _replace_bot(_bot_collapse(c2), by),
        bot_name=bot_name,
    )


def _entails_bot(o1: Ontology, o2: Ontology, c: Concept) -> bool:
    """Does ``o1 + o2`` entail that ``c`` is unsatisfiable?

    Decided by replacing Bot with an inert fresh name that is pulled up
    by the universal role: the concept is unsatisfiable iff the chase
    derives that name at the root.
    """
    from . import el_engine

    o = o1 | o2
    c = _bot_collapse(c)
    if isinstance(c, Bot):
        return True
    taken = signature_of(o, c).all_names()
    bot_name = _fresh_plain("_Unsat", taken)
    by = Name(bot_name)
    cis = []
    for ci in o.cis:
        lhs = _bot_collapse(ci.lhs)
        if isinstance(lhs, Bot):
            continue
        cis.append(CI(_replace_bot(lhs, by),
                      _replace_bot(_bot_collapse(ci.rhs), by)))
    cis.append(CI(Exists(U, by), by))
    renamed = Ontology(tuple(cis), o.ris)
    goal = CI(_replace_bot(c, by), by)
    if Dialect.infer(renamed, goal).inverse_roles:
        from . import eli_engine

        return eli_engine.entails_ci_eli(renamed, goal.lhs, goal.rhs)
    return el_engine.entails_ci(renamed, goal.lhs, goal.rhs)


# ============================================================================
# Signature renaming
# ============================================================================


@dataclass(frozen=True)
class RenameMap:
    concepts: dict[str, str] = field(default_factory=dict)
    roles: dict[str, str] = field(default_factory=dict)
    individuals: dict[str, str] = field(default_factory=dict)

    def concept_name(self, x: str) -> str:
        return self.concepts.get(x, x)

    def role(self, r: Role) -> Role:
        if r.is_universal or r.name not in self.roles:
            return r
        return Role(self.roles[r.name], r.inverse)

    def apply(self, c: Concept) -> Concept:
        if isinstance(c, Name):
            return Name(self.concepts.get(c.name, c.name))
        if isinstance(c, Nominal):
            return Nominal(self.individuals.get(c.individual, c.individual))
        if isinstance(c, Exists):
            return Exists(self.role(c.role), self.apply(c.filler))
        if isinstance(c, Forall):
            return Forall(self.role(c.role), self.apply(c.filler))
        if isinstance(c, And):
            return conj(self.apply(x) for x in c.conjuncts)
        if isinstance(c, Or):
            return Or(tuple(self.apply(x) for x in c.disjuncts))
        if isinstance(c, Implies):
            return Implies(self.apply(c.lhs), self.apply(c.rhs))
        if isinstance(c, Not):
            return Not(self.apply(c.arg))
        return c

    def apply_ontology(self, o: Ontology) -> Ontology:
        cis = tuple(CI(self.apply(ci.lhs), self.apply(ci.rhs))
                    for ci in o.cis)
        ris = tuple(RI(tuple(self.roles.get(x, x) for x in ri.chain),
                       self.roles.get(ri.target, ri.target))
                    for ri in o.ris)
        return Ontology(cis, ris)


def rename_outside_sigma(o: Ontology, sigma: Signature) -> tuple[Ontology, RenameMap]:
    """Uniformly replace every symbol of ``o`` outside ``sigma`` (concept
    names, role names, and individuals alike) by a primed copy."""
    sig = signature_of(o)
    taken = set(sig.all_names()) | set(sigma.all_names())

    def prime(x: str) -> str:
        y = x + "'"
        while y in taken:
            y += "'"
        taken.add(y)
        return y

    m = RenameMap(
        {x: prime(x) for x in sorted(sig.concept_names - sigma.concept_names)},
        {x: prime(x) for x in sorted(sig.role_names - sigma.role_names)},
        {x: prime(x) for x in sorted(sig.individuals - sigma.individuals)},
    )
    return m.apply_ontology(o), m
