"""Text and JSON serialization for concepts and ontologies, plus the
built-in example corpus.

Text format, one axiom per line, ``#`` starts a comment:

    concept  :=  implication
    implication := disjunction [ "->" implication ]        (Horn input only)
    disjunction := conjunction ( "|" conjunction )*        (Horn input only)
    conjunction := unary ( "&" unary )*
    unary    :=  "exists" role "." unary | "forall" role "." unary
               | "not" unary | atom
    atom     :=  "Top" | "Bot" | NAME | "{" NAME "}" | "(" concept ")"
    role     :=  "u" | "inv" "(" NAME ")" | NAME
    ci       :=  concept "<=" concept
    ri       :=  NAME ( "o" NAME )* "<=" NAME

A bare line ``x <= y`` is ambiguous between a concept inclusion and a role
hierarchy, so the format adopts the usual naming convention: role names and
individual names start with a lower-case letter, concept names with an
upper-case letter or underscore.  A line whose both sides are lower-case
names parses as a role inclusion.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import (
    BOT,
    Bot,
    CI,
    Concept,
    Dialect,
    ElinterpError,
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
    TOP,
    Top,
    U,
    UNIVERSAL_ROLE_NAME,
    conj,
    signature_of,
)


class ParseError(ElinterpError):
    """Syntax error with a 1-based line/column position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


# ============================================================================
# Tokenizer
# ============================================================================

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<le><=)"
    r"|(?P<arrow>->)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>[{}().&|])"
)

_KEYWORDS = {"Top", "Bot", "exists", "forall", "not", "inv", "o"}


@dataclass
class _Token:
    kind: str  # 'name', 'le', 'arrow', or the punctuation character
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "name":
            tokens.append(_Token("name", value, line, col))
        elif kind == "le":
            tokens.append(_Token("<=", value, line, col))
        elif kind == "arrow":
            tokens.append(_Token("->", value, line, col))
        elif kind == "punct":
            tokens.append(_Token(value, value, line, col))
        # ws and comments are skipped, but advance line/col
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    return tokens


def _is_role_name(name: str) -> bool:
    return name[0].islower()


class _Parser:
    def __init__(self, tokens: list[_Token], end_line: int):
        self.tokens = tokens
        self.pos = 0
        self.end_line = end_line

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.end_line, 1)
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Token:
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text!r}",
                             t.line, t.col)
        return t

    def error(self, message: str) -> ParseError:
        t = self.peek()
        if t is None:
            return ParseError(message, self.end_line, 1)
        return ParseError(message, t.line, t.col)

    # grammar ---------------------------------------------------------------

    def concept(self) -> Concept:
        lhs = self.disjunction()
        t = self.peek()
        if t is not None and t.kind == "->":
            self.next()
            rhs = self.concept()  # right associative
            return Implies(lhs, rhs)
        return lhs

    def disjunction(self) -> Concept:
        parts = [self.conjunction()]
        while (t := self.peek()) is not None and t.kind == "|":
            self.next()
            parts.append(self.conjunction())
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))

    def conjunction(self) -> Concept:
        parts = [self.unary()]
        while (t := self.peek()) is not None and t.kind == "&":
            self.next()
            parts.append(self.unary())
        if len(parts) == 1:
            return parts[0]
        return conj(parts)

    def unary(self) -> Concept:
        t = self.peek()
        if t is not None and t.kind == "name" and t.text in ("exists", "forall"):
            self.next()
            role = self.role()
            self.expect(".")
            filler = self.unary()
            return Exists(role, filler) if t.text == "exists" else Forall(role, filler)
        if t is not None and t.kind == "name" and t.text == "not":
            self.next()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Concept:
        t = self.next()
        if t.kind == "(":
            c = self.concept()
            self.expect(")")
            return c
        if t.kind == "{":
            name = self.expect("name")
            if not _is_role_name(name.text):
                raise ParseError(
                    f"individual names start lower-case: {name.text!r}",
                    name.line, name.col)
            self.expect("}")
            return Nominal(name.text)
        if t.kind == "name":
            if t.text == "Top":
                return TOP
            if t.text == "Bot":
                return BOT
            if t.text in _KEYWORDS:
                raise ParseError(f"unexpected keyword {t.text!r}", t.line, t.col)
            if _is_role_name(t.text):
                raise ParseError(
                    f"concept names start upper-case: {t.text!r}",
                    t.line, t.col)
            return Name(t.text)
        raise ParseError(f"expected a concept, found {t.text!r}", t.line, t.col)

    def role(self) -> Role:
        t = self.next()
        if t.kind != "name":
            raise ParseError(f"expected a role, found {t.text!r}", t.line, t.col)
        if t.text == UNIVERSAL_ROLE_NAME:
            return U
        if t.text == "inv":
            self.expect("(")
            name = self.expect("name")
            if not _is_role_name(name.text):
                raise ParseError(
                    f"role names start lower-case: {name.text!r}",
                    name.line, name.col)
            self.expect(")")
            return Role(name.text, inverse=True)
        if not _is_role_name(t.text) or t.text in _KEYWORDS:
            raise ParseError(
                f"role names start lower-case: {t.text!r}", t.line, t.col)
        return Role(t.text)

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)


def parse_concept(text: str) -> Concept:
    p = _Parser(_tokenize(text), text.count("\n") + 1)
    c = p.concept()
    if not p.at_end():
        raise p.error("trailing input after concept")
    return c


def _parse_ri(tokens: list[_Token], end_line: int) -> Optional[RI]:
    """Try to read the token list as a role inclusion; None if it isn't one."""
    chain = []
    i = 0
    while True:
        if i >= len(tokens) or tokens[i].kind != "name" \
                or not _is_role_name(tokens[i].text) \
                or tokens[i].text in _KEYWORDS \
                or tokens[i].text == UNIVERSAL_ROLE_NAME:
            return None
        chain.append(tokens[i].text)
        i += 1
        if i < len(tokens) and tokens[i].kind == "name" and tokens[i].text == "o":
            i += 1
            continue
        break
    if i >= len(tokens) or tokens[i].kind != "<=":
        return None
    i += 1
    if i != len(tokens) - 1 or tokens[i].kind != "name" \
            or not _is_role_name(tokens[i].text) \
            or tokens[i].text in _KEYWORDS:
        return None
    if tokens[i].text == UNIVERSAL_ROLE_NAME:
        t = tokens[i]
        raise ParseError("the universal role cannot occur in role inclusions",
                         t.line, t.col)
    return RI(tuple(chain), tokens[i].text)


def parse_ontology(text: str) -> Ontology:
    cis: list[CI] = []
    ris: list[RI] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = _tokenize(line)
        for t in tokens:
            t.line = lineno
        ri = _parse_ri(tokens, lineno)
        if ri is not None:
            ris.append(ri)
            continue
        split = [i for i, t in enumerate(tokens) if t.kind == "<="]
        if len(split) != 1:
            raise ParseError("an axiom has exactly one '<='", lineno,
                             tokens[0].col if tokens else 1)
        p = _Parser(tokens[:split[0]], lineno)
        lhs = p.concept()
        if not p.at_end():
            raise p.error("trailing input before '<='")
        p = _Parser(tokens[split[0] + 1:], lineno)
        rhs = p.concept()
        if not p.at_end():
            raise p.error("trailing input after axiom")
        cis.append(CI(lhs, rhs))
    return Ontology(tuple(cis), tuple(ris))


# ============================================================================
# Printing
# ============================================================================


def print_role(role: Role) -> str:
    if role.is_universal:
        return UNIVERSAL_ROLE_NAME
    return f"inv({role.name})" if role.inverse else role.name


def print_concept(c: Concept) -> str:
    def unary_level(x: Concept) -> str:
        if isinstance(x, (Top, Bot, Name, Nominal)):
            return atom_level(x)
        if isinstance(x, Exists):
            return f"exists {print_role(x.role)} . {unary_level(x.filler)}"
        if isinstance(x, Forall):
            return f"forall {print_role(x.role)} . {unary_level(x.filler)}"
        if isinstance(x, Not):
            return f"not {unary_level(x.arg)}"
        return "(" + top_level(x) + ")"

    def atom_level(x: Concept) -> str:
        if isinstance(x, Top):
            return "Top"
        if isinstance(x, Bot):
            return "Bot"
        if isinstance(x, Name):
            return x.name
        if isinstance(x, Nominal):
            return "{%s}" % x.individual
        return "(" + top_level(x) + ")"

    def top_level(x: Concept) -> str:
        if isinstance(x, Implies):
            return f"{mid_level(x.lhs)} -> {top_level(x.rhs)}"
        return mid_level(x)

    def mid_level(x: Concept) -> str:
        if isinstance(x, Or):
            return " | ".join(and_level(d) for d in x.disjuncts)
        return and_level(x)

    def and_level(x: Concept):
        from .core import And
        if isinstance(x, And):
            return " & ".join(unary_level(p) for p in x.conjuncts)
        return unary_level(x)

    return top_level(c)


def print_ci(ci: CI) -> str:
    return f"{print_concept(ci.lhs)} <= {print_concept(ci.rhs)}"


def print_ri(ri: RI) -> str:
    return " o ".join(ri.chain) + f" <= {ri.target}"


def print_ontology(o: Ontology) -> str:
    lines = [print_ci(ci) for ci in o.cis] + [print_ri(ri) for ri in o.ris]
    return "\n".join(lines) + ("\n" if lines else "")


# ============================================================================
# JSON
# ============================================================================


def concept_to_json(c: Concept) -> dict:
    if isinstance(c, Top):
        return {"op": "top"}
    if isinstance(c, Bot):
        return {"op": "bot"}
    if isinstance(c, Name):
        return {"op": "name", "name": c.name}
    if isinstance(c, Nominal):
        return {"op": "nominal", "individual": c.individual}
    if isinstance(c, Exists):
        return {"op": "exists", "role": print_role(c.role),
                "filler": concept_to_json(c.filler)}
    if isinstance(c, Forall):
        return {"op": "forall", "role": print_role(c.role),
                "filler": concept_to_json(c.filler)}
    from .core import And
    if isinstance(c, And):
        return {"op": "and", "args": [concept_to_json(x) for x in c.conjuncts]}
    if isinstance(c, Or):
        return {"op": "or", "args": [concept_to_json(x) for x in c.disjuncts]}
    if isinstance(c, Implies):
        return {"op": "implies", "lhs": concept_to_json(c.lhs),
                "rhs": concept_to_json(c.rhs)}
    if isinstance(c, Not):
        return {"op": "not", "arg": concept_to_json(c.arg)}
    raise TypeError(f"not a concept: {c!r}")


def _role_from_text(text: str) -> Role:
    if text == UNIVERSAL_ROLE_NAME:
        return U
    m = re.fullmatch(r"inv\((\w+'*)\)", text)
    if m:
        return Role(m.group(1), inverse=True)
    return Role(text)


def concept_from_json(data: dict) -> Concept:
    op = data["op"]
    if op == "top":
        return TOP
    if op == "bot":
        return BOT
    if op == "name":
        return Name(data["name"])
    if op == "nominal":
        return Nominal(data["individual"])
    if op == "exists":
        return Exists(_role_from_text(data["role"]),
                      concept_from_json(data["filler"]))
    if op == "forall":
        return Forall(_role_from_text(data["role"]),
                      concept_from_json(data["filler"]))
    if op == "and":
        return conj(concept_from_json(x) for x in data["args"])
    if op == "or":
        return Or(tuple(concept_from_json(x) for x in data["args"]))
    if op == "implies":
        return Implies(concept_from_json(data["lhs"]),
                       concept_from_json(data["rhs"]))
    if op == "not":
        return Not(concept_from_json(data["arg"]))
    raise ValueError(f"unknown concept op {op!r}")


def ontology_to_json(o: Ontology) -> dict:
    return {
        "cis": [{"lhs": concept_to_json(ci.lhs), "rhs": concept_to_json(ci.rhs)}
                for ci in o.cis],
        "ris": [{"chain": list(ri.chain), "target": ri.target}
                for ri in o.ris],
    }


def ontology_from_json(data: dict) -> Ontology:
    cis = tuple(CI(concept_from_json(x["lhs"]), concept_from_json(x["rhs"]))
                for x in data.get("cis", ()))
    ris = tuple(RI(tuple(x["chain"]), x["target"])
                for x in data.get("ris", ()))
    return Ontology(cis, ris)


# ============================================================================
# Example corpus
# ============================================================================


def _sig(concepts="", roles="", individuals="") -> Signature:
    return Signature(
        frozenset(concepts.split()) if concepts else frozenset(),
        frozenset(roles.split()) if roles else frozenset(),
        frozenset(individuals.split()) if individuals else frozenset(),
    )


@dataclass(frozen=True)
class CorpusExpectation:
    """One expected outcome: can the target be captured in this language?"""

    dialect: str  # language of the definition/interpolant, e.g. "elo_u"
    exists: bool
    definition: Optional[str] = None  # expected concept, up to equivalence


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    description: str
    kind: str  # "definability" or "interpolation"
    ontology_text: str
    sigma: Signature
    target: Optional[str] = None  # concept name to define
    implicitly_definable: Optional[bool] = None
    expectations: tuple[CorpusExpectation, ...] = ()
    # interpolation entries:
    ontology2_text: Optional[str] = None
    lhs_text: Optional[str] = None
    rhs_text: Optional[str] = None

    def ontology(self) -> Ontology:
        return parse_ontology(self.ontology_text)

    def ontology2(self) -> Ontology:
        return parse_ontology(self.ontology2_text or "")

    def lhs(self) -> Concept:
        return parse_concept(self.lhs_text)

    def rhs(self) -> Concept:
        return parse_concept(self.rhs_text)


# -- parametric families -----------------------------------------------------


def binary_tree_ontology(n: int) -> Ontology:
    """A marker plus a depth-n binary r1/r2-tree with decorated leaves.

    The name A has a smallest signature definition of size about 2^(n+1):
    the full binary tree over the signature {r1, r2, Bn, M}.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    lines = [f"A <= M & exists r1 . B1 & exists r2 . B1"]
    for i in range(1, n):
        lines.append(f"B{i} <= exists r1 . B{i + 1} & exists r2 . B{i + 1}")
    lines += [
        f"B{n} <= B",
        "exists r1 . B & exists r2 . B <= B",
        "B & M <= A",
    ]
    return parse_ontology("\n".join(lines))


def binary_tree_sigma(n: int) -> Signature:
    return _sig(concepts=f"B{n} M", roles="r1 r2")


def binary_tree_definition(n: int) -> Concept:
    c: Concept = Name(f"B{n}")
    for _ in range(n):
        c = conj([Exists(Role("r1"), c), Exists(Role("r2"), c)])
    return conj([Name("M"), c])


def role_chain_ontology(n: int) -> Ontology:
    """Role inclusions that square a chain n times: the definition of A
    over {r0, B} is a path of 2^n many r0-steps ending in B."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lines = [f"r{i} o r{i} <= r{i + 1}" for i in range(n)]
    lines += [
        "A <= exists r0 . B",
        "B <= exists r0 . B",
        f"exists r{n} . B <= A",
    ]
    return parse_ontology("\n".join(lines))


def role_chain_sigma(n: int) -> Signature:
    return _sig(concepts="B", roles="r0")


def role_chain_definition(n: int) -> Concept:
    c: Concept = Name("B")
    for _ in range(2 ** n):
        c = Exists(Role("r0"), c)
    return c


def counting_tree_ontology(n: int) -> Ontology:
    """An inverse-role ontology whose smallest signature definition is a
    full binary r/s-tree of double-exponential... rather, depth 2^n: an
    (n+1)-bit counter over inverse roles forces L exactly at depth 2^n
    below the marker M."""
    if n < 0:
        raise ValueError("n must be at least 0")
    bits = range(n + 1)
    lines = ["Top <= exists r . Top & exists s . Top"]
    lines.append("A <= M & " + " & ".join(f"Xbar{i}" for i in bits))
    for sigma in ("r", "s"):
        for i in bits:
            lower = " & ".join(f"X{j}" for j in range(i))
            lower = f" & {lower}" if lower else ""
            lines.append(f"exists inv({sigma}) . (Xbar{i}{lower}) <= X{i}")
            lines.append(f"exists inv({sigma}) . (X{i}{lower}) <= Xbar{i}")
            for j in range(i):
                lines.append(f"exists inv({sigma}) . (Xbar{i} & Xbar{j}) <= Xbar{i}")
                lines.append(f"exists inv({sigma}) . (X{i} & Xbar{j}) <= X{i}")
    lines.append(" & ".join(f"X{i}" for i in bits) + " <= L")
    lines.append("L <= B")
    lines.append("exists r . B & exists s . B <= B")
    lines.append("B & M <= A")
    return parse_ontology("\n".join(lines))


def counting_tree_sigma(n: int) -> Signature:
    return _sig(concepts="M L", roles="r s")


def counting_tree_definition(n: int) -> Concept:
    c: Concept = Name("L")
    for _ in range(2 ** n):
        c = conj([Exists(Role("r"), c), Exists(Role("s"), c)])
    return conj([Name("M"), c])


def horn_example_ontology() -> Ontology:
    """A Horn ontology where A is implicitly but not explicitly definable
    over {B, D1, E, r, r1}, even with inverse roles and the universal role."""
    return parse_ontology("""
        B & exists r . (C & E) <= A
        A <= B
        B <= forall r . F
        B <= exists r . C
        C <= F & forall r1 . D1
        F <= exists r1 . D1 & exists r1 . M
        A <= forall r . ((F & exists r1 . (D1 & M)) -> E)
    """)


def horn_example_sigma() -> Signature:
    return _sig(concepts="B D1 E", roles="r r1")


# -- fixed entries ------------------------------------------------------------

_O_U = """\
A <= B
D & exists u . A <= E
B <= exists r . C
C <= D
B & exists r . (C & E) <= A
"""

_O_N = """\
A <= exists r . (E & {c})
Top <= exists s . (Q2 & exists s . {c})
exists s . (Q1 & Q2 & exists s . {c}) <= A
exists s . E <= Q1
"""

_O_R = """\
A <= exists r . E
E <= exists s . B
exists s . B <= A
r o s <= s
"""

_O_RS = """\
A <= exists s . E
E <= exists s1 . B
exists s2 . B <= A
s1 <= s
s <= s2
s o s <= s
"""

_O_I = """\
A <= B
D & exists inv(r) . A <= E
B <= exists r . C
C <= D
B & exists r . (C & E) <= A
"""

_O_NOMINAL = """\
A <= {b}
A <= exists r . B
B <= exists s . A
"""


def load_corpus() -> list[CorpusEntry]:
    """The built-in corpus of definability and interpolation problems.

    Every entry records the known answer; the ``corpus`` CLI command
    re-checks all of them.
    """
    entries = [
        CorpusEntry(
            name="no_def_universal",
            description="implicitly definable, but no EL_u definition over "
                        "{B, D, E, r}",
            kind="definability",
            ontology_text=_O_U,
            sigma=_sig(concepts="B D E", roles="r"),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("el_u", False),
                CorpusExpectation("el", False),
            ),
        ),
        CorpusEntry(
            name="no_def_nominals",
            description="implicitly definable, but no ELO_u definition over "
                        "{c, s, Q1}",
            kind="definability",
            ontology_text=_O_N,
            sigma=_sig(concepts="Q1", roles="s", individuals="c"),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("elo_u", False),
                CorpusExpectation("elo", False),
            ),
        ),
        CorpusEntry(
            name="no_def_role_chain",
            description="a single inclusion r o s <= s defeats EL_u "
                        "definability over {s, E}",
            kind="definability",
            ontology_text=_O_R,
            sigma=_sig(concepts="E", roles="s"),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("el_u", False),
                CorpusExpectation("el", False),
            ),
        ),
        CorpusEntry(
            name="no_def_role_hierarchy",
            description="role hierarchies with one transitive role defeat "
                        "EL_u definability over {s1, s2, E}",
            kind="definability",
            ontology_text=_O_RS,
            sigma=_sig(concepts="E", roles="s1 s2"),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("el_u", False),
                CorpusExpectation("el", False),
            ),
        ),
        CorpusEntry(
            name="no_def_inverse",
            description="implicitly definable, but no ELI_u definition over "
                        "{B, D, E, r}",
            kind="definability",
            ontology_text=_O_I,
            sigma=_sig(concepts="B D E", roles="r"),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("eli_u", False),
                CorpusExpectation("eli", False),
            ),
        ),
        CorpusEntry(
            name="nominal_needs_universal",
            description="definable with the universal role, but not without",
            kind="definability",
            ontology_text=_O_NOMINAL,
            sigma=_sig(concepts="B", individuals="b"),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("elo_u", True, "{b} & exists u . B"),
                CorpusExpectation("elo", False),
            ),
        ),
        CorpusEntry(
            name="binary_tree_2",
            description="smallest definition is the full binary tree of "
                        "depth 2",
            kind="definability",
            ontology_text=print_ontology(binary_tree_ontology(2)),
            sigma=binary_tree_sigma(2),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation(
                    "el", True,
                    print_concept(binary_tree_definition(2))),
            ),
        ),
        CorpusEntry(
            name="role_chain_power_1",
            description="role inclusions force a definition that is a "
                        "2^n-step path",
            kind="definability",
            ontology_text=print_ontology(role_chain_ontology(1)),
            sigma=role_chain_sigma(1),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("el", True,
                                  print_concept(role_chain_definition(1))),
            ),
        ),
        CorpusEntry(
            name="horn_no_def",
            description="a Horn ontology that defines A implicitly over "
                        "{B, D1, E, r, r1} with no explicit definition even "
                        "in ELI_u",
            kind="definability",
            ontology_text=print_ontology(horn_example_ontology()),
            sigma=horn_example_sigma(),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("eli_u", False),
            ),
        ),
        CorpusEntry(
            name="counting_tree_1",
            description="an inverse-role bit counter; the definition is a "
                        "binary tree of depth 2^n",
            kind="definability",
            ontology_text=print_ontology(counting_tree_ontology(1)),
            sigma=counting_tree_sigma(1),
            target="A",
            implicitly_definable=True,
            expectations=(
                CorpusExpectation("eli", True,
                                  print_concept(counting_tree_definition(1))),
            ),
        ),
        CorpusEntry(
            name="interpolate_inverse_chain",
            description="a one-step interpolant with an inverse role",
            kind="interpolation",
            ontology_text="A <= exists inv(r) . E\n",
            ontology2_text="exists inv(r) . E <= B\n",
            lhs_text="A",
            rhs_text="B",
            sigma=_sig(concepts="E", roles="r"),
            expectations=(
                CorpusExpectation("eli", True, "exists inv(r) . E"),
            ),
        ),
        CorpusEntry(
            name="interpolate_safe_chain",
            description="a plain EL interpolant through a shared role",
            kind="interpolation",
            ontology_text="A <= exists r . (C & D)\n",
            ontology2_text="exists r . C <= B\n",
            lhs_text="A",
            rhs_text="B",
            sigma=_sig(concepts="C", roles="r"),
            expectations=(
                CorpusExpectation("el", True, "exists r . C"),
            ),
        ),
    ]
    return entries
