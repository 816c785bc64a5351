"""Reader and writer for the ``.mcs`` text format.

    mcs {
      context C1 kind=horn cost=1 { program { a. c :- b, d. } }
      context T1 kind=table cost=2/3 default=inconsistent {
        map { {} -> [ {} ]; {a} -> [ {a} ]; }
      }
      bridge r1: C1.b <- (T1 : a), not (C1 : d).
    }

Identifiers match ``[A-Za-z_][A-Za-z0-9_]*``; costs are decimals or
``num/den``; rule ids are optional and default to ``r1, r2, ...`` in file
order; ``#`` starts a comment running to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import MCSError, ValidationError
from .logics import EMPTY, INCONSISTENT, Clause, HornSuite, TableSuite, to_fraction
from .model import MCS, BridgeRule, Context

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>:-|<-|->|[{}()\[\],;.:=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class McsParseError(MCSError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise McsParseError([Diagnostic(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- document ------------------------------------------------------------------

@dataclass
class ContextDecl:
    name: str
    kind: str
    cost: str
    default: Optional[str]
    clauses: list[Clause] = field(default_factory=list)
    entries: list[tuple[frozenset, list[frozenset]]] = field(default_factory=list)
    span: tuple[int, int] = (0, 0)
    attr_spans: dict = field(default_factory=dict)


@dataclass
class BridgeDecl:
    id: Optional[str]
    target: str
    head: str
    positive: list[tuple[str, str]] = field(default_factory=list)
    negative: list[tuple[str, str]] = field(default_factory=list)
    span: tuple[int, int] = (0, 0)
    ref_spans: dict = field(default_factory=dict)


@dataclass
class McsDocument:
    contexts: list[ContextDecl] = field(default_factory=list)
    bridges: list[BridgeDecl] = field(default_factory=list)
    # names of contexts whose declaration failed to parse
    broken: set = field(default_factory=set, compare=False)


class _Syntax(Exception):
    def __init__(self, token: Token, message: str):
        self.diagnostic = Diagnostic(token.line, token.col, message)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.diagnostics: list[Diagnostic] = []
        self.current: Optional[str] = None

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "ident")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise _Syntax(self.tok, f"expected '{text}', found {self._describe(self.tok)}")
        return self.advance()

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "ident":
            raise _Syntax(self.tok, f"expected {what}, found {self._describe(self.tok)}")
        return self.advance()

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else f"'{t.text}'"

    # grammar --------------------------------------------------------------
    def document(self) -> McsDocument:
        doc = McsDocument()
        try:
            self.expect("mcs")
            self.expect("{")
        except _Syntax as exc:
            self.diagnostics.append(exc.diagnostic)
            return doc
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.diagnostics.append(Diagnostic(self.tok.line, self.tok.col, "expected '}' before end of input"))
                return doc
            self.current = None
            try:
                if self.at("context"):
                    doc.contexts.append(self.context())
                elif self.at("bridge"):
                    doc.bridges.append(self.bridge())
                else:
                    raise _Syntax(self.tok, f"expected 'context' or 'bridge', found {self._describe(self.tok)}")
            except _Syntax as exc:
                self.diagnostics.append(exc.diagnostic)
                if self.current is not None:
                    doc.broken.add(self.current)
                self.recover()
        self.advance()
        if self.tok.kind != "eof":
            self.diagnostics.append(Diagnostic(self.tok.line, self.tok.col,
                                               f"unexpected {self._describe(self.tok)} after end of system"))
        return doc

    def recover(self):
        self.advance()
        while self.tok.kind != "eof" and not (self.at("context") or self.at("bridge")):
            self.advance()
        if self.tok.kind == "eof" and self.toks[self.i - 1].text == "}":
            self.i -= 1

    def context(self) -> ContextDecl:
        start = self.expect("context")
        name = self.ident("context name")
        self.current = name.text
        attrs: dict[str, str] = {}
        spans: dict[str, tuple[int, int]] = {}
        while not self.at("{"):
            key = self.ident("attribute name")
            self.expect("=")
            if self.tok.kind not in ("ident", "num"):
                raise _Syntax(self.tok, f"expected a value for {key.text}")
            value = self.advance()
            if key.text in attrs:
                raise _Syntax(key, f"duplicate attribute {key.text}")
            attrs[key.text] = value.text
            spans[key.text] = (value.line, value.col)
        unknown = set(attrs) - {"kind", "cost", "default"}
        if unknown:
            raise _Syntax(name, f"unknown attribute {sorted(unknown)[0]}")
        kind = attrs.get("kind")
        if kind not in ("horn", "table"):
            raise _Syntax(name, f"context {name.text}: kind must be horn or table")
        decl = ContextDecl(name.text, kind, attrs.get("cost", "1"), attrs.get("default"),
                           span=(start.line, start.col), attr_spans=spans)
        self.expect("{")
        if kind == "horn":
            if self.at("program"):
                self.advance()
                self.expect("{")
                while not self.at("}"):
                    decl.clauses.append(self.clause())
                self.expect("}")
        else:
            if self.at("map"):
                self.advance()
                self.expect("{")
                while not self.at("}"):
                    decl.entries.append(self.entry())
                self.expect("}")
        self.expect("}")
        return decl

    def clause(self) -> Clause:
        head = self.ident("atom")
        body = []
        if self.at(":-"):
            self.advance()
            body.append(self.ident("atom").text)
            while self.at(","):
                self.advance()
                body.append(self.ident("atom").text)
        self.expect(".")
        return Clause(head.text, tuple(body))

    def atom_set(self) -> frozenset:
        self.expect("{")
        atoms = []
        if not self.at("}"):
            atoms.append(self.ident("atom").text)
            while self.at(","):
                self.advance()
                atoms.append(self.ident("atom").text)
        self.expect("}")
        return frozenset(atoms)

    def entry(self):
        kb = self.atom_set()
        self.expect("->")
        self.expect("[")
        alts = []
        if not self.at("]"):
            alts.append(self.atom_set())
            while self.at(","):
                self.advance()
                alts.append(self.atom_set())
        self.expect("]")
        self.expect(";")
        return kb, alts

    def bridge(self) -> BridgeDecl:
        start = self.expect("bridge")
        rule_id = None
        if self.tok.kind == "ident" and self.peek().text == ":":
            rule_id = self.advance().text
            self.advance()
        target = self.ident("context name")
        self.expect(".")
        head = self.ident("atom")
        decl = BridgeDecl(rule_id, target.text, head.text, span=(start.line, start.col))
        decl.ref_spans[target.text] = (target.line, target.col)
        self.expect("<-")
        if not self.at("."):
            self.body_literal(decl)
            while self.at(","):
                self.advance()
                self.body_literal(decl)
        self.expect(".")
        return decl

    def body_literal(self, decl: BridgeDecl):
        negated = False
        if self.at("not") and self.peek().text == "(":
            self.advance()
            negated = True
        self.expect("(")
        ctx = self.ident("context name")
        self.expect(":")
        atom = self.ident("atom")
        self.expect(")")
        decl.ref_spans.setdefault(ctx.text, (ctx.line, ctx.col))
        (decl.negative if negated else decl.positive).append((ctx.text, atom.text))


def _parse(text: str) -> tuple[McsDocument, list[Diagnostic]]:
    parser = _Parser(tokenize(text))
    doc = parser.document()
    return doc, parser.diagnostics


def parse_document(text: str) -> McsDocument:
    """Syntax only; raises :class:`McsParseError` with every diagnostic found."""
    doc, diags = _parse(text)
    if diags:
        raise McsParseError(diags)
    return doc


def build_mcs(doc: McsDocument, diags: Optional[list[Diagnostic]] = None) -> MCS:
    """Validate a document and construct the system, collecting all diagnostics.

    ``diags`` carries syntax diagnostics found earlier so that one error
    reports both kinds.
    """
    diags = [] if diags is None else list(diags)
    names: dict[str, ContextDecl] = {}
    for c in doc.contexts:
        if c.name in names:
            diags.append(Diagnostic(*c.span, f"duplicate context name {c.name}"))
        else:
            names[c.name] = c

    explicit = [b.id for b in doc.bridges if b.id is not None]
    used: set[str] = set()
    for b in doc.bridges:
        if b.id is not None:
            if b.id in used:
                diags.append(Diagnostic(*b.span, f"duplicate rule id {b.id}"))
            used.add(b.id)
    counter = 0
    ids = []
    taken = set(explicit)
    for b in doc.bridges:
        if b.id is None:
            counter += 1
            while f"r{counter}" in taken:
                counter += 1
            taken.add(f"r{counter}")
            ids.append(f"r{counter}")
        else:
            ids.append(b.id)

    rules_by_ctx: dict[str, list[BridgeRule]] = {n: [] for n in names}
    for b, rid in zip(doc.bridges, ids):
        bad = False
        for ref in [b.target] + [c for c, _ in b.positive + b.negative]:
            if ref not in names:
                if ref not in doc.broken:
                    pos = b.ref_spans.get(ref, b.span)
                    diags.append(Diagnostic(*pos, f"unresolved context {ref}"))
                bad = True
        if bad:
            continue
        try:
            rule = BridgeRule(rid, b.target, b.head, frozenset(b.positive), frozenset(b.negative))
        except ValidationError as exc:
            diags.append(Diagnostic(*b.span, str(exc)))
            continue
        rules_by_ctx[b.target].append(rule)

    contexts = []
    for c in names.values():
        try:
            cost = to_fraction(c.cost)
        except ValidationError as exc:
            diags.append(Diagnostic(*c.attr_spans.get("cost", c.span), str(exc)))
            continue
        try:
            if c.kind == "horn":
                if c.default is not None:
                    raise ValidationError(f"context {c.name}: default applies to table contexts only")
                logic = HornSuite(tuple(c.clauses), cost)
            else:
                default = INCONSISTENT if c.default is None else c.default
                if default not in (INCONSISTENT, EMPTY):
                    raise ValidationError(f"context {c.name}: default must be inconsistent or empty")
                logic = TableSuite(tuple(c.entries), default, cost)
        except ValidationError as exc:
            diags.append(Diagnostic(*c.span, str(exc)))
            continue
        contexts.append(Context(c.name, logic, tuple(rules_by_ctx[c.name])))

    if diags:
        raise McsParseError(sorted(diags, key=lambda d: (d.line, d.col)))
    return MCS(contexts)


def parse_mcs(text: str) -> MCS:
    doc, diags = _parse(text)
    return build_mcs(doc, diags)


def load_mcs(path) -> MCS:
    with open(path, encoding="utf-8") as fh:
        return parse_mcs(fh.read())


# -- writer --------------------------------------------------------------------

def _cost(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _set(s) -> str:
    return "{" + ", ".join(sorted(s)) + "}" if s else "{}"


def format_rule(rule: BridgeRule) -> str:
    parts = [f"({c} : {p})" for c, p in sorted(rule.positive)]
    parts += [f"not ({c} : {p})" for c, p in sorted(rule.negative)]
    body = " " + ", ".join(parts) if parts else " "
    return f"bridge {rule.id}: {rule.target}.{rule.head} <-{body}."


def to_text(mcs: MCS) -> str:
    lines = ["mcs {"]
    for ctx in mcs.contexts:
        logic = ctx.logic
        if isinstance(logic, HornSuite):
            prog = " ".join(map(str, logic.program))
            inner = f"program {{ {prog} }}" if prog else "program { }"
            lines.append(f"  context {ctx.name} kind=horn cost={_cost(logic.unit_cost)} {{ {inner} }}")
        elif isinstance(logic, TableSuite):
            lines.append(f"  context {ctx.name} kind=table cost={_cost(logic.unit_cost)} "
                         f"default={logic.default} {{")
            lines.append("    map {")
            for kb, alts in logic.entries:
                lines.append(f"      {_set(kb)} -> [ {', '.join(_set(a) for a in alts)} ];")
            lines.append("    }")
            lines.append("  }")
        else:
            raise ValidationError(f"context {ctx.name}: {logic.kind} suites have no text form")
    for rule in mcs.rules:
        lines.append("  " + format_rule(rule))
    lines.append("}")
    return "\n".join(lines) + "\n"
