"""Text front end: a small declaration language and its pretty printer.

Example document::

    sort A;
    fun plus : A A -> A;
    fun zero : -> A;
    axiom forallctx(x,y,z): top |- plus(plus(x,y),z) = plus(x,plus(y,z));
    monoid <a,b | ab=ba>;
    sequent forallctx(x): X(Y(x)) = Y(X(x)) |- X(Y(x)) = Y(X(x));
    formula forallctx(x): exists y. X(x) = y;

Variable names encode ranks: ``x y z w u v`` are ranks 0..5 and ``x7`` is
rank 7; any other name gets a rank from 100 upward in order of appearance.
With several sorts a variable is annotated at its binding site (``y:B``)
or carries a ``_B`` suffix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    TOP, And, App, Eq, Exists, Formula, FormulaInContext, FunctionSymbol, Rel, RelationSymbol,
    Sequent, Signature, Sort, SortError, Term, Top, Var, conjuncts,
)

BASE_NAMES = ("x", "y", "z", "w", "u", "v")
KEYWORDS = {"sort", "fun", "rel", "axiom", "sequent", "formula", "monoid", "forallctx", "top", "exists"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.source = source


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<turnstile>\|-)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<number>\d+)
  | (?P<punct>[;:,().=&<>|])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, source: str = "<input>") -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col, source)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            out.append(Token(kind if kind != "punct" else chunk, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


@dataclass
class MonoidDecl:
    generators: tuple[str, ...]
    relations: tuple[tuple[str, str], ...]


@dataclass
class Document:
    signature: Signature
    axioms: list[Sequent] = field(default_factory=list)
    axiom_names: list[str] = field(default_factory=list)
    monoids: list[MonoidDecl] = field(default_factory=list)
    sequents: list[Sequent] = field(default_factory=list)
    formulas: list[FormulaInContext] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str, signature: Signature | None, source: str):
        self.toks = tokenize(text, source)
        self.i = 0
        self.source = source
        self.sig = signature or Signature(())
        self.base = self.sig
        self.local: set[str] = set()  # names declared by this document

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col, self.source)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.accept(kind, text)
        if t is None:
            want = text or kind
            got = self.tok.text or self.tok.kind
            self.error(f"expected {want!r}, found {got!r}")
        return t

    def keyword(self, word: str) -> Token | None:
        return self.accept("ident", word)

    # declarations
    def document(self) -> Document:
        doc = Document(self.sig)
        while self.tok.kind != "eof":
            t = self.tok
            if self.keyword("sort"):
                name = self.expect("ident")
                if self.restated(name, lambda: Sort(name.text) in self.base.sorts):
                    pass
                elif any(s.name == name.text for s in self.sig.sorts):
                    self.error(f"sort {name.text} declared twice", name)
                else:
                    self.sig = self.sig.extend(sorts=[Sort(name.text)])
            elif self.keyword("fun"):
                name = self.symbol_name()
                self.expect(":")
                args = []
                while self.tok.kind == "ident":
                    args.append(self.sort_ref())
                self.expect("arrow")
                result = self.sort_ref()
                f = FunctionSymbol(name.text, tuple(args), result)
                if not self.restated(name, lambda: self.base.has_function(f.name) and self.base.function(f.name) == f):
                    self.fresh_symbol(name)
                    self.sig = self.sig.extend(functions=[f])
            elif self.keyword("rel"):
                name = self.symbol_name()
                self.expect(":")
                args = []
                while self.tok.kind == "ident":
                    args.append(self.sort_ref())
                r = RelationSymbol(name.text, tuple(args))
                if not self.restated(name, lambda: self.base.has_relation(r.name) and self.base.relation(r.name) == r):
                    self.fresh_symbol(name)
                    self.sig = self.sig.extend(relations=[r])
            elif self.keyword("axiom"):
                label = ""
                if self.tok.kind == "ident" and self.tok.text != "forallctx":
                    label = self.expect("ident").text
                doc.axioms.append(self.sequent_body())
                doc.axiom_names.append(label)
            elif self.keyword("sequent"):
                doc.sequents.append(self.sequent_body())
            elif self.keyword("formula"):
                ctx, scope = self.context()
                self.expect(":")
                phi = self.formula(scope)
                doc.formulas.append(self.wrap(lambda: FormulaInContext(ctx, phi), t))
            elif self.keyword("monoid"):
                doc.monoids.append(self.monoid_body())
            else:
                self.error(f"expected a declaration, found {t.text or t.kind!r}")
            self.expect(";")
            doc.signature = self.sig
        return doc

    def wrap(self, build, tok):
        try:
            return build()
        except (ValueError, SortError) as exc:
            if isinstance(exc, ParseError):
                raise
            self.error(str(exc), tok)

    def restated(self, name: Token, same) -> bool:
        """A declaration repeating one of the given signature verbatim is accepted once."""
        if name.text in self.local:
            return False
        self.local.add(name.text)
        return same()

    def symbol_name(self) -> Token:
        name = self.expect("ident")
        if name.text in KEYWORDS:
            self.error(f"{name.text!r} is reserved", name)
        if name.text in self.local:
            self.error(f"symbol {name.text} declared twice", name)
        return name

    def fresh_symbol(self, name: Token):
        if self.sig.has_function(name.text) or self.sig.has_relation(name.text):
            self.error(f"symbol {name.text} conflicts with an earlier declaration", name)

    def sort_ref(self) -> Sort:
        t = self.expect("ident")
        try:
            return self.sig.sort(t.text)
        except KeyError:
            self.error(f"unknown sort {t.text}", t)

    def sequent_body(self) -> Sequent:
        start = self.tok
        ctx, scope = self.context()
        self.expect(":")
        ante = self.formula(scope)
        self.expect("turnstile")
        cons = self.formula(scope)
        return self.wrap(lambda: Sequent(ante, ctx, cons), start)

    def monoid_body(self) -> MonoidDecl:
        self.expect("<")
        gens: list[str] = []
        while self.tok.kind == "ident":
            g = self.expect("ident")
            if len(g.text) != 1:
                self.error("monoid generators are single letters", g)
            if g.text in gens:
                self.error(f"generator {g.text} repeated", g)
            gens.append(g.text)
            if not self.accept(","):
                break
        rels = []
        if self.accept("|"):
            while self.tok.kind in ("ident", "number"):
                u = self.word(gens)
                self.expect("=")
                v = self.word(gens)
                rels.append((u, v))
                if not self.accept(","):
                    break
        self.expect(">")
        return MonoidDecl(tuple(gens), tuple(rels))

    def word(self, gens) -> str:
        t = self.tok
        if self.accept("number"):
            if t.text != "1":
                self.error("the empty word is written 1", t)
            return ""
        t = self.expect("ident")
        for ch in t.text:
            if ch not in gens:
                self.error(f"undeclared generator {ch!r}", t)
        return t.text

    # variables
    def default_sort(self, tok: Token) -> Sort:
        if len(self.sig.sorts) == 1:
            return self.sig.sorts[0]
        self.error(f"cannot infer the sort of {tok.text!r}; annotate it as {tok.text}:S", tok)

    def new_var(self, tok: Token, scope: dict, extra: dict) -> Var:
        name = tok.text
        sort = None
        if self.accept(":"):
            sort = self.sort_ref()
        base = name
        if "_" in name:
            head, tail = name.rsplit("_", 1)
            if any(s.name == tail for s in self.sig.sorts):
                base = head
                suffix_sort = self.sig.sort(tail)
                if sort is not None and sort != suffix_sort:
                    self.error("conflicting sort annotations", tok)
                sort = suffix_sort
        if sort is None:
            sort = self.default_sort(tok)
        rank = _rank_of(base, extra)
        return Var(sort, rank)

    def context(self) -> tuple[tuple[Var, ...], dict]:
        self.expect("ident", "forallctx")
        self.expect("(")
        self._extra = {}
        scope: dict[str, Var] = {}
        ctx = []
        while self.tok.kind == "ident":
            t = self.expect("ident")
            v = self.new_var(t, scope, self._extra)
            if t.text in scope or v in ctx:
                self.error(f"variable {t.text} repeated in context", t)
            scope[t.text] = v
            ctx.append(v)
            if not self.accept(","):
                break
        self.expect(")")
        return tuple(ctx), scope

    # formulas
    def formula(self, scope) -> Formula:
        parts = [self.unit(scope)]
        while self.accept("&"):
            parts.append(self.unit(scope))
        out = parts[0]
        for p in parts[1:]:
            out = And(out, p)
        return out

    def unit(self, scope) -> Formula:
        t = self.tok
        if self.keyword("top"):
            return TOP
        if self.keyword("exists"):
            inner = dict(scope)
            bound = []
            while True:
                vt = self.expect("ident")
                v = self.new_var(vt, inner, self._extra)
                inner[vt.text] = v
                bound.append(v)
                if not self.accept(","):
                    break
            self.expect(".")
            body = self.formula(inner)
            for v in reversed(bound):
                body = Exists(v, body)
            return body
        if self.accept("("):
            phi = self.formula(scope)
            self.expect(")")
            return phi
        if t.kind == "ident" and self.sig.has_relation(t.text):
            self.i += 1
            sym = self.sig.relation(t.text)
            args = self.args(scope)
            return self.wrap(lambda: Rel(sym, tuple(args)), t)
        left = self.term(scope)
        eq = self.expect("=")
        right = self.term(scope)
        return self.wrap(lambda: Eq(left, right), eq)

    def args(self, scope) -> list[Term]:
        self.expect("(")
        out = []
        if not self.accept(")"):
            out.append(self.term(scope))
            while self.accept(","):
                out.append(self.term(scope))
            self.expect(")")
        return out

    def term(self, scope) -> Term:
        t = self.expect("ident")
        if self.sig.has_function(t.text):
            fn = self.sig.function(t.text)
            args = self.args(scope) if self.tok.kind == "(" else []
            return self.wrap(lambda: App(fn, tuple(args)), t)
        if t.text in KEYWORDS:
            self.error(f"unexpected keyword {t.text!r}", t)
        if t.text not in scope:
            self.error(f"unbound variable {t.text!r}", t)
        return scope[t.text]


def _rank_of(name: str, extra: dict) -> int:
    if name in BASE_NAMES:
        return BASE_NAMES.index(name)
    m = re.fullmatch(r"x(\d+)", name)
    if m:
        return int(m.group(1))
    if name not in extra:
        extra[name] = 100 + len(extra)
    return extra[name]


def parse_document(text: str, signature: Signature | None = None, source: str = "<input>") -> Document:
    return _Parser(text, signature, source).document()


def parse_formula(text: str, signature: Signature, context: str = "", source: str = "<input>") -> FormulaInContext:
    """Parse ``forallctx(...): phi`` or a bare formula whose context is written separately."""
    body = text if text.lstrip().startswith("forallctx") else f"forallctx({context}): {text}"
    doc = parse_document(f"formula {body};", signature, source)
    return doc.formulas[0]


def parse_sequent(text: str, signature: Signature, source: str = "<input>") -> Sequent:
    return parse_document(f"sequent {text};", signature, source).sequents[0]


# -- printing ---------------------------------------------------------------


def var_name(v: Var, multisorted: bool = False) -> str:
    base = BASE_NAMES[v.rank] if v.rank < len(BASE_NAMES) else f"x{v.rank}"
    return f"{base}_{v.sort.name}" if multisorted else base


class Printer:
    def __init__(self, signature: Signature | None = None, multisorted: bool | None = None):
        if multisorted is None:
            multisorted = signature is not None and len(signature.sorts) > 1
        self.multi = multisorted

    def var(self, v: Var) -> str:
        return var_name(v, self.multi)

    def term(self, t: Term) -> str:
        if isinstance(t, Var):
            return self.var(t)
        if not t.args:
            return t.fn.name
        return f"{t.fn.name}({','.join(self.term(a) for a in t.args)})"

    def formula(self, phi: Formula) -> str:
        if isinstance(phi, Top):
            return "top"
        if isinstance(phi, Eq):
            return f"{self.term(phi.left)} = {self.term(phi.right)}"
        if isinstance(phi, Rel):
            return f"{phi.symbol.name}({','.join(self.term(a) for a in phi.args)})"
        if isinstance(phi, And):
            left = self.formula(phi.left)
            if isinstance(phi.left, Exists):
                left = f"({left})"
            right = self.formula(phi.right)
            if isinstance(phi.right, (And, Exists)):
                right = f"({right})"
            return f"{left} & {right}"
        return f"exists {self.var(phi.var)}. {self.formula(phi.body)}"

    def context(self, ctx) -> str:
        return f"forallctx({','.join(self.var(v) for v in ctx)})"

    def sequent(self, s: Sequent) -> str:
        return f"{self.context(s.context)}: {self.formula(s.antecedent)} |- {self.formula(s.consequent)}"

    def fic(self, f: FormulaInContext) -> str:
        return f"{{{','.join(self.var(v) for v in f.context)}. {self.formula(f.formula)}}}"


def format_formula(phi: Formula, signature: Signature | None = None) -> str:
    return Printer(signature).formula(phi)


def format_term(t: Term, signature: Signature | None = None) -> str:
    return Printer(signature).term(t)


def format_sequent(s: Sequent, signature: Signature | None = None) -> str:
    return Printer(signature).sequent(s)


def format_fic(f: FormulaInContext, signature: Signature | None = None) -> str:
    return Printer(signature).fic(f)


def format_word(word: str) -> str:
    return word or "1"


def format_monoid(generators, relations) -> str:
    rels = ", ".join(f"{format_word(u)}={format_word(v)}" for u, v in relations)
    gens = ",".join(generators)
    return f"monoid <{gens} | {rels}>;" if relations else f"monoid <{gens}>;"


def format_signature(sig: Signature) -> list[str]:
    lines = [f"sort {s.name};" for s in sig.sorts]
    for f in sig.functions:
        args = " ".join(s.name for s in f.arg_sorts)
        lines.append(f"fun {f.name} : {args + ' ' if args else ''}-> {f.result.name};")
    for r in sig.relations:
        lines.append(f"rel {r.name} : {' '.join(s.name for s in r.arg_sorts)};")
    return lines


def format_document(sig: Signature, axioms=(), names=(), sequents=(), monoids=()) -> str:
    p = Printer(sig)
    lines = format_signature(sig)
    names = list(names) + [""] * (len(axioms) - len(names))
    for ax, name in zip(axioms, names):
        lines.append(f"axiom {name + ' ' if name else ''}{p.sequent(ax)};")
    for m in monoids:
        lines.append(format_monoid(m.generators, m.relations))
    for s in sequents:
        lines.append(f"sequent {p.sequent(s)};")
    return "\n".join(lines) + "\n"


def is_conjunction_of_atoms(phi: Formula) -> bool:
    return all(not isinstance(c, Exists) for c in conjuncts(phi))
