"""Recursive-descent parser for the surface syntax.

Terms::

    term  ::= "fun" binder ":" ptype "->" term
            | "let" ident [":" ptype] "=" term "in" term
            | "match" term "with" pattern "->" term
            | "case" term "of" ctor ident "->" term ("|" ctor ident "->" term)*
            | "fold" "(" ident "," ident "->" term ")" "over" sum "from" term
            | sum
    sum   ::= prod (("+" | "-") prod)*
    prod  ::= unary ("*" unary)*
    unary ::= "-" unary | app
    app   ::= atom atom*
    atom  ::= number | ident | op "(" [term ("," term)*] ")" | "(" term [":" type] ")"
            | "<" [term ("," term)*] ">" | "nil" | "cons" "(" term "," term ")"
            | "inj" "[" type "]" ctor atom

    binder  ::= ident | pattern
    pattern ::= "<" [binder ("," binder)*] ">"

Types::

    type  ::= ptype ["->" type]
    ptype ::= "list" ptype | "real" | "unit" | "(" type ")" | "(" type "*" ")"
            | "(" type ("*" type)+ ")" | "[" ctor ":" type ("|" ctor ":" type)* "]"

Lambda annotations are parsed at ``ptype`` level, so a function-typed
binder needs parentheses: ``fun f: (real -> real) -> f x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import ast as A

KEYWORDS = frozenset(
    "fun let in match with case of fold over from nil cons inj real unit list".split()
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<arrow>->)
  | (?P<punct>[()<>\[\],:*+\-|=])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        elif kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, line, col))
        elif kind == "num":
            tokens.append(Token("num", text, line, col))
        else:
            tokens.append(Token("sym", text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str, registry=None):
        if registry is None:
            from ..primops import builtin_registry

            registry = builtin_registry()
        self.registry = registry
        self.toks = tokenize(source)
        self.i = 0

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.describe(self.tok)}")
        return self.advance()

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected identifier, found {self.describe(t)}")
        self.i += 1
        return t.text

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def finish(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.describe(self.tok)}")

    # -- types ------------------------------------------------------------

    def type(self) -> A.Type:
        dom = self.ptype()
        if self.at("->"):
            self.advance()
            return A.Fun(dom, self.type())
        return dom

    def ptype(self) -> A.Type:
        t = self.tok
        if self.at("list"):
            self.advance()
            return A.ListT(self.ptype())
        if self.at("real"):
            self.advance()
            return A.REAL
        if self.at("unit"):
            self.advance()
            return A.UNIT
        if self.at("("):
            self.advance()
            first = self.type()
            if self.at(")"):
                self.advance()
                return first
            items = [first]
            while self.at("*"):
                self.advance()
                if self.at(")"):
                    if len(items) != 1:
                        self.error("trailing '*' is only allowed in a one-element product")
                    break
                items.append(self.type())
            self.expect(")")
            return A.Prod(tuple(items))
        if self.at("["):
            self.advance()
            cases = [self._variant_case()]
            while self.at("|"):
                self.advance()
                cases.append(self._variant_case())
            self.expect("]")
            try:
                return A.Variant(tuple(cases))
            except ValueError as exc:
                self.error(str(exc), t)
        self.error(f"expected a type, found {self.describe(t)}")

    def _variant_case(self):
        name = self.ident()
        self.expect(":")
        return name, self.type()

    # -- terms ------------------------------------------------------------

    def term(self) -> A.Term:
        if self.at("fun"):
            return self._fun()
        if self.at("let"):
            return self._let()
        if self.at("match"):
            self.advance()
            scrutinee = self.term()
            self.expect("with")
            pat = self._pattern()
            self.expect("->")
            return _bind_pattern(pat, scrutinee, self.term())
        if self.at("case"):
            return self._case()
        if self.at("fold"):
            self.advance()
            self.expect("(")
            x1 = self.ident()
            self.expect(",")
            x2 = self.ident()
            self.expect("->")
            step = self.term()
            self.expect(")")
            self.expect("over")
            lst = self.sum()
            self.expect("from")
            return A.Fold(x1, x2, step, lst, self.term())
        return self.sum()

    def _fun(self) -> A.Term:
        self.expect("fun")
        if self.at("<"):
            pat = self._pattern()
            self.expect(":")
            ty = self.ptype()
            self.expect("->")
            body = self.term()
            z = A.fresh("p")
            return A.Lam(z, ty, _bind_pattern(pat, A.Var(z), body))
        name = self.ident()
        self.expect(":")
        ty = self.ptype()
        self.expect("->")
        return A.Lam(name, ty, self.term())

    def _let(self) -> A.Term:
        self.expect("let")
        name = self.ident()
        ty = None
        if self.at(":"):
            self.advance()
            ty = self.ptype()
        self.expect("=")
        bound = self.term()
        self.expect("in")
        return A.let(name, bound, self.term(), ty)

    def _case(self) -> A.Term:
        self.expect("case")
        scrutinee = self.term()
        self.expect("of")
        branches = [self._branch()]
        while self.at("|"):
            self.advance()
            branches.append(self._branch())
        ctors = [c for c, _, _ in branches]
        if len(set(ctors)) != len(ctors):
            self.error(f"duplicate constructor in case: {ctors}")
        return A.Case(scrutinee, tuple(branches))

    def _branch(self):
        ctor = self.ident()
        x = self.ident()
        self.expect("->")
        return ctor, x, self.term()

    def _pattern(self):
        if self.tok.kind == "ident":
            return self.ident()
        self.expect("<")
        items = []
        if not self.at(">"):
            items.append(self._pattern())
            while self.at(","):
                self.advance()
                items.append(self._pattern())
        self.expect(">")
        return tuple(items)

    def sum(self) -> A.Term:
        acc = self.prod()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.prod()
            if op == "-":
                rhs = A.Op("*", (A.Const(-1.0), rhs))
            acc = A.Op("+", (acc, rhs))
        return acc

    def prod(self) -> A.Term:
        acc = self.unary()
        while self.at("*"):
            self.advance()
            acc = A.Op("*", (acc, self.unary()))
        return acc

    def unary(self) -> A.Term:
        if self.at("-"):
            self.advance()
            if self.tok.kind == "num" and not self._num_continues():
                return A.Const(-float(self.advance().text))
            return A.Op("*", (A.Const(-1.0), self.unary()))
        return self.app()

    def _num_continues(self) -> bool:
        # "-2 x" must read as (-1) * (2 x), not (-2) x
        nxt = self.peek()
        return self._starts_atom(nxt)

    @staticmethod
    def _starts_atom(t: Token) -> bool:
        if t.kind in ("num", "ident"):
            return True
        return t.text in ("(", "<", "nil", "cons", "inj") and t.kind in ("sym", "kw")

    def app(self) -> A.Term:
        fn = self.atom()
        while self._starts_atom(self.tok):
            fn = A.App(fn, self.atom())
        return fn

    def atom(self) -> A.Term:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return A.Const(float(t.text))
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                if t.text in self.registry:
                    return self._op_call(t)
                if self._paren_has_comma():
                    self.error(f"unknown operation {t.text!r}", t)
            return A.Var(t.text)
        if self.at("("):
            self.advance()
            inner = self.term()
            if self.at(":"):
                colon = self.advance()
                ty = self.type()
                if not isinstance(inner, A.Nil):
                    self.error("type ascription is only supported on nil", colon)
                if not isinstance(ty, A.ListT):
                    self.error(f"nil must be ascribed a list type, got {ty}", colon)
                if inner.elem is not None and inner.elem != ty.elem:
                    self.error("conflicting nil annotations", colon)
                inner = A.Nil(ty.elem)
            self.expect(")")
            return inner
        if self.at("<"):
            self.advance()
            items = []
            if not self.at(">"):
                items.append(self.term())
                while self.at(","):
                    self.advance()
                    items.append(self.term())
            self.expect(">")
            return A.Tuple(tuple(items))
        if self.at("nil"):
            self.advance()
            return A.Nil()
        if self.at("cons"):
            self.advance()
            self.expect("(")
            head = self.term()
            self.expect(",")
            tail = self.term()
            self.expect(")")
            return A.Cons(head, tail)
        if self.at("inj"):
            self.advance()
            self.expect("[")
            ty_tok = self.tok
            ty = self.type()
            self.expect("]")
            if not isinstance(ty, A.Variant):
                self.error(f"inj needs a variant type, got {ty}", ty_tok)
            ctor_tok = self.tok
            ctor = self.ident()
            if ty.ctor_type(ctor) is None:
                self.error(f"constructor {ctor!r} not in {ty}", ctor_tok)
            return A.Inj(ty, ctor, self.atom())
        self.error(f"expected a term, found {self.describe(t)}")

    def _op_call(self, name_tok: Token) -> A.Term:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.advance()
                args.append(self.term())
        self.expect(")")
        arity = self.registry[name_tok.text].arity
        if len(args) != arity:
            self.error(
                f"operation {name_tok.text!r} takes {arity} argument(s), got {len(args)}", name_tok
            )
        return A.Op(name_tok.text, tuple(args))

    def _paren_has_comma(self) -> bool:
        depth = 0
        for t in self.toks[self.i :]:
            if t.kind == "sym" and t.text in "([<":
                depth += 1
            elif t.kind == "sym" and t.text in ")]>":
                depth -= 1
                if depth == 0:
                    return False
            elif depth == 1 and t.kind == "sym" and t.text == ",":
                return True
            elif t.kind == "eof":
                return False
        return False


def _bind_pattern(pat, scrutinee: A.Term, body: A.Term) -> A.Term:
    """Desugar a (possibly nested) tuple pattern into nested matches."""
    if isinstance(pat, str):
        return A.let(pat, scrutinee, body) if scrutinee != A.Var(pat) else body
    names = []
    inner = []
    for p in pat:
        if isinstance(p, str):
            names.append(p)
        else:
            z = A.fresh("p")
            names.append(z)
            inner.append((z, p))
    for z, p in reversed(inner):
        body = _bind_pattern(p, A.Var(z), body)
    return A.TupleMatch(scrutinee, tuple(names), body)


def parse(source: str, registry=None) -> A.Term:
    """Parse a term."""
    p = Parser(source, registry)
    t = p.term()
    p.finish()
    return t


def parse_type(source: str) -> A.Type:
    p = Parser(source, registry={})
    t = p.type()
    p.finish()
    return t
