"""Lexer, parser and printer for the Curry-like surface language."""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = {"data", "where", "free"}
OP_CHARS = "!#$%&*+./<=>?@\\^|-~:"

# precedence, associativity
FIXITY = {
    "?": (0, "right"),
    "||": (2, "right"),
    "&&": (3, "right"),
    "==": (4, "none"),
    "/=": (4, "none"),
    "<": (4, "none"),
    ">": (4, "none"),
    "<=": (4, "none"),
    ">=": (4, "none"),
    ":": (5, "right"),
    "++": (5, "right"),
    "+": (6, "left"),
    "-": (6, "left"),
    "*": (7, "left"),
    "/": (7, "left"),
    "^": (8, "right"),
}
DEFAULT_FIXITY = (9, "left")


class LangError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str  # INT UIDENT LIDENT OP EQUALS BAR UNDERSCORE KW ( ) [ ] , ; EOF
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>[!#$%&*+./<=>?@\\^|\-~:]+)
  | (?P<punct>[()\[\],;])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LangError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, value = m.lastgroup, m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "newline":
            line, line_start = line + 1, pos
        elif kind == "space":
            pass
        elif kind == "op" and value.startswith("--") and set(value) == {"-"}:
            end = text.find("\n", pos)
            pos = len(text) if end < 0 else end
        elif kind == "int":
            tokens.append(Token("INT", value, line, col))
        elif kind == "ident":
            if value == "_":
                tokens.append(Token("UNDERSCORE", value, line, col))
            elif value in KEYWORDS:
                tokens.append(Token("KW", value, line, col))
            elif value[0].isupper():
                tokens.append(Token("UIDENT", value, line, col))
            else:
                tokens.append(Token("LIDENT", value, line, col))
        elif kind == "op":
            special = {"=": "EQUALS", "|": "BAR"}
            tokens.append(Token(special.get(value, "OP"), value, line, col))
        else:
            tokens.append(Token(value, value, line, col))
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- syntax trees -----------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Where:
    body: object
    bindings: tuple  # of (name, expr)


ExprAst = Lit | Name | Call | Where


@dataclass(frozen=True)
class DataDecl:
    name: str
    constructors: tuple  # of (name, arity, line)
    line: int


@dataclass(frozen=True)
class RuleDecl:
    name: str
    args: tuple  # raw patterns: Lit | Name | Call, "_" for wildcards
    rhs: ExprAst
    line: int
    col: int


# -- parser -------------------------------------------------------------------


def _atom_start(tok: Token) -> bool:
    return tok.kind in ("INT", "UIDENT", "LIDENT", "(", "[")


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise LangError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            self.error(f"expected {what or kind}, found {found!r}")
        return self.advance()

    # expressions

    def expression(self, allow_where: bool = True) -> ExprAst:
        body = self.operators(0)
        if self.tok.kind == "KW" and self.tok.text == "where":
            if not allow_where:
                self.error("'where' is only allowed at the top of an expression")
            self.advance()
            body = Where(body, self.bindings())
        return body

    def bindings(self) -> tuple:
        out = []
        while True:
            name = self.expect("LIDENT", "a local name")
            if self.tok.kind == "KW" and self.tok.text == "free":
                self.error(
                    f"free variable {name.text!r}: logic variables are not supported "
                    "by this engine; use an explicit choice (generator) instead",
                    name,
                )
            self.expect("EQUALS", "'='")
            out.append((name.text, self.operators(0)))
            if self.tok.kind == ";":
                self.advance()
                continue
            if self.tok.kind == "LIDENT" and self.peek().kind in ("EQUALS", "KW"):
                continue
            return tuple(out)

    def operators(self, min_prec: int) -> ExprAst:
        lhs = self.operand()
        while self.tok.kind == "OP":
            op = self.tok.text
            prec, assoc = FIXITY.get(op, DEFAULT_FIXITY)
            if prec < min_prec:
                break
            self.advance()
            rhs = self.operators(prec if assoc == "right" else prec + 1)
            lhs = Call(op, (lhs, rhs))
            if assoc == "none" and self.tok.kind == "OP":
                if FIXITY.get(self.tok.text, DEFAULT_FIXITY)[0] == prec:
                    self.error(f"non-associative operator {op!r} chained")
        return lhs

    def operand(self) -> ExprAst:
        if self.tok.kind == "OP" and self.tok.text == "-" and self.peek().kind == "INT":
            self.advance()
            return Lit(-int(self.advance().text))
        return self.application()

    def _binding_ahead(self) -> bool:
        return self.tok.kind == "LIDENT" and self.peek().kind == "EQUALS"

    def application(self) -> ExprAst:
        head = self.tok
        if head.kind in ("UIDENT", "LIDENT"):
            self.advance()
            args = []
            while _atom_start(self.tok) and not self._binding_ahead():
                args.append(self.atom())
            return Call(head.text, tuple(args)) if args else Name(head.text)
        return self.atom()

    def atom(self) -> ExprAst:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return Lit(int(t.text))
        if t.kind in ("UIDENT", "LIDENT"):
            self.advance()
            return Name(t.text)
        if t.kind == "(":
            self.advance()
            if self.tok.kind == "OP" and self.tok.text == "-" and self.peek().kind == "INT":
                if self.peek(2).kind == ")":
                    self.advance()
                    value = -int(self.advance().text)
                    self.advance()
                    return Lit(value)
            e = self.operators(0)
            self.expect(")", "')'")
            return e
        if t.kind == "[":
            self.advance()
            items = []
            if self.tok.kind != "]":
                items.append(self.operators(0))
                while self.tok.kind == ",":
                    self.advance()
                    items.append(self.operators(0))
            self.expect("]", "']'")
            e: ExprAst = Name("[]")
            for item in reversed(items):
                e = Call(":", (item, e))
            return e
        self.error(f"unexpected {t.text or 'end of input'!r}")

    # patterns

    def pattern(self):
        p = self.constructor_pattern()
        if self.tok.kind == "OP" and self.tok.text == ":":
            self.advance()
            return Call(":", (p, self.pattern()))
        return p

    def constructor_pattern(self):
        if self.tok.kind == "UIDENT":
            name = self.advance().text
            args = []
            while self.tok.kind in ("LIDENT", "UIDENT", "UNDERSCORE", "INT", "(", "["):
                args.append(self.atomic_pattern())
            return Call(name, tuple(args)) if args else Name(name)
        return self.atomic_pattern()

    def atomic_pattern(self):
        t = self.tok
        if t.kind == "UNDERSCORE":
            self.advance()
            return Name("_")
        if t.kind in ("LIDENT", "UIDENT"):
            self.advance()
            return Name(t.text)
        if t.kind == "INT":
            self.advance()
            return Lit(int(t.text))
        if t.kind == "(":
            self.advance()
            if self.tok.kind == "OP" and self.tok.text == "-" and self.peek().kind == "INT":
                self.advance()
                p = Lit(-int(self.advance().text))
            elif self.tok.kind == "LIDENT" and self.peek().kind not in (")", "OP"):
                # an operation applied inside a pattern; kept so the
                # constructor-based check can report it
                name = self.advance().text
                args = []
                while self.tok.kind != ")" and self.tok.kind != "EOF":
                    args.append(self.atomic_pattern())
                p = Call(name, tuple(args))
            else:
                p = self.pattern()
            self.expect(")", "')'")
            return p
        if t.kind == "[":
            self.advance()
            items = []
            if self.tok.kind != "]":
                items.append(self.pattern())
                while self.tok.kind == ",":
                    self.advance()
                    items.append(self.pattern())
            self.expect("]", "']'")
            p = Name("[]")
            for item in reversed(items):
                p = Call(":", (item, p))
            return p
        self.error(f"unexpected {t.text or 'end of input'!r} in pattern")

    # declarations

    def declaration(self):
        t = self.tok
        if t.kind == "KW" and t.text == "data":
            return self.data_declaration()
        return self.rule_declaration()

    def data_declaration(self) -> DataDecl:
        start = self.advance()
        name = self.expect("UIDENT", "a type name").text
        while self.tok.kind == "LIDENT":  # type parameters
            self.advance()
        self.expect("EQUALS", "'='")
        cons = []
        while True:
            c = self.expect("UIDENT", "a constructor name")
            arity = 0
            while self.tok.kind in ("UIDENT", "LIDENT", "(", "["):
                self._type_atom()
                arity += 1
            cons.append((c.text, arity, c.line))
            if self.tok.kind != "BAR":
                break
            self.advance()
        return DataDecl(name, tuple(cons), start.line)

    def _type_atom(self):
        t = self.advance()
        if t.kind in ("(", "["):
            close = ")" if t.kind == "(" else "]"
            depth = 1
            while depth:
                k = self.advance().kind
                if k == "EOF":
                    self.error(f"unbalanced {t.text!r} in type")
                if k == t.kind:
                    depth += 1
                elif k == close:
                    depth -= 1

    def rule_declaration(self) -> RuleDecl:
        start = self.tok
        # infix definition iff an operator occurs at nesting depth 0 before '='
        depth, j, infix = 0, self.i, None
        while self.toks[j].kind not in ("EQUALS", "EOF"):
            k = self.toks[j].kind
            depth += k in ("(", "[")
            depth -= k in (")", "]")
            if k == "OP" and depth == 0 and infix is None:
                infix = self.toks[j]
            j += 1
        if infix is not None:
            left = self.constructor_pattern()
            op = self.expect("OP", "an operator")
            right = self.constructor_pattern()
            name, args = op.text, (left, right)
        else:
            name = self.expect("LIDENT", "an operation name").text
            args = []
            while self.tok.kind != "EQUALS" and self.tok.kind != "EOF":
                args.append(self.atomic_pattern())
            args = tuple(args)
        self.expect("EQUALS", "'='")
        rhs = self.expression()
        return RuleDecl(name, args, rhs, start.line, start.col)


def _split_declarations(tokens: list[Token]) -> list[list[Token]]:
    """A declaration starts at column 1; indented lines continue it."""
    groups: list[list[Token]] = []
    for t in tokens[:-1]:
        if t.col == 1 or not groups:
            if t.col != 1:
                raise LangError("declaration must start in column 1", t.line, t.col)
            groups.append([])
        groups[-1].append(t)
    return groups


def parse_declarations(text: str) -> list[DataDecl | RuleDecl]:
    tokens = tokenize(text)
    decls = []
    for group in _split_declarations(tokens):
        last = group[-1]
        p = Parser(group + [Token("EOF", "", last.line, last.col + len(last.text))])
        decls.append(p.declaration())
        if p.tok.kind != "EOF":
            p.error(f"unexpected {p.tok.text!r}")
    return decls


def parse_expression(text: str) -> ExprAst:
    p = Parser(tokenize(text))
    e = p.expression()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r}")
    return e


# -- printing -------------------------------------------------------------------


def _is_operator(name: str) -> bool:
    return bool(name) and name[0] in OP_CHARS


def show(e: ExprAst) -> str:
    """Print an expression so that parsing it back gives the same tree."""
    if isinstance(e, Where):
        binds = "; ".join(f"{n} = {show(v)}" for n, v in e.bindings)
        return f"{show(e.body)} where {binds}"
    return _show(e, top=True)


def _show(e, top: bool = False) -> str:
    if isinstance(e, Lit):
        return str(e.value) if e.value >= 0 or top else f"({e.value})"
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Where):
        raise ValueError("nested where")
    if _is_operator(e.name) and len(e.args) == 2:
        s = f"{_show(e.args[0])} {e.name} {_show(e.args[1])}"
    else:
        s = " ".join([e.name, *(_show(a) for a in e.args)])
    return s if top else f"({s})"
