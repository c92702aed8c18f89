"""Reader for the Prolog subset accepted by the analyzer.

Conjunctive clause bodies, ``entry`` and ``trust success`` assertions,
``module``/``use_module`` directives. Infix operators are limited to
``:-``, ``,``, ``=`` and the arithmetic comparisons/expressions needed by
the benchmark programs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from absdist.terms import NIL, Struct, Term, Var, format_term, mk_list, ordered_vars

__all__ = [
    "ParseError",
    "ProgramError",
    "Clause",
    "Predicate",
    "EntryDecl",
    "TrustDecl",
    "Program",
    "read_term",
    "parse_program",
    "format_program",
    "program_points",
    "entry_to_abstract",
]


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} at line {line}, column {col}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class ProgramError(ParseError):
    """Well-formed text that does not describe a valid program."""


# ---------------------------------------------------------------------------
# tokenizer

_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
_SOLO = set("!;")
_PUNCT = set("()[]|,")


@dataclass(frozen=True)
class Token:
    kind: str  # atom, var, num, punct, end, eof
    text: str
    line: int
    col: int
    layout_before: bool = False


def tokenize(text: str) -> Iterator[Token]:
    i, n = 0, len(text)
    line, line_start = 1, 0
    layout = True

    def pos() -> tuple[int, int]:
        return line, i - line_start + 1

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            line_start = i
            layout = True
            continue
        if c.isspace():
            i += 1
            layout = True
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            layout = True
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated block comment", *pos())
            line += text.count("\n", i, end)
            if "\n" in text[i:end]:
                line_start = text.rfind("\n", i, end) + 1
            i = end + 2
            layout = True
            continue
        ln, col = pos()
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if (c.isupper() or c == "_") else "atom"
            yield Token(kind, word, ln, col, layout)
            i = j
        elif c.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            yield Token("num", text[i:j], ln, col, layout)
            i = j
        elif c == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated quoted atom", ln, col)
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                elif text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                    else:
                        break
                else:
                    buf.append(text[j])
                    j += 1
            yield Token("qatom", "".join(buf), ln, col, layout)
            i = j + 1
        elif c == "." and (i + 1 >= n or text[i + 1].isspace() or text[i + 1] == "%"):
            yield Token("end", ".", ln, col, layout)
            i += 1
        elif c in _PUNCT:
            yield Token("punct", c, ln, col, layout)
            i += 1
        elif c in _SOLO:
            yield Token("atom", c, ln, col, layout)
            i += 1
        elif c in _SYMBOL_CHARS:
            j = i + 1
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            yield Token("atom", text[i:j], ln, col, layout)
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", ln, col)
        layout = False
    yield Token("eof", "", line, i - line_start + 1, layout)


# ---------------------------------------------------------------------------
# operator-precedence term reader

_INFIX = {
    ":-": (1200, "xfx"),
    "=>": (1050, "xfx"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "is": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    "=<": (700, "xfx"),
    ">=": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    ":": (200, "xfy"),
}
_PREFIX = {
    ":-": (1200, "fx"),
    "entry": (1150, "fx"),
    "trust": (1150, "fx"),
    "success": (1100, "fx"),
    "-": (200, "fy"),
}


class _Reader:
    def __init__(self, text: str):
        self.toks = list(tokenize(text))
        self.i = 0
        self.varmap: dict[str, Var] = {}
        self.anon = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        what = "end of clause" if tok.kind == "end" else ("end of input" if tok.kind == "eof" else repr(tok.text))
        raise ParseError(f"{msg} (found {what})", tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.fail(f"expected {text or kind}")
        return self.advance()

    def _infix_here(self) -> tuple[str, int, str] | None:
        t = self.tok
        if t.kind == "atom" and t.text in _INFIX:
            return (t.text, *_INFIX[t.text])
        if t.kind == "punct" and t.text == ",":
            return (",", *_INFIX[","])
        return None

    def parse(self, max_prec: int) -> Term:
        left, left_prec = self.parse_primary(max_prec)
        return self.parse_infix(left, left_prec, max_prec)

    def parse_infix(self, left: Term, left_prec: int, max_prec: int) -> Term:
        while True:
            op = self._infix_here()
            if op is None:
                return left
            name, prec, typ = op
            if prec > max_prec:
                return left
            la = prec - 1 if typ[0] == "x" else prec
            ra = prec - 1 if typ[2] == "x" else prec
            if left_prec > la:
                return left
            self.advance()
            right = self.parse(ra)
            left, left_prec = Struct(name, (left, right)), prec

    def _starts_term(self, t: Token) -> bool:
        if t.kind in ("var", "num", "qatom"):
            return True
        if t.kind == "atom":
            return t.text not in _INFIX or t.text in _PREFIX
        return t.kind == "punct" and t.text in "(["

    def parse_primary(self, max_prec: int) -> tuple[Term, int]:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Struct(t.text), 0
        if t.kind == "var":
            self.advance()
            if t.text == "_":
                self.anon += 1
                return Var(f"_G{self.anon}"), 0
            return self.varmap.setdefault(t.text, Var(t.text)), 0
        if t.kind == "punct" and t.text == "(":
            self.advance()
            inner = self.parse(1200)
            self.expect("punct", ")")
            return inner, 0
        if t.kind == "punct" and t.text == "[":
            self.advance()
            if self.tok.kind == "punct" and self.tok.text == "]":
                self.advance()
                return self._maybe_call("[]", t), 0
            items = [self.parse(999)]
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.advance()
                items.append(self.parse(999))
            tail: Term = NIL
            if self.tok.kind == "punct" and self.tok.text == "|":
                self.advance()
                tail = self.parse(999)
            self.expect("punct", "]")
            return mk_list(items, tail), 0
        if t.kind in ("atom", "qatom"):
            self.advance()
            nxt = self.tok
            if nxt.kind == "punct" and nxt.text == "(" and not nxt.layout_before:
                return self._maybe_call(t.text, t), 0
            if t.kind == "atom" and t.text == "-" and nxt.kind == "num" and not nxt.layout_before:
                self.advance()
                return Struct("-" + nxt.text), 0
            if t.kind == "atom" and t.text in _PREFIX and self._starts_term(nxt):
                prec, typ = _PREFIX[t.text]
                if prec > max_prec:
                    prec = 999
                arg_max = prec - 1 if typ == "fx" else prec
                arg = self.parse(arg_max)
                return Struct(t.text, (arg,)), prec
            prec = max(_INFIX.get(t.text, (0,))[0], _PREFIX.get(t.text, (0,))[0]) if t.kind == "atom" else 0
            return Struct(t.text), (prec if prec <= max_prec else 0)
        self.fail("expected a term")

    def _maybe_call(self, name: str, t: Token) -> Term:
        if self.tok.kind == "punct" and self.tok.text == "(" and not self.tok.layout_before:
            self.advance()
            args = [self.parse(999)]
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.advance()
                args.append(self.parse(999))
            self.expect("punct", ")")
            return Struct(name, tuple(args))
        return Struct(name)

    def read_clause(self) -> tuple[Term, Token] | None:
        if self.tok.kind == "eof":
            return None
        start = self.tok
        self.varmap = {}
        term = self.parse(1200)
        if self.tok.kind != "end":
            self.fail("expected operator or end of clause")
        self.advance()
        return term, start


def read_term(text: str) -> Term:
    r = _Reader(text.strip().rstrip(".") + " .")
    out = r.read_clause()
    if out is None:
        raise ParseError("empty input")
    if r.tok.kind != "eof":
        r.fail("trailing input after term")
    return out[0]


# ---------------------------------------------------------------------------
# programs


@dataclass(frozen=True)
class Clause:
    head: Struct
    body: tuple[Term, ...]
    index: int  # 1-based position within its predicate
    pp_index: int | None  # 1-based position among the predicate's clauses with a body
    line: int = 0

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(ordered_vars((self.head, *self.body)))

    @property
    def key(self) -> tuple[str, int]:
        return self.head.indicator

    def pp(self, literal: int) -> str:
        name, arity = self.key
        return f"{name}/{arity}/{self.pp_index}/{literal}"


@dataclass
class Predicate:
    name: str
    arity: int
    clauses: list[Clause] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, self.arity)


@dataclass(frozen=True)
class EntryDecl:
    head: Struct
    props: tuple[Struct, ...] = ()

    @property
    def key(self) -> tuple[str, int]:
        return self.head.indicator

    @property
    def pp(self) -> str:
        return f"{self.head.functor}/{self.head.arity}/0"


@dataclass(frozen=True)
class TrustDecl:
    head: Struct
    pre: tuple[Struct, ...] = ()
    post: tuple[Struct, ...] = ()

    @property
    def key(self) -> tuple[str, int]:
        return self.head.indicator


@dataclass
class Program:
    predicates: dict[tuple[str, int], Predicate] = field(default_factory=dict)
    entries: list[EntryDecl] = field(default_factory=list)
    trusts: dict[tuple[str, int], list[TrustDecl]] = field(default_factory=dict)
    imports: list[tuple[str, int]] = field(default_factory=list)
    module: str | None = None
    exports: list[tuple[str, int]] = field(default_factory=list)

    def entry(self, indicator: str | tuple[str, int] | None = None) -> EntryDecl:
        if not self.entries:
            raise ProgramError("program has no entry declaration")
        if indicator is None:
            return self.entries[0]
        key = _indicator(indicator) if isinstance(indicator, str) else indicator
        for e in self.entries:
            if e.key == key:
                return e
        raise ProgramError(f"no entry declaration for {key[0]}/{key[1]}")

    def clauses(self, key: tuple[str, int]) -> list[Clause]:
        pred = self.predicates.get(key)
        return pred.clauses if pred else []

    def is_defined(self, key: tuple[str, int]) -> bool:
        return key in self.predicates

    def is_imported(self, key: tuple[str, int]) -> bool:
        return key in self.imports and key not in self.predicates


def _indicator(s: str) -> tuple[str, int]:
    name, _, arity = s.rpartition("/")
    if not name or not arity.isdigit():
        raise ProgramError(f"bad predicate indicator {s!r}")
    return name, int(arity)


def _conj(t: Term) -> list[Term]:
    if isinstance(t, Struct) and t.functor == "," and t.arity == 2:
        return _conj(t.args[0]) + _conj(t.args[1])
    if t == Struct("true"):
        return []
    return [t]


def _props(t: Term, where: Token) -> tuple[Struct, ...]:
    out = []
    for p in _conj(t):
        if not isinstance(p, Struct):
            raise ProgramError("assertion properties must be callable terms", where.line, where.col)
        out.append(p)
    return tuple(out)


def _callable(t: Term, what: str, where: Token) -> Struct:
    if not isinstance(t, Struct) or t.functor[0].isdigit() or t.functor.startswith("-") and t.functor[1:].isdigit():
        raise ProgramError(f"{what} must be an atom or compound term", where.line, where.col)
    return t


def _indicator_list(t: Term) -> list[tuple[str, int]]:
    out = []
    while isinstance(t, Struct) and t.functor == "." and t.arity == 2:
        pi = t.args[0]
        if isinstance(pi, Struct) and pi.functor == "/" and pi.arity == 2:
            name, ar = pi.args
            if isinstance(name, Struct) and isinstance(ar, Struct) and ar.functor.isdigit():
                out.append((name.functor, int(ar.functor)))
        t = t.args[1]
    return out


def parse_program(text: str) -> Program:
    """Parse program text; syntax errors carry line and column."""
    prog = Program()
    reader = _Reader(text)
    raw: list[tuple[Struct, tuple[Term, ...], Token]] = []
    while True:
        item = reader.read_clause()
        if item is None:
            break
        term, tok = item
        if isinstance(term, Struct) and term.functor == ":-" and term.arity == 1:
            _directive(prog, term.args[0], tok)
            continue
        if isinstance(term, Struct) and term.functor == ":-" and term.arity == 2:
            head = _callable(term.args[0], "clause head", tok)
            body = tuple(_conj(term.args[1]))
            for lit in body:
                if isinstance(lit, Var):
                    raise ProgramError("variable goals are not supported", tok.line, tok.col)
                _callable(lit, "body literal", tok)
        else:
            head = _callable(term, "clause head", tok)
            body = ()
        raw.append((head, body, tok))

    counters: dict[tuple[str, int], list[int]] = {}
    for head, body, tok in raw:
        key = head.indicator
        pred = prog.predicates.setdefault(key, Predicate(*key))
        idx, bidx = counters.setdefault(key, [0, 0])
        idx += 1
        if body:
            bidx += 1
        counters[key] = [idx, bidx]
        pred.clauses.append(Clause(head, body, idx, bidx if body else None, tok.line))

    seen = set()
    for e in prog.entries:
        if e.key in seen:
            raise ProgramError(f"duplicate entry declaration for {e.key[0]}/{e.key[1]}")
        seen.add(e.key)
        if e.key not in prog.predicates and e.key not in prog.imports:
            raise ProgramError(f"entry for undefined predicate {e.key[0]}/{e.key[1]}")
    return prog


def _directive(prog: Program, d: Term, tok: Token) -> None:
    if not isinstance(d, Struct):
        raise ProgramError("malformed directive", tok.line, tok.col)
    if d.functor == "entry" and d.arity == 1:
        spec = d.args[0]
        if isinstance(spec, Struct) and spec.functor == ":" and spec.arity == 2:
            head = _callable(spec.args[0], "entry head", tok)
            props = _props(spec.args[1], tok)
        else:
            head, props = _callable(spec, "entry head", tok), ()
        _check_prop_vars(head, props, tok)
        prog.entries.append(EntryDecl(head, props))
    elif d.functor == "trust" and d.arity == 1:
        spec = d.args[0]
        if not (isinstance(spec, Struct) and spec.functor == "success" and spec.arity == 1):
            raise ProgramError("only 'trust success' assertions are supported", tok.line, tok.col)
        spec = spec.args[0]
        post: tuple[Struct, ...] = ()
        if isinstance(spec, Struct) and spec.functor == "=>" and spec.arity == 2:
            spec, post_t = spec.args
            post = _props(post_t, tok)
        pre: tuple[Struct, ...] = ()
        if isinstance(spec, Struct) and spec.functor == ":" and spec.arity == 2:
            spec, pre_t = spec.args
            pre = _props(pre_t, tok)
        head = _callable(spec, "trust head", tok)
        _check_prop_vars(head, pre + post, tok)
        prog.trusts.setdefault(head.indicator, []).append(TrustDecl(head, pre, post))
    elif d.functor == "module" and d.arity in (2, 3):
        name = d.args[0]
        prog.module = name.functor if isinstance(name, Struct) else None
        prog.exports = _indicator_list(d.args[1])
    elif d.functor == "use_module" and d.arity == 2:
        for key in _indicator_list(d.args[1]):
            if key not in prog.imports:
                prog.imports.append(key)
    # other directives carry nothing the analyzer needs


def _check_prop_vars(head: Struct, props: tuple[Struct, ...], tok: Token) -> None:
    hv = set(ordered_vars([head]))
    for p in props:
        for v in ordered_vars([p]):
            if v not in hv:
                raise ProgramError(f"property {format_term(p)} mentions {v}, not a head variable", tok.line, tok.col)


def _format_props(props: tuple[Struct, ...]) -> str:
    return "(" + ", ".join(format_term(p) for p in props) + ")"


def format_program(prog: Program) -> str:
    """Render a program back to source text accepted by :func:`parse_program`."""
    out = []
    if prog.module is not None:
        exports = ",".join(f"{n}/{a}" for n, a in prog.exports)
        out.append(f":- module({prog.module},[{exports}]).")
    if prog.imports:
        imports = ",".join(f"{n}/{a}" for n, a in prog.imports)
        out.append(f":- use_module(imported,[{imports}]).")
    for e in prog.entries:
        tail = f" : {_format_props(e.props)}" if e.props else ""
        out.append(f":- entry {format_term(e.head)}{tail}.")
    for decls in prog.trusts.values():
        for t in decls:
            pre = f" : {_format_props(t.pre)}" if t.pre else ""
            post = f" => {_format_props(t.post)}" if t.post else ""
            out.append(f":- trust success {format_term(t.head)}{pre}{post}.")
    for pred in prog.predicates.values():
        for c in pred.clauses:
            if c.body:
                body = ",\n    ".join(format_term(b) for b in c.body)
                out.append(f"{format_term(c.head)} :-\n    {body}.")
            else:
                out.append(f"{format_term(c.head)}.")
    return "\n".join(out) + "\n"


def program_points(prog: Program) -> list[str]:
    """Entry pseudo-points first, then every body literal in source order."""
    pts = [e.pp for e in prog.entries]
    for pred in prog.predicates.values():
        for c in pred.clauses:
            pts.extend(c.pp(j) for j in range(1, len(c.body) + 1))
    return pts


def entry_to_abstract(decl: EntryDecl, domain):
    """Abstract call substitution described by an entry declaration."""
    modes: dict[str, str] = {}
    for p in decl.props:
        if p.functor not in ("ground", "var") or p.arity != 1 or not isinstance(p.args[0], Var):
            raise ProgramError(f"unknown entry property {format_term(p)}")
        modes[p.args[0].name] = p.functor
    return domain.from_modes(modes, ordered_vars([decl.head]))
