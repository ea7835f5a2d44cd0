"""A small text format for presentations, structure maps and *-homomorphisms.

Example::

    NAME qmap-omega0
    QVALUE 0
    GENERATORS beta, delta
    RELATIONS
      zero.1: beta beta^* - 1
      zero.2: delta delta
    COMULT
      beta = beta (x) beta
    COUNIT
      beta = 1
      delta = 0
    COACTION
      n12 = beta
      n22 = delta
    MAP lam: qmap-powers -> self
      beta = beta

Expressions use juxtaposition or ``*`` for products, postfix ``^*`` for the
adjoint and ``^k`` for powers, ``x (x) y`` for tensors, and rational
functions of ``q`` as scalars.  ``/`` divides by scalars only.  A line ending
in a binary operator, or inside parentheses, continues on the next line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import MalformedScalar, ParseError, UnknownGenerator, UnknownPreset
from .presentations import GensMap, Presentation, builtin_presentation, specialize_presentation
from .scalars import ONE, Q, QScalar
from .words import ONE_POLY, ZERO_POLY, Letter, Polynomial, Word

SECTIONS = ("GENERATORS", "PRECEDENCE", "RELATIONS", "COMULT", "COUNIT", "COACTION", "MAP")
DIRECTIVES = ("NAME", "QVALUE")
RESERVED = ("q", "x")
COACTION_ENTRIES = {"n11": (0, 0), "n12": (0, 1), "n21": (1, 0), "n22": (1, 1)}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER LABEL OP TENSOR NEWLINE KEYWORD RAW EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<tensor>\(x\))
  | (?P<label>[^\s:=()]+(?=[ \t]*:))
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\^\*|[-+*/^(),=:])
    """,
    re.VERBOSE,
)

# after these a newline is a line continuation
_CONTINUES = {"+", "-", "*", "/", "^", "(x)", "=", ",", "("}


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    depth = 0
    pos, line, line_start = 0, 1, 0
    at_line_start = True
    while pos < len(text):
        col = pos - line_start + 1
        if at_line_start:
            m = re.match(r"[ \t]*([A-Z]+)\b[ \t]*:?", text[pos:])
            if m and m.group(1) in SECTIONS + DIRECTIVES:
                word = m.group(1)
                tokens.append(Token("KEYWORD", word, line, col + m.start(1)))
                pos += m.end()
                if word in ("NAME", "MAP", "QVALUE"):
                    end = text.find("\n", pos)
                    end = len(text) if end < 0 else end
                    raw = text[pos:end].split("#", 1)[0]
                    tokens.append(Token("RAW", raw.strip(), line, pos - line_start + 1))
                    pos = end
                at_line_start = False
                continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        if kind == "newline":
            prev = tokens[-1] if tokens else None
            if depth == 0 and not (prev and prev.text in _CONTINUES and prev.kind in ("OP", "TENSOR")):
                if prev is not None and prev.kind != "NEWLINE":
                    tokens.append(Token("NEWLINE", "\n", line, col))
            line += 1
            line_start = pos
            at_line_start = depth == 0
            continue
        at_line_start = False
        if kind in ("ws", "comment"):
            continue
        if kind == "op":
            if value == "(":
                depth += 1
            elif value == ")":
                depth = max(depth - 1, 0)
        tokens.append(Token({"tensor": "TENSOR"}.get(kind, kind.upper()), value, line, col))
    if tokens and tokens[-1].kind != "NEWLINE":
        tokens.append(Token("NEWLINE", "\n", line, len(text) - line_start + 1))
    tokens.append(Token("EOF", "", line + 1, 1))
    return tokens


# ------------------------------------------------------------ expressions


class _ExprParser:
    """Recursive descent over a token list.

    expr   := tterm (('+' | '-') tterm)*
    tterm  := term ('(x)' term)*
    term   := ('-' | '+')? factor (('*' | '/')? factor)*
    factor := atom ('^*' | '^' '-'? INT)*
    atom   := NUMBER | 'q' | IDENT | '(' expr ')'
    """

    def __init__(self, tokens: List[Token], pos: int, generators: Sequence[str]):
        self.tokens = tokens
        self.pos = pos
        self.generators = set(generators)

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message, expected=(), cls=ParseError, tok=None):
        tok = tok or self.tok
        raise cls(message, tok.line, tok.column, expected)

    def take(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind not in ("OP", "TENSOR"):
            self.error(f"found {self._describe(self.tok)}", (repr(text),))
        tok = self.tok
        self.pos += 1
        return tok

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.kind == "EOF":
            return "end of input"
        if tok.kind == "NEWLINE":
            return "end of line"
        return repr(tok.text)

    def starts_factor(self) -> bool:
        t = self.tok
        return t.kind in ("IDENT", "NUMBER") or (t.kind == "OP" and t.text == "(")

    def expr(self) -> Polynomial:
        out = self.tterm()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            sign = self.tok.text
            self.pos += 1
            rhs = self.tterm()
            out = out + rhs if sign == "+" else out - rhs
        return out

    def tterm(self) -> Polynomial:
        start = self.tok
        factors = [self.term()]
        while self.tok.kind == "TENSOR":
            self.pos += 1
            factors.append(self.term())
        if len(factors) == 1:
            return factors[0]
        out = ONE_POLY
        for leg, f in enumerate(factors, 1):
            if any(l.leg for w in f.terms for l in w):
                self.error("nested tensor products are not supported", tok=start)
            out = out * f.on_leg(leg)
        return out

    def term(self) -> Polynomial:
        neg = False
        if self.tok.kind == "OP" and self.tok.text in "+-":
            neg = self.tok.text == "-"
            self.pos += 1
        out = self.factor()
        while True:
            t = self.tok
            if t.kind == "OP" and t.text == "*":
                self.pos += 1
                out = out * self.factor()
            elif t.kind == "OP" and t.text == "/":
                self.pos += 1
                at = self.tok
                den = self.factor()
                c = _as_scalar(den)
                if c is None:
                    self.error("only scalars in q may divide", ("scalar",), MalformedScalar, at)
                if c.is_zero():
                    self.error("division by zero", ("nonzero scalar",), MalformedScalar, at)
                out = out.scale(c.inverse())
            elif self.starts_factor():
                out = out * self.factor()
            else:
                break
        return -out if neg else out

    def factor(self) -> Polynomial:
        out = self.atom()
        while self.tok.kind == "OP" and self.tok.text in ("^*", "^"):
            if self.tok.text == "^*":
                self.pos += 1
                out = out.adjoint()
                continue
            self.pos += 1
            negative = False
            if self.tok.kind == "OP" and self.tok.text == "-":
                negative = True
                self.pos += 1
            t = self.tok
            if t.kind != "NUMBER" or not t.text.isdigit():
                self.error(f"found {self._describe(t)}", ("integer exponent", "'*'"))
            self.pos += 1
            k = int(t.text)
            if negative:
                c = _as_scalar(out)
                if c is None:
                    self.error("negative powers apply to scalars only", ("scalar",), MalformedScalar, t)
                if c.is_zero():
                    self.error("zero to a negative power", ("nonzero scalar",), MalformedScalar, t)
                out = Polynomial.const(c.inverse() ** k)
            else:
                out = out**k
        return out

    def atom(self) -> Polynomial:
        t = self.tok
        if t.kind == "NUMBER":
            self.pos += 1
            return Polynomial.const(QScalar.const(Fraction(t.text)))
        if t.kind == "IDENT":
            self.pos += 1
            if t.text == "q":
                return Polynomial.const(Q)
            if t.text not in self.generators:
                self.error(
                    f"unknown generator {t.text!r}", sorted(self.generators) or ("declared generator",),
                    UnknownGenerator, t,
                )
            return Polynomial.gen(t.text)
        if t.kind == "OP" and t.text == "(":
            self.pos += 1
            out = self.expr()
            self.take(")")
            return out
        self.error(f"found {self._describe(t)}", ("generator", "number", "'q'", "'('"))


def _as_scalar(p: Polynomial) -> Optional[QScalar]:
    if p.is_zero():
        return QScalar.const(0)
    if set(p.terms) == {()}:
        return p.coeff(())
    return None


def parse_expression(text: str, generators: Sequence[str]) -> Polynomial:
    """Parse a single expression over the given generators."""
    tokens = tokenize(text)
    parser = _ExprParser(tokens, 0, generators)
    out = parser.expr()
    while parser.tok.kind == "NEWLINE":
        parser.pos += 1
    if parser.tok.kind != "EOF":
        parser.error(f"found {parser._describe(parser.tok)}", ("operator", "end of input"))
    return out


def parse_scalar(text: str) -> QScalar:
    p = parse_expression(text, ())
    c = _as_scalar(p)
    if c is None:  # unreachable: no generators are declared
        raise MalformedScalar("not a scalar", 1, 1)
    return c


# ------------------------------------------------------------ documents


@dataclass
class MapSpec:
    name: str
    source: str
    target: str
    assignment: Dict[str, Polynomial]


@dataclass
class AlgebraSpec:
    """A parsed document: a presentation plus any maps it declares."""

    presentation: Presentation
    maps: Dict[str, GensMap] = field(default_factory=dict)
    map_specs: Dict[str, MapSpec] = field(default_factory=dict)


class _DocParser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.name = "custom"
        self.q_value: Optional[Fraction] = None
        self.generators: List[str] = []
        self.precedence: List[str] = []
        self.relations: List[Tuple[str, Polynomial]] = []
        self.comult: Dict[str, Polynomial] = {}
        self.counit: Dict[str, QScalar] = {}
        self.coaction: Optional[List[List[Polynomial]]] = None
        self.maps: List[MapSpec] = []
        self.seen = set()

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, message, expected=(), tok=None, cls=ParseError):
        tok = tok or self.tok
        raise cls(message, tok.line, tok.column, expected)

    def skip_newlines(self):
        while self.tok.kind == "NEWLINE":
            self.pos += 1

    def end_item(self):
        if self.tok.kind not in ("NEWLINE", "EOF", "KEYWORD"):
            self.fail(f"found {_ExprParser._describe(self.tok)}", ("operator", "end of line"))
        self.skip_newlines()

    def expr(self, generators) -> Polynomial:
        p = _ExprParser(self.tokens, self.pos, generators)
        out = p.expr()
        self.pos = p.pos
        return out

    def ident(self, what: str) -> Token:
        t = self.tok
        if t.kind != "IDENT":
            self.fail(f"found {_ExprParser._describe(t)}", (what,))
        self.pos += 1
        return t

    def parse(self) -> AlgebraSpec:
        self.skip_newlines()
        while self.tok.kind != "EOF":
            t = self.tok
            if t.kind != "KEYWORD":
                self.fail(f"found {_ExprParser._describe(t)}", SECTIONS + DIRECTIVES)
            self.pos += 1
            if t.text in self.seen and t.text != "MAP":
                self.fail(f"duplicate section {t.text}", tok=t)
            self.seen.add(t.text)
            getattr(self, "sec_" + t.text.lower())(t)
        return self.build()

    # sections -----------------------------------------------------------
    def _raw(self) -> Token:
        t = self.tok
        self.pos += 1
        self.skip_newlines()
        return t

    def sec_name(self, kw):
        raw = self._raw()
        if not raw.text or " " in raw.text:
            self.fail("NAME takes a single word", ("name",), raw)
        self.name = raw.text

    def sec_qvalue(self, kw):
        raw = self._raw()
        try:
            self.q_value = Fraction(raw.text)
        except (ValueError, ZeroDivisionError):
            self.fail(f"bad q value {raw.text!r}", ("rational number",), raw, MalformedScalar)

    def _names(self) -> List[Token]:
        out = []
        self.skip_newlines()
        while self.tok.kind == "IDENT":
            out.append(self.ident("generator name"))
            if self.tok.kind == "OP" and self.tok.text == ",":
                self.pos += 1
            self.skip_newlines()
        return out

    def sec_generators(self, kw):
        for t in self._names():
            if t.text in RESERVED:
                self.fail(f"{t.text!r} is reserved", ("generator name",), t)
            if t.text in self.generators:
                self.fail(f"generator {t.text!r} declared twice", tok=t)
            self.generators.append(t.text)
        if not self.generators:
            self.fail("no generators declared", ("generator name",))

    def sec_precedence(self, kw):
        for t in self._names():
            if t.text not in self.generators:
                self.fail(f"unknown generator {t.text!r}", self.generators, t, UnknownGenerator)
            self.precedence.append(t.text)

    def sec_relations(self, kw):
        self.skip_newlines()
        while self.tok.kind not in ("KEYWORD", "EOF"):
            if self.tok.kind == "LABEL":
                label = self.tok.text
                self.pos += 1
                self._take_op(":")
            else:
                label = f"r{len(self.relations) + 1}"
            lhs = self.expr(self.generators)
            if self.tok.kind == "OP" and self.tok.text == "=":
                self.pos += 1
                lhs = lhs - self.expr(self.generators)
            if any(lab == label for lab, _ in self.relations):
                self.fail(f"relation label {label!r} used twice")
            self.relations.append((label, lhs))
            self.end_item()

    def _take_op(self, text):
        if self.tok.kind != "OP" or self.tok.text != text:
            self.fail(f"found {_ExprParser._describe(self.tok)}", (repr(text),))
        self.pos += 1

    def _assignments(self, lhs_names, rhs_generators):
        out = {}
        self.skip_newlines()
        while self.tok.kind not in ("KEYWORD", "EOF"):
            t = self.tok
            if t.kind not in ("IDENT", "LABEL"):
                self.fail(f"found {_ExprParser._describe(t)}", tuple(lhs_names))
            if t.text not in lhs_names:
                self.fail(f"unknown generator {t.text!r}", tuple(lhs_names), t, UnknownGenerator)
            if t.text in out:
                self.fail(f"{t.text!r} assigned twice", tok=t)
            self.pos += 1
            self._take_op("=")
            out[t.text] = (t, self.expr(rhs_generators))
            self.end_item()
        return out

    def sec_comult(self, kw):
        for g, (t, p) in self._assignments(self.generators, self.generators).items():
            if any(l.leg == 0 for w in p.terms for l in w):
                self.fail("comultiplication images must be written with (x)", ("(x)",), t)
            self.comult[g] = p

    def sec_counit(self, kw):
        for g, (t, p) in self._assignments(self.generators, self.generators).items():
            c = _as_scalar(p)
            if c is None:
                self.fail("counit values must be scalars", ("scalar",), t, MalformedScalar)
            self.counit[g] = c

    def sec_coaction(self, kw):
        m = [[ZERO_POLY, ZERO_POLY], [ZERO_POLY, ZERO_POLY]]
        for key, (t, p) in self._assignments(tuple(COACTION_ENTRIES), self.generators).items():
            i, j = COACTION_ENTRIES[key]
            m[i][j] = p
        self.coaction = m

    def sec_map(self, kw):
        raw = self._raw()
        m = re.fullmatch(r"([A-Za-z_][\w.]*)\s*:\s*(\S+)\s*->\s*(\S+)", raw.text)
        if not m:
            self.fail("expected 'MAP name: source -> target'", ("name: source -> target",), raw)
        name, source, target = m.groups()
        src_gens = self._resolve_generators(source, raw)
        tgt_gens = self._resolve_generators(target, raw)
        assignment = {g: p for g, (_, p) in self._assignments(src_gens, tgt_gens).items()}
        self.maps.append(MapSpec(name, source, target, assignment))

    def _resolve_generators(self, name, tok):
        if name == "self":
            return tuple(self.generators)
        try:
            return builtin_presentation(name).generators
        except UnknownPreset:
            self.fail(f"unknown presentation {name!r}", ("self", "preset name"), tok)

    # assembly -----------------------------------------------------------
    def build(self) -> AlgebraSpec:
        if not self.generators:
            self.fail("missing GENERATORS section", ("GENERATORS",))
        if self.counit and set(self.counit) != set(self.generators):
            missing = sorted(set(self.generators) - set(self.counit))
            self.fail(f"counit missing for {missing}", tuple(missing))
        coaction = None if self.coaction is None else tuple(tuple(r) for r in self.coaction)
        try:
            pres = Presentation(
                self.name,
                tuple(self.generators),
                tuple(self.relations),
                tuple(self.precedence) or tuple(self.generators),
                dict(self.comult) or None,
                dict(self.counit) or None,
                coaction,
            )
        except ValueError as exc:
            self.fail(str(exc))
        if self.q_value is not None:
            pres = specialize_presentation(pres, self.q_value)
        maps = {}
        for spec in self.maps:
            src = pres if spec.source == "self" else builtin_presentation(spec.source)
            tgt = pres if spec.target == "self" else builtin_presentation(spec.target)
            maps[spec.name] = GensMap(src, tgt, dict(spec.assignment), spec.name)
        return AlgebraSpec(pres, maps, {m.name: m for m in self.maps})


def parse_algebra_spec(text: str) -> AlgebraSpec:
    return _DocParser(text).parse()


def parse_presentation(text: str) -> Presentation:
    return parse_algebra_spec(text).presentation


def load_spec_file(path) -> AlgebraSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra_spec(fh.read())


# ------------------------------------------------------------ printing


def _word_part(letters) -> str:
    return " ".join(l.gen + ("^*" if l.star else "") for l in letters)


def _term_text(word: Word, c: QScalar, legs: int) -> str:
    if not word:
        body = ""
    elif legs:
        body = " (x) ".join(_word_part([l for l in word if l.leg == k]) or "1" for k in range(1, legs + 1))
    else:
        body = _word_part(word)
    if c.is_one():
        return body or "1"
    if c == -ONE:
        return "-" + (body or "1")
    ctext = c.to_text()
    sign = ""
    if ctext.startswith("-") and " " not in ctext:
        sign, ctext = "-", ctext[1:]
    if " " in ctext or "/" in ctext or "*" in ctext:
        ctext = f"({ctext})"
    return sign + ctext + (" " + body if body else "")


def format_polynomial(p: Polynomial, order=None) -> str:
    """Canonical DSL text; tensor legs are written with (x)."""
    if p.is_zero():
        return "0"
    legs = max((l.leg for w in p.terms for l in w), default=0)
    out = ""
    for i, (w, c) in enumerate(p.sorted_terms(order)):
        piece = _term_text(w, c, legs)
        if i == 0:
            out = piece
        elif piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out


def format_presentation(pres: Presentation, maps: Sequence[GensMap] = ()) -> str:
    order = pres.order
    lines = [f"NAME {pres.name}"]
    if pres.q_value is not None:
        lines.append(f"QVALUE {pres.q_value}")
    lines.append("GENERATORS " + ", ".join(pres.generators))
    if pres.precedence and tuple(pres.precedence) != tuple(pres.generators):
        lines.append("PRECEDENCE " + ", ".join(pres.precedence))
    if pres.relations:
        lines.append("RELATIONS")
        lines += [f"  {lab}: {format_polynomial(r, order)}" for lab, r in pres.relations]
    if pres.comultiplication:
        lines.append("COMULT")
        lines += [f"  {g} = {format_polynomial(pres.comultiplication[g], order)}"
                  for g in pres.generators if g in pres.comultiplication]
    if pres.counit:
        lines.append("COUNIT")
        lines += [f"  {g} = {pres.counit[g].to_text()}" for g in pres.generators if g in pres.counit]
    if pres.coaction is not None:
        lines.append("COACTION")
        for key, (i, j) in COACTION_ENTRIES.items():
            if not pres.coaction[i][j].is_zero():
                lines.append(f"  {key} = {format_polynomial(pres.coaction[i][j], order)}")
    for f in maps:
        src = "self" if f.source is pres else f.source.name
        tgt = "self" if f.target is pres else f.target.name
        lines.append(f"MAP {f.name}: {src} -> {tgt}")
        lines += [f"  {g} = {format_polynomial(p, f.target.order)}" for g, p in f.assignment.items()]
    return "\n".join(lines) + "\n"


def presentations_equal(a: Presentation, b: Presentation) -> bool:
    """Canonical-form equality (labels, relations, structure maps, q)."""

    def coaction(p):
        return None if p.coaction is None else tuple(tuple(r) for r in p.coaction)

    return (
        a.name == b.name
        and tuple(a.generators) == tuple(b.generators)
        and tuple(a.relations) == tuple(b.relations)
        and tuple(a.precedence or a.generators) == tuple(b.precedence or b.generators)
        and dict(a.comultiplication or {}) == dict(b.comultiplication or {})
        and dict(a.counit or {}) == dict(b.counit or {})
        and coaction(a) == coaction(b)
        and a.q_value == b.q_value
    )
