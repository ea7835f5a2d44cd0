"""Free *-algebra words and polynomials with exact q-dependent coefficients.

A letter is ``(generator name, starred?, tensor leg)``.  Leg 0 marks an
ordinary (untensored) letter; legs 1, 2, 3 tag copies living in different
tensor factors.  Letters on different legs commute, so every word is kept
with its letters stably sorted by leg: equality of polynomials is then
equality in the algebraic tensor product of free algebras.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, Mapping, NamedTuple, Tuple

from .scalars import ONE, ZERO, QScalar, qs


class Letter(NamedTuple):
    gen: str
    star: bool = False
    leg: int = 0

    def adjoint(self) -> "Letter":
        return Letter(self.gen, not self.star, self.leg)

    def on_leg(self, leg: int) -> "Letter":
        return Letter(self.gen, self.star, leg)

    def text(self, show_leg: bool = True) -> str:
        body = self.gen + ("^*" if self.star else "")
        if show_leg and self.leg:
            body += f"@{self.leg}"
        return body


Word = Tuple[Letter, ...]
EMPTY: Word = ()


def canonical_word(letters: Iterable[Letter]) -> Word:
    word = tuple(letters)
    if len(word) > 1:
        legs = {l.leg for l in word}
        if len(legs) > 1:
            word = tuple(sorted(word, key=lambda l: l.leg))
    return word


def word_adjoint(word: Word) -> Word:
    return canonical_word(l.adjoint() for l in reversed(word))


def word_text(word: Word, show_leg: bool = True) -> str:
    if not word:
        return "1"
    return " ".join(l.text(show_leg) for l in word)


class WordOrder:
    """Degree-lexicographic order driven by a generator precedence.

    ``precedence`` lists generators from highest to lowest.  Letters compare
    by (leg, generator rank, star) with ``g < g*``; words compare by length
    first, then letter by letter.
    """

    def __init__(self, precedence: Iterable[str]):
        names = list(precedence)
        n = len(names)
        self.rank = {g: n - i for i, g in enumerate(names)}

    def letter_key(self, letter: Letter):
        return (letter.leg, self.rank.get(letter.gen, 0), letter.star)

    def key(self, word: Word):
        return (len(word), tuple(self.letter_key(l) for l in word))

    def max_word(self, words: Iterable[Word]) -> Word:
        return max(words, key=self.key)


class Polynomial:
    """Immutable finite linear combination of words; zero terms never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, QScalar] | None = None, *, _clean=False):
        if terms is None:
            self._terms: Dict[Word, QScalar] = {}
        elif _clean:
            self._terms = dict(terms)
        else:
            acc: Dict[Word, QScalar] = {}
            for w, c in terms.items():
                w = canonical_word(w)
                c = qs(c)
                if c.is_zero():
                    continue
                prev = acc.get(w)
                acc[w] = c if prev is None else prev + c
            self._terms = {w: c for w, c in acc.items() if not c.is_zero()}
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, value) -> "Polynomial":
        value = qs(value)
        return cls({EMPTY: value}) if not value.is_zero() else ZERO_POLY

    @classmethod
    def gen(cls, name: str, star: bool = False, leg: int = 0) -> "Polynomial":
        return cls({(Letter(name, star, leg),): ONE}, _clean=True)

    @classmethod
    def word(cls, word: Iterable[Letter], coeff=ONE) -> "Polynomial":
        return cls({tuple(word): qs(coeff)})

    # access -------------------------------------------------------------
    @property
    def terms(self) -> Dict[Word, QScalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, word: Word) -> QScalar:
        return self._terms.get(canonical_word(word), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def leg_degrees(self) -> Dict[int, int]:
        """Maximum number of letters per leg over all terms."""
        out: Dict[int, int] = {}
        for w in self._terms:
            counts: Dict[int, int] = {}
            for l in w:
                counts[l.leg] = counts.get(l.leg, 0) + 1
            for leg, k in counts.items():
                out[leg] = max(out.get(leg, 0), k)
        return out

    def generators(self) -> set:
        return {l.gen for w in self._terms for l in w}

    def letters(self) -> set:
        return {l for w in self._terms for l in w}

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for w, c in other._terms.items():
            prev = acc.get(w)
            if prev is None:
                acc[w] = c
            else:
                s = prev + c
                if s.is_zero():
                    del acc[w]
                else:
                    acc[w] = s
        return Polynomial(acc, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({w: -c for w, c in self._terms.items()}, _clean=True)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = qs(c)
        if c.is_zero():
            return ZERO_POLY
        if c.is_one():
            return self
        return Polynomial({w: k * c for w, k in self._terms.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, (int, QScalar)) or _is_fraction(other):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        acc: Dict[Word, QScalar] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = canonical_word(w1 + w2)
                c = c1 * c2
                prev = acc.get(w)
                acc[w] = c if prev is None else prev + c
        return Polynomial({w: c for w, c in acc.items() if not c.is_zero()}, _clean=True)

    def __rmul__(self, other):
        if isinstance(other, (int, QScalar)) or _is_fraction(other):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = ONE_POLY
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self) -> "Polynomial":
        return Polynomial(
            {word_adjoint(w): c.conjugate() for w, c in self._terms.items()}, _clean=True
        )

    @property
    def H(self) -> "Polynomial":
        return self.adjoint()

    # structural maps ----------------------------------------------------
    def map_letters(self, fn: Callable[[Letter], Letter]) -> "Polynomial":
        return Polynomial({tuple(fn(l) for l in w): c for w, c in self._terms.items()})

    def substitute(self, image: Callable[[Letter], "Polynomial"]) -> "Polynomial":
        """Multiplicative linear extension of a letter -> polynomial map."""
        cache: Dict[Letter, Polynomial] = {}
        out: Dict[Word, QScalar] = {}
        for w, c in self._terms.items():
            prod = {EMPTY: c}
            for l in w:
                img = cache.get(l)
                if img is None:
                    img = cache[l] = image(l)
                nxt: Dict[Word, QScalar] = {}
                for pw, pc in prod.items():
                    for iw, ic in img._terms.items():
                        nw = pw + iw
                        v = pc * ic
                        prev = nxt.get(nw)
                        nxt[nw] = v if prev is None else prev + v
                prod = {k: v for k, v in nxt.items() if not v.is_zero()}
                if not prod:
                    break
            for pw, pc in prod.items():
                pw = canonical_word(pw)
                prev = out.get(pw)
                out[pw] = pc if prev is None else prev + pc
        return Polynomial({w: c for w, c in out.items() if not c.is_zero()}, _clean=True)

    def map_coefficients(self, fn: Callable[[QScalar], QScalar]) -> "Polynomial":
        return Polynomial({w: fn(c) for w, c in self._terms.items()})

    def specialize(self, q_value) -> "Polynomial":
        """Exact specialization of every coefficient at a rational q."""
        return self.map_coefficients(lambda c: c.at(q_value))

    def on_leg(self, leg: int) -> "Polynomial":
        return self.map_letters(lambda l: l.on_leg(leg))

    def counit_value(self, counit: Mapping[str, QScalar]) -> QScalar:
        """Apply a character given on generators (real values, so stars agree)."""
        total = ZERO
        for w, c in self._terms.items():
            v = c
            for l in w:
                v = v * counit[l.gen]
                if v.is_zero():
                    break
            total = total + v
        return total

    # comparison / printing ---------------------------------------------
    def __eq__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_terms(self, order: WordOrder | None = None):
        if order is None:
            key = lambda item: (len(item[0]), [(l.leg, l.gen, l.star) for l in item[0]])
        else:
            key = lambda item: order.key(item[0])
        return sorted(self._terms.items(), key=key, reverse=True)

    def to_text(self, order: WordOrder | None = None, show_leg: bool = True) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for w, c in self.sorted_terms(order):
            pieces.append(_term_text(w, c, show_leg))
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"Polynomial({self.to_text()})"

    __str__ = to_text


def _term_text(word: Word, c: QScalar, show_leg: bool) -> str:
    body = word_text(word, show_leg) if word else ""
    if c.is_one():
        return body or "1"
    if c == -ONE:
        return "-" + (body or "1")
    ctext = c.to_text()
    sign = ""
    if ctext.startswith("-") and " " not in ctext:
        sign, ctext = "-", ctext[1:]
    if " " in ctext or "/" in ctext:
        ctext = f"({ctext})"
    return sign + ctext + (" " + body if body else "")


def _is_fraction(x) -> bool:
    from fractions import Fraction

    return isinstance(x, Fraction)


def _as_poly(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, QScalar)) or _is_fraction(value):
        return Polynomial.const(value)
    return None


ZERO_POLY = Polynomial()
ONE_POLY = Polynomial({EMPTY: ONE}, _clean=True)


def poly_add(p: Polynomial, r: Polynomial) -> Polynomial:
    return p + r


def poly_mul(p: Polynomial, r: Polynomial) -> Polynomial:
    return p * r


def poly_adjoint(p: Polynomial) -> Polynomial:
    return p.adjoint()


def gens(*names: str, leg: int = 0):
    """Convenience: polynomial generators for the given names."""
    return tuple(Polynomial.gen(n, leg=leg) for n in names)
