"""Bounded noncommutative rewriting.

Relations are oriented so that their largest word (in the presentation's
degree-lexicographic order) is replaced by the rest.  Reduction is sound
but not complete: reaching zero proves ideal membership, a nonzero normal
form is only evidence against it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import UnorientableRelation
from .presentations import Presentation
from .scalars import ONE, QScalar
from .words import EMPTY, ZERO_POLY, Letter, Polynomial, Word, WordOrder, canonical_word

DEFAULT_MAX_STEPS = 10_000
DEFAULT_MAX_DEGREE = 12


class Status(str, enum.Enum):
    REDUCED_TO_ZERO = "ReducedToZero"
    NORMAL_FORM_NONZERO = "NormalFormNonzero"
    LIMIT_HIT = "LimitHit"


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: Polynomial

    def text(self) -> str:
        from .words import word_text

        return f"{word_text(self.lhs)} -> {self.rhs.to_text()}"


@dataclass(frozen=True)
class RuleSet:
    rules: Tuple[RewriteRule, ...]
    order: WordOrder
    max_steps: int = DEFAULT_MAX_STEPS
    max_degree: int = DEFAULT_MAX_DEGREE
    _index: Dict[Letter, Tuple[RewriteRule, ...]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        index: Dict[Letter, List[RewriteRule]] = {}
        for rule in self.rules:
            index.setdefault(rule.lhs[0], []).append(rule)
        # longer left-hand sides first so the maximal redex wins at a position
        frozen = {
            k: tuple(sorted(v, key=lambda r: self.order.key(r.lhs), reverse=True))
            for k, v in index.items()
        }
        object.__setattr__(self, "_index", frozen)

    def find_redex(self, word: Word) -> Optional[Tuple[int, RewriteRule]]:
        """Left-most position holding a rule's left-hand side."""
        n = len(word)
        for i in range(n):
            for rule in self._index.get(word[i], ()):
                k = len(rule.lhs)
                if i + k <= n and word[i : i + k] == rule.lhs:
                    return i, rule
        return None

    def with_rules(self, extra: Iterable[RewriteRule]) -> "RuleSet":
        return replace(self, rules=self.rules + tuple(extra), _index=None)

    def with_limits(self, max_steps=None, max_degree=None) -> "RuleSet":
        return replace(
            self,
            max_steps=self.max_steps if max_steps is None else max_steps,
            max_degree=self.max_degree if max_degree is None else max_degree,
            _index=None,
        )

    def on_legs(self, legs: Sequence[int]) -> "RuleSet":
        """Copies of every rule on each tensor leg (cross-leg letters commute
        automatically because words are stored leg-sorted)."""
        rules = []
        for leg in legs:
            for r in self.rules:
                rules.append(
                    RewriteRule(tuple(l.on_leg(leg) for l in r.lhs), r.rhs.on_leg(leg))
                )
        return replace(self, rules=tuple(rules), _index=None)


@dataclass(frozen=True)
class ReductionOutcome:
    normal_form: Polynomial
    status: Status
    steps: int

    @property
    def reduced_to_zero(self) -> bool:
        return self.status is Status.REDUCED_TO_ZERO


def orient_polynomial(rel: Polynomial, order: WordOrder, q_value=None) -> Optional[RewriteRule]:
    if rel.is_zero():
        return None
    lead = order.max_word(w for w, _ in rel.items())
    c = rel.coeff(lead)
    if not lead:
        raise UnorientableRelation(f"relation reduces to a nonzero constant: {rel}")
    if q_value is not None and abs(c.eval(q_value)) < 1e-14:
        raise UnorientableRelation(
            f"leading coefficient {c} of {rel} vanishes at q={q_value}; declare another precedence"
        )
    rest = rel - Polynomial({lead: c})
    return RewriteRule(lead, rest.scale(-c.inverse()))


def orient_rules(
    pres: Presentation,
    q_value=None,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_degree: int = DEFAULT_MAX_DEGREE,
    extra: Iterable[Polynomial] = (),
) -> RuleSet:
    """Orient every relation and its adjoint (plus optional extra relations)."""
    order = pres.order
    rules: List[RewriteRule] = []
    seen = set()
    for rel in list(pres.adjoint_closed_relations()) + [p for e in extra for p in (e, e.adjoint())]:
        rule = orient_polynomial(rel, order, q_value)
        if rule is None:
            continue
        key = (rule.lhs, rule.rhs)
        if key in seen:
            continue
        seen.add(key)
        rules.append(rule)
    return RuleSet(tuple(rules), order, max_steps, max_degree)


def reduce(p: Polynomial, rules: RuleSet) -> ReductionOutcome:
    terms: Dict[Word, QScalar] = dict(p.items())
    irreducible = set()
    steps = 0
    key = rules.order.key
    while True:
        if any(len(w) > rules.max_degree for w in terms):
            return ReductionOutcome(Polynomial(terms, _clean=True), Status.LIMIT_HIT, steps)
        target = None
        for w in sorted((w for w in terms if w not in irreducible), key=key, reverse=True):
            hit = rules.find_redex(w)
            if hit is None:
                irreducible.add(w)
                continue
            target = (w, hit)
            break
        if target is None:
            break
        if steps >= rules.max_steps:
            return ReductionOutcome(Polynomial(terms, _clean=True), Status.LIMIT_HIT, steps)
        steps += 1
        w, (i, rule) = target
        c = terms.pop(w)
        prefix, suffix = w[:i], w[i + len(rule.lhs) :]
        for rw, rc in rule.rhs.items():
            nw = canonical_word(prefix + rw + suffix)
            v = c * rc
            prev = terms.get(nw)
            if prev is not None:
                v = prev + v
            if v.is_zero():
                terms.pop(nw, None)
            else:
                terms[nw] = v
    nf = Polynomial(terms, _clean=True)
    status = Status.REDUCED_TO_ZERO if nf.is_zero() else Status.NORMAL_FORM_NONZERO
    return ReductionOutcome(nf, status, steps)


def critical_pairs(rules: RuleSet, max_degree: int) -> List[Polynomial]:
    """S-polynomials of overlaps and inclusions up to ``max_degree`` letters."""
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    out: List[Polynomial] = []
    rl = rules.rules
    for a, r1 in enumerate(rl):
        l1 = r1.lhs
        for b, r2 in enumerate(rl):
            l2 = r2.lhs
            # proper overlaps: suffix of l1 == prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] != l2[:k]:
                    continue
                if len(l1) + len(l2) - k > max_degree:
                    continue
                left = r1.rhs * Polynomial.word(l2[k:])
                right = Polynomial.word(l1[: len(l1) - k]) * r2.rhs
                s = left - right
                if not s.is_zero():
                    out.append(s)
            # inclusions: l2 strictly inside l1
            if a != b and len(l2) < len(l1) and len(l1) <= max_degree:
                for i in range(len(l1) - len(l2) + 1):
                    if l1[i : i + len(l2)] == l2:
                        s = r1.rhs - Polynomial.word(l1[:i]) * r2.rhs * Polynomial.word(l1[i + len(l2) :])
                        if not s.is_zero():
                            out.append(s)
    return out


def complete(rules: RuleSet, max_degree: int = 4, rounds: int = 2) -> RuleSet:
    """Bounded Knuth-Bendix: reduce critical pairs, orient survivors, repeat."""
    current = rules
    for _ in range(rounds):
        added = []
        for s in critical_pairs(current, max_degree):
            nf = reduce(s, current.with_rules(added)).normal_form
            if nf.is_zero() or nf.degree() > max_degree:
                continue
            try:
                rule = orient_polynomial(nf, current.order)
            except UnorientableRelation:
                continue
            if rule is not None and all(rule.lhs != r.lhs for r in current.rules + tuple(added)):
                added.append(rule)
        if not added:
            break
        current = current.with_rules(added)
    return current


def two_leg_rules(pres: Presentation, legs: int = 2, completion_degree: int = 0, **kw) -> RuleSet:
    base = orient_rules(pres, **kw)
    if completion_degree:
        base = complete(base, completion_degree)
    return base.on_legs(range(1, legs + 1))


def interreduce(polys: Iterable[Polynomial], order: WordOrder, max_steps: int = DEFAULT_MAX_STEPS,
                max_degree: int = DEFAULT_MAX_DEGREE) -> RuleSet:
    """Gaussian elimination of relations viewed as vectors indexed by words.

    The result has pairwise distinct leading words and no leading word
    occurring on any right-hand side, so reducing a linear combination of
    the inputs always reaches zero (exact arithmetic over Q(q)).
    """
    key = order.key
    pivots: Dict[Word, Polynomial] = {}  # leading word -> monic polynomial

    def reduce_lin(p: Polynomial) -> Polynomial:
        changed = True
        while changed and not p.is_zero():
            changed = False
            for w, c in p.items():
                piv = pivots.get(w)
                if piv is not None:
                    p = p - piv.scale(c)
                    changed = True
                    break
        return p

    for p in polys:
        p = reduce_lin(p)
        if p.is_zero():
            continue
        lead = order.max_word(w for w, _ in p.items())
        if not lead:
            raise UnorientableRelation(f"relations imply a nonzero constant: {p}")
        p = p.scale(p.coeff(lead).inverse())
        for w in list(pivots):
            c = pivots[w].coeff(lead)
            if not c.is_zero():
                pivots[w] = pivots[w] - p.scale(c)
        pivots[lead] = p
    rules = tuple(
        RewriteRule(w, -(p - Polynomial({w: ONE}))) for w, p in sorted(pivots.items(), key=lambda kv: key(kv[0]))
    )
    return RuleSet(rules, order, max_steps, max_degree)
