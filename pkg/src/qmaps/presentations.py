"""Presented *-algebras, structure maps and the builtin presets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import UnboundGenerator, UnknownPreset
from .scalars import ONE, ZERO, Q, QScalar, qp, qs
from .words import ONE_POLY, ZERO_POLY, Letter, Polynomial, WordOrder

Matrix2 = Tuple[Tuple[Polynomial, Polynomial], Tuple[Polynomial, Polynomial]]


@dataclass(frozen=True)
class Presentation:
    """Generators, relations (each read as ``= 0``) and optional structure maps.

    ``comultiplication`` maps a generator to a polynomial over legs 1 and 2,
    ``counit`` maps generators to exact scalars and ``coaction`` is the image
    of the M2 generator n as a 2x2 matrix over this algebra.
    """

    name: str
    generators: Tuple[str, ...]
    relations: Tuple[Tuple[str, Polynomial], ...]
    precedence: Tuple[str, ...] = ()
    comultiplication: Optional[Mapping[str, Polynomial]] = None
    counit: Optional[Mapping[str, QScalar]] = None
    coaction: Optional[Matrix2] = None
    q_value: Optional[Fraction] = None  # fixed parameter for q=0 / q=1 presets
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        declared = set(self.generators)
        for label, rel in self.relations:
            extra = rel.generators() - declared
            if extra:
                raise UnboundGenerator(f"relation {label} mentions {sorted(extra)}")
        if self.counit is not None:
            bad = [lab for lab, rel in self.relations if not rel.counit_value(self.counit).is_zero()]
            if bad:
                raise ValueError(f"counit does not kill relations {bad} of {self.name}")

    @property
    def order(self) -> WordOrder:
        return WordOrder(self.precedence or self.generators)

    @property
    def relation_polys(self) -> List[Polynomial]:
        return [r for _, r in self.relations]

    @property
    def relation_labels(self) -> List[str]:
        return [lab for lab, _ in self.relations]

    def adjoint_closed_relations(self) -> List[Polynomial]:
        seen = []
        for _, rel in self.relations:
            for cand in (rel, rel.adjoint()):
                if cand not in seen and not cand.is_zero():
                    seen.append(cand)
        return seen

    def relation(self, label: str) -> Polynomial:
        for lab, rel in self.relations:
            if lab == label:
                return rel
        raise KeyError(label)

    def gen(self, name: str, star: bool = False, leg: int = 0) -> Polynomial:
        if name not in self.generators:
            raise UnboundGenerator(name)
        return Polynomial.gen(name, star, leg)

    def is_q_parameterized(self) -> bool:
        return self.q_value is None and any(
            not c.is_constant() for _, rel in self.relations for _, c in rel.items()
        )


@dataclass(frozen=True)
class GensMap:
    """A *-homomorphism given on generators of ``source``."""

    source: Presentation
    target: Presentation
    assignment: Mapping[str, Polynomial]
    name: str = ""

    def image(self, gen: str) -> Polynomial:
        try:
            return self.assignment[gen]
        except KeyError:
            raise UnboundGenerator(f"{self.name or 'map'} has no image for {gen}") from None


def substitute_hom(p: Polynomial, f: GensMap) -> Polynomial:
    """Linear, multiplicative, *-preserving extension of ``f``; legs are kept."""

    def image(letter: Letter) -> Polynomial:
        img = f.image(letter.gen)
        if letter.star:
            img = img.adjoint()
        return img.on_leg(letter.leg) if letter.leg else img

    return p.substitute(image)


def identity_map(pres: Presentation) -> GensMap:
    return GensMap(pres, pres, {g: Polynomial.gen(g) for g in pres.generators}, "id")


def tensor_leg(p: Polynomial, leg: int, legs_total: int = 2) -> Polynomial:
    if not 1 <= leg <= legs_total:
        raise ValueError("leg out of range")
    return p.on_leg(leg)


# ------------------------------------------------------------- structure maps


def apply_comultiplication(p: Polynomial, pres: Presentation, leg: int = 0) -> Polynomial:
    """Apply the comultiplication to the letters on ``leg``.

    With ``leg == 0`` an ordinary polynomial becomes a two-leg one.  For a
    polynomial on legs 1..k, letters on ``leg`` expand into legs ``leg`` and
    ``leg+1`` while higher legs shift up by one.
    """
    if pres.comultiplication is None:
        raise ValueError(f"{pres.name} has no comultiplication")
    delta = pres.comultiplication

    def image(letter: Letter) -> Polynomial:
        if leg == 0:
            img = delta[letter.gen]
            return img.adjoint() if letter.star else img
        if letter.leg < leg:
            return Polynomial.gen(letter.gen, letter.star, letter.leg)
        if letter.leg > leg:
            return Polynomial.gen(letter.gen, letter.star, letter.leg + 1)
        img = delta[letter.gen]
        if letter.star:
            img = img.adjoint()
        return img.map_letters(lambda l: l.on_leg(l.leg + leg - 1))

    return p.substitute(image)


def apply_counit(p: Polynomial, pres: Presentation, leg: int) -> Polynomial:
    """Apply the counit on one leg and renumber the remaining legs."""
    if pres.counit is None:
        raise ValueError(f"{pres.name} has no counit")
    legs = sorted({l.leg for w, _ in p.items() for l in w} | {leg})
    remaining = [x for x in legs if x != leg]
    renumber = {x: (0 if len(remaining) == 1 else i + 1) for i, x in enumerate(remaining)}

    def image(letter: Letter) -> Polynomial:
        if letter.leg == leg:
            return Polynomial.const(pres.counit[letter.gen])
        return Polynomial.gen(letter.gen, letter.star, renumber[letter.leg])

    return p.substitute(image)


def matrix_adjoint(m):
    return tuple(tuple(m[j][i].adjoint() for j in range(len(m))) for i in range(len(m[0])))


def matrix_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum((a[i][t] * b[t][j] for t in range(k)), ZERO_POLY) for j in range(m))
        for i in range(n)
    )


def coaction_basis_images(coaction: Matrix2) -> Dict[str, Matrix2]:
    """Images of the matrix units e11, e12, e21, e22 under the coaction.

    In M2 with n = e12 we have e11 = n n*, e22 = n* n and e21 = n*.
    """
    n = coaction
    ns = matrix_adjoint(n)
    return {"e11": matrix_mul(n, ns), "e12": n, "e21": ns, "e22": matrix_mul(ns, n)}


# ------------------------------------------------------------------ presets


def _P(name, star=False):
    return Polynomial.gen(name, star)


def _st(name):
    return Polynomial.gen(name, True)


def _tensor(x: Polynomial, y: Polynomial) -> Polynomial:
    return x.on_leg(1) * y.on_leg(2)


def _m2() -> Presentation:
    n, ns = _P("n"), _st("n")
    rels = (("nilpotent", n * n), ("unit", n * ns + ns * n - ONE_POLY))
    return Presentation("m2", ("n",), rels, ("n",))


def _qmap_m2() -> Presentation:
    a, b, c, d = (_P(x) for x in ("alpha", "beta", "gamma", "delta"))
    A, B, C, D = (x.adjoint() for x in (a, b, c, d))
    one = ONE_POLY
    rels = (
        ("m2.1", A * a + C * c + a * A + b * B - one),
        ("m2.2", a * a + b * c),
        ("m2.3", A * b + C * d + a * C + b * D),
        ("m2.4", a * b + b * d),
        ("m2.5", B * b + D * d + c * C + d * D - one),
        ("m2.6", c * a + d * c),
        ("m2.7", c * b + d * d),
    )
    T = _tensor
    delta = {
        "alpha": T(a * A, a) + T(b * B, a) + T(a, b) + T(A, c) + T(A * a, d) + T(C * c, d),
        "beta": T(a * C, a) + T(b * D, a) + T(b, b) + T(C, c) + T(A * b, d) + T(C * d, d),
        "gamma": T(c * A, a) + T(d * B, a) + T(c, b) + T(B, c) + T(B * a, d) + T(D * c, d),
        "delta": T(c * C, a) + T(d * D, a) + T(d, b) + T(D, c) + T(B * b, d) + T(D * d, d),
    }
    counit = {"alpha": ZERO, "beta": ONE, "gamma": ZERO, "delta": ZERO}
    return Presentation(
        "qmap-m2",
        ("alpha", "beta", "gamma", "delta"),
        rels,
        ("alpha", "beta", "gamma", "delta"),
        delta,
        counit,
        ((a, b), (c, d)),
    )


def _powers_relations(k2, k4):
    """The relation lists of the state-preserving quotient, with q^2 -> k2, q^4 -> k4."""
    b, c, d = _P("beta"), _P("gamma"), _P("delta")
    B, C, D = b.adjoint(), c.adjoint(), d.adjoint()
    one = ONE_POLY
    first = (
        ("powers.1", k4 * (D * d) + C * c + k4 * (d * D) + b * B - one),
        ("powers.2", b * c + k4 * (d * d)),
        ("powers.3", B * b + D * d + c * C + d * D - one),
        ("powers.4", c * b + d * d),
        ("powers.5", C * d - k2 * (D * b) + b * D - k2 * (d * C)),
        ("powers.6", b * d - k2 * (d * b)),
        ("powers.7", d * c - k2 * (c * d)),
    )
    second = (
        ("powers.8", k4 * (d * D) + b * B + k2 * (c * C) + k2 * (d * D) - one),
        ("powers.9", k4 * (D * d) + C * c + k2 * (B * b) + k2 * (D * d) - k2 * one),
    )
    return first + second


def _powers_delta(k2, k4):
    b, c, d = _P("beta"), _P("gamma"), _P("delta")
    B, C, D = b.adjoint(), c.adjoint(), d.adjoint()
    T = _tensor
    return {
        "beta": k4 * T(d * C, d) - k2 * T(b * D, d) + T(b, b) + T(C, c) - k2 * T(D * b, d) + T(C * d, d),
        "gamma": k4 * T(c * D, d) - k2 * T(d * B, d) + T(c, b) + T(B, c) - k2 * T(B * d, d) + T(D * c, d),
        "delta": -k2 * T(C * c, d) - k2 * T(d * D, d) + T(d, b) + T(D, c) + T(B * b, d) + T(D * d, d),
    }


def _qmap_powers() -> Presentation:
    k2, k4 = qp(2), qp(4)
    b, c, d = _P("beta"), _P("gamma"), _P("delta")
    return Presentation(
        "qmap-powers",
        ("beta", "gamma", "delta"),
        _powers_relations(k2, k4),
        ("beta", "gamma", "delta"),
        _powers_delta(k2, k4),
        {"beta": ONE, "gamma": ZERO, "delta": ZERO},
        ((-k2 * d, b), (c, d)),
    )


def _qmap_trace() -> Presentation:
    b, c, d = _P("beta"), _P("gamma"), _P("delta")
    B, C, D = b.adjoint(), c.adjoint(), d.adjoint()
    one = ONE_POLY
    # listed in the order of the q = 1 display
    rels = (
        ("trace.1", D * d + C * c + d * D + b * B - one),
        ("trace.2", b * c + d * d),
        ("trace.3", B * b + D * d + c * C + d * D - one),
        ("trace.4", c * b + d * d),
        ("trace.5", D * d + C * c + B * b + D * d - one),
        ("trace.6", b * d - d * b),
        ("trace.7", d * D + b * B + c * C + d * D - one),
        ("trace.8", d * c - c * d),
        ("trace.9", C * d - D * b + b * D - d * C),
    )
    return Presentation(
        "qmap-trace",
        ("beta", "gamma", "delta"),
        rels,
        ("beta", "gamma", "delta"),
        _powers_delta(ONE, ONE),
        {"beta": ONE, "gamma": ZERO, "delta": ZERO},
        ((-d, b), (c, d)),
        q_value=Fraction(1),
    )


def _qmap_omega0() -> Presentation:
    b, d = _P("beta"), _P("delta")
    B, D = b.adjoint(), d.adjoint()
    one = ONE_POLY
    rels = (
        ("zero.1", b * B - one),
        ("zero.2", d * d),
        ("zero.3", b * d),
        ("zero.4", b * D),
        ("zero.5", B * b + D * d + d * D - one),
    )
    T = _tensor
    delta = {"beta": T(b, b), "delta": T(d, b) + T(B * b, d) + T(D * d, d)}
    return Presentation(
        "qmap-omega0",
        ("beta", "delta"),
        rels,
        ("beta", "delta"),
        delta,
        {"beta": ONE, "delta": ZERO},
        ((ZERO_POLY, b), (ZERO_POLY, d)),
        q_value=Fraction(0),
    )


def sqo3_relations():
    A, C, G, K, L = (_P(x) for x in "ACGKL")
    As, Cs, Gs, Ks, Ls = (x.adjoint() for x in (A, C, G, K, L))
    one = ONE_POLY
    q = Q
    return (
        ("P1", Ls * L - (one - K) * (one - qp(-2) * K)),
        ("P2", L * Ls - (one - qp(2) * K) * (one - qp(4) * K)),
        ("P3", Gs * G - G * Gs),
        ("P4", K * K - Gs * G),
        ("P5", As * A - (K - K * K)),
        ("P6", A * As - (qp(2) * K - qp(4) * (K * K))),
        ("P7", Cs * C - (K - K * K)),
        ("P8", C * Cs - (qp(2) * K - qp(4) * (K * K))),
        ("P9", L * K - qp(4) * (K * L)),
        ("P10", G * K - K * G),
        ("P11", A * K - qp(2) * (K * A)),
        ("P12", C * K - qp(2) * (K * C)),
        ("P13", L * G - qp(4) * (G * L)),
        ("P14", L * A - qp(2) * (A * L)),
        ("P15", A * G - qp(2) * (G * A)),
        ("P16", A * C - C * A),
        ("P17", L * Gs - qp(4) * (Gs * L)),
        ("P18", A * A - qp(-1) * (L * G)),
        ("P19", As * L - qp(-1) * ((one - K) * C)),
        ("P20", Ks - K),
    )


def sqo3_displayed_comultiplication():
    """The comultiplication exactly as displayed, duplicated shapes included."""
    A, C, G, K, L = (_P(x) for x in "ACGKL")
    As, Cs, Gs, Ls = (x.adjoint() for x in (A, C, G, L))
    one = ONE_POLY
    T = _tensor
    return {
        "A": T(one - qp(2) * K, A) + T(A, L) - Q * T(As, G) - T(K, A),
        "C": -qp(2) * T(C, K) + T(L, C) - Q * T(Gs, Cs) + T(C, one - K),
        "G": T(Cs, A) + T(G, L) - qp(-1) * T(Ls, G) + qp(-2) * T(Cs, A),
        "K": T(K, one - qp(2) * K) + qp(-1) * T(A, C) + qp(-1) * T(As, Cs) + T(one - K, K),
        "L": -Q * T(C, A) + T(L, L) + qp(2) * T(Gs, G) - qp(-1) * T(C, A),
    }


def sqo3_matrix_units():
    """The 4x4 matrix of coefficients of the S_qO(3) spin-one representation.

    Its entries are the undotted analogue of the dotted matrix used in the
    proof replay.  Their comultiplication is forced to be matrix-coalgebra
    shaped: Delta(a_ij) = sum_k a_ik (x) a_kj.
    """
    A, C, G, K, L = (_P(x) for x in "ACGKL")
    As, Cs, Gs, Ls = (x.adjoint() for x in (A, C, G, L))
    one = ONE_POLY
    return (
        (one - qp(2) * K, -A, -Q * As, Q * K),
        (Q * C, L, -qp(2) * Gs, -C),
        (Cs, -G, Ls, -qp(-1) * Cs),
        (Q * K, qp(-1) * A, As, one - K),
    )


def sqo3_matrix_comultiplication():
    """Comultiplication read off from the matrix-coalgebra structure.

    A = -a_12, C = -a_24, G = -a_32, K = a_41 / q, L = a_22.
    """
    a = sqo3_matrix_units()

    def delta_entry(i, j):
        return sum((_tensor(a[i][k], a[k][j]) for k in range(4)), ZERO_POLY)

    return {
        "A": -delta_entry(0, 1),
        "C": -delta_entry(1, 3),
        "G": -delta_entry(2, 1),
        "K": delta_entry(3, 0).scale(qp(-1)),
        "L": delta_entry(1, 1),
    }


def _sqo3(comultiplication: str = "displayed") -> Presentation:
    A, G, L = _P("A"), _P("G"), _P("L")
    if comultiplication == "displayed":
        delta = sqo3_displayed_comultiplication()
    elif comultiplication == "matrix":
        delta = sqo3_matrix_comultiplication()
    else:
        raise ValueError("comultiplication must be 'displayed' or 'matrix'")
    counit = {"A": ZERO, "C": ZERO, "G": ZERO, "K": ZERO, "L": ONE}
    return Presentation(
        "sqo3" if comultiplication == "displayed" else "sqo3-matrix",
        ("A", "C", "G", "K", "L"),
        sqo3_relations(),
        ("L", "A", "C", "G", "K"),
        delta,
        counit,
        ((-Q * A, L), (-Q * G, qp(-1) * A)),
    )


def _so3_classical() -> Presentation:
    S, T, R = _P("S"), _P("T"), _P("R")
    Ss, Ts, Rs = S.adjoint(), T.adjoint(), R.adjoint()
    one = ONE_POLY
    rels = [
        ("so3.square", S * T + R * R),
        # |S| + |T| = 1 squared, using |R|^2 = |S||T| which follows from ST = -R^2
        ("so3.norm", Ss * S + Ts * T + 2 * (Rs * R) - one),
        ("so3.normal.S", Ss * S - S * Ss),
        ("so3.normal.T", Ts * T - T * Ts),
        ("so3.normal.R", Rs * R - R * Rs),
    ]
    pairs = [(S, T), (S, Ts), (S, R), (S, Rs), (T, R), (T, Rs)]
    names = ["ST", "ST*", "SR", "SR*", "TR", "TR*"]
    for (x, y), nm in zip(pairs, names):
        rels.append((f"so3.commute.{nm}", x * y - y * x))
    Tn = _tensor
    delta = {
        "S": 2 * Tn(R * Ts - S * Rs, R) + Tn(S, S) + Tn(Ts, T),
        "T": 2 * Tn(T * Rs - R * Ss, R) + Tn(T, S) + Tn(Ss, T),
        "R": Tn(Ss * S - Ts * T, R) + Tn(R, S) + Tn(Rs, T),
    }
    return Presentation(
        "so3-classical",
        ("S", "T", "R"),
        tuple(rels),
        ("S", "T", "R"),
        delta,
        {"S": ONE, "T": ZERO, "R": ZERO},
        ((-R, S), (T, R)),
        q_value=Fraction(1),
    )


def _circle() -> Presentation:
    u = _P("u")
    us = u.adjoint()
    rels = (("circle.left", us * u - ONE_POLY), ("circle.right", u * us - ONE_POLY))
    return Presentation(
        "circle",
        ("u",),
        rels,
        ("u",),
        {"u": _tensor(u, u)},
        {"u": ONE},
        ((ZERO_POLY, u), (ZERO_POLY, ZERO_POLY)),
        q_value=Fraction(0),
    )


_PRESETS = {
    "m2": _m2,
    "qmap-m2": _qmap_m2,
    "qmap-powers": _qmap_powers,
    "qmap-trace": _qmap_trace,
    "qmap-omega0": _qmap_omega0,
    "sqo3": _sqo3,
    "sqo3-matrix": lambda: _sqo3("matrix"),
    "so3-classical": _so3_classical,
    "circle": _circle,
}
_CACHE: Dict[str, Presentation] = {}

PRESET_NAMES = tuple(_PRESETS)


def builtin_presentation(name: str, q_mode: str = "symbolic", q=None) -> Presentation:
    """Load a preset.  ``q_mode='numeric'`` specializes coefficients at ``q``."""
    base = name.split("(")[0].strip()
    if base not in _PRESETS:
        raise UnknownPreset(name)
    if base not in _CACHE:
        _CACHE[base] = _PRESETS[base]()
    pres = _CACHE[base]
    if q_mode == "symbolic" or q is None:
        return pres
    if q_mode != "numeric":
        raise ValueError("q_mode must be 'symbolic' or 'numeric'")
    return specialize_presentation(pres, Fraction(str(q)))


def specialize_presentation(pres: Presentation, q_value: Fraction) -> Presentation:
    spec = lambda p: p.specialize(q_value)
    return Presentation(
        pres.name,
        pres.generators,
        tuple((lab, spec(r)) for lab, r in pres.relations),
        pres.precedence,
        None if pres.comultiplication is None else {g: spec(p) for g, p in pres.comultiplication.items()},
        None if pres.counit is None else {g: c.at(q_value) for g, c in pres.counit.items()},
        None if pres.coaction is None else tuple(tuple(spec(x) for x in row) for row in pres.coaction),
        q_value,
        pres.notes,
    )


# ------------------------------------------------------------ standard maps


def lambda_q(target: str = "sqo3") -> GensMap:
    """The map from the state-preserving quotient onto S_qO(3)."""
    src = builtin_presentation("qmap-powers")
    tgt = builtin_presentation(target)
    return GensMap(
        src,
        tgt,
        {"beta": _P("L"), "gamma": -Q * _P("G"), "delta": qp(-1) * _P("A")},
        "Lambda_q",
    )


def quotient_map_powers() -> GensMap:
    """alpha -> -q^2 delta; the other generators map to themselves."""
    src = builtin_presentation("qmap-m2")
    tgt = builtin_presentation("qmap-powers")
    d = _P("delta")
    return GensMap(
        src, tgt, {"alpha": -qp(2) * d, "beta": _P("beta"), "gamma": _P("gamma"), "delta": d}, "pi"
    )


def gamma_so3(b: str = "beta", c: str = "gamma", d: str = "delta") -> GensMap:
    """C(SO(3)) -> trace-preserving quotient: S -> b, T -> c, R -> d."""
    src = builtin_presentation("so3-classical")
    tgt = builtin_presentation("qmap-trace")
    return GensMap(src, tgt, {"S": _P(b), "T": _P(c), "R": _P(d)}, "Gamma_1")
