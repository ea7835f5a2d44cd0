"""Replay of the argument that a compact quantum group acting on M2 and
preserving the Powers state omega_q receives a map from S_qO(3).

The acting algebra is generated by b, c, d (the images of beta, gamma,
delta).  Five derived elements

    A' = q d,   C' = b d* - q^2 d c*,   G' = -c / q,
    K' = q^2 d* d + q^-2 c* c,          L' = b

are shown to satisfy the twenty S_qO(3) relations.  Each intermediate
identity of that argument is checked numerically in a faithful-enough
truncated model (b = L, c = -qG, d = A/q inside S_qO(3) itself), so a
broken step shows up as a named failing entry.

The derived elements are always polynomials in b, c, d; they are never
introduced as fresh generators.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .presentations import GensMap, Presentation, builtin_presentation, substitute_hom
from .reports import CheckReport, CheckStatus
from .representations import (
    DEFAULT_TOL,
    RepAssignment,
    evaluate,
    matrix_residual,
    residual,
    rep_powers,
)
from .rewriting import interreduce, reduce
from .scalars import ONE, ZERO, Q, QScalar, qp
from .words import ONE_POLY, ZERO_POLY, Polynomial

B_GEN, C_GEN, D_GEN = "beta", "gamma", "delta"
DOTTED = ("A", "C", "G", "K", "L")


def bcd() -> Tuple[Polynomial, Polynomial, Polynomial]:
    return Polynomial.gen(B_GEN), Polynomial.gen(C_GEN), Polynomial.gen(D_GEN)


def dotted_elements() -> Dict[str, Polynomial]:
    """The five derived elements as polynomials in b, c, d."""
    b, c, d = bcd()
    bs, cs, ds = b.adjoint(), c.adjoint(), d.adjoint()
    return {
        "A": Q * d,
        "C": b * ds - qp(2) * (d * cs),
        "G": -qp(-1) * c,
        "K": qp(2) * (ds * d) + qp(-2) * (cs * c),
        "L": b,
    }


def gamma_main() -> GensMap:
    """S_qO(3) -> the state-preserving quotient, generator X -> X'."""
    return GensMap(
        builtin_presentation("sqo3"), builtin_presentation("qmap-powers"), dotted_elements(), "Gamma"
    )


# ------------------------------------------------------------ the matrix a


def _ops_symbolic():
    return (lambda k: qp(k)), ONE_POLY, (lambda x: x.adjoint())


def _ops_numeric(q: float, dim: int):
    eye = np.eye(dim, dtype=np.complex128)
    return (lambda k: float(q) ** k), eye, (lambda x: x.conj().T)


def _a_entries(b, c, d, qpow, one, adj):
    bs, cs, ds = adj(b), adj(c), adj(d)
    return (
        (qpow(4) * (d @ ds) + b @ bs, -qpow(1) * d, -qpow(2) * ds, qpow(3) * (ds @ d) + qpow(-1) * (cs @ c)),
        (qpow(1) * (b @ ds) - qpow(3) * (d @ cs), b, qpow(1) * cs, cs @ d - qpow(2) * (ds @ b)),
        (d @ bs - qpow(2) * (c @ ds), qpow(-1) * c, bs, qpow(-1) * (ds @ c) - qpow(1) * (bs @ d)),
        (qpow(1) * (c @ cs) + qpow(1) * (d @ ds), d, qpow(1) * ds, bs @ b + ds @ d),
    )


def _derived_form_entries(A, C, G, K, L, qpow, one, adj):
    As, Cs, Gs, Ls = adj(A), adj(C), adj(G), adj(L)
    return (
        (one - qpow(2) * K, -A, -qpow(1) * As, qpow(1) * K),
        (qpow(1) * C, L, -qpow(2) * Gs, -C),
        (Cs, -G, Ls, -qpow(-1) * Cs),
        (qpow(1) * K, qpow(-1) * A, As, one - K),
    )


class _P:
    """Adapter giving Polynomials the ``@`` product used by the builders."""

    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __matmul__(self, o):
        return _P(self.p * o.p)

    def __add__(self, o):
        return _P(self.p + o.p)

    def __sub__(self, o):
        return _P(self.p - o.p)

    def __neg__(self):
        return _P(-self.p)

    def __rmul__(self, k):
        return _P(self.p.scale(k))

    def __rsub__(self, o):
        return _P(o.p - self.p)


def build_matrix_a(b=None, c=None, d=None, q: Optional[float] = None):
    """The 4x4 coefficient matrix of the coaction in the basis
    sqrt(1+q^2)(nn*, n/q, n*, n*n/q).

    With Polynomial arguments (default: the generators b, c, d) the result
    is a 4x4 tuple of Polynomials.  With square arrays (and a numeric ``q``)
    it is the dense 4*dim block matrix.
    """
    if b is None:
        b, c, d = bcd()
    if isinstance(b, Polynomial):
        qpow, one, adj = _ops_symbolic()
        w = lambda x: _P(x)
        adj_p = lambda x: _P(x.p.adjoint())
        rows = _a_entries(w(b), w(c), w(d), qpow, _P(one), adj_p)
        return tuple(tuple(e.p for e in row) for row in rows)
    if q is None:
        raise ValueError("numeric matrix a needs q")
    b, c, d = (np.asarray(x, dtype=np.complex128) for x in (b, c, d))
    qpow, one, adj = _ops_numeric(q, b.shape[0])
    return np.block([list(r) for r in _a_entries(b, c, d, qpow, one, adj)])


def build_matrix_derived_form(dotted: Optional[Dict[str, Polynomial]] = None):
    """The same matrix written in the derived elements A', C', G', K', L'."""
    dotted = dotted or dotted_elements()
    qpow, one, _ = _ops_symbolic()
    args = [_P(dotted[k]) for k in DOTTED]
    rows = _derived_form_entries(*args, qpow, _P(one), lambda x: _P(x.p.adjoint()))
    return tuple(tuple(e.p for e in row) for row in rows)


def _mat_product(x, y):
    n = len(x)
    return tuple(
        tuple(sum((x[i][k] * y[k][j] for k in range(n)), ZERO_POLY) for j in range(n)) for i in range(n)
    )


def _mat_adjoint(x):
    n = len(x)
    return tuple(tuple(x[j][i].adjoint() for j in range(n)) for i in range(n))


def _minus_identity(x):
    n = len(x)
    return tuple(tuple(x[i][j] - (ONE_POLY if i == j else ZERO_POLY) for j in range(n)) for i in range(n))


def bcd_relations() -> Tuple[Tuple[str, Polynomial], ...]:
    """Quadratic identities satisfied by b, c, d (consequences of the
    state-preservation relations).  Labels follow the order of the list."""
    b, c, d = bcd()
    bs, cs, ds = b.adjoint(), c.adjoint(), d.adjoint()
    one = ONE_POLY
    return (
        ("bcd.sum1", qp(4) * (ds * d) + cs * c + qp(4) * (d * ds) + b * bs - one),
        ("bcd.sum2", bs * b + ds * d + c * cs + d * ds - one),
        ("bcd.sum3", qp(4) * (ds * d) + cs * c + qp(2) * (bs * b) + qp(2) * (ds * d) - qp(2) * one),
        ("bcd.sum4", qp(4) * (d * ds) + b * bs + qp(2) * (c * cs) + qp(2) * (d * ds) - one),
        ("bcd.mixed", cs * d - qp(2) * (ds * b) + b * ds - qp(2) * (d * cs)),
        ("bcd.bc", b * c + qp(4) * (d * d)),
        ("bcd.cb", c * b + d * d),
        ("bcd.mixedt", b * d - qp(2) * (d * b)),
        ("bcd.dc", d * c - qp(2) * (c * d)),
    )


def _bcd_presentation() -> Presentation:
    return Presentation(
        "bcd-quadratic",
        (B_GEN, C_GEN, D_GEN),
        bcd_relations(),
        (B_GEN, C_GEN, D_GEN),
    )


def derived_form_symbolic_check() -> CheckReport:
    """Entrywise: matrix a minus its derived-element form lies in the span of
    the quadratic b, c, d identities (exact elimination over Q(q))."""
    pres = _bcd_presentation()
    rules = interreduce(pres.adjoint_closed_relations(), pres.order)
    a, n = build_matrix_a(), build_matrix_derived_form()
    report = CheckReport("matrix-a-derived-form")
    for i in range(4):
        for j in range(4):
            diff = a[i][j] - n[i][j]
            if diff.is_zero():
                report.add(f"a=derived-form[{i + 1},{j + 1}]", CheckStatus.PASS_SYMBOLIC, 0.0, how="identical")
                continue
            out = reduce(diff, rules)
            status = CheckStatus.PASS_SYMBOLIC if out.reduced_to_zero else CheckStatus.INCONCLUSIVE
            report.add(f"a=derived-form[{i + 1},{j + 1}]", status, None, how=out.status.value)
    return report


# ------------------------------------------------------------ antipode


# kappa(X') = coefficient * Y'(*)  -- read off from a^{-1} = a*
KAPPA_TABLE: Dict[Tuple[str, bool], Tuple[QScalar, str, bool]] = {
    ("A", False): (-Q, "C", True),
    ("A", True): (-qp(-1), "C", False),
    ("C", False): (-qp(-1), "A", True),
    ("C", True): (-Q, "A", False),
    ("G", False): (qp(2), "G", False),
    ("G", True): (qp(-2), "G", True),
    ("L", False): (ONE, "L", True),
    ("L", True): (ONE, "L", False),
    ("K", False): (ONE, "K", False),
    ("K", True): (ONE, "K", True),
}


def _kappa_symbolic(sym_poly: Polynomial) -> Polynomial:
    """Apply kappa to a *linear* polynomial in the symbols A..L."""
    out = ZERO_POLY
    for w, c in sym_poly.items():
        if not w:
            out = out + Polynomial.const(c)
            continue
        if len(w) != 1:
            raise ValueError("kappa table applies to linear entries only")
        k, g, s = KAPPA_TABLE[(w[0].gen, w[0].star)]
        out = out + Polynomial.gen(g, s).scale(c * k)
    return out


def kappa_matrix(dotted: Optional[Dict[str, Polynomial]] = None):
    """Entries kappa(a_ij) of the derived-element form, as polynomials in b, c, d."""
    dotted = dotted or dotted_elements()
    symbols = {k: Polynomial.gen(k) for k in DOTTED}
    sym_rows = build_matrix_derived_form(symbols)
    to_bcd = GensMap(_symbol_presentation(), builtin_presentation("qmap-powers"), dotted, "dot")
    return tuple(tuple(substitute_hom(_kappa_symbolic(e), to_bcd) for e in row) for row in sym_rows)


def _symbol_presentation() -> Presentation:
    return Presentation("derived-symbols", DOTTED, ())


def kappa_self_consistency() -> CheckReport:
    """kappa(kappa(x)*)* = x for each table entry, compared as polynomials."""
    report = CheckReport("kappa-table")
    dotted = dotted_elements()
    to_bcd = GensMap(_symbol_presentation(), builtin_presentation("qmap-powers"), dotted, "dot")
    for (g, s) in KAPPA_TABLE:
        x = Polynomial.gen(g, s)
        y = _kappa_symbolic(_kappa_symbolic(x).adjoint()).adjoint()
        same = substitute_hom(y, to_bcd) == substitute_hom(x, to_bcd)
        name = f"kappa-involutive:{g}{'*' if s else ''}"
        report.add(name, CheckStatus.PASS_SYMBOLIC if same else CheckStatus.FAIL, None if same else 1.0)
    return report


def kappa_counit_check() -> CheckReport:
    """The counit (b -> 1, c, d -> 0) sends a to the identity matrix."""
    counit = {B_GEN: ONE, C_GEN: ZERO, D_GEN: ZERO}
    report = CheckReport("counit-of-a")
    a = build_matrix_a()
    worst = max(
        abs(float((a[i][j].counit_value(counit) - (ONE if i == j else ZERO)).constant_value()))
        if (a[i][j].counit_value(counit) - (ONE if i == j else ZERO)).is_constant()
        else float("inf")
        for i in range(4)
        for j in range(4)
    )
    status = CheckStatus.PASS_SYMBOLIC if worst == 0 else CheckStatus.FAIL
    report.add("counit(a)=1", status, worst)
    return report


def kappa_inverse_check(rep: RepAssignment, tol: float = DEFAULT_TOL) -> CheckReport:
    """a times kappa(a) must be the identity in the representation."""
    report = CheckReport("kappa-inverse")
    a = build_matrix_derived_form()
    kb = kappa_matrix()
    prod = _minus_identity(_mat_product(a, kb))
    res = matrix_residual(prod, rep)
    report.numeric("a*kappa(a)=1", res.value, tol)
    report.extend(kappa_self_consistency())
    report.extend(kappa_counit_check())
    return report


# ------------------------------------------------------------ proof steps


def _identities() -> List[Tuple[str, List[Polynomial]]]:
    """Named identities of the argument; each entry lists polynomials that
    must vanish.  Chains list their successive lines."""
    t = dotted_elements()
    A, C, G, K, L = (t[k] for k in DOTTED)
    As, Cs, Gs, Ls = A.adjoint(), C.adjoint(), G.adjoint(), L.adjoint()
    one = ONE_POLY
    q, qi = Q, qp(-1)
    K2 = K * K

    ids: List[Tuple[str, List[Polynomial]]] = []
    add = lambda name, *polys: ids.append((name, list(polys)))

    # entries of a a* and a* a
    add("aa*[1,2]", q * ((one - qp(2) * K) * Cs) - A * Ls + qp(3) * (As * G) - q * (K * Cs))
    add("aa*[1,3]", (one - qp(2) * K) * C + A * Gs - q * (As * L) - K * C)
    add("aa*[2,2]", qp(2) * (C * Cs) + L * Ls + qp(4) * (Gs * G) + C * Cs - one)
    add("aa*[3,3]", Cs * C + G * Gs + Ls * L + qp(-2) * (Cs * C) - one)
    add("aa*[4,3]", q * (K * C) - qi * (A * Gs) + As * L - qi * ((one - K) * C))
    add("aa*[4,4]", qp(2) * K2 + qp(-2) * (A * As) + As * A + (one - K) * (one - K) - one)
    add("a*a[2,2]", As * A + Ls * L + Gs * G + qp(-2) * (As * A) - one)
    add("a*a[4,4]", qp(2) * K2 + Cs * C + qp(-2) * (C * Cs) + (one - K) * (one - K) - one)
    add("unit-sum.derived", Ls * L + qp(-2) * (As * A) + qp(2) * (G * Gs) + qp(-2) * (A * As) - one)

    # normality of G'
    add("K'=A*A+G*G=C*C+GG*", As * A + Gs * G - K, Cs * C + G * Gs - K)
    add("A*A=C*C", As * A - Cs * C)
    add("G'.normal", Gs * G - G * Gs)

    # consequences of normality
    add("LG*=q4G*L", L * Gs - qp(4) * (Gs * L))
    add("AG*=q2G*A", A * Gs - qp(2) * (Gs * A))
    add("CC*=AA*", C * Cs - A * As)
    add("A*A+AA*/q2", As * A + qp(-2) * (A * As) - (2 * K - K2 - qp(2) * K2))
    add("A*A-AA*/q2", As * A - qp(-2) * (A * As) - (qp(2) - ONE) * (G * Gs),
        As * A - qp(-2) * (A * As) - (qp(2) - ONE) * (Gs * G))
    add("2A*A", 2 * (As * A) - (qp(2) * (Gs * G) - qp(2) * K2 + 2 * K - Gs * G - K2))
    add("K2=G*G", K2 - Gs * G)
    add("A*A=K-K2", As * A - (K - K2))
    add("AA*=q2K-q4K2", A * As - (qp(2) * K - qp(4) * K2))

    # commutation of A' and C'
    AG, GG = A * Gs, Gs * G
    chain_ca = [
        C * A,
        (qi * (L * As) + qp(2) * AG) * A,
        qi * (L * As * A) + qp(2) * (AG * A),
        qi * (L * (qp(-2) * (A * As) + (qp(2) - ONE) * GG)) + qp(2) * (AG * A),
        qp(-3) * (L * A * As) + (q - qi) * (L * GG) + A * A * Gs,
        qp(-3) * (L * A * As) + (q - qi) * (L * G * Gs) + A * A * Gs,
        qi * (A * L * As) + (q - qi) * (L * G * Gs) + A * A * Gs,
        qi * (A * L * As) + (qp(2) - ONE) * (A * A * Gs) + A * A * Gs,
        qi * (A * L * As) + qp(2) * (A * A * Gs),
        A * C,
    ]
    add("C'-form", qi * (L * As) + qp(2) * AG - C)
    add("chain:CA=AC", *_chain(chain_ca))

    # finishing touches
    chain_ka = [
        K * A,
        (As * A + GG) * A,
        As * A * A + GG * A,
        (qp(-2) * (A * As) + (qp(2) - ONE) * GG) * A + GG * A,
        qp(-2) * (A * As * A) + (qp(2) - ONE) * (GG * A) + GG * A,
        qp(-2) * (A * As * A) + qp(2) * (GG * A),
        qp(-2) * (A * As * A) + qp(-2) * (A * GG),
        qp(-2) * (A * K),
    ]
    add("chain:KA=AK/q2", *_chain(chain_ka))
    KC_CK = K * C - C * K
    add("aa*[1,2].rewritten", C - qp(2) * (C * K) - qi * (L * As) + qp(2) * (Gs * A) - C * K)
    add("aa*[1,3].rewritten", C - qp(2) * (K * C) - q * (As * L) + A * Gs - K * C)
    add("commutator-combination", qp(2) * KC_CK + q * (As * L) - qi * (L * As) + KC_CK)
    add("C'-two-forms", qi * (L * As) + qp(2) * (A * Gs) - C, q * (As * L) + Gs * A - C)
    add("LA*/q-qA*L", qi * (L * As) - q * (As * L) - (ONE - qp(4)) * (Gs * A))
    add("KC-CK", (ONE + qp(2)) * KC_CK - (ONE - qp(4)) * (Gs * A))
    add("KC=G*A", K * C - Gs * A)
    add("AG*/q=qKC", qi * (A * Gs) - q * (K * C))
    add("A*L=(1-K)C/q", As * L - qi * ((one - K) * C))
    chain_lk = [
        L * K,
        L * (As * A + GG),
        L * As * A + L * GG,
        (qp(2) * (As * L) + q * (Gs * A) - qp(3) * (A * Gs)) * A + L * GG,
        qp(2) * (As * L * A) + q * (Gs * A * A) - qp(3) * (A * Gs * A) + L * GG,
        qp(2) * (As * L * A) + q * (Gs * A * A) - qp(3) * (A * Gs * A) + qp(4) * (Gs * L * G),
        qp(2) * (As * L * A) + q * (Gs * A * A) - qp(5) * (Gs * A * A) + qp(4) * (Gs * L * G),
        qp(2) * (As * L * A) + Gs * L * G - qp(4) * (Gs * L * G) + qp(4) * (Gs * L * G),
        qp(4) * (As * A * L) + qp(4) * (GG * L),
        qp(4) * (K * L),
    ]
    add("chain:LK=q4KL", *_chain(chain_lk))
    return ids


def _chain(lines: Sequence[Polynomial]) -> List[Polynomial]:
    """Endpoint difference first, then every consecutive step."""
    return [lines[0] - lines[-1]] + [x - y for x, y in zip(lines, lines[1:])]


def replay_rep(q: float, dim: int, margin: int = 2, tol: float = DEFAULT_TOL) -> RepAssignment:
    """b = L, c = -qG, d = A/q inside the truncated S_qO(3) model."""
    return rep_powers(q, dim, margin, tol)


def _entry(report: CheckReport, name: str, polys: Sequence[Polynomial], rep: RepAssignment, tol: float):
    vals = [residual(p, rep).value for p in polys]
    ctx = {"degree": max(p.degree() for p in polys)}
    if len(vals) > 1:
        ctx["parts"] = len(vals)
        ctx["worst_part"] = int(np.argmax(vals))
    return report.numeric(name, max(vals), tol, **ctx)


def proof_replay_theorem_main(
    q: float = 0.5,
    dim: int = 64,
    tol: float = DEFAULT_TOL,
    rep: Optional[RepAssignment] = None,
    matrix_tol: float = 1e-10,
) -> CheckReport:
    """Check every identity of the argument, in order, then the twenty
    S_qO(3) relations for the derived elements.

    ``rep`` overrides the default model (used for fault injection); it must
    represent the generators beta, gamma, delta.
    """
    if not 0.0 < float(q) < 1.0:
        raise ValueError("q must lie in ]0,1[")
    if rep is None:
        rep = replay_rep(q, dim, tol=tol)
    report = CheckReport(f"replay[q={q}, dim={rep.dim}]")

    for label, rel in bcd_relations():
        _entry(report, label, [rel], rep, tol)

    a = build_matrix_a()
    a_star = _mat_adjoint(a)
    res = matrix_residual(_minus_identity(_mat_product(a_star, a)), rep)
    report.numeric("matrix:a*a=1", res.value, tol)
    res = matrix_residual(_minus_identity(_mat_product(a, a_star)), rep)
    report.numeric("matrix:aa*=1", res.value, tol)
    derived = build_matrix_derived_form()
    diffs = [residual(a[i][j] - derived[i][j], rep).value for i in range(4) for j in range(4)]
    report.numeric("matrix:a=derived-form", max(diffs), matrix_tol, worst_entry=int(np.argmax(diffs)))
    report.extend(kappa_inverse_check(rep, tol))

    for name, polys in _identities():
        _entry(report, name, polys, rep, tol)

    gamma = gamma_main()
    for label, rel in gamma.source.relations:
        _entry(report, f"derived:{label}", [substitute_hom(rel, gamma)], rep, tol)
    return report


REPLAY_GROUPS = {
    "bcd": "quadratic identities of b, c, d",
    "matrix": "unitarity of a and its derived-element form",
    "kappa": "antipode table checks",
    "derived": "the twenty S_qO(3) relations for the derived elements",
}
