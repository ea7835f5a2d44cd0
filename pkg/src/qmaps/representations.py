"""Finite-dimensional operator models of the presented algebras.

Shift-type generators cannot live on a finite space, so every model carries
an *interior*: the leading basis vectors on which a polynomial of a given
degree is evaluated without meeting the truncation boundary.  A relation of
degree k is checked on the first ``dim - margin * k`` columns (optionally
capped by ``interior_limit``).  Full-space residuals are still recorded so
that boundary defects stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .errors import (
    DimensionOverflow,
    HypothesisViolated,
    InvalidSPoint,
    NoRootInUnitInterval,
    NotSelfAdjoint,
    RelationResidualTooLarge,
    SpectrumOutOfRange,
)
from .presentations import GensMap, Presentation, builtin_presentation, lambda_q, substitute_hom
from .reports import CheckReport, CheckStatus
from .scalars import ONE, QScalar, qp
from .words import EMPTY, ONE_POLY, Letter, Polynomial, Word

DENSE_THRESHOLD = 2000
DEFAULT_PROBES = 32
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Defect:
    """Residuals of one relation on the full space and on the interior."""

    full: float
    interior: float
    interior_columns: int
    defect_columns: Tuple[int, ...]


@dataclass(eq=False)
class RepAssignment:
    presentation: Presentation
    matrices: Dict[str, np.ndarray]
    q: Optional[float] = None
    interior_margin: int = 0
    interior_limit: Optional[int] = None
    name: str = ""
    defect_report: Dict[str, Defect] = field(default_factory=dict)
    notes: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        dims = {m.shape for m in self.matrices.values()}
        if len(dims) != 1 or any(a != b for a, b in dims):
            raise ValueError(f"generator matrices must be square and of one size, got {dims}")
        missing = set(self.presentation.generators) - set(self.matrices)
        if missing:
            raise ValueError(f"no matrices for generators {sorted(missing)}")
        frozen = {}
        for g, m in self.matrices.items():
            m = np.array(m, dtype=np.complex128)
            m.setflags(write=False)
            frozen[g] = m
        self.matrices = frozen
        self._letters: Dict[Letter, np.ndarray] = {}
        self._norms: Dict[str, float] = {}
        self._words: Dict[Tuple[Word, int], np.ndarray] = {}

    # basic data -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    @property
    def q_eval(self) -> Optional[float]:
        if self.q is not None:
            return float(self.q)
        if self.presentation.q_value is not None:
            return float(self.presentation.q_value)
        return None

    def interior_cols(self, degree: int) -> int:
        k = self.dim - self.interior_margin * degree
        if self.interior_limit is not None:
            k = min(k, self.interior_limit)
        if k < 1:
            raise DimensionOverflow(
                f"dimension {self.dim} leaves no interior for degree {degree} (margin {self.interior_margin})"
            )
        return k

    def letter(self, letter: Letter) -> np.ndarray:
        m = self._letters.get(letter)
        if m is None:
            base = self.matrices[letter.gen]
            m = base.conj().T.copy() if letter.star else base
            self._letters[letter] = m
        return m

    def norm(self, gen: str) -> float:
        v = self._norms.get(gen)
        if v is None:
            v = self._norms[gen] = float(np.linalg.norm(self.matrices[gen], 2)) if self.dim else 0.0
        return v

    def coefficient(self, c: QScalar) -> complex:
        if c.is_constant():
            return float(c.constant_value())
        return c.eval(self.q_eval)

    def word_columns(self, word: Word, ncols: int) -> np.ndarray:
        """The product of ``word`` applied to the first ``ncols`` basis vectors."""
        key = (word, ncols)
        hit = self._words.get(key)
        if hit is not None:
            return hit
        if not word:
            out = np.eye(self.dim, ncols, dtype=np.complex128)
        else:
            out = self.letter(word[0].on_leg(0)) @ self.word_columns(word[1:], ncols)
        if len(self._words) < 50_000:
            self._words[key] = out
        return out

    def clear_cache(self):
        self._words.clear()

    def with_matrices(self, **changes) -> "RepAssignment":
        """Copy with some generator matrices replaced (used for fault injection)."""
        mats = dict(self.matrices)
        mats.update({k: np.asarray(v, dtype=np.complex128) for k, v in changes.items()})
        return RepAssignment(
            self.presentation, mats, self.q, self.interior_margin, self.interior_limit, self.name, {}, dict(self.notes)
        )


Legs = Union[RepAssignment, Sequence[RepAssignment]]


# ------------------------------------------------------------- evaluation


def _as_legs(poly: Polynomial, reps: Legs) -> Tuple[List[RepAssignment], bool]:
    legs = {l.leg for w, _ in poly.items() for l in w}
    if isinstance(reps, RepAssignment):
        if legs - {0}:
            raise ValueError("multi-leg polynomial needs one representation per leg")
        return [reps], True
    reps = list(reps)
    if 0 in legs and len(reps) > 1:
        raise ValueError("untensored letters in a multi-leg evaluation")
    if legs and max(legs) > len(reps):
        raise ValueError(f"polynomial uses leg {max(legs)} but only {len(reps)} representations given")
    return reps, len(reps) == 1 and (not legs or legs == {0})


def _split_word(word: Word, nlegs: int, single: bool) -> List[Word]:
    if single:
        return [word]
    parts: List[List[Letter]] = [[] for _ in range(nlegs)]
    for l in word:
        parts[l.leg - 1].append(l)
    return [tuple(p) for p in parts]


def _interior_shape(poly, reps, single, interior, leg_degrees):
    degs = dict(poly.leg_degrees())
    if leg_degrees:
        for k, v in leg_degrees.items():
            degs[k] = max(degs.get(k, 0), v)
    ks = []
    for i, rep in enumerate(reps):
        leg = 0 if single else i + 1
        ks.append(rep.interior_cols(degs.get(leg, 0)) if interior else rep.dim)
    return ks


def term_scale(poly: Polynomial, reps: Legs) -> float:
    """max over terms of |coefficient| times the product of letter norms."""
    reps_l, single = _as_legs(poly, reps)
    best = 0.0
    for w, c in poly.items():
        v = abs(reps_l[0].coefficient(c))
        for l in w:
            rep = reps_l[0] if single else reps_l[l.leg - 1]
            v *= rep.norm(l.gen)
        best = max(best, v)
    return max(1.0, best)


def evaluate(
    poly: Polynomial,
    reps: Legs,
    interior: bool = True,
    leg_degrees: Optional[Mapping[int, int]] = None,
    dense_limit: int = DENSE_THRESHOLD,
) -> np.ndarray:
    """Dense matrix of ``poly`` restricted to interior columns.

    Multi-leg polynomials are evaluated in the Kronecker product of the given
    representations (leg i acts on factor i).
    """
    reps_l, _ = _as_legs(poly, reps)
    coef = reps_l[0].coefficient
    return evaluate_terms([(coef(c), w) for w, c in poly.items()], reps, interior,
                          _merge_degrees(poly.leg_degrees(), leg_degrees), dense_limit)


def _merge_degrees(a: Mapping[int, int], b: Optional[Mapping[int, int]]) -> Dict[int, int]:
    out = dict(a)
    for k, v in (b or {}).items():
        out[k] = max(out.get(k, 0), v)
    return out


def evaluate_terms(
    terms: Sequence[Tuple[complex, Word]],
    reps: Legs,
    interior: bool = True,
    leg_degrees: Optional[Mapping[int, int]] = None,
    dense_limit: int = DENSE_THRESHOLD,
) -> np.ndarray:
    """Evaluate sum(c * word) for numeric coefficients.

    ``leg_degrees`` fixes the interior of every leg; terms are grouped by
    their first-leg word so each Kronecker product is formed once per group.
    """
    single = isinstance(reps, RepAssignment)
    reps_l = [reps] if single else list(reps)
    if single and any(l.leg for _, w in terms for l in w):
        raise ValueError("multi-leg polynomial needs one representation per leg")
    rows = math.prod(r.dim for r in reps_l)
    if rows > dense_limit:
        raise DimensionOverflow(f"dense evaluation of dimension {rows} exceeds {dense_limit}")
    degs = leg_degrees or {}
    ks = []
    for i, rep in enumerate(reps_l):
        leg = 0 if single else i + 1
        ks.append(rep.interior_cols(degs.get(leg, 0)) if interior else rep.dim)
    split = [(c, _split_word(w, len(reps_l), single)) for c, w in terms if c != 0]
    out = _eval_split(split, reps_l, ks)
    if out is None:
        out = np.zeros((rows, math.prod(ks)), dtype=np.complex128)
    return out


def _eval_split(split, reps_l, ks):
    if not split:
        return None
    rep, k = reps_l[0], ks[0]
    if len(reps_l) == 1:
        out = None
        for c, parts in split:
            m = c * rep.word_columns(parts[0], k)
            out = m if out is None else out + m
        return out
    groups: Dict[Word, list] = {}
    for c, parts in split:
        groups.setdefault(parts[0], []).append((c, parts[1:]))
    out = None
    for w, rest in groups.items():
        inner = _eval_split(rest, reps_l[1:], ks[1:])
        if inner is None:
            continue
        m = np.kron(rep.word_columns(w, k), inner)
        out = m if out is None else out + m
    return out


def matrix_free_apply(
    poly: Polynomial,
    reps: Legs,
    x: np.ndarray,
    interior: bool = True,
    leg_degrees: Optional[Mapping[int, int]] = None,
) -> np.ndarray:
    """Apply ``poly`` to a vector of the interior product space without
    materializing Kronecker products (at most three legs)."""
    reps_l, single = _as_legs(poly, reps)
    if len(reps_l) > 3:
        raise ValueError("matrix-free application supports at most three legs")
    ks = _interior_shape(poly, reps_l, single, interior, leg_degrees)
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (math.prod(ks),):
        raise ValueError(f"vector of length {x.shape} does not match interior size {math.prod(ks)}")
    out = np.zeros(math.prod(r.dim for r in reps_l), dtype=np.complex128)
    for w, c in poly.items():
        coef = reps_l[0].coefficient(c)
        parts = _split_word(w, len(reps_l), single)
        factors = [rep.word_columns(part, k) for rep, part, k in zip(reps_l, parts, ks)]
        out += coef * _kernels.kron_apply(factors, x)
    return out


def interior_size(poly: Polynomial, reps: Legs, leg_degrees=None) -> int:
    reps_l, single = _as_legs(poly, reps)
    return math.prod(_interior_shape(poly, reps_l, single, True, leg_degrees))


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value; Lanczos (seeded, deterministic) for big matrices."""
    if m.size == 0:
        return 0.0
    if min(m.shape) <= 300:
        return float(np.linalg.norm(m, 2))
    fro = float(np.linalg.norm(m))
    if fro == 0.0 or not math.isfinite(fro):
        return fro
    from scipy.sparse.linalg import ArpackNoConvergence, svds

    scaled = m / fro
    v0 = np.random.default_rng(12345).normal(size=min(scaled.shape)).astype(np.complex128)
    try:
        s = svds(scaled, k=1, v0=v0, tol=1e-10, return_singular_vectors=False, maxiter=5000)
        return float(s[0]) * fro
    except ArpackNoConvergence:
        return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class Residual:
    value: float  # normalized
    raw: float
    scale: float
    method: str  # "dense" or "probe"
    probes: int = 0


def residual(
    poly: Polynomial,
    reps: Legs,
    interior: bool = True,
    seed: int = 0,
    probes: int = DEFAULT_PROBES,
    dense_limit: int = DENSE_THRESHOLD,
    leg_degrees=None,
) -> Residual:
    """Scale-free operator-norm size of ``poly`` in the representation(s)."""
    scale = term_scale(poly, reps)
    if poly.is_zero():
        return Residual(0.0, 0.0, scale, "dense")
    reps_l, _ = _as_legs(poly, reps)
    rows = math.prod(r.dim for r in reps_l)
    if rows <= dense_limit:
        m = evaluate(poly, reps, interior, leg_degrees, dense_limit)
        raw = spectral_norm(m)
        return Residual(raw / scale, raw, scale, "dense")
    raw = probe_norm(lambda v: matrix_free_apply(poly, reps, v, interior, leg_degrees),
                     interior_size(poly, reps, leg_degrees) if interior else rows, seed, probes)
    return Residual(raw / scale, raw, scale, "probe", probes)


def probe_norm(apply, n: int, seed: int, probes: int = DEFAULT_PROBES) -> float:
    """Lower estimate of an operator norm from seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(probes):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v /= np.linalg.norm(v)
        best = max(best, float(np.linalg.norm(apply(v))))
    return best


def matrix_residual(
    entries: Sequence[Sequence[Polynomial]],
    reps: Legs,
    interior: bool = True,
    dense_limit: int = DENSE_THRESHOLD,
) -> Residual:
    """Norm of a block matrix of polynomials (an element of M_k (x) algebra)."""
    polys = [p for row in entries for p in row]
    total = sum(polys[1:], polys[0]) if polys else Polynomial()
    # a common interior for all blocks
    reps_l, single = _as_legs(total if not total.is_zero() else Polynomial(), reps)
    degs: Dict[int, int] = {}
    for p in polys:
        for k, v in p.leg_degrees().items():
            degs[k] = max(degs.get(k, 0), v)
    scale = max((term_scale(p, reps) for p in polys), default=1.0)
    blocks = []
    for row in entries:
        blocks.append([evaluate(p, reps, interior, degs, dense_limit) for p in row])
    m = np.block(blocks)
    raw = spectral_norm(m)
    return Residual(raw / scale, raw, scale, "dense")


def defect_columns(poly: Polynomial, rep: Legs, tol: float) -> Tuple[int, ...]:
    m = evaluate(poly, rep, interior=False)
    scale = term_scale(poly, rep)
    cols = np.linalg.norm(m, axis=0) / scale
    return tuple(int(i) for i in np.nonzero(cols > tol)[0])


# ------------------------------------------------------------ validation


def build_defect_report(rep: RepAssignment, tol: float) -> Dict[str, Defect]:
    report = {}
    for label, rel in rep.presentation.relations:
        inner = residual(rel, rep, interior=True)
        full = residual(rel, rep, interior=False)
        cols = defect_columns(rel, rep, tol) if full.value > tol else ()
        k = rep.interior_cols(rel.degree())
        report[label] = Defect(full.value, inner.value, k, cols)
    return report


def validated(rep: RepAssignment, tol: float = DEFAULT_TOL) -> RepAssignment:
    """Attach the defect report; fail loudly if a relation breaks on the interior."""
    rep.defect_report = build_defect_report(rep, tol)
    for label, d in rep.defect_report.items():
        if not d.interior < tol:
            raise RelationResidualTooLarge(
                f"{rep.name or rep.presentation.name}: relation {label} has interior residual {d.interior:.3e} >= {tol:.1e}",
                relation=label,
                residual=d.interior,
            )
    return rep


# ------------------------------------------------------------ constructors


def rep_m2() -> RepAssignment:
    n = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    return validated(RepAssignment(builtin_presentation("m2"), {"n": n}, name="M2"), 1e-15)


def _check_q(q: float):
    if not 0.0 < float(q) < 1.0:
        raise ValueError(f"q must lie in ]0,1[, got {q}")


def sqo3_matrices(q: float, dim: int) -> Dict[str, np.ndarray]:
    """Weighted lowering operators on l2(Z+) truncated to ``dim`` vectors."""
    n = np.arange(dim)
    k = q ** (2.0 * n)
    K = np.diag(k).astype(np.complex128)
    A = np.zeros((dim, dim), dtype=np.complex128)
    A[n[:-1], n[1:]] = np.sqrt(k[1:] - k[1:] ** 2)
    L = np.zeros((dim, dim), dtype=np.complex128)
    L[n[:-2], n[2:]] = np.sqrt((1.0 - k[2:]) * (1.0 - k[2:] / q**2))
    G = K.copy()
    C = (L @ A.conj().T) / q + q**2 * (A @ G.conj().T)
    return {"A": A, "C": C, "G": G, "K": K, "L": L}


def rep_sqo3_truncated(
    q: float,
    dim: int,
    margin: int = 2,
    tol: float = DEFAULT_TOL,
    comultiplication: str = "displayed",
) -> RepAssignment:
    """The S_qO(3) model: K e_n = q^{2n} e_n, A and L lower by one and two steps."""
    _check_q(q)
    if dim < 8:
        raise ValueError("dim must be at least 8")
    mats = sqo3_matrices(float(q), dim)
    # A maps the q^{2n} eigenspace into the q^{2n-2} one and kills e_0
    A = mats["A"]
    assert not np.any(A[:, 0]) and not np.any(np.tril(A)), "A must be strictly one-step lowering"
    name = "sqo3" if comultiplication == "displayed" else "sqo3-matrix"
    rep = RepAssignment(
        builtin_presentation(name), mats, float(q), margin, None, f"{name}(q={q}, dim={dim})"
    )
    return validated(rep, tol)


def pullback(f: GensMap, rep: RepAssignment, tol: float = DEFAULT_TOL, validate: bool = True) -> RepAssignment:
    """Compose a homomorphism with a representation of its target."""
    images = {g: f.image(g) for g in f.source.generators}
    mats = {g: evaluate(p, rep, interior=False) for g, p in images.items()}
    deg = max((p.degree() for p in images.values()), default=1)
    out = RepAssignment(
        f.source,
        mats,
        rep.q,
        rep.interior_margin * max(deg, 1),
        rep.interior_limit,
        f"{f.name or 'map'}*{rep.name}",
    )
    return validated(out, tol) if validate else out


def rep_powers(q: float, dim: int, margin: int = 2, tol: float = DEFAULT_TOL) -> RepAssignment:
    """The state-preserving quotient represented through the map onto S_qO(3)."""
    return pullback(lambda_q(), rep_sqo3_truncated(q, dim, margin, tol), tol)


def solve_ck_parameter(m0: int, n0: int, tol: float = 1e-15) -> float:
    """Root in ]0,1[ of q^{2 n0} + q^{2 m0} - 1."""
    from scipy.optimize import brentq

    if n0 == m0:
        raise HypothesisViolated("the counterexample needs n0 != m0")
    if min(m0, n0) < 1:
        raise NoRootInUnitInterval(f"q^{2 * n0} = 1 - q^{2 * m0} has no root in ]0,1[")
    f = lambda x: x ** (2 * n0) + x ** (2 * m0) - 1.0
    return float(brentq(f, 0.0, 1.0, xtol=tol, rtol=4 * np.finfo(float).eps))


def _ck_presentation() -> Presentation:
    A, C, K = (Polynomial.gen(x) for x in "ACK")
    As, Cs = A.adjoint(), C.adjoint()
    one = ONE_POLY
    rels = (
        ("AACCK1.A", As * A - (K - K * K)),
        ("AACCK1.C", Cs * C - (K - K * K)),
        ("AACCK2.A", A * As - (qp(2) * K - qp(4) * (K * K))),
        ("AACCK2.C", C * Cs - (qp(2) * K - qp(4) * (K * K))),
        ("AKq", A * K - qp(2) * (K * A)),
        ("K.selfadjoint", K.adjoint() - K),
    )
    return Presentation("ck-hypotheses", ("A", "C", "K"), rels, ("A", "C", "K"))


CK_CONCLUSION = Polynomial.gen("C") * Polynomial.gen("K") - qp(2) * (Polynomial.gen("K") * Polynomial.gen("C"))
CK_COMMUTATION = Polynomial.gen("A") * Polynomial.gen("C") - Polynomial.gen("C") * Polynomial.gen("A")


def rep_ck_counterexample(m0: int = 1, n0: int = 2, dim: int = 16, tol: float = 1e-12):
    """Operators meeting every hypothesis of the CK implication except A C = C A
    while C K differs from q^2 K C.  Returns ``(rep, q)``."""
    q = solve_ck_parameter(m0, n0)
    if dim < max(m0, n0) + 4:
        raise ValueError("dim too small for the chosen indices")
    idx = np.arange(dim)
    k = q ** (2.0 * idx)
    K = np.diag(k).astype(np.complex128)
    root = np.diag(np.sqrt(k * (1.0 - k))).astype(np.complex128)
    s = np.zeros((dim, dim), dtype=np.complex128)
    s[idx[:-1], idx[1:]] = 1.0
    sigma = np.eye(dim, dtype=np.complex128)
    sigma[[n0, m0]] = sigma[[m0, n0]]
    A = s @ root
    C = s @ sigma @ root
    rep = RepAssignment(_ck_presentation(), {"A": A, "C": C, "K": K}, q, 1, None, f"ck(m0={m0}, n0={n0})")
    validated(rep, tol)
    rep.notes["conclusion_residual"] = residual(CK_CONCLUSION, rep).value
    rep.notes["conclusion_raw"] = residual(CK_CONCLUSION, rep).raw
    rep.notes["commutation_residual"] = residual(CK_COMMUTATION, rep).value
    rep.notes["defect_columns"] = defect_columns(CK_CONCLUSION, rep, 1e-12)
    return rep, q


def _flip_presentation() -> Presentation:
    A, C, K, u = (Polynomial.gen(x) for x in ("A", "C", "K", "u"))
    one = ONE_POLY
    rels = (
        ("A.sqrt", A * A - (K - K * K)),
        ("AK=KA", A * K - K * A),
        ("AC=CA", A * C - C * A),
        ("CK=(1-K)C", C * K - (one - K) * C),
        ("C=uA", C - u * A),
        ("u.unitary", u.adjoint() * u - one),
    )
    return Presentation("flip-model", ("A", "C", "K", "u"), rels, ("A", "C", "K", "u"), q_value=Fraction(1))


FLIP_CONCLUSION = Polynomial.gen("C") * Polynomial.gen("K") - Polynomial.gen("K") * Polynomial.gen("C")


def rep_q1_counterexample(grid: int = 128) -> RepAssignment:
    """Multiplication by t on a midpoint grid of [0,1] together with the flip."""
    if grid < 4 or grid % 2:
        raise ValueError("grid must be an even integer >= 4")
    t = (np.arange(grid) + 0.5) / grid
    K = np.diag(t).astype(np.complex128)
    # t (1 - t) is symmetric under the flip bit for bit
    A = np.diag(np.sqrt(t * (1.0 - t))).astype(np.complex128)
    u = np.eye(grid, dtype=np.complex128)[::-1].copy()
    C = u @ A
    rep = RepAssignment(_flip_presentation(), {"A": A, "C": C, "K": K, "u": u}, 1.0, 0, None, f"flip(grid={grid})")
    validated(rep, 1e-14)
    mats = rep.matrices
    rep.notes["AK-KA"] = float(np.abs(mats["A"] @ mats["K"] - mats["K"] @ mats["A"]).max())
    rep.notes["AC-CA"] = float(np.abs(mats["A"] @ mats["C"] - mats["C"] @ mats["A"]).max())
    rep.notes["conclusion_residual"] = residual(FLIP_CONCLUSION, rep).raw
    return rep


def q0_block_index(block: int, pos: int) -> int:
    """Interleaved basis: position ``pos`` of summand ``block`` in H+H+H."""
    return 3 * pos + block


def rep_q0_toeplitz(dim: int) -> RepAssignment:
    """The q = 0 relations on a truncation of H (+) H (+) H.

    The three summands are interleaved so that the isometry U (identity onto
    the first ``dim/3`` interleaved coordinates) is an honest truncation of a
    unitary H -> H+H+H.  Only beta beta* = 1 feels the cut, and only on
    columns at or beyond ``dim/3``.
    """
    if dim % 3 or dim < 6:
        raise ValueError("dim must be a positive multiple of 3 (at least 6)")
    m = dim // 3
    beta = np.zeros((dim, dim), dtype=np.complex128)
    delta = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(m):
        beta[i, q0_block_index(0, i)] = 1.0  # U on the first summand
        delta[q0_block_index(2, i), q0_block_index(1, i)] = 1.0
    rep = RepAssignment(
        builtin_presentation("qmap-omega0"), {"beta": beta, "delta": delta}, 0.0, 0, m, f"q0-toeplitz(dim={dim})"
    )
    validated(rep, 1e-14)
    proj = beta.conj().T @ beta
    rep.notes["betastar_beta_defect"] = float(np.linalg.norm(proj - np.eye(dim), 2))
    rep.notes["betastar_beta_is_projection"] = bool(np.allclose(proj @ proj, proj) and np.allclose(proj, proj.conj().T))
    rep.notes["delta_beta"] = float(np.linalg.norm(delta @ beta, 2))
    rep.notes["beta_delta"] = float(np.linalg.norm(beta @ delta, 2))
    rep.notes["deltastar_beta"] = float(np.linalg.norm(delta.conj().T @ beta, 2))
    rep.notes["beta_deltastar"] = float(np.linalg.norm(beta @ delta.conj().T, 2))
    rep.notes["delta_norm"] = float(np.linalg.norm(delta, 2))
    return rep


def rep_circle_points(phis: Iterable[float]) -> RepAssignment:
    """Evaluation at finitely many points of the circle, as a diagonal model."""
    phis = np.asarray(list(phis), dtype=float)
    u = np.diag(np.exp(1j * phis))
    rep = RepAssignment(builtin_presentation("circle"), {"u": u}, 0.0, 0, None, f"circle[{len(phis)}]")
    rep.notes["points"] = phis.tolist()
    return validated(rep, 1e-12)


def rep_circle_point(phi: float) -> RepAssignment:
    return rep_circle_points([phi])


def _spoint_arrays(points) -> np.ndarray:
    arr = np.array([[complex(p.s), complex(p.t), complex(p.r)] if hasattr(p, "s") else list(p) for p in points],
                   dtype=np.complex128)
    return arr.reshape(-1, 3)


def check_spoint(s, t, r, tol: float = 1e-10):
    if abs(s * t + r * r) > tol or abs(abs(s) + abs(t) - 1.0) > tol:
        raise InvalidSPoint(f"({s}, {t}, {r}) violates st = -r^2 or |s|+|t| = 1")


def rep_so3_points(points) -> RepAssignment:
    """Evaluation of C(SO(3)) at sampled group points, as a diagonal model."""
    arr = _spoint_arrays(points)
    for s, t, r in arr:
        check_spoint(s, t, r)
    mats = {"S": np.diag(arr[:, 0]), "T": np.diag(arr[:, 1]), "R": np.diag(arr[:, 2])}
    rep = RepAssignment(builtin_presentation("so3-classical"), mats, 1.0, 0, None, f"so3[{len(arr)}]")
    return validated(rep, 1e-10)


def rep_so3_point(p) -> RepAssignment:
    return rep_so3_points([p])


def rep_trace_points(points) -> RepAssignment:
    """The trace-preserving quotient evaluated at group points (beta, gamma, delta) = (s, t, r)."""
    arr = _spoint_arrays(points)
    for s, t, r in arr:
        check_spoint(s, t, r)
    mats = {"beta": np.diag(arr[:, 0]), "gamma": np.diag(arr[:, 1]), "delta": np.diag(arr[:, 2])}
    rep = RepAssignment(builtin_presentation("qmap-trace"), mats, 1.0, 0, None, f"trace[{len(arr)}]")
    return validated(rep, 1e-10)


# --------------------------------------------------------------- analysis


def fuglede_putnam_check(a, n, lam: float, tol: float = 1e-10) -> CheckReport:
    """If n is normal and a n = lam n a then a n* = lam n* a (real lam)."""
    a = np.asarray(a, dtype=np.complex128)
    n = np.asarray(n, dtype=np.complex128)
    na, nn = np.linalg.norm(a, 2), np.linalg.norm(n, 2)
    scale = max(1.0, na * nn)
    normality = np.linalg.norm(n @ n.conj().T - n.conj().T @ n, 2) / max(1.0, nn * nn)
    if normality >= tol:
        raise HypothesisViolated(f"n is not normal (residual {normality:.3e})")
    premise = np.linalg.norm(a @ n - lam * n @ a, 2) / scale
    if premise >= tol:
        raise HypothesisViolated(f"a n != lambda n a (residual {premise:.3e})")
    conclusion = np.linalg.norm(a @ n.conj().T - lam * n.conj().T @ a, 2) / scale
    report = CheckReport("fuglede-putnam")
    report.add("premise.normal", CheckStatus.PASS_NUMERIC, float(normality))
    report.add("premise.intertwining", CheckStatus.PASS_NUMERIC, float(premise))
    report.numeric("conclusion", float(conclusion), tol, **{"lambda": float(lam)})
    return report


def fuglede_putnam_instance(seed: int, dim: int = 8):
    """Seeded (a, n, lam) with n normal and a n = lam n a.

    n = U diag(z) U* where z mixes geometric chains w, lam w, lam^2 w, ...
    with a few zeros; in n's eigenbasis a n = lam n a says a_ij z_j =
    lam z_i a_ij, so a_ij is free exactly where z_j = lam z_i and zero
    elsewhere.
    """
    rng = np.random.default_rng(seed)
    lam = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.5))
    z = []
    while len(z) < dim:
        if rng.random() < 0.15:
            z.append(0.0)
            continue
        w = complex(rng.normal(), rng.normal())
        for k in range(int(rng.integers(1, 4))):
            z.append(w * lam**k)
    z = np.array(z[:dim], dtype=np.complex128)
    rng.shuffle(z)
    mask = np.abs(z[None, :] - lam * z[:, None]) < 1e-12 * (1.0 + np.abs(z[None, :]))
    a_eig = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) * mask
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    u, r = np.linalg.qr(g)
    u = u * (np.diag(r) / np.abs(np.diag(r)))
    n = u @ np.diag(z) @ u.conj().T
    a = u @ a_eig @ u.conj().T
    return a, n, lam


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray  # descending
    classes: List[Optional[int]]  # n for q^{2n}; None for the eigenvalue 0
    distances: np.ndarray
    gap_violations: List[float]

    @property
    def ok(self) -> bool:
        return not self.gap_violations


def spectral_structure_check(K, q: float, tol: float = 1e-9) -> SpectralReport:
    """Eigenvalues of 0 <= K <= 1 against the grid {q^{2n}} and {0}."""
    K = np.asarray(K, dtype=np.complex128)
    if np.linalg.norm(K - K.conj().T, 2) > tol * max(1.0, np.linalg.norm(K, 2)):
        raise NotSelfAdjoint("K is not self-adjoint")
    w, _ = _kernels.jacobi_eigh(K)
    if w.size and (w.min() < -tol or w.max() > 1 + tol):
        raise SpectrumOutOfRange(f"spectrum [{w.min():.3g}, {w.max():.3g}] leaves [0,1]")
    q2 = q * q
    classes: List[Optional[int]] = []
    dists = []
    gaps = []
    for lam in w:
        if q2 + tol < lam < 1 - tol:
            gaps.append(float(lam))
        if lam <= tol:
            classes.append(None)
            dists.append(abs(lam))
            continue
        nreal = math.log(lam) / math.log(q2) if 0 < q2 < 1 else 0.0
        cand = sorted({max(0, math.floor(nreal)), max(0, math.ceil(nreal))})
        best = min(cand, key=lambda n: abs(lam - q2**n))
        d0 = abs(lam)
        if d0 < abs(lam - q2**best):
            classes.append(None)
            dists.append(d0)
        else:
            classes.append(int(best))
            dists.append(abs(lam - q2**best))
    return SpectralReport(w, classes, np.array(dists), gaps)


def tensor_rep(*reps: RepAssignment) -> Tuple[RepAssignment, ...]:
    """Legs for evaluating multi-leg polynomials: leg i acts on factor i."""
    qs_ = {r.q_eval for r in reps if r.q_eval is not None}
    if len(qs_) > 1:
        raise ValueError("tensor legs must share the same q")
    return tuple(reps)


def kron_operator(reps: Sequence[RepAssignment], gen: str, leg: int, star: bool = False) -> np.ndarray:
    """The matrix of a single generator acting on one leg of a Kronecker product."""
    mats = []
    for i, r in enumerate(reps, start=1):
        mats.append(r.letter(Letter(gen, star)) if i == leg else np.eye(r.dim, dtype=np.complex128))
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out
