"""The thirteen acceptance criteria, one test each.

Each test records a one-line verdict that is printed in the pytest terminal
summary (and by ``python tests/test_acceptance.py``).
"""

import functools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from qmaps.classification import (
    canonical_phases,
    classify_action_pipeline,
    classify_state,
    coaction_for_preset,
    conjugate_action,
    mc_convergence,
    random_density,
    random_unitary,
)
from qmaps.errors import HypothesisViolated
from qmaps.presentations import (
    apply_comultiplication,
    apply_counit,
    builtin_presentation,
    lambda_q,
    quotient_map_powers,
)
from qmaps.proof_replay import derived_form_symbolic_check, proof_replay_theorem_main
from qmaps.reports import CheckStatus
from qmaps.representations import (
    fuglede_putnam_check,
    fuglede_putnam_instance,
    pullback,
    rep_ck_counterexample,
    rep_circle_points,
    rep_powers,
    rep_q0_toeplitz,
    rep_q1_counterexample,
    rep_so3_points,
    rep_sqo3_truncated,
    rep_trace_points,
    residual,
)
from qmaps.so3 import SPoint, batch_defect, haar_spoints, s_inv_batch, s_mul, s_mul_batch, s_to_so3
from qmaps.verifier import (
    CoactionSpec,
    StateSpec,
    check_coaction,
    check_comultiplication,
    check_hom,
    check_intertwining,
    check_relations,
    check_state_preservation,
    derive_state_constraints,
    fixed_point_dimension,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
                ACCEPTANCE_LINES.append(f"criterion {number}: FAIL  {title}  ({msg[:160]})")
                raise
            ACCEPTANCE_LINES.append(f"criterion {number}: PASS  {title}  ({detail})")

        return run

    return wrap


# ---------------------------------------------------------------- 1


DISPLAYED_COUNTS = {
    "qmap-m2": 7,
    "qmap-powers": 9,  # the displayed pair of blocks has 7 + 2 relations
    "qmap-trace": 9,
    "qmap-omega0": 5,
    "sqo3": 20,
    "sqo3-matrix": 20,
}


@criterion(1, "preset fidelity")
def test_c01_preset_fidelity():
    for name, count in DISPLAYED_COUNTS.items():
        pres = builtin_presentation(name)
        assert len(pres.relations) == count, f"{name}: {len(pres.relations)} relations"
        assert pres.counit is not None
        for label, rel in pres.relations:
            assert rel.counit_value(pres.counit).is_zero(), f"{name}:{label} not killed by the counit"
    return ", ".join(f"{k}={v}" for k, v in DISPLAYED_COUNTS.items()) + "; counit exact"


# ---------------------------------------------------------------- 2


@criterion(2, "state-constraint derivation")
def test_c02_derivation():
    t = time.perf_counter()
    d = derive_state_constraints()
    elapsed = time.perf_counter() - t
    assert d.alpha_forced, f"alpha image {d.alpha_image}"
    assert d.reproduces_powers, f"missing {d.missing}, extra {d.extra}"
    assert d.reproduces_trace
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    return f"alpha = {d.alpha_image}, powers and q=1 lists reproduced, {elapsed:.2f}s"


# ---------------------------------------------------------------- 3


@criterion(3, "truncated S_qO(3) oracle")
def test_c03_truncated_oracle():
    worst = 0.0
    for q in (0.3, 0.5, 0.8):
        r64 = rep_sqo3_truncated(q, 64, margin=2)
        r128 = rep_sqo3_truncated(q, 128, margin=2)
        rep = check_relations(r64, 1e-9)
        assert len(rep) == 20 and rep.passed
        worst = max(worst, rep.max_residual())
        for label in r64.defect_report:
            a, b = r64.defect_report[label].interior, r128.defect_report[label].interior
            assert b <= a, f"q={q} {label}: dim 128 residual {b:.3e} > dim 64 {a:.3e}"
    return f"worst interior residual {worst:.2e}; dim 128 <= dim 64 per relation"


# ---------------------------------------------------------------- 4

REQUIRED_REPLAY = [
    "bcd.sum1", "bcd.sum2", "bcd.sum3", "bcd.sum4", "bcd.mixed", "bcd.bc", "bcd.dc",
    "aa*[1,2]", "aa*[4,4]", "a*a[2,2]", "a*a[4,4]", "unit-sum.derived",
    "K'=A*A+G*G=C*C+GG*", "AA*=q2K-q4K2", "C'-two-forms",
    "chain:CA=AC", "chain:KA=AK/q2", "aa*[1,2].rewritten", "aa*[1,3].rewritten",
] + [f"derived:P{i}" for i in range(1, 21)]


@criterion(4, "identity replay for the powers quotient")
def test_c04_proof_replay():
    rep = proof_replay_theorem_main(0.5, 64, tol=1e-9)
    bad = [(e.name, e.residual) for e in rep.failures]
    assert not bad, f"failing identities: {bad[:5]}"
    missing = [n for n in REQUIRED_REPLAY if n not in rep]
    assert not missing, f"missing entries {missing}"
    assert rep["matrix:a*a=1"].residual < 1e-9
    assert rep["matrix:aa*=1"].residual < 1e-9
    assert rep["matrix:a=derived-form"].residual < 1e-10
    assert rep["a*kappa(a)=1"].residual < 1e-9
    sym = derived_form_symbolic_check()
    assert sym.passed and all(e.status is CheckStatus.PASS_SYMBOLIC for e in sym)
    numeric = [e.residual for e in rep if e.residual is not None]
    return f"{len(rep)} identities, worst residual {max(numeric):.2e}; derived form symbolic on all 16 entries"


# ---------------------------------------------------------------- 5


def _coalgebra_models(name):
    """(two-leg model at dim <= 32, three-leg model at dim <= 12)."""
    if name == "sqo3-matrix":
        return rep_sqo3_truncated(0.5, 32, comultiplication="matrix"), rep_sqo3_truncated(0.5, 12, comultiplication="matrix")
    if name == "qmap-powers":
        return rep_powers(0.5, 32), rep_powers(0.5, 12)
    if name == "qmap-m2":
        f = quotient_map_powers()
        return pullback(f, rep_powers(0.5, 32)), pullback(f, rep_powers(0.5, 12))
    if name == "qmap-trace":
        return rep_trace_points(haar_spoints(8, 1)), rep_trace_points(haar_spoints(4, 2))
    if name == "so3-classical":
        return rep_so3_points(haar_spoints(8, 1)), rep_so3_points(haar_spoints(4, 2))
    if name == "qmap-omega0":
        return rep_q0_toeplitz(30), rep_q0_toeplitz(12)
    if name == "circle":
        pts = np.random.default_rng(1).uniform(0, 2 * np.pi, 12)
        return rep_circle_points(pts), rep_circle_points(pts[:6])
    raise KeyError(name)


SYMBOLIC_COALGEBRAS = ("qmap-omega0", "circle")
COALGEBRAS = ("qmap-m2", "qmap-powers", "qmap-trace", "qmap-omega0", "sqo3-matrix", "so3-classical", "circle")


@criterion(5, "coalgebra axioms")
def test_c05_coalgebra_axioms():
    counts = {}
    for name in COALGEBRAS:
        pres = builtin_presentation(name)
        two, three = _coalgebra_models(name)
        sym = name in SYMBOLIC_COALGEBRAS
        rep = check_comultiplication(pres, two, tol=1e-9, coassoc_tol=1e-8, counit_tol=1e-10,
                                     symbolic=sym, three_leg_rep=three)
        assert rep.passed, f"{name}: {[(e.name, e.residual) for e in rep.failures][:4]}"
        if sym:
            delta_rel = [e for e in rep if e.name.startswith("delta-rel:")]
            assert all(e.status is CheckStatus.PASS_SYMBOLIC for e in delta_rel), name
        for e in rep:
            if e.name.startswith("counit-") and e.status is not CheckStatus.PASS_SYMBOLIC:
                assert e.residual < 1e-10
        counts[name] = len(rep)
    # the coproduct of G exactly as displayed breaks the counit law; the preset
    # built from the matrix-coalgebra formula above is the corrected one
    shown = builtin_presentation("sqo3")
    diff = apply_counit(apply_comultiplication(shown.gen("G"), shown), shown, 1) - shown.gen("G")
    assert not diff.is_zero()
    return f"{sum(counts.values())} entries over {len(counts)} coalgebras; displayed Delta(G) counit defect confirmed"


# ---------------------------------------------------------------- 6


@criterion(6, "coaction and state preservation")
def test_c06_coactions():
    cases = [
        ("sqo3-matrix", rep_sqo3_truncated(0.5, 32, comultiplication="matrix"), StateSpec.powers()),
        ("qmap-powers", rep_powers(0.5, 32), StateSpec.powers()),
        ("qmap-trace", rep_trace_points(haar_spoints(16, 2)), StateSpec.trace()),
        ("so3-classical", rep_so3_points(haar_spoints(16, 2)), StateSpec.trace()),
        ("qmap-omega0", rep_q0_toeplitz(30), StateSpec.omega0()),
        ("circle", rep_circle_points(np.linspace(0, 6, 16)), StateSpec.omega0()),
    ]
    worst = 0.0
    for name, model, state in cases:
        psi = CoactionSpec.of(builtin_presentation(name))
        for rep in (check_coaction(psi, model, 1e-9), check_state_preservation(psi, state, model, 1e-9)):
            assert rep.passed, f"{rep.title}: {[(e.name, e.residual) for e in rep.failures]}"
            worst = max(worst, rep.max_residual())
    classical = check_state_preservation(CoactionSpec.of(builtin_presentation("so3-classical")), StateSpec.trace(),
                                         rep_so3_points(haar_spoints(16, 2)))
    assert classical.max_residual() < 1e-14
    lam = lambda_q("sqo3-matrix")
    hom = check_hom(lam, rep_sqo3_truncated(0.5, 32, comultiplication="matrix"))
    inter = check_intertwining(lam, CoactionSpec.of(builtin_presentation("qmap-powers")),
                               CoactionSpec.of(builtin_presentation("sqo3-matrix")),
                               rep_sqo3_truncated(0.5, 16, comultiplication="matrix"))
    assert hom.passed and inter.passed
    return f"6 coactions, worst residual {worst:.2e}; Lambda_q hom and intertwining pass"


# ---------------------------------------------------------------- 7


@criterion(7, "CK counterexample and q=1 flip model")
def test_c07_counterexamples():
    rep, q = rep_ck_counterexample(1, 2)
    assert abs(q**4 + q**2 - 1) < 1e-13
    hyp = check_relations(rep, 1e-12)
    labels = {e.name for e in hyp}
    assert {"relation:AACCK1.A", "relation:AACCK1.C", "relation:AACCK2.A", "relation:AACCK2.C",
            "relation:AKq"} <= labels
    assert hyp.passed
    ck = rep.notes["conclusion_residual"]
    assert ck > 0.05, ck
    flip = rep_q1_counterexample(128)
    assert flip.notes["AK-KA"] == 0.0 and flip.notes["AC-CA"] == 0.0
    assert check_relations(flip, 1e-12).passed
    assert flip.notes["conclusion_residual"] > 0.1
    return f"q={q:.16g}, ||CK-q^2KC||={ck:.4f}; flip ||CK-KC||={flip.notes['conclusion_residual']:.4f}"


# ---------------------------------------------------------------- 8


@criterion(8, "Fuglede-Putnam property suite")
def test_c08_fuglede_putnam():
    worst, failures, rejected = 0.0, 0, 0
    for seed in range(100):
        a, n, lam = fuglede_putnam_instance(seed)
        try:
            rep = fuglede_putnam_check(a, n, lam, 1e-10)
        except HypothesisViolated:
            rejected += 1
            continue
        worst = max(worst, rep["conclusion"].residual)
        failures += not rep.passed
    assert rejected == 0 and failures == 0, (rejected, failures)
    return f"100 instances, worst conclusion residual {worst:.2e}, no false failures"


# ---------------------------------------------------------------- 9


@criterion(9, "S group suite")
def test_c09_s_group():
    P, Q, R = (haar_spoints(1000, s) for s in (11, 12, 13))
    unit = np.tile(np.array([1, 0, 0], dtype=np.complex128), (1000, 1))
    assoc = np.abs(s_mul_batch(s_mul_batch(P, Q), R) - s_mul_batch(P, s_mul_batch(Q, R))).max()
    unit_err = max(np.abs(s_mul_batch(unit, P) - P).max(), np.abs(s_mul_batch(P, unit) - P).max())
    inv = s_inv_batch(P)
    inv_err = max(np.abs(s_mul_batch(P, inv) - unit).max(), np.abs(s_mul_batch(inv, P) - unit).max())
    closure = batch_defect(s_mul_batch(P, Q)).max()
    for name, v in (("associativity", assoc), ("unit", unit_err), ("inverse", inv_err), ("closure", closure)):
        assert v < 1e-11, f"{name} {v:.2e}"
    hom = det = 0.0
    for i in range(1000):
        p, q = SPoint.from_array(P[i]), SPoint.from_array(Q[i])
        A = s_to_so3(s_mul(p, q))
        hom = max(hom, np.abs(A - s_to_so3(p) @ s_to_so3(q)).max())
        det = max(det, abs(np.linalg.det(A) - 1.0))
    assert hom < 1e-10 and det < 1e-10
    return f"assoc {assoc:.1e}, unit {unit_err:.1e}, inverse {inv_err:.1e}, closure {closure:.1e}, hom {hom:.1e}"


# ---------------------------------------------------------------- 10


@criterion(10, "classification round trip")
def test_c10_classification():
    worst = 0.0
    for seed in range(200):
        rho = random_density(seed)
        worst = max(worst, classify_state(rho, 1e-12).residual(rho))
    assert worst < 1e-12, worst

    psi1 = coaction_for_preset("so3-classical")
    res1 = classify_action_pipeline(psi1, "so3-classical", StateSpec.from_density(random_density(7)), seed=7)
    assert res1.q == 1.0 and res1.report.passed
    err = np.abs(res1.eta.rho - np.eye(2) / 2).max()
    assert err < 6 * res1.eta.stderr + 1e-12
    rms = mc_convergence((1000, 10000), seeds=16)
    slope = math.log10(rms[10000] / rms[1000])
    assert -0.7 < slope < -0.3, slope

    psi0 = coaction_for_preset("circle")
    res0 = classify_action_pipeline(psi0, "circle", seed=7)
    assert res0.q == 0.0 and np.abs(res0.u - np.eye(2)).max() < 1e-12 and res0.report.passed
    u_err = 0.0
    for seed in range(5):
        v = random_unitary(100 + seed)
        res = classify_action_pipeline(conjugate_action(psi0, v.conj().T), "circle", seed=seed)
        assert res.q == 0.0 and res.report.passed
        u_err = max(u_err, np.abs(res.u - canonical_phases(v)).max())
    assert u_err < 1e-10, u_err
    return f"200 densities worst {worst:.1e}; q=1 MC slope {slope:.2f}; q=0 u recovered to {u_err:.1e}"


# ---------------------------------------------------------------- 11


@criterion(11, "ergodicity and fixed points")
def test_c11_fixed_points():
    psi_q = CoactionSpec.of(builtin_presentation("sqo3-matrix"))
    dims = {q: fixed_point_dimension(psi_q, rep_sqo3_truncated(q, 32, comultiplication="matrix")) for q in (0.3, 0.5, 0.8)}
    assert all(d == 1 for d in dims.values()), dims
    circle = rep_circle_points(2 * np.pi * np.arange(8) / 8 + 0.1)
    d0 = fixed_point_dimension(coaction_for_preset("circle"), circle)
    assert d0 == 2, d0
    d1 = fixed_point_dimension(coaction_for_preset("so3-classical"), rep_so3_points(haar_spoints(64, 3)))
    assert d1 == 1, d1
    qs = ", ".join(f"{q}:{d}" for q, d in dims.items())
    return f"fixed-point dims Psi_q ({qs}), Psi_0 {d0}, Psi_1 {d1}"


# ---------------------------------------------------------------- 12


@criterion(12, "q=0 model")
def test_c12_q0_model():
    rep = rep_q0_toeplitz(48)
    m = rep.interior_limit
    top = set(range(rep.dim - 2 * m, rep.dim))
    defects = 0
    for label, d in rep.defect_report.items():
        assert d.interior < 1e-12, label
        assert set(d.defect_columns) <= top, f"{label} leaks outside the top {2 * m} columns"
        defects += len(d.defect_columns)
    assert defects > 0
    assert rep.notes["betastar_beta_is_projection"]
    assert rep.notes["betastar_beta_defect"] >= 1.0 - 1e-12
    pres = builtin_presentation("qmap-omega0")
    sym = check_comultiplication(pres, rep_q0_toeplitz(12), symbolic=True)
    delta_rel = [e for e in sym if e.name.startswith("delta-rel:")]
    assert len(delta_rel) == 5
    assert all(e.context.get("symbolic") == "ReducedToZero" for e in delta_rel)
    return f"defects on {defects} columns, all in the top {2 * m}; ||b*b-1||={rep.notes['betastar_beta_defect']:.1f}; Delta(re0) reduced to zero"


# ---------------------------------------------------------------- 13

PLANS = [
    ["verify", "--preset", "sqo3", "--q", "0.5", "--dim", "32", "--format", "json"],
    ["classify", "--action", "so3-classical", "--state-seed", "3", "--seed", "5", "--samples", "2000", "--format", "json"],
    ["counterexample", "ck", "--format", "json"],
]


@criterion(13, "determinism")
def test_c13_determinism():
    for plan in PLANS:
        outs = [subprocess.run([sys.executable, "-m", "qmaps", *plan], capture_output=True, check=True).stdout
                for _ in range(2)]
        assert outs[0] == outs[1], plan
        assert b'"schema": 1' in outs[0]
    return f"{len(PLANS)} plans byte-identical across two runs"


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c")]
    for t in tests:
        try:
            t()
        except BaseException:
            pass
    for line in ACCEPTANCE_LINES:
        print(line)
