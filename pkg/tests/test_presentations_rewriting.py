import pytest

from qmaps.errors import UnboundGenerator, UnknownPreset, UnorientableRelation
from qmaps.presentations import (
    PRESET_NAMES,
    Presentation,
    apply_comultiplication,
    apply_counit,
    builtin_presentation,
    specialize_presentation,
    substitute_hom,
    lambda_q,
)
from qmaps.representations import rep_sqo3_truncated, residual
from qmaps.rewriting import Status, complete, interreduce, orient_rules, reduce
from qmaps.scalars import ONE, qp
from qmaps.words import ONE_POLY, Polynomial, WordOrder

a, b = Polynomial.gen("a"), Polynomial.gen("b")


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        builtin_presentation("sq03")


def test_relations_must_use_declared_generators():
    with pytest.raises(UnboundGenerator):
        Presentation("bad", ("a",), (("r", a * b),))


def test_counit_must_kill_relations():
    with pytest.raises(ValueError):
        Presentation("bad", ("a",), (("r", a - ONE_POLY),), counit={"a": qp(0) * 0})


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_specialization_keeps_counit_exact(name):
    pres = specialize_presentation(builtin_presentation(name), 1 / 2 if name != "m2" else 1)
    if pres.counit is not None:
        assert all(r.counit_value(pres.counit).is_zero() for r in pres.relation_polys)


@pytest.mark.parametrize("name", ["qmap-m2", "qmap-powers", "qmap-trace", "qmap-omega0", "sqo3-matrix", "so3-classical", "circle"])
def test_counit_laws_exact(name):
    pres = builtin_presentation(name)
    for g in pres.generators:
        d = pres.comultiplication[g]
        for leg in (1, 2):
            assert apply_counit(d, pres, leg) == pres.gen(g), (g, leg)


def test_displayed_sqo3_coproduct_breaks_counit_and_coassociativity():
    pres = builtin_presentation("sqo3")
    r8, r16 = rep_sqo3_truncated(0.5, 8), rep_sqo3_truncated(0.5, 16)
    g = pres.comultiplication["G"]
    assert residual(apply_counit(g, pres, 1) - pres.gen("G"), r16).value == pytest.approx(1.0)
    for gen in "ACGL":
        d = pres.comultiplication[gen]
        diff = apply_comultiplication(d, pres, leg=1) - apply_comultiplication(d, pres, leg=2)
        assert residual(diff, (r8, r8, r8)).value > 0.1, gen
    broken = {lab for lab, rel in pres.relations if residual(apply_comultiplication(rel, pres), (r16, r16)).value > 1e-6}
    assert broken == {"P3", "P4", "P10", "P13", "P15", "P17", "P18"}


def test_displayed_and_matrix_coproducts_differ_only_on_G():
    shown, fixed = builtin_presentation("sqo3"), builtin_presentation("sqo3-matrix")
    diff = {g for g in shown.generators if shown.comultiplication[g] != fixed.comultiplication[g]}
    assert diff == {"G"}


def test_reduce_m2():
    pres = builtin_presentation("m2")
    rules = orient_rules(pres)
    n = pres.gen("n")
    assert reduce(n * n * n.adjoint(), rules).status is Status.REDUCED_TO_ZERO


def test_completion_closes_omega0_coproduct():
    pres = builtin_presentation("qmap-omega0")
    plain = orient_rules(pres).on_legs((1, 2))
    done = complete(orient_rules(pres), 4).on_legs((1, 2))
    img = apply_comultiplication(pres.relation("zero.5"), pres)
    assert reduce(img, plain).status is not Status.REDUCED_TO_ZERO
    assert reduce(img, done).status is Status.REDUCED_TO_ZERO


def test_interreduce_decides_linear_membership():
    order = WordOrder(("a", "b"))
    gens = [a * b - b * a, a * a - ONE_POLY, a * b + b * b]
    rules = interreduce(gens, order)
    target = (a * b - b * a).scale(qp(3)) + (a * a - ONE_POLY) - (a * b + b * b)
    assert reduce(target, rules).status is Status.REDUCED_TO_ZERO
    assert reduce(a * b * a, rules).status is not Status.REDUCED_TO_ZERO
    lhs = [r.lhs for r in rules.rules]
    assert len(lhs) == len(set(lhs))


def test_interreduce_detects_inconsistency():
    with pytest.raises(UnorientableRelation):
        interreduce([a - ONE_POLY, a], WordOrder(("a",)))


def test_lambda_sends_powers_relations_to_consequences():
    lam = lambda_q("sqo3-matrix")
    rep = rep_sqo3_truncated(0.3, 48, comultiplication="matrix")
    for label, rel in lam.source.relations:
        assert residual(substitute_hom(rel, lam), rep).value < 1e-12, label
