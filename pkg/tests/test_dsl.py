import pytest
from hypothesis import given, strategies as st

from qmaps.dsl import (
    format_polynomial,
    format_presentation,
    parse_algebra_spec,
    parse_expression,
    parse_presentation,
    presentations_equal,
)
from qmaps.errors import MalformedScalar, ParseError, UnknownGenerator
from qmaps.presentations import PRESET_NAMES, builtin_presentation, lambda_q
from qmaps.scalars import ONE, Q, qp
from qmaps.words import Polynomial

OMEGA0 = """\
NAME qmap-omega0
QVALUE 0
GENERATORS beta, delta   # two generators
RELATIONS
  zero.1: beta beta^* - 1
  zero.2: delta^2
  zero.3: beta*delta
  zero.4: beta delta^*
  zero.5: beta^* beta + delta^* delta + delta delta^* = 1
COMULT
  beta = beta (x) beta
  delta = delta (x) beta + beta^* beta (x) delta +
          delta^* delta (x) delta
COUNIT
  beta = 1
  delta = 0
COACTION
  n12 = beta
  n22 = delta
"""


def test_transcribed_file_equals_builtin():
    assert presentations_equal(parse_presentation(OMEGA0), builtin_presentation("qmap-omega0"))


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_round_trip(name):
    pres = builtin_presentation(name)
    text = format_presentation(pres)
    again = parse_presentation(text)
    assert presentations_equal(pres, again)
    assert format_presentation(again) == text


def test_maps_round_trip():
    lam = lambda_q()
    text = format_presentation(builtin_presentation("sqo3"), [lam])
    spec = parse_algebra_spec(text)
    assert spec.maps["Lambda_q"].assignment == dict(lam.assignment)


def test_undeclared_generator_position():
    with pytest.raises(UnknownGenerator) as exc:
        parse_presentation("GENERATORS m\nRELATIONS: n*n\n")
    assert (exc.value.line, exc.value.column) == (2, 12)
    assert exc.value.expected == ("m",)


@pytest.mark.parametrize(
    "body, cls, col",
    [
        ("r: a/a", MalformedScalar, 6),
        ("r: a^-1", MalformedScalar, 7),
        ("r: a/0", MalformedScalar, 6),
        ("r: a $", ParseError, 6),
        ("r: a +", ParseError, None),
        ("r: (a", ParseError, None),
    ],
)
def test_errors_carry_positions(body, cls, col):
    with pytest.raises(cls) as exc:
        parse_presentation("GENERATORS a\nRELATIONS\n" + body + "\n")
    if col is not None:
        assert (exc.value.line, exc.value.column) == (3, col)


def test_reserved_names_rejected():
    with pytest.raises(ParseError):
        parse_presentation("GENERATORS q\n")
    with pytest.raises(ParseError):
        parse_presentation("GENERATORS x\n")


def test_counit_must_be_scalar():
    with pytest.raises(MalformedScalar):
        parse_presentation("GENERATORS a\nCOUNIT\n  a = a\n")


def test_comult_needs_tensor():
    with pytest.raises(ParseError):
        parse_presentation("GENERATORS a\nCOMULT\n  a = a a\n")


def test_grammar_precedence():
    a, b = Polynomial.gen("a"), Polynomial.gen("b")
    got = parse_expression("a (x) b + 2 a^* b / (1 + q^2)", ["a", "b"])
    want = a.on_leg(1) * b.on_leg(2) + (a.adjoint() * b).scale(Polynomial.const(2).coeff(()) / (ONE + qp(2)))
    assert got == want
    assert parse_expression("(a b)^*", ["a", "b"]) == b.adjoint() * a.adjoint()
    assert parse_expression("q^-2 a^2", ["a"]) == (a * a).scale(qp(-2))
    assert parse_expression("-q a - -a", ["a"]) == a.scale(ONE - Q)


GEN = st.sampled_from(["a", "b"])
ATOM = st.one_of(GEN, st.sampled_from(["q", "2", "(1 + q^2)", "q^-1"]))


@st.composite
def expressions(draw, depth=2):
    if depth == 0:
        return draw(ATOM)
    left = draw(expressions(depth=depth - 1))
    right = draw(expressions(depth=depth - 1))
    op = draw(st.sampled_from([" + ", " - ", " ", " * "]))
    out = f"{left}{op}{right}"
    if draw(st.booleans()):
        out = f"({out})" + draw(st.sampled_from(["", "^*", "^2"]))
    return out


@given(expressions())
def test_pretty_print_parse_identity(src):
    p = parse_expression(src, ["a", "b"])
    assert parse_expression(format_polynomial(p), ["a", "b"]) == p
