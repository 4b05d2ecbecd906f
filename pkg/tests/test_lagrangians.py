from __future__ import annotations

import numpy as np
import pytest

from cewave.errors import BadParams, KindError, ParseError, UnknownModel
from cewave.jets import InvariantPoint
from cewave.lagrangians import (
    Kind,
    builtin,
    builtin_names,
    from_expression,
    kind_from_text,
    parse_lagrangian,
)


def test_parse_maxwell_matches_builtin():
    expr = from_expression("-a/2", "alpha")
    ref = builtin("maxwell")
    rng = np.random.default_rng(1)
    for a in rng.uniform(-2.0, 2.0, size=25):
        p = InvariantPoint.alpha(float(a))
        assert expr.jet_at(p).as_tuple() == ref.jet_at(p).as_tuple()


def test_parse_born_infeld_text():
    expr = from_expression("1 - sqrt(1 + a - b^2)", "alpha-beta")
    ref = builtin("born-infeld")
    rng = np.random.default_rng(2)
    for _ in range(25):
        a = float(rng.uniform(-0.4, 1.5))
        b = float(rng.uniform(-0.9, 0.9))
        p = InvariantPoint.alpha_beta(a, b)
        got = expr.jet_at(p).as_tuple()
        want = ref.jet_at(p).as_tuple()
        assert got == pytest.approx(want, rel=1e-14, abs=1e-15)


def test_parse_error_unknown_identifier_offset():
    with pytest.raises(ParseError) as err:
        parse_lagrangian("foo(a)", Kind.VectorAlpha)
    assert err.value.offset == 0


def test_parse_error_unbalanced_parens():
    with pytest.raises(ParseError):
        parse_lagrangian("(1 + a", Kind.VectorAlpha)


def test_parse_error_trailing_garbage():
    with pytest.raises(ParseError):
        parse_lagrangian("1 + a) ", Kind.VectorAlpha)


def test_parse_error_malformed_exponent():
    with pytest.raises(ParseError):
        parse_lagrangian("a^b", Kind.VectorAlphaBeta)
    with pytest.raises(ParseError):
        parse_lagrangian("a^0.3", Kind.VectorAlpha)


def test_half_integer_exponent_accepted():
    ast = parse_lagrangian("(1 + a)^0.5", Kind.VectorAlpha)
    assert ast.eval({"a": 0.44}) == pytest.approx(1.2)


def test_kind_error_for_disallowed_variable():
    with pytest.raises(KindError):
        parse_lagrangian("z + a", Kind.VectorAlpha)
    with pytest.raises(KindError):
        parse_lagrangian("b", Kind.Scalar)
    # and the same text is fine when the kind allows it
    parse_lagrangian("z", Kind.Scalar)


def test_precedence_unary_minus_vs_power():
    # ^ binds tighter than unary minus: -a^2 is -(a^2)
    ast = parse_lagrangian("-a^2", Kind.VectorAlpha)
    assert ast.eval({"a": 3.0}) == -9.0


def test_precedence_left_associativity():
    ast = parse_lagrangian("2 - 3 - 4", Kind.VectorAlpha)
    assert ast.eval({}) == -5.0
    ast = parse_lagrangian("24 / 4 / 2", Kind.VectorAlpha)
    assert ast.eval({}) == 3.0
    ast = parse_lagrangian("a^2^3", Kind.VectorAlpha)
    assert ast.eval({"a": 2.0}) == 64.0  # (2^2)^3


def test_negative_exponent_literal():
    ast = parse_lagrangian("a^-1", Kind.VectorAlpha)
    assert ast.eval({"a": 4.0}) == 0.25


def test_pretty_roundtrip_random_points():
    texts = [
        "1 - sqrt(1 + a - b^2)",
        "-a/2 + 0.1*a^2",
        "a/b",
        "-(a + b)*(a - b)/2",
        "2 - 3 - a",
        "a - (b - 1)",
        "1/2/a",
        "-a^2 + b^-1",
        "sqrt(1 + a^2)*b - a*0.5",
    ]
    rng = np.random.default_rng(3)
    for text in texts:
        ast = parse_lagrangian(text, Kind.VectorAlphaBeta)
        back = parse_lagrangian(ast.pretty(), Kind.VectorAlphaBeta)
        for _ in range(100):
            env = {"a": float(rng.uniform(0.1, 2.0)),
                   "b": float(rng.uniform(0.1, 1.0))}
            assert back.eval(env) == pytest.approx(ast.eval(env),
                                                   rel=1e-14, abs=1e-14)


def test_builtin_unknown_name():
    with pytest.raises(UnknownModel):
        builtin("not-a-model")


def test_builtin_bad_params():
    with pytest.raises(BadParams):
        builtin("sqrt-family", [1.0])
    with pytest.raises(BadParams):
        builtin("maxwell", [1.0])


def test_builtin_catalog_complete():
    assert builtin_names() == (
        "alpha-over-beta", "born-infeld", "maxwell", "perturbed-maxwell",
        "scalar-bi", "scalar-maxwell", "sqrt-family",
    )


def test_builtin_kinds_and_guards():
    bi = builtin("born-infeld")
    assert bi.kind is Kind.VectorAlphaBeta
    assert bi.guard_ok(InvariantPoint.alpha_beta(0.0, 0.0))
    assert not bi.guard_ok(InvariantPoint.alpha_beta(-2.0, 0.0))

    sq = builtin("sqrt-family", [1.0, 1.0, -2.0])
    assert sq.kind is Kind.VectorAlpha
    assert sq.guard_ok(InvariantPoint.alpha(0.3))
    assert not sq.guard_ok(InvariantPoint.alpha(0.6))

    ab = builtin("alpha-over-beta")
    assert not ab.guard_ok(InvariantPoint.alpha_beta(1.0, 0.0))


def test_sqrt_family_value():
    model = builtin("sqrt-family", [1.0, 1.0, -2.0])
    p = InvariantPoint.alpha(0.18)
    assert model.value_at(p) == pytest.approx(1.8)
    jet = model.jet_at(p)
    # d/da of (1 - 2a)^(1/2) = -1/sqrt(1-2a)
    assert jet.fa == pytest.approx(-1.0 / 0.8, rel=1e-13)


def test_perturbed_maxwell_value():
    model = builtin("perturbed-maxwell", [0.1])
    jet = model.jet_at(InvariantPoint.alpha(1.0))
    assert jet.f == pytest.approx(-0.4)
    assert jet.fa == pytest.approx(-0.5 + 0.2)
    assert jet.faa == pytest.approx(0.2)
    assert jet.faaa == 0.0


def test_vector_scalar_kind_jets_run_over_alpha_beta():
    model = from_expression("a*z + b*b", "vector-scalar")
    point = InvariantPoint.full(0.5, 0.25, 2.0)
    jet = model.jet_at(point)
    assert jet.fa == pytest.approx(2.0)   # d/da of a*z at z=2
    assert jet.fb == pytest.approx(0.5)   # d/db of b^2 at b=0.25
    assert model.jet_vars() == ("a", "b")
    zjet = model.jet_at(point, wrt=("z",))
    assert zjet.fa == pytest.approx(0.5)  # d/dz of a*z at a=0.5


def test_kind_from_text_roundtrip():
    for kind in Kind:
        assert kind_from_text(kind.value) is kind
    with pytest.raises(BadParams):
        kind_from_text("tensor")
