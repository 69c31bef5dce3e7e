from __future__ import annotations

import json
import math
import warnings

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from lsyscalc.errors import DomainError, PoleError, SchemaError
from lsyscalc.funcs import (
    ConstImag,
    DensityPanel,
    ExpTransport,
    FiniteMeasureWarning,
    Moebius,
    NegReciprocal,
    Power,
    Product,
    Scale,
    SpectralMeasure,
    WeylTransform,
    cayley_v_to_w,
    cayley_w_to_v,
    dumps_expr,
    evaluate,
    evaluate_many,
    expr_from_json,
    expr_to_json,
    herglotz_probe,
    impedance_from_transfer,
    loads_expr,
    normalized_mass,
    transfer_from_impedance,
    weyl_eval,
)

upper = st.builds(complex, st.floats(-5, 5), st.floats(0.05, 5))
lower = st.builds(complex, st.floats(-5, 5), st.floats(-5, -0.05))


def two_atoms():
    return SpectralMeasure(((1.0, 1.0), (-1.0, 1.0)))


def test_two_atom_partial_fractions():
    # 1/(1-z) + 1/(-1-z) with the real constants cancelling
    mu = two_atoms()
    for z in (2j, 0.3 + 0.7j, -1.5 - 0.2j):
        assert abs(weyl_eval(mu, z) - 2 * z / (1 - z * z)) < 1e-15


def test_normalized_mass():
    assert normalized_mass(two_atoms()) == 1.0
    mu = SpectralMeasure(((-2.0, 2.5), (2.0, 2.5)))
    assert normalized_mass(mu) == pytest.approx(1.0, abs=1e-15)


def test_single_atom_at_zero():
    mu = SpectralMeasure(((0.0, 1.0),))
    assert weyl_eval(mu, 1j) == pytest.approx(1j, abs=1e-16)
    assert weyl_eval(mu, 2j) == pytest.approx(0.5j, abs=1e-16)


def test_panel_against_mpmath_quadrature():
    dens = lambda t: 1.0 + 0.5 * t * t  # noqa: E731
    mu = SpectralMeasure(panels=(DensityPanel.from_function(-1.0, 1.0, 64, dens),))
    for z in (0.2 + 1.0j, -0.4 + 0.3j):
        zz = mpmath.mpc(z.real, z.imag)
        ref = mpmath.quad(lambda t: (1 / (t - zz) - t / (1 + t * t)) * (1 + t * t / 2), [-1, 1])
        assert abs(weyl_eval(mu, z) - complex(ref)) < 1e-13
    ref_mass = mpmath.quad(lambda t: (1 + t * t / 2) / (1 + t * t), [-1, 1])
    assert normalized_mass(mu) == pytest.approx(float(ref_mass), abs=1e-13)


def test_measure_validation():
    with pytest.raises(DomainError):
        SpectralMeasure(((0.0, -1.0),))
    with pytest.raises(DomainError):
        SpectralMeasure(((0.0, 1.0), (0.0, 2.0)))
    with pytest.raises(DomainError):
        DensityPanel(1.0, 0.0, (1.0,))
    with pytest.raises(DomainError):
        weyl_eval(two_atoms(), 1.0)


def test_finite_measure_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        SpectralMeasure(((0.0, 1.0),))
    assert any(issubclass(w.category, FiniteMeasureWarning) for w in caught)


@settings(max_examples=200, deadline=None)
@given(upper)
def test_weyl_is_herglotz(z):
    mu = SpectralMeasure(((-3.0, 0.5), (0.2, 2.0), (4.0, 7.0)))
    assert weyl_eval(mu, z).imag > 0
    # symmetry M(conj z) = conj M(z)
    assert abs(weyl_eval(mu, z.conjugate()) - weyl_eval(mu, z).conjugate()) < 1e-12


def test_leaves():
    assert evaluate(ConstImag(2.0), 5 + 1j) == 2j
    z = 0.3 - 0.4j
    assert evaluate(ExpTransport(1.5, -1), z) == pytest.approx(-complex(mpmath.exp(-1.5j * mpmath.mpc(0.3, -0.4))), abs=1e-15)
    assert abs(evaluate(ExpTransport(1.0), -1j)) == pytest.approx(math.exp(-1), rel=1e-15)


def test_moebius_and_composites():
    f = Moebius(1, 2, 3, 4, ConstImag(1.0))
    assert evaluate(f, 0.5j) == pytest.approx((1j + 2) / (3j + 4))
    assert evaluate(Scale(-2.0, ConstImag(1.0)), 1j) == -2j
    assert evaluate(NegReciprocal(ConstImag(2.0)), 1j) == pytest.approx(0.5j)
    assert evaluate(Power(ConstImag(1.0), 3), 1j) == pytest.approx(-1j)
    assert evaluate(Product((ConstImag(1.0), ConstImag(2.0))), 1j) == pytest.approx(-2)
    with pytest.raises(DomainError):
        Moebius(1, 2, 2, 4, ConstImag(1.0))
    with pytest.raises(DomainError):
        Power(ConstImag(1.0), 0)


def test_pole_reports_path():
    f = Scale(2.0, Moebius(1, 0, 1, -1, Moebius(1, 1 - 2j, 0, 1, ConstImag(2.0))))
    with pytest.raises(PoleError) as info:
        evaluate(f, 1j)
    assert info.value.path == ("scale", "inner")
    assert info.value.point == 1j


def test_projective_evaluation_through_infinity():
    # 1/(f - i) is infinite at f = i; an outer Moebius node maps infinity to a/c
    inner = Moebius(0, 1, 1, -1j, ConstImag(1.0))
    assert evaluate(Moebius(3, 1, 2, 5, inner), 0.5j) == pytest.approx(1.5)
    assert evaluate(NegReciprocal(inner), 0.5j) == 0
    with pytest.raises(PoleError):
        evaluate(Product((inner, ConstImag(0.0))), 0.5j)
    with pytest.raises(PoleError):
        evaluate(inner, 0.5j)


@settings(max_examples=200, deadline=None)
@given(st.one_of(upper, lower))
def test_cayley_pair_roundtrip(z):
    w = evaluate(ExpTransport(0.8), z)
    assert abs(cayley_v_to_w(cayley_w_to_v(w)) - w) < 1e-12 * max(1, abs(w))
    V = impedance_from_transfer(ExpTransport(0.8))
    assert abs(evaluate(transfer_from_impedance(V), z) - w) < 1e-12 * max(1, abs(w))


def test_cayley_pole():
    with pytest.raises(PoleError):
        cayley_w_to_v(-1)
    with pytest.raises(PoleError):
        cayley_v_to_w(1j)


def test_herglotz_probe():
    grid = [complex(x, y) for x in (-1, 0, 1) for y in (0.5, 2)]
    assert herglotz_probe(WeylTransform(two_atoms()), grid).ok
    rep = herglotz_probe(ConstImag(-1.0), grid)
    assert not rep.ok and rep.min_im == -1
    with pytest.raises(DomainError):
        herglotz_probe(ConstImag(1.0), [-1j])


leaves = st.one_of(
    st.builds(ConstImag, st.floats(-3, 3)),
    st.builds(ExpTransport, st.floats(0.1, 2), st.sampled_from([1, -1])),
    st.just(WeylTransform(SpectralMeasure(((0.5, 1.0),), (DensityPanel(-1.0, 1.0, (0.5, 1.0, 0.5)),)))),
)


def _extend(children):
    return st.one_of(
        st.builds(Moebius, st.just(1), st.floats(-2, 2), st.just(0.5), st.just(3), children),
        st.builds(Scale, st.floats(-2, 2), children),
        st.builds(NegReciprocal, children),
        st.builds(Power, children, st.integers(1, 3)),
        st.builds(lambda fs: Product(tuple(fs)), st.lists(children, min_size=1, max_size=3)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=6)


@settings(max_examples=150, deadline=None)
@given(exprs)
def test_json_roundtrip(f):
    text = dumps_expr(f)
    g = loads_expr(text)
    assert g == f
    assert dumps_expr(g) == text


def test_json_schema_errors():
    with pytest.raises(SchemaError):
        loads_expr("{")
    with pytest.raises(SchemaError):
        expr_from_json({"op": "const_imag", "c": 1})  # schema version missing
    with pytest.raises(SchemaError):
        expr_from_json({"schema": 1, "op": "nope"})
    with pytest.raises(SchemaError):
        expr_from_json({"schema": 1, "op": "moebius", "a": [1, 0]})
    doc = expr_to_json(Moebius(1j, 2, 0, 1, ConstImag(1.0)))
    assert doc["a"] == [0.0, 1.0]
    assert json.loads(json.dumps(doc)) == doc


def test_evaluate_many_and_call():
    f = ExpTransport(1.0)
    zs = [1j, -1j, 2 + 1j]
    assert list(evaluate_many(f, zs)) == [f(z) for z in zs]
