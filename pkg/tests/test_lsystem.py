from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsyscalc import donoghue as dg
from lsyscalc.errors import DomainError, NormalizationError, PoleError, SchemaError
from lsyscalc.funcs import ConstImag, ExpTransport, Power, Product, evaluate, impedance_from_transfer
from lsyscalc.lsystem import (
    Hypothesis,
    LSystem,
    attractor_diagnostics,
    coupled_hypothesis,
    couple,
    default_grid,
    make_lsystem,
    power,
    validate,
)
from lsyscalc.models import transport_livsic, transport_system

S, P = Hypothesis.SETUP, Hypothesis.SETUP_PRIME
lengths = st.floats(0.05, 3.0)


def test_coupling_table():
    assert coupled_hypothesis(S, S) is S
    assert coupled_hypothesis(P, P) is S
    assert coupled_hypothesis(S, P) is P
    assert coupled_hypothesis("setup1", "setup") is P


@settings(max_examples=50, deadline=None)
@given(lengths, lengths, st.sampled_from(list(Hypothesis)), st.sampled_from(list(Hypothesis)))
def test_coupling_invariants(l1, l2, h1, h2):
    t = couple(transport_system(l1, h1), transport_system(l2, h2))
    assert t.kappa == pytest.approx(math.exp(-l1) * math.exp(-l2), rel=1e-15)
    assert validate(t).ok
    sign = 1 if t.hypothesis is S else -1
    for z in default_grid():
        assert abs(evaluate(t.transfer, z) - sign * np.exp(-1j * (l1 + l2) * z)) < 1e-12 * max(1, abs(np.exp(-1j * (l1 + l2) * z)))


def test_coupling_is_associative_and_flat():
    a, b, c = (transport_system(x) for x in (0.2, 0.3, 0.5))
    left, right = couple(couple(a, b), c), couple(a, couple(b, c))
    assert isinstance(left.transfer, Product) and len(left.transfer.factors) == 3
    assert left.transfer == right.transfer
    assert left.kappa == pytest.approx(right.kappa, rel=1e-15)


def test_make_lsystem_matches_closed_form():
    for ell in (0.5, 1.0, 2.0):
        for h in Hypothesis:
            built = make_lsystem(transport_livsic(ell), math.exp(-ell), h)
            closed = transport_system(ell, h)
            assert built.expected_class() == closed.expected_class()
            for z in default_grid():
                w1, w2 = evaluate(built.transfer, z), evaluate(closed.transfer, z)
                assert abs(w1 - w2) < 1e-11 * max(1, abs(w2))


def test_make_lsystem_errors():
    with pytest.raises(NormalizationError):
        make_lsystem(ConstImag(0.5), 0.2)
    # s = 0 with kappa = 0 has an infinite transfer function
    with pytest.raises(PoleError):
        make_lsystem(ConstImag(0.0), 0.0)


def test_constant_livsic_function():
    # s = 0, kappa > 0: S = kappa, W = 1/kappa, V = i(1-kappa)/(1+kappa)
    t = make_lsystem(ConstImag(0.0), 0.5)
    assert evaluate(t.transfer, 3 + 1j) == pytest.approx(2.0)
    assert evaluate(t.impedance, 1j) == pytest.approx(1j / 3)


def test_validate_reports_failures():
    W = ExpTransport(1.0)
    wrong_class = LSystem(0.2, S, 1.0, W, impedance_from_transfer(W))
    rep = validate(wrong_class)
    assert not rep.ok and not rep.class_ok
    incoherent = LSystem(math.exp(-1), S, 1.0, W, ConstImag(0.5))
    rep = validate(incoherent)
    assert not rep.coherence_ok
    assert rep.to_json()["ok"] is False


def test_power():
    t = transport_system(0.5)
    assert power(t, 1) is t
    t3 = power(t, 3)
    assert isinstance(t3.transfer, Power)
    assert t3.kappa == pytest.approx(math.exp(-1.5), rel=1e-15)
    assert evaluate(t3.transfer, 0.3 - 1j) == pytest.approx(evaluate(transport_system(1.5).transfer, 0.3 - 1j), rel=1e-14)
    with pytest.raises(DomainError):
        power(t, 0)
    with pytest.raises(DomainError):
        power(transport_system(0.5, P), 2)


def test_kappa_power_decay():
    assert power(make_lsystem(ConstImag(0.0), 0.9), 50).kappa == pytest.approx(0.9 ** 50, rel=1e-15)


def test_attractor_closed_form():
    rep = attractor_diagnostics(transport_system(1.0), [-1j], [1j], 20)
    for r in rep.rows:
        assert r.sup_lower_transfer == pytest.approx(math.exp(-r.n), rel=1e-12)
        assert r.sup_upper_impedance_gap == pytest.approx(2 / (math.exp(r.n) + 1), rel=1e-12)
        assert r.kappa_n == pytest.approx(math.exp(-r.n), rel=1e-12)
    assert rep.kappa_monotone and rep.transfer_monotone and rep.impedance_monotone
    assert len(rep.to_json()["rows"]) == 20
    with pytest.raises(DomainError):
        attractor_diagnostics(transport_system(1.0), [1j], [1j], 3)


def test_json_roundtrip():
    t = couple(transport_system(0.4, P), transport_system(0.6))
    back = LSystem.loads(t.dumps())
    assert back == t
    assert back.dumps() == t.dumps()
    with pytest.raises(SchemaError):
        LSystem.loads("[]")
    with pytest.raises(SchemaError):
        LSystem.from_json({"kappa": 0.1})
    with pytest.raises(DomainError):
        LSystem(0.1, S, 2.0, ExpTransport(1.0), ConstImag(1.0))


def test_expected_class():
    assert transport_system(1.0).expected_class() == dg.CLASS_MK
    assert transport_system(1.0, P).expected_class() == dg.CLASS_MK_INV


def test_eta_follows_hypothesis():
    assert transport_system(1.0).eta == 1
    assert transport_system(1.0, P).eta == -1
    assert make_lsystem(transport_livsic(1.0), math.exp(-1), P).eta == -1
    assert couple(transport_system(0.4, P), transport_system(0.6, P)).eta == 1
    assert couple(transport_system(0.4), transport_system(0.6, P)).eta == -1
