from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsyscalc.errors import DomainError
from lsyscalc.funcs import ConstImag, ExpTransport, Moebius, SpectralMeasure, WeylTransform, evaluate
from lsyscalc.livsic import (
    char_from_livsic,
    check_kappa,
    hypothesis_flip,
    livsic_from_char,
    m_from_s,
    s_from_m,
    transfer_from_char,
)
from lsyscalc.models import transport_livsic

kappas = st.floats(0, 0.999)
disk = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0, 0.999), st.floats(0, 2 * math.pi)
)


def test_check_kappa():
    assert check_kappa(0) == 0.0
    for bad in (-0.1, 1.0, 0.5j):
        with pytest.raises(DomainError):
            check_kappa(bad)


def test_s_m_inverse_pair():
    M = WeylTransform(SpectralMeasure(((1.0, 1.0), (-1.0, 1.0))))
    s = s_from_m(M)
    assert abs(evaluate(s, 1j)) < 1e-15
    for z in (0.3 + 0.2j, 2j, -1 + 4j):
        assert abs(evaluate(m_from_s(s), z) - evaluate(M, z)) < 1e-12


def test_involution_random_samples():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        kappa = rng.uniform(0, 0.999)
        r, t = rng.uniform(0, 0.999), rng.uniform(0, 2 * math.pi)
        v = r * complex(math.cos(t), math.sin(t))
        # a constant Livsic value is enough to test the pointwise map
        f = _const(v)
        back = evaluate(livsic_from_char(char_from_livsic(f, kappa), kappa), 1j)
        worst = max(worst, abs(back - v))
    assert worst < 1e-12


def _const(v: complex):
    # the constant v written as i + (v - i) over ConstImag(1)
    return Moebius(1, v - 1j, 0, 1, ConstImag(1.0))


@settings(max_examples=300, deadline=None)
@given(disk, kappas)
def test_characteristic_map_preserves_disk(v, kappa):
    S = evaluate(char_from_livsic(_const(v), kappa), 1j)
    assert abs(S) <= 1 + 1e-12


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0])
def test_characteristic_at_i_is_kappa(ell):
    s = transport_livsic(ell)
    assert abs(evaluate(s, 1j)) < 1e-15
    kappa = math.exp(-ell)
    assert abs(evaluate(char_from_livsic(s, kappa), 1j) - kappa) < 1e-14
    assert abs(evaluate(hypothesis_flip(char_from_livsic(s, kappa)), 1j) + kappa) < 1e-14


def test_transport_characteristic_closed_form():
    # (s - e^-l)/(e^-l s - 1) collapses to e^{i l z}
    ell = 1.3
    S = char_from_livsic(transport_livsic(ell), math.exp(-ell))
    for z in (0.4 + 0.5j, -2 + 0.1j, 1 - 0.7j):
        assert abs(evaluate(S, z) - np.exp(1j * ell * z)) < 1e-13


def test_transfer_from_char():
    S = ExpTransport(1.0)
    W = transfer_from_char(S, -1)
    assert evaluate(W, 2j) == pytest.approx(-1 / evaluate(S, 2j))
    with pytest.raises(DomainError):
        transfer_from_char(S, 2.0)
