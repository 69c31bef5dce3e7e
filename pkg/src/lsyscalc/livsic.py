"""Weyl, Livsic, characteristic and transfer functions as expression maps."""

from __future__ import annotations

import math

from .errors import DomainError
from .funcs import FuncExpr, Moebius, Scale


def check_kappa(kappa: float) -> float:
    """Validate a von Neumann parameter; only real values in [0, 1) are supported."""
    if isinstance(kappa, complex):
        raise DomainError("complex kappa is not supported; rotate the basis to make it real")
    kappa = float(kappa)
    if not 0 <= kappa < 1:
        raise DomainError(f"von Neumann parameter must lie in [0, 1), got {kappa}")
    return kappa


def s_from_m(m: FuncExpr) -> FuncExpr:
    """Livsic function (M - i)/(M + i)."""
    return Moebius(1, -1j, 1, 1j, m)


def m_from_s(s: FuncExpr) -> FuncExpr:
    """Weyl-Titchmarsh function -i(s + 1)/(s - 1)."""
    return Moebius(-1j, -1j, 1, -1, s)


def char_from_livsic(s: FuncExpr, kappa: float) -> FuncExpr:
    """Characteristic function (s - kappa)/(kappa*s - 1)."""
    kappa = check_kappa(kappa)
    return Moebius(1, -kappa, kappa, -1, s)


def livsic_from_char(S: FuncExpr, kappa: float) -> FuncExpr:
    # the map is an involution for real kappa
    return char_from_livsic(S, kappa)


def hypothesis_flip(S: FuncExpr) -> FuncExpr:
    """Switch a characteristic function between the two reference extensions."""
    return Scale(-1.0, S)


def transfer_from_char(S: FuncExpr, eta: complex = 1) -> FuncExpr:
    """Transfer function eta / S for a unimodular ``eta``."""
    eta = complex(eta)
    if not math.isclose(abs(eta), 1.0, rel_tol=0, abs_tol=1e-12):
        raise DomainError(f"eta must be unimodular, |eta| = {abs(eta)}")
    return Moebius(0, eta, 1, 0, S)
