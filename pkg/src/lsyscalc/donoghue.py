"""Donoghue classes M, M_kappa and M_kappa^{-1}.

Membership is decided from the value at z = i: a class function has no
constant term, so its value there is purely imaginary, and the imaginary
part fixes kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from scipy.optimize import brentq

from .errors import ClassError, DomainError
from .funcs import FuncExpr, Moebius, NegReciprocal, Scale, evaluate

DEFAULT_TOL = 1e-9

CLASS_M = "M"
CLASS_MK = "Mk"
CLASS_MK_INV = "MkInv"
NOT_DONOGHUE = "None"


@dataclass(frozen=True)
class DonoghueClassTag:
    kind: str
    kappa: float | None = None
    reason: str = ""
    value_at_i: complex | None = None
    tol: float = DEFAULT_TOL
    constant: bool | None = None

    def __post_init__(self):
        if self.kind in (CLASS_MK, CLASS_MK_INV):
            if self.kappa is None or not 0 < self.kappa < 1:
                raise DomainError(f"kappa must lie in (0, 1) for class {self.kind}")
        elif self.kind == CLASS_M:
            object.__setattr__(self, "kappa", 0.0)
        elif self.kind != NOT_DONOGHUE:
            raise DomainError(f"unknown class kind {self.kind!r}")

    @property
    def is_donoghue(self) -> bool:
        return self.kind != NOT_DONOGHUE

    def to_json(self) -> dict:
        doc = {
            "class": self.kind,
            "kappa": self.kappa,
            "value_at_i": None if self.value_at_i is None else [self.value_at_i.real, self.value_at_i.imag],
            "tol": self.tol,
        }
        if self.reason:
            doc["reason"] = self.reason
        if self.constant is not None:
            doc["constant"] = self.constant
        return doc

    def __str__(self):
        if self.kind == NOT_DONOGHUE:
            return f"not Donoghue ({self.reason})"
        if self.kind == CLASS_M:
            return "M"
        return f"{self.kind}(kappa={self.kappa:.12g})"


def mass_decreasing_scale(kappa: float) -> float:
    """(1 - kappa)/(1 + kappa): normalized mass of class M_kappa."""
    return (1 - kappa) / (1 + kappa)


def mass_increasing_scale(kappa: float) -> float:
    """(1 + kappa)/(1 - kappa): normalized mass of class M_kappa^{-1}."""
    return (1 + kappa) / (1 - kappa)


def classify_at_i(v_at_i: complex, tol: float = DEFAULT_TOL) -> DonoghueClassTag:
    """Classify from the value at i.

    Ties resolve toward the weaker claim: Im v == 0 is not Donoghue and
    |Im v - 1| == tol is still class M.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    v = complex(v_at_i)
    tag = dict(value_at_i=v, tol=tol)
    if abs(v.real) > tol * abs(v):
        return DonoghueClassTag(NOT_DONOGHUE, reason="nonzero real part at i", **tag)
    m = v.imag
    if m <= 0:
        return DonoghueClassTag(NOT_DONOGHUE, reason="not Herglotz at i", **tag)
    if abs(m - 1) <= tol:
        return DonoghueClassTag(CLASS_M, **tag)
    if m < 1:
        return DonoghueClassTag(CLASS_MK, kappa=(1 - m) / (1 + m), **tag)
    return DonoghueClassTag(CLASS_MK_INV, kappa=(m - 1) / (m + 1), **tag)


def default_probe_grid() -> list[complex]:
    return [complex(x, y) for x in (-2.0, -0.5, 0.7, 2.5) for y in (0.3, 1.3, 3.1)]


def is_identically_constant(f: FuncExpr, grid: Sequence[complex] | None = None, tol: float = DEFAULT_TOL) -> bool:
    """Heuristic: all values on a C+ probe grid agree with the value at i."""
    ref = evaluate(f, 1j)
    scale = max(1.0, abs(ref))
    return all(abs(evaluate(f, z) - ref) <= tol * scale for z in (grid or default_probe_grid()))


def classify(f: FuncExpr, tol: float = DEFAULT_TOL, probe_constant: bool = False) -> DonoghueClassTag:
    tag = classify_at_i(evaluate(f, 1j), tol)
    if probe_constant:
        tag = replace(tag, constant=is_identically_constant(f, tol=tol))
    return tag


def neg_reciprocal(f: FuncExpr) -> FuncExpr:
    return NegReciprocal(f)


def scale_to_class(base: FuncExpr, kappa: float, which: str, tol: float = DEFAULT_TOL) -> FuncExpr:
    """Scale a class-M function into M_kappa (``which="Mk"``) or M_kappa^{-1} (``"MkInv"``)."""
    if not 0 <= kappa < 1:
        raise DomainError(f"kappa must lie in [0, 1), got {kappa}")
    if which not in (CLASS_MK, CLASS_MK_INV):
        raise DomainError(f"target class must be {CLASS_MK!r} or {CLASS_MK_INV!r}, got {which!r}")
    tag = classify(base, tol)
    if tag.kind != CLASS_M:
        raise ClassError(f"base function must be in class M, found {tag}")
    if kappa == 0:
        return base
    factor = mass_decreasing_scale(kappa) if which == CLASS_MK else mass_increasing_scale(kappa)
    return Scale(factor, base)


def alpha_transform(f: FuncExpr, alpha: float) -> FuncExpr:
    """(cos a + sin a * f)/(sin a - cos a * f), kept as a Moebius node."""
    if not 0 <= alpha < math.pi:
        raise DomainError(f"alpha must lie in [0, pi), got {alpha}")
    s, c = math.sin(alpha), math.cos(alpha)
    return Moebius(s, c, -c, s, f)


def q_alpha(delta: float, alpha: float) -> float:
    """Constant term of the alpha-transform of a function with value i*delta at i."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    s, c = math.sin(alpha), math.cos(alpha)
    return c * s * (1 - delta * delta) / (s * s + c * c * delta * delta)


def alpha_value_at_i(delta: float, alpha: float) -> complex:
    s, c = math.sin(alpha), math.cos(alpha)
    den = s * s + c * c * delta * delta
    return complex(q_alpha(delta, alpha), delta / den)


def q_alpha_zeros(delta: float, xtol: float = 1e-12, n_scan: int = 4096) -> list[float]:
    """Zeros of ``alpha -> q_alpha(delta, alpha)`` on [0, pi).

    Scans for sign changes and refines each with Brent's method.  Returns
    an empty list for delta == 1, where the function vanishes identically.
    """
    if delta == 1:
        return []
    step = math.pi / n_scan
    grid = [k * step for k in range(n_scan)] + [math.pi - 1e-15]
    vals = [q_alpha(delta, a) for a in grid]
    roots = []
    for k, (a, fa) in enumerate(zip(grid, vals)):
        if fa == 0:
            roots.append(a)
            continue
        if k + 1 < len(grid):
            b, fb = grid[k + 1], vals[k + 1]
            if fb != 0 and (fa < 0) != (fb < 0):
                roots.append(brentq(lambda t: q_alpha(delta, t), a, b, xtol=xtol))
    return roots
