"""Scalar analytic functions of a complex variable.

Spectral measures, their Weyl transforms, the Cayley pair between transfer
and impedance values, and a small expression tree that composes all of it.

Expressions are evaluated on the extended complex plane: an intermediate
Moebius node may pass through infinity (a pole of an inner transfer
function, say) as long as the final value is finite.  Only a pole of the
whole expression raises :class:`PoleError`.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, LsysError, PoleError, SchemaError

SCHEMA_VERSION = 1

# |den| < POLE_RTOL * (1 + |num|) counts as a vanishing denominator.
POLE_RTOL = 1e-13


class FiniteMeasureWarning(UserWarning):
    """The measure has finite total mass.

    Donoghue-class measures are infinite; a finite representation is only a
    stand-in, and class membership is judged through the normalized mass.
    """


def _cplx(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SchemaError(f"complex number must be [re, im], got {value!r}")
        value = complex(float(value[0]), float(value[1]))
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite complex value {z!r}", z)
    return z


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# Spectral measures


@dataclass(frozen=True)
class DensityPanel:
    """Gauss-Legendre panel on [a, b] carrying density samples at its nodes."""

    a: float
    b: float
    density: tuple[float, ...]
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        dens = tuple(float(d) for d in self.density)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise DomainError(f"panel needs finite a < b, got [{a}, {b}]")
        if not dens:
            raise DomainError("panel needs at least one node")
        if any(not math.isfinite(d) or d < 0 for d in dens):
            raise DomainError("panel density values must be finite and nonnegative")
        x, w = np.polynomial.legendre.leggauss(len(dens))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "density", dens)
        object.__setattr__(self, "nodes", 0.5 * (b - a) * x + 0.5 * (b + a))
        object.__setattr__(self, "weights", 0.5 * (b - a) * w)

    @property
    def n_nodes(self) -> int:
        return len(self.density)

    @classmethod
    def from_function(cls, a: float, b: float, n_nodes: int, density) -> "DensityPanel":
        """Sample ``density`` at the ``n_nodes`` Gauss-Legendre nodes of [a, b]."""
        x, _ = np.polynomial.legendre.leggauss(n_nodes)
        t = 0.5 * (b - a) * x + 0.5 * (b + a)
        return cls(a, b, tuple(float(density(ti)) for ti in t))

    def point_masses(self) -> list[tuple[float, float]]:
        return [
            (float(t), float(q) * d)
            for t, q, d in zip(self.nodes, self.weights, self.density)
            if d > 0
        ]


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms plus quadrature panels standing in for a Borel measure on the line."""

    atoms: tuple[tuple[float, float], ...] = ()
    panels: tuple[DensityPanel, ...] = ()

    def __post_init__(self):
        atoms = tuple((float(lam), float(w)) for lam, w in self.atoms)
        for lam, w in atoms:
            if not (math.isfinite(lam) and math.isfinite(w)):
                raise DomainError("atom location and weight must be finite")
            if w <= 0:
                raise DomainError(f"atom weight must be positive, got {w} at {lam}")
        locs = [lam for lam, _ in atoms]
        if len(set(locs)) != len(locs):
            raise DomainError("atom locations must be pairwise distinct")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "panels", tuple(self.panels))
        if normalized_mass(self) <= 0:
            raise DomainError("measure has zero normalized mass")
        warnings.warn(
            "finite measure representation; class membership is judged by normalized mass",
            FiniteMeasureWarning,
            stacklevel=3,
        )

    @property
    def is_atomic(self) -> bool:
        return not self.panels

    def point_masses(self) -> list[tuple[float, float]]:
        """Atoms followed by the quadrature nodes of every panel as (location, mass)."""
        pts = list(self.atoms)
        for panel in self.panels:
            pts.extend(panel.point_masses())
        return pts

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "atoms": [[lam, w] for lam, w in self.atoms],
            "panels": [
                {"a": p.a, "b": p.b, "nodes": p.n_nodes, "density": list(p.density)}
                for p in self.panels
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SpectralMeasure":
        _check_schema(doc, required=False)
        try:
            atoms = [(float(lam), float(w)) for lam, w in doc.get("atoms", [])]
            panels = []
            for p in doc.get("panels", []):
                dens = [float(d) for d in p["density"]]
                if int(p.get("nodes", len(dens))) != len(dens):
                    raise SchemaError("panel 'nodes' must equal the number of density values")
                panels.append(DensityPanel(float(p["a"]), float(p["b"]), tuple(dens)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, LsysError):
                raise
            raise SchemaError(f"malformed spectral measure: {exc}") from exc
        return cls(tuple(atoms), tuple(panels))


def _weyl_kernel(lam: float, z: complex) -> complex:
    # 1/(lam - z) - lam/(1 + lam^2), combined to avoid cancellation near z = i
    return (1 + lam * z) / ((lam - z) * (1 + lam * lam))


def weyl_eval(mu: SpectralMeasure, z: complex) -> complex:
    """Weyl transform of ``mu`` at ``z``, exact for purely atomic measures."""
    z = _cplx(z)
    if z.imag == 0:
        raise DomainError(f"Weyl transform is undefined on the real axis: z = {z}", z)
    re, im = [], []
    for lam, w in mu.point_masses():
        term = w * _weyl_kernel(lam, z)
        re.append(term.real)
        im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


def normalized_mass(mu: SpectralMeasure) -> float:
    return math.fsum(w / (1 + lam * lam) for lam, w in mu.point_masses())


# ---------------------------------------------------------------------------
# Expression tree


class FuncExpr:
    """Base of the expression variants; calling an expression evaluates it."""

    op: str = ""

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)


@dataclass(frozen=True)
class WeylTransform(FuncExpr):
    measure: SpectralMeasure
    op = "weyl"


@dataclass(frozen=True)
class ConstImag(FuncExpr):
    """z -> i*c."""

    c: float
    op = "const_imag"

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))


@dataclass(frozen=True)
class ExpTransport(FuncExpr):
    """z -> sign * exp(-i*ell*z)."""

    ell: float
    sign: int = 1
    op = "exp_transport"

    def __post_init__(self):
        if not (math.isfinite(self.ell) and self.ell > 0):
            raise DomainError(f"transport length must be positive, got {self.ell}")
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "sign", int(self.sign))


@dataclass(frozen=True)
class Moebius(FuncExpr):
    """z -> (a*f(z) + b) / (c*f(z) + d)."""

    a: complex
    b: complex
    c: complex
    d: complex
    inner: FuncExpr
    op = "moebius"

    def __post_init__(self):
        a, b, c, d = (_cplx(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if abs(det) <= 1e-14 * max(abs(a * d), abs(b * c), 1e-300):
            raise DomainError(f"degenerate Moebius map: ad - bc = {det}")
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


@dataclass(frozen=True)
class Product(FuncExpr):
    factors: tuple[FuncExpr, ...]
    op = "product"

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise DomainError("product needs at least one factor")
        object.__setattr__(self, "factors", factors)


@dataclass(frozen=True)
class Scale(FuncExpr):
    r: float
    inner: FuncExpr
    op = "scale"

    def __post_init__(self):
        if not math.isfinite(self.r):
            raise DomainError("scale factor must be finite")
        object.__setattr__(self, "r", float(self.r))


@dataclass(frozen=True)
class NegReciprocal(FuncExpr):
    inner: FuncExpr
    op = "neg_reciprocal"


@dataclass(frozen=True)
class Power(FuncExpr):
    inner: FuncExpr
    n: int
    op = "power"

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"power exponent must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


def _vanishes(den: complex, num: complex) -> bool:
    return abs(den) < POLE_RTOL * (1 + abs(num))


def _ev(f: FuncExpr, z: complex, path: tuple[str, ...]):
    """Return (value, pole_path); value None stands for the point at infinity."""
    if isinstance(f, WeylTransform):
        return weyl_eval(f.measure, z), None
    if isinstance(f, ConstImag):
        return complex(0.0, f.c), None
    if isinstance(f, ExpTransport):
        try:
            return f.sign * cmath.exp(-1j * f.ell * z), None
        except OverflowError:
            raise DomainError(f"exp(-i*{f.ell}*z) overflows at z = {z}", z) from None
    if isinstance(f, Moebius):
        v, pp = _ev(f.inner, z, path + ("inner",))
        if v is None:
            if f.c == 0:
                return None, pp
            return f.a / f.c, None
        num = f.a * v + f.b
        den = f.c * v + f.d
        if _vanishes(den, num):
            return None, path
        return num / den, None
    if isinstance(f, Product):
        vals = [_ev(g, z, path + (f"factors[{k}]",)) for k, g in enumerate(f.factors)]
        poles = [pp for v, pp in vals if v is None]
        finite = [v for v, _ in vals if v is not None]
        if poles:
            if any(v == 0 for v in finite):
                raise PoleError("0 * infinity in product", path, z)
            return None, poles[0]
        out = complex(1.0)
        for v in finite:
            out *= v
        return out, None
    if isinstance(f, Scale):
        v, pp = _ev(f.inner, z, path + ("inner",))
        if v is None:
            if f.r == 0:
                raise PoleError("0 * infinity in scale", path, z)
            return None, pp
        return f.r * v, None
    if isinstance(f, NegReciprocal):
        v, pp = _ev(f.inner, z, path + ("inner",))
        if v is None:
            return complex(0.0), None
        if _vanishes(v, -1):
            return None, path
        return -1 / v, None
    if isinstance(f, Power):
        v, pp = _ev(f.inner, z, path + ("inner",))
        if v is None:
            return None, pp
        return v ** f.n, None
    raise TypeError(f"not a FuncExpr: {f!r}")


def evaluate(f: FuncExpr, z: complex) -> complex:
    """Evaluate ``f`` at ``z``.

    Raises PoleError when the value is infinite, DomainError when a leaf is
    evaluated off its domain or the result is not a finite number.
    """
    z = _cplx(z)
    v, pp = _ev(f, z, (f.op,))
    if v is None:
        raise PoleError(f"pole at z = {z}", pp or (f.op,), z)
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise DomainError(f"non-finite value at z = {z}", z)
    return v


def evaluate_many(f: FuncExpr, zs: Iterable[complex]) -> np.ndarray:
    return np.array([evaluate(f, z) for z in zs], dtype=complex)


# ---------------------------------------------------------------------------
# Cayley pair (scalar J = 1)


def cayley_w_to_v(w: complex) -> complex:
    """Impedance value i(w - 1)/(w + 1) of a transfer value ``w``."""
    w = _cplx(w)
    if _vanishes(w + 1, w - 1):
        raise PoleError(f"Cayley transform has a pole at w = {w}", ("cayley",))
    return 1j * (w - 1) / (w + 1)


def cayley_v_to_w(v: complex) -> complex:
    """Transfer value (1 - iv)/(1 + iv); inverse of :func:`cayley_w_to_v`."""
    v = _cplx(v)
    num, den = 1 - 1j * v, 1 + 1j * v
    if _vanishes(den, num):
        raise PoleError(f"inverse Cayley transform has a pole at v = {v}", ("cayley",))
    return num / den


def impedance_from_transfer(w: FuncExpr) -> FuncExpr:
    return Moebius(1j, -1j, 1, 1, w)


def transfer_from_impedance(v: FuncExpr) -> FuncExpr:
    return Moebius(-1j, 1, 1j, 1, v)


# ---------------------------------------------------------------------------
# Herglotz probe


@dataclass(frozen=True)
class HerglotzReport:
    min_im: float
    argmin: complex
    n_points: int

    @property
    def ok(self) -> bool:
        return self.min_im >= 0


def herglotz_probe(f: FuncExpr, grid: Sequence[complex]) -> HerglotzReport:
    """Smallest imaginary part of ``f`` over an upper half-plane grid."""
    pts = [_cplx(z) for z in grid]
    if not pts:
        raise DomainError("empty probe grid")
    for k, z in enumerate(pts):
        if z.imag <= 0:
            raise DomainError(f"grid point {k} ({z}) is not in the upper half-plane", z)
    best, arg = math.inf, pts[0]
    for k, z in enumerate(pts):
        try:
            im = evaluate(f, z).imag
        except LsysError as exc:
            exc.grid_index = k
            exc.args = (f"{exc.args[0]} [grid index {k}]",) + exc.args[1:]
            raise
        if im < best:
            best, arg = im, z
    return HerglotzReport(best, arg, len(pts))


# ---------------------------------------------------------------------------
# JSON


def _check_schema(doc, required: bool = True) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"expected a JSON object, got {type(doc).__name__}")
    version = doc.get("schema")
    if version is None and not required:
        return
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {version!r}")


def _node_to_json(f: FuncExpr) -> dict:
    if isinstance(f, WeylTransform):
        m = f.measure.to_json()
        del m["schema"]
        return {"op": f.op, "measure": m}
    if isinstance(f, ConstImag):
        return {"op": f.op, "c": f.c}
    if isinstance(f, ExpTransport):
        return {"op": f.op, "ell": f.ell, "sign": f.sign}
    if isinstance(f, Moebius):
        return {
            "op": f.op,
            "a": _pair(f.a),
            "b": _pair(f.b),
            "c": _pair(f.c),
            "d": _pair(f.d),
            "inner": _node_to_json(f.inner),
        }
    if isinstance(f, Product):
        return {"op": f.op, "factors": [_node_to_json(g) for g in f.factors]}
    if isinstance(f, Scale):
        return {"op": f.op, "r": f.r, "inner": _node_to_json(f.inner)}
    if isinstance(f, NegReciprocal):
        return {"op": f.op, "inner": _node_to_json(f.inner)}
    if isinstance(f, Power):
        return {"op": f.op, "n": f.n, "inner": _node_to_json(f.inner)}
    raise TypeError(f"not a FuncExpr: {f!r}")


def expr_to_json(f: FuncExpr) -> dict:
    doc = {"schema": SCHEMA_VERSION}
    doc.update(_node_to_json(f))
    return doc


def _node_from_json(doc) -> FuncExpr:
    if not isinstance(doc, dict) or "op" not in doc:
        raise SchemaError(f"expression node must be an object with an 'op' field: {doc!r}")
    op = doc["op"]
    try:
        if op == "weyl":
            return WeylTransform(SpectralMeasure.from_json(doc["measure"]))
        if op == "const_imag":
            return ConstImag(float(doc["c"]))
        if op == "exp_transport":
            return ExpTransport(float(doc["ell"]), int(doc.get("sign", 1)))
        if op == "moebius":
            return Moebius(
                _cplx(doc["a"]), _cplx(doc["b"]), _cplx(doc["c"]), _cplx(doc["d"]),
                _node_from_json(doc["inner"]),
            )
        if op == "product":
            return Product(tuple(_node_from_json(g) for g in doc["factors"]))
        if op == "scale":
            return Scale(float(doc["r"]), _node_from_json(doc["inner"]))
        if op == "neg_reciprocal":
            return NegReciprocal(_node_from_json(doc["inner"]))
        if op == "power":
            return Power(_node_from_json(doc["inner"]), int(doc["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, LsysError):
            raise
        raise SchemaError(f"malformed '{op}' node: {exc}") from exc
    raise SchemaError(f"unknown expression op {op!r}")


def expr_from_json(doc: dict) -> FuncExpr:
    _check_schema(doc)
    return _node_from_json(doc)


def dumps_expr(f: FuncExpr) -> str:
    return json.dumps(expr_to_json(f), sort_keys=True)


def loads_expr(text: str) -> FuncExpr:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return expr_from_json(doc)
