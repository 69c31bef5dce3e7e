"""L-systems at the level of their transfer and impedance functions.

A minimal scalar L-system is determined up to bi-unitary equivalence by its
transfer function, so the records here carry W and V = i(W - 1)/(W + 1)
together with the von Neumann parameter and the reference-extension tag.
Coupling multiplies transfer functions and von Neumann parameters.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import donoghue
from .errors import ConsistencyError, DomainError, LsysError, NormalizationError, SchemaError
from .funcs import (
    FuncExpr,
    Power,
    Product,
    _cplx,
    cayley_w_to_v,
    evaluate,
    expr_from_json,
    expr_to_json,
    impedance_from_transfer,
)
from .livsic import char_from_livsic, check_kappa, transfer_from_char

COHERENCE_TOL = 1e-10
KAPPA_MATCH_TOL = 1e-8
NORMALIZATION_TOL = 1e-10


class Hypothesis(str, enum.Enum):
    """Which reference self-adjoint extension the system is built on.

    SETUP has g+ - g- in the domain of the quasi-kernel, SETUP_PRIME has
    g+ + g-.  Their characteristic functions differ by a sign.
    """

    SETUP = "setup"
    SETUP_PRIME = "setup1"


def default_grid(half_plane: str = "both") -> list[complex]:
    """16 points per half-plane on |Re z| <= 3, 0.25 <= |Im z| <= 4."""
    xs = (-3.0, -1.0, 1.0, 3.0)
    ys = (0.25, 1.5, 2.75, 4.0)
    upper = [complex(x, y) for y in ys for x in xs]
    lower = [z.conjugate() for z in upper]
    if half_plane == "upper":
        return upper
    if half_plane == "lower":
        return lower
    return upper + lower


@dataclass(frozen=True)
class LSystem:
    kappa: float
    hypothesis: Hypothesis
    eta: complex
    transfer: FuncExpr
    impedance: FuncExpr
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kappa", check_kappa(self.kappa))
        object.__setattr__(self, "hypothesis", Hypothesis(self.hypothesis))
        eta = _cplx(self.eta)
        if not math.isclose(abs(eta), 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError(f"eta must be unimodular, |eta| = {abs(eta)}")
        object.__setattr__(self, "eta", eta)

    def expected_class(self) -> str:
        if self.kappa == 0:
            return donoghue.CLASS_M
        if self.hypothesis is Hypothesis.SETUP:
            return donoghue.CLASS_MK
        return donoghue.CLASS_MK_INV

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "hypothesis": self.hypothesis.value,
            "eta": [self.eta.real, self.eta.imag],
            "transfer": expr_to_json(self.transfer),
            "impedance": expr_to_json(self.impedance),
            "label": self.label,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LSystem":
        if not isinstance(doc, dict):
            raise SchemaError("L-system document must be a JSON object")
        try:
            return cls(
                kappa=float(doc["kappa"]),
                hypothesis=Hypothesis(doc["hypothesis"]),
                eta=_cplx(doc.get("eta", [1.0, 0.0])),
                transfer=expr_from_json(doc["transfer"]),
                impedance=expr_from_json(doc["impedance"]),
                label=str(doc.get("label", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, LsysError):
                raise
            raise SchemaError(f"malformed L-system: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "LSystem":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
        return cls.from_json(doc)


def _system(kappa, hypothesis, eta, transfer, label) -> LSystem:
    return LSystem(kappa, hypothesis, eta, transfer, impedance_from_transfer(transfer), label)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    coherence_residual: float = 0.0
    coherence_ok: bool = True
    class_tag: donoghue.DonoghueClassTag | None = None
    expected_class: str = ""
    class_ok: bool = True
    max_lower_modulus: float | None = None
    contractive_ok: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.coherence_ok and self.class_ok and self.contractive_ok and not self.failures

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "coherence_residual": self.coherence_residual,
            "class": None if self.class_tag is None else self.class_tag.to_json(),
            "expected_class": self.expected_class,
            "max_lower_modulus": self.max_lower_modulus,
            "failures": list(self.failures),
        }


def _check_class(theta: LSystem, report: ValidationReport, tol: float) -> None:
    tag = donoghue.classify(theta.impedance, tol)
    report.class_tag = tag
    report.expected_class = theta.expected_class()
    if tag.kind != report.expected_class:
        report.class_ok = False
        report.failures.append(f"impedance is {tag}, expected {report.expected_class}")
    elif abs(tag.kappa - theta.kappa) > KAPPA_MATCH_TOL:
        report.class_ok = False
        report.failures.append(f"impedance kappa {tag.kappa!r} != system kappa {theta.kappa!r}")


def _check_coherence(theta: LSystem, grid: Sequence[complex], report: ValidationReport) -> None:
    worst = 0.0
    for z in grid:
        v = evaluate(theta.impedance, z)
        w = evaluate(theta.transfer, z)
        worst = max(worst, abs(v - cayley_w_to_v(w)) / (1 + abs(v)))
    report.coherence_residual = worst
    if worst >= COHERENCE_TOL:
        report.coherence_ok = False
        report.failures.append(f"Cayley coherence residual {worst:.3g} >= {COHERENCE_TOL:g}")


def validate(theta: LSystem, grid: Sequence[complex] | None = None, tol: float = donoghue.DEFAULT_TOL) -> ValidationReport:
    """Check Cayley coherence, the class/hypothesis match and |W| < 1 on C-.

    Evaluation failures end up in ``failures`` instead of propagating.  The
    contractivity check uses the analytic continuation of the stored
    transfer expression, which is only the true lower half-plane transfer
    function when that continuation exists (the transport family, say).
    """
    grid = list(default_grid() if grid is None else grid)
    report = ValidationReport()
    try:
        _check_coherence(theta, grid, report)
    except LsysError as exc:
        report.coherence_ok = False
        report.failures.append(f"coherence: {exc}")
    try:
        _check_class(theta, report, tol)
    except LsysError as exc:
        report.class_ok = False
        report.failures.append(f"classification: {exc}")
    lower = [z for z in grid if complex(z).imag < 0]
    if lower:
        try:
            report.max_lower_modulus = max(abs(evaluate(theta.transfer, z)) for z in lower)
            report.contractive_ok = report.max_lower_modulus < 1
            if not report.contractive_ok:
                report.failures.append(f"|W| reaches {report.max_lower_modulus:.6g} on the lower half-plane")
        except LsysError as exc:
            report.contractive_ok = False
            report.failures.append(f"contractivity: {exc}")
    return report


# ---------------------------------------------------------------------------
# construction and the coupling calculus


def make_lsystem(s: FuncExpr, kappa: float, hypothesis: Hypothesis | str = Hypothesis.SETUP, label: str = "") -> LSystem:
    """Build the L-system of a prime triple from its Livsic function.

    ``s`` must vanish at i.  Raises PoleError when the resulting transfer
    function is infinite (s identically zero with kappa = 0, for example)
    and ConsistencyError if the impedance fails the class test.
    """
    kappa = check_kappa(kappa)
    hypothesis = Hypothesis(hypothesis)
    s_i = evaluate(s, 1j)
    if abs(s_i) > NORMALIZATION_TOL:
        raise NormalizationError(f"Livsic function must vanish at i, s(i) = {s_i}", s_i)
    # W = eta/S with eta = -1 for the primed extension, i.e. 1/S for the flipped S
    eta = 1.0 if hypothesis is Hypothesis.SETUP else -1.0
    theta = _system(kappa, hypothesis, eta, transfer_from_char(char_from_livsic(s, kappa), eta), label)
    report = ValidationReport()
    _check_coherence(theta, default_grid(), report)
    _check_class(theta, report, donoghue.DEFAULT_TOL)
    if not (report.coherence_ok and report.class_ok):
        raise ConsistencyError("; ".join(report.failures))
    return theta


_COUPLING_TABLE = {
    (Hypothesis.SETUP, Hypothesis.SETUP): Hypothesis.SETUP,
    (Hypothesis.SETUP_PRIME, Hypothesis.SETUP_PRIME): Hypothesis.SETUP,
    (Hypothesis.SETUP, Hypothesis.SETUP_PRIME): Hypothesis.SETUP_PRIME,
    (Hypothesis.SETUP_PRIME, Hypothesis.SETUP): Hypothesis.SETUP_PRIME,
}


def coupled_hypothesis(h1: Hypothesis | str, h2: Hypothesis | str) -> Hypothesis:
    return _COUPLING_TABLE[Hypothesis(h1), Hypothesis(h2)]


def _factors(w: FuncExpr) -> tuple[FuncExpr, ...]:
    return w.factors if isinstance(w, Product) else (w,)


def couple(theta1: LSystem, theta2: LSystem) -> LSystem:
    """Coupling theta1 . theta2.

    Transfer functions multiply, so do the von Neumann parameters and the
    unimodular factors; the reference extension follows the sign table
    (two primed systems give an unprimed one, a mixed pair a primed one).
    """
    return _system(
        theta1.kappa * theta2.kappa,
        coupled_hypothesis(theta1.hypothesis, theta2.hypothesis),
        theta1.eta * theta2.eta,
        Product(_factors(theta1.transfer) + _factors(theta2.transfer)),
        f"({theta1.label or 'theta1'})*({theta2.label or 'theta2'})",
    )


def power(theta: LSystem, n: int) -> LSystem:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"power needs a positive integer, got {n}")
    if theta.hypothesis is not Hypothesis.SETUP:
        raise DomainError("powers are defined for systems built on the unprimed reference extension")
    n = int(n)
    if n == 1:
        return theta
    return _system(
        theta.kappa ** n,
        Hypothesis.SETUP,
        theta.eta ** n,
        Power(theta.transfer, n),
        f"({theta.label or 'theta'})^{n}",
    )


# ---------------------------------------------------------------------------
# limit coupling


@dataclass(frozen=True)
class AttractorRow:
    n: int
    kappa_n: float
    sup_lower_transfer: float
    sup_upper_impedance_gap: float


@dataclass(frozen=True)
class AttractorReport:
    rows: tuple[AttractorRow, ...]

    @property
    def transfer_monotone(self) -> bool:
        vals = [r.sup_lower_transfer for r in self.rows]
        return all(b < a for a, b in zip(vals, vals[1:]))

    @property
    def kappa_monotone(self) -> bool:
        vals = [r.kappa_n for r in self.rows]
        return all(b < a or a == 0 for a, b in zip(vals, vals[1:]))

    @property
    def impedance_monotone(self) -> bool:
        vals = [r.sup_upper_impedance_gap for r in self.rows]
        return all(b < a for a, b in zip(vals, vals[1:]))

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "n": r.n,
                    "kappa_n": r.kappa_n,
                    "sup_lower_abs_W_n": r.sup_lower_transfer,
                    "sup_upper_abs_V_n_minus_i": r.sup_upper_impedance_gap,
                }
                for r in self.rows
            ],
            "transfer_monotone": self.transfer_monotone,
            "kappa_monotone": self.kappa_monotone,
            "impedance_monotone": self.impedance_monotone,
        }


def attractor_diagnostics(
    theta: LSystem,
    grid_lower: Sequence[complex],
    grid_upper: Sequence[complex],
    n_max: int,
) -> AttractorReport:
    """Decay of the powers of ``theta`` toward the system attractor.

    Row n holds kappa^n, sup |W|^n over ``grid_lower`` and sup |V_n - i| over
    ``grid_upper`` with V_n the impedance of W^n.  The gap is computed as
    2/|W^n + 1|, which equals |V_n - i| exactly and keeps full relative
    precision as it tends to zero.
    """
    lower = [_cplx(z) for z in grid_lower]
    upper = [_cplx(z) for z in grid_upper]
    for z in lower:
        if z.imag >= 0:
            raise DomainError(f"{z} is not in the lower half-plane", z)
    for z in upper:
        if z.imag <= 0:
            raise DomainError(f"{z} is not in the upper half-plane", z)
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    w_lower = [abs(evaluate(theta.transfer, z)) for z in lower]
    w_upper = [evaluate(theta.transfer, z) for z in upper]
    rows = []
    for n in range(1, n_max + 1):
        sup_w = max((m ** n for m in w_lower), default=0.0)
        gaps = []
        for w in w_upper:
            try:
                wn = w ** n
                gaps.append(2.0 / abs(wn + 1))
            except OverflowError:
                gaps.append(0.0)
        rows.append(AttractorRow(n, theta.kappa ** n, sup_w, max(gaps, default=0.0)))
    return AttractorReport(tuple(rows))
