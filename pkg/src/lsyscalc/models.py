"""Concrete models: transport systems on an interval, the scalar
(*)-extension matrices, coupling geometry, and the discrete functional model.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, NormalizationError, SpectralPointError
from .funcs import (
    ConstImag,
    ExpTransport,
    FiniteMeasureWarning,
    FuncExpr,
    Moebius,
    NegReciprocal,
    Product,
    SpectralMeasure,
    WeylTransform,
    _cplx,
    _vanishes,
    impedance_from_transfer,
    normalized_mass,
    weyl_eval,
)
from .livsic import char_from_livsic, check_kappa, hypothesis_flip, s_from_m
from .lsystem import Hypothesis, LSystem

MASS_TOL = 1e-10


# ---------------------------------------------------------------------------
# transport on [0, ell]


@dataclass(frozen=True)
class TransportParams:
    ell: float
    gamma: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.ell) and self.ell > 0):
            raise DomainError(f"interval length must be positive, got {self.ell}")
        if self.gamma is not None and not 0 < self.gamma < self.ell:
            raise DomainError(f"split point must satisfy 0 < gamma < ell, got {self.gamma}")


def transport_livsic(ell: float) -> FuncExpr:
    """s(z) = (e^ell - e^{-i ell z}) / (1 - e^ell e^{-i ell z})."""
    E = math.exp(ell)
    return Moebius(-1, E, -E, 1, ExpTransport(ell, 1))


def transport_characteristic(ell: float, hypothesis: Hypothesis | str = Hypothesis.SETUP) -> FuncExpr:
    """+-e^{i ell z}, written as -1/(-e^{-i ell z})."""
    S = NegReciprocal(ExpTransport(ell, -1))
    return S if Hypothesis(hypothesis) is Hypothesis.SETUP else hypothesis_flip(S)


def transport_system(p: TransportParams | float, hypothesis: Hypothesis | str = Hypothesis.SETUP) -> LSystem:
    """L-system of i d/dx on [0, ell]: kappa = e^{-ell}, W = +-e^{-i ell z}."""
    if not isinstance(p, TransportParams):
        p = TransportParams(float(p))
    hypothesis = Hypothesis(hypothesis)
    sign = 1 if hypothesis is Hypothesis.SETUP else -1
    W = ExpTransport(p.ell, sign)
    tag = "" if sign == 1 else "'"
    return LSystem(math.exp(-p.ell), hypothesis, float(sign), W, impedance_from_transfer(W), f"transport{tag}({p.ell:g})")


def example3_livsic(ell: float, gamma: float) -> FuncExpr:
    """Livsic function of the coupling of a kappa = 0 piece on [0, gamma]
    with a transport piece on [gamma, ell]:

        s(z) = e^{i z ell} (e^{-i z gamma} - e^gamma) / (e^gamma - e^{i z gamma})

    It vanishes at i and tends to the transport Livsic function of length
    ell as gamma -> ell.
    """
    TransportParams(ell, gamma)
    Eg = math.exp(gamma)
    # e^{i z ell} = -1/(-e^{-i z ell}); the fraction in u = e^{-i z gamma} is (u - Eg)/(Eg - 1/u) = (u^2 - Eg u)/(Eg u - 1)
    u = ExpTransport(gamma, 1)
    frac = Moebius(1, -Eg, Eg, -1, u)
    return Product((NegReciprocal(ExpTransport(ell, -1)), u, frac))


def example3_livsic_as_printed(ell: float, gamma: float) -> FuncExpr:
    """e^{i z ell} (e^{-i z ell} - e^gamma)/(e^gamma - e^{i z ell}), letter for letter.

    Kept for comparison; it does not vanish at i, so it is not a normalized
    Livsic function.  See :func:`example3_livsic`.
    """
    TransportParams(ell, gamma)
    Eg = math.exp(gamma)
    # with v = e^{i z ell}: v (1/v - Eg)/(Eg - v) = (1 - Eg v)/(Eg - v)
    v = NegReciprocal(ExpTransport(ell, -1))
    return Moebius(-Eg, 1, -1, Eg, v)


def example3_factor_oracle(ell: float, gamma: float) -> FuncExpr:
    """s1 * S2: transport Livsic function on [0, gamma] times the
    characteristic function e^{i (ell - gamma) z} of the second piece."""
    return Product((transport_livsic(gamma), transport_characteristic(ell - gamma)))


def example3_pieces(ell: float, gamma: float) -> tuple[LSystem, LSystem]:
    """The two systems coupled in the absorption example: a kappa = 0 system
    with Livsic function s1 and the transport system on [gamma, ell]."""
    from .lsystem import make_lsystem

    TransportParams(ell, gamma)
    theta1 = make_lsystem(transport_livsic(gamma), 0.0, Hypothesis.SETUP, f"kappa0({gamma:g})")
    theta2 = transport_system(ell - gamma, Hypothesis.SETUP)
    return theta1, theta2


@dataclass(frozen=True)
class AttractorModel:
    """Closed-form invariants of the system attractor: kappa = 0, s = 0,
    M = V = i on C+, V = -i and W = 0 on C-."""

    kappa: float = 0.0
    livsic: FuncExpr = ConstImag(0.0)
    weyl: FuncExpr = ConstImag(1.0)
    impedance_upper: FuncExpr = ConstImag(1.0)
    impedance_lower: FuncExpr = ConstImag(-1.0)
    transfer_lower: FuncExpr = ConstImag(0.0)


attractor_model = AttractorModel()


# ---------------------------------------------------------------------------
# coupling geometry


@dataclass(frozen=True)
class CouplingGeometry:
    tan_alpha: float
    alpha: float
    beta: float
    sin_alpha: float
    cos_alpha: float
    sin_beta: float
    cos_beta: float

    @property
    def G_plus_coeffs(self) -> tuple[float, float]:
        """Coefficients of G+ on the unit deficiency vectors (g+^1, g+^2)."""
        return (self.cos_alpha, -self.sin_alpha)

    @property
    def G_minus_coeffs(self) -> tuple[float, float]:
        return (self.cos_beta, -self.sin_beta)


def coupling_geometry(kappa1: float, kappa2: float) -> CouplingGeometry:
    k1, k2 = check_kappa(kappa1), check_kappa(kappa2)
    if k2 == 0:
        # degenerate branch; alpha -> pi/2 as kappa2 -> 0
        sa, ca = 1.0, 0.0
        sb, cb = k1, math.sqrt(1 - k1 * k1)
        tan_alpha = math.inf
    else:
        tan_alpha = math.sqrt((1 - k2 * k2) / (1 - k1 * k1)) / k2
        # closed forms of cos and sin of atan(tan_alpha); cos(alpha)/kappa2 stays <= 1 exactly
        r = 1 - k1 * k1 * k2 * k2
        ca = k2 * math.sqrt((1 - k1 * k1) / r)
        sa = math.sqrt((1 - k2 * k2) / r)
        sb = k1 * sa
        cb = math.sqrt((1 - k1 * k1) / r)
    return CouplingGeometry(
        tan_alpha=tan_alpha,
        alpha=math.atan2(sa, ca),
        beta=math.atan2(sb, cb),
        sin_alpha=sa,
        cos_alpha=ca,
        sin_beta=sb,
        cos_beta=cb,
    )


def example3_deficiency_fixture(ell: float, gamma: float) -> dict[str, tuple[float, float]]:
    """Literal component coefficients of G+ (times e^t) and G- (times e^{-t})
    on [0, gamma] and [gamma, ell] for the absorption example."""
    TransportParams(ell, gamma)
    r = math.sqrt(2) / math.sqrt(math.exp(2 * gamma) - 1)
    return {
        "G_plus": (r * math.exp(gamma - ell), -math.sqrt(2) * math.exp(-ell)),
        "G_minus": (r * math.exp(gamma), 0.0),
    }


# ---------------------------------------------------------------------------
# (*)-extension matrices, deficiency indices (1, 1)


@dataclass(frozen=True)
class StarExtensionMatrices:
    H: complex
    S_A: np.ndarray
    S_Astar: np.ndarray
    U: int
    kappa: float


@dataclass(frozen=True)
class ImPartDecomposition:
    weight: float
    matrix: np.ndarray
    real_part: np.ndarray
    channel_coefficient: float

    @property
    def normalized_channel_coefficient(self) -> float:
        """Coefficient of the unit vector (phi -+ psi)/sqrt(2) in the channel vector."""
        return math.sqrt(2 * self.weight)


def star_extension_matrices(kappa: float, U: int) -> StarExtensionMatrices:
    kappa = check_kappa(kappa)
    if U not in (1, -1):
        raise DomainError(f"U must be +1 or -1, got {U}")
    K = kappa
    H = -1j / (1 - K * K) * ((1 - K * U) / (1 - U * K) - K * U) * U
    expected = -1j / (1 + K) if U == 1 else 1j / (1 - K)
    if abs(H - expected) > 1e-14 * abs(expected):
        raise ConsistencyError(f"H = {H} differs from the closed form {expected}")
    Hc = H.conjugate()
    S_A = np.array([[H * K, H], [K * (H * K + 1j), 1j + K * H]], dtype=complex)
    S_Astar = np.array([[K * Hc - 1j, (K * Hc - 1j) * K], [Hc, Hc * K]], dtype=complex)
    return StarExtensionMatrices(H, S_A, S_Astar, U, kappa)


_IM_PATTERN = {1: np.array([[1.0, -1.0], [-1.0, 1.0]]), -1: np.array([[1.0, 1.0], [1.0, 1.0]])}
_RE_PATTERN = {
    1: 0.5j * np.array([[-1, -1], [1, 1]], dtype=complex),
    -1: 0.5j * np.array([[-1, 1], [-1, 1]], dtype=complex),
}


def im_part_decomposition(m: StarExtensionMatrices) -> ImPartDecomposition:
    """Split (S_A - S_A*)/(2i) into a weight times a fixed rank-one pattern."""
    im_part = (m.S_A - m.S_Astar) / 2j
    re_part = (m.S_A + m.S_Astar) / 2
    k = m.kappa
    weight = (1 - k) / (2 + 2 * k) if m.U == 1 else (1 + k) / (2 - 2 * k)
    pattern = _IM_PATTERN[m.U]
    if np.max(np.abs(im_part - weight * pattern)) > 1e-12:
        raise ConsistencyError("imaginary part does not match the rank-one pattern")
    if np.max(np.abs(re_part - _RE_PATTERN[m.U])) > 1e-12:
        raise ConsistencyError("real part does not match the expected pattern")
    return ImPartDecomposition(weight, pattern.copy(), re_part, math.sqrt(weight))


# ---------------------------------------------------------------------------
# discrete functional model


@dataclass(frozen=True)
class DiscreteModelTriple:
    """Model triple on L^2 of a purely atomic measure with unit normalized mass.

    Vectors are coefficient arrays over the atoms; the inner product is
    (f, g) = sum f_j conj(g_j) w_j.  The reference operator multiplies by
    the atom locations.
    """

    measure: SpectralMeasure
    kappa: float

    @property
    def dimension(self) -> int:
        return len(self.measure.atoms)

    @property
    def locations(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.measure.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.measure.atoms])

    def weyl(self) -> FuncExpr:
        return WeylTransform(self.measure)

    def livsic(self) -> FuncExpr:
        return s_from_m(self.weyl())

    def characteristic(self) -> FuncExpr:
        return char_from_livsic(self.livsic(), self.kappa)

    def inner(self, f, g) -> complex:
        return complex(np.sum(np.asarray(f) * np.conj(np.asarray(g)) * self.weights))

    def to_json(self) -> dict:
        return {"atoms": [[lam, w] for lam, w in self.measure.atoms], "kappa": self.kappa}

    @classmethod
    def from_json(cls, doc: dict) -> "DiscreteModelTriple":
        mu = SpectralMeasure(tuple((float(a), float(b)) for a, b in doc["atoms"]))
        return model_triple(mu, float(doc["kappa"]))


def model_triple(mu: SpectralMeasure, kappa: float) -> DiscreteModelTriple:
    kappa = check_kappa(kappa)
    if not mu.is_atomic or not mu.atoms:
        raise DomainError("the discrete model needs a purely atomic measure")
    mass = normalized_mass(mu)
    if abs(mass - 1) > MASS_TOL:
        raise NormalizationError(f"normalized mass must be 1, got {mass!r}", mass)
    return DiscreteModelTriple(mu, kappa)


def _check_off_spectrum(t: DiscreteModelTriple, z: complex) -> complex:
    z = _cplx(z)
    if np.any(t.locations == z):
        raise SpectralPointError(f"z = {z} is an atom of the measure", ("resolvent_B",), z)
    return z


def deficiency_vector(t: DiscreteModelTriple, z: complex) -> np.ndarray:
    """g_z(lambda) = 1/(lambda - z) on the atoms."""
    z = _check_off_spectrum(t, z)
    return 1.0 / (t.locations - z)


def resolvent_B(t: DiscreteModelTriple, z: complex) -> np.ndarray:
    return np.diag(deficiency_vector(t, z))


def rank_one_coefficient(t: DiscreteModelTriple, z: complex) -> complex:
    """p(z) = (M(z) + i(kappa + 1)/(kappa - 1))^{-1}."""
    z = _check_off_spectrum(t, z)
    if z.imag == 0:
        raise DomainError(f"z = {z} must be off the real axis", z)
    M = weyl_eval(t.measure, z)
    den = M + 1j * (t.kappa + 1) / (t.kappa - 1)
    if _vanishes(den, 1):
        raise SpectralPointError(f"p(z) has a pole at z = {z}", ("p",), z)
    return 1 / den


def rank_one_coefficient_kappa0(t: DiscreteModelTriple, z: complex) -> complex:
    """(M(z) - i)^{-1}, the kappa = 0 closed form."""
    z = _check_off_spectrum(t, z)
    den = weyl_eval(t.measure, z) - 1j
    if _vanishes(den, 1):
        raise SpectralPointError(f"p(z) has a pole at z = {z}", ("p",), z)
    return 1 / den


def resolvent_T(t: DiscreteModelTriple, z: complex) -> np.ndarray:
    """R_B(z) - p(z) (., g_{conj z}) g_z as a matrix on atom coefficients."""
    g = deficiency_vector(t, z)
    p = rank_one_coefficient(t, z)
    if t.kappa == 0:
        p0 = rank_one_coefficient_kappa0(t, z)
        if p0 != p:
            raise ConsistencyError(f"kappa = 0 coefficient mismatch: {p} vs {p0}")
    # (f, g_{conj z}) = sum_k f_k w_k / (lambda_k - z)
    return np.diag(g) - p * np.outer(g, t.weights * g)


def matrix_to_json(mat: np.ndarray) -> dict:
    """Dense row-major dump: {"rows", "cols", "data": [[re, im], ...]}."""
    mat = np.asarray(mat, dtype=complex)
    return {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "data": [[float(v.real), float(v.imag)] for v in mat.ravel(order="C")],
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    data = np.array([complex(re, im) for re, im in doc["data"]], dtype=complex)
    return data.reshape(int(doc["rows"]), int(doc["cols"]))


def dump_resolvent(t: DiscreteModelTriple, z: complex, which: str = "T") -> str:
    mat = resolvent_T(t, z) if which == "T" else resolvent_B(t, z)
    doc = {"z": [complex(z).real, complex(z).imag], "operator": which}
    doc.update(matrix_to_json(mat))
    return json.dumps(doc, sort_keys=True)


# ---------------------------------------------------------------------------
# named systems


def catalog() -> dict[str, LSystem]:
    """Systems used by the verification suites and the CLI ``show`` command."""
    from .lsystem import couple, make_lsystem, power

    t04, t06, t1 = transport_system(0.4), transport_system(0.6), transport_system(1.0)
    p04, p06 = transport_system(0.4, Hypothesis.SETUP_PRIME), transport_system(0.6, Hypothesis.SETUP_PRIME)
    ex3_a, ex3_b = example3_pieces(1.0, 0.4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FiniteMeasureWarning)
        mu = SpectralMeasure(((-2.0, 2.5), (2.0, 2.5)))
    systems = {
        "transport_1": t1,
        "transport_prime_1": transport_system(1.0, Hypothesis.SETUP_PRIME),
        "transport_2": transport_system(2.0),
        "transport_0.4_0.6": couple(t04, t06),
        "transport_prime_0.4_0.6": couple(p04, p06),
        "transport_0.4_prime_0.6": couple(t04, p06),
        "absorption": couple(ex3_a, ex3_b),
        "transport_1_cubed": power(t1, 3),
        "discrete_0.3": make_lsystem(model_triple(mu, 0.3).livsic(), 0.3, Hypothesis.SETUP, "discrete_0.3"),
        "discrete_prime_0.7": make_lsystem(model_triple(mu, 0.7).livsic(), 0.7, Hypothesis.SETUP_PRIME, "discrete_prime_0.7"),
    }
    return systems
