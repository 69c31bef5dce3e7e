"""Invariant suites run by ``lsyscalc verify``.

Each check reports a residual and the tolerance it is held to; a suite
passes only when every residual is within tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import donoghue
from .errors import LsysError
from .funcs import FiniteMeasureWarning, SpectralMeasure, evaluate
from .livsic import char_from_livsic
from .lsystem import Hypothesis, attractor_diagnostics, couple, make_lsystem
from .models import (
    coupling_geometry,
    example3_factor_oracle,
    example3_livsic,
    example3_pieces,
    im_part_decomposition,
    model_triple,
    rank_one_coefficient,
    rank_one_coefficient_kappa0,
    resolvent_B,
    resolvent_T,
    star_extension_matrices,
    transport_livsic,
    transport_system,
)

SUITES = ("examples", "matrices", "resolvent", "attractor")
DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(self.residual < self.tol)

    def to_json(self) -> dict:
        # non-finite residuals mark checks that could not be evaluated; keep the JSON strict
        residual = self.residual if math.isfinite(self.residual) else None
        return {"name": self.name, "residual": residual, "tol": self.tol, "ok": self.ok}


def grid_64(half_plane: str = "upper") -> list[complex]:
    """8 x 8 grid on Re in [-3, 3], |Im| in [0.2, 3]."""
    ys = np.linspace(0.2, 3.0, 8)
    if half_plane == "lower":
        ys = -ys
    return [complex(x, y) for x in np.linspace(-3.0, 3.0, 8) for y in ys]


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


def _max_rel(f, g, zs) -> float:
    return max(_rel(evaluate(f, z), evaluate(g, z)) for z in zs)


def _failed(name: str, exc: Exception) -> Check:
    return Check(f"{name} [{type(exc).__name__}: {exc}]", math.inf, 0.0)


# ---------------------------------------------------------------------------


def suite_examples() -> list[Check]:
    checks = []
    zs = grid_64("upper") + grid_64("lower")
    for ell, gamma in ((1.0, 0.4), (2.0, 0.5), (0.7, 0.35)):
        coupled = couple(transport_system(gamma), transport_system(ell - gamma))
        target = transport_system(ell)
        checks.append(Check(f"split transport transfer ({ell:g}, {gamma:g})", _max_rel(coupled.transfer, target.transfer, zs), 1e-12))
    t = couple(transport_system(0.4), transport_system(0.6))
    checks.append(Check("split transport kappa product", abs(t.kappa - math.exp(-1)), 1e-15))
    tag = donoghue.classify(t.impedance)
    checks.append(Check("split transport class Mk", 0.0 if tag.kind == donoghue.CLASS_MK else math.inf, 1.0))
    checks.append(Check("split transport class kappa", abs(tag.kappa - math.exp(-1)), 1e-12))

    p = couple(transport_system(0.4, Hypothesis.SETUP_PRIME), transport_system(0.6, Hypothesis.SETUP_PRIME))
    checks.append(Check("primed pair sign cancellation", _max_rel(p.transfer, transport_system(1.0).transfer, zs), 1e-12))
    tag = donoghue.classify(p.impedance)
    ok = p.hypothesis is Hypothesis.SETUP and tag.kind == donoghue.CLASS_MK
    checks.append(Check("primed pair gives setup system of class Mk", 0.0 if ok else math.inf, 1.0))
    checks.append(Check("primed pair class kappa", abs(tag.kappa - math.exp(-1)), 1e-12))

    up = grid_64("upper")
    checks.append(Check("absorption s = s1 * S2", _max_rel(example3_livsic(1.0, 0.4), example3_factor_oracle(1.0, 0.4), up), 1e-11))
    checks.append(Check("absorption s(i) = 0", abs(evaluate(example3_livsic(1.0, 0.4), 1j)), 1e-14))
    a, b = example3_pieces(1.0, 0.4)
    c = couple(a, b)
    tag = donoghue.classify(c.impedance)
    checks.append(Check("absorption into class M", 0.0 if tag.kind == donoghue.CLASS_M and c.kappa == 0 else math.inf, 1.0))
    direct = make_lsystem(example3_livsic(1.0, 0.4), 0.0)
    checks.append(Check("absorption coupled transfer", _max_rel(c.transfer, direct.transfer, up), 1e-11))

    for ell in (0.5, 1.0, 2.0):
        for h in Hypothesis:
            built = make_lsystem(transport_livsic(ell), math.exp(-ell), h)
            closed = transport_system(ell, h)
            checks.append(Check(f"transport closed form ({ell:g}, {h.value})", _max_rel(built.transfer, closed.transfer, zs), 1e-11))
        S = char_from_livsic(transport_livsic(ell), math.exp(-ell))
        checks.append(Check(f"S(i) = kappa ({ell:g})", abs(evaluate(S, 1j) - math.exp(-ell)), 1e-12))
    return checks


def suite_matrices() -> list[Check]:
    checks = []
    for kappa in (0.0, math.exp(-1), 0.5, 0.9):
        for U in (1, -1):
            try:
                m = star_extension_matrices(kappa, U)
                d = im_part_decomposition(m)
            except LsysError as exc:
                checks.append(_failed(f"star extension ({kappa:.6g}, {U:+d})", exc))
                continue
            H = -1j / (1 + kappa) if U == 1 else 1j / (1 - kappa)
            checks.append(Check(f"H ({kappa:.6g}, {U:+d})", abs(m.H - H), 1e-14))
            im_part = (m.S_A - m.S_Astar) / 2j
            checks.append(Check(f"Im pattern ({kappa:.6g}, {U:+d})", float(np.max(np.abs(im_part - d.weight * d.matrix))), 1e-14))
            w = (1 - kappa) / (2 + 2 * kappa) if U == 1 else (1 + kappa) / (2 - 2 * kappa)
            checks.append(Check(f"weight ({kappa:.6g}, {U:+d})", abs(d.weight - w), 1e-14))
            re_expected = 0.5j * (np.array([[-1, -1], [1, 1]]) if U == 1 else np.array([[-1, 1], [-1, 1]]))
            checks.append(Check(f"Re pattern ({kappa:.6g}, {U:+d})", float(np.max(np.abs(d.real_part - re_expected))), 1e-14))
    for k1 in (0.0, 0.3, math.exp(-1), 0.9):
        for k2 in (0.0, 0.5, math.exp(-0.6), 0.99):
            g = coupling_geometry(k1, k2)
            res = max(abs(g.sin_alpha ** 2 + g.cos_alpha ** 2 - 1), abs(g.sin_beta ** 2 + g.cos_beta ** 2 - 1))
            res = max(res, abs(g.sin_beta - k1 * g.sin_alpha))
            if k2 > 0:
                res = max(res, abs(g.cos_beta * k2 - g.cos_alpha))
            checks.append(Check(f"geometry ({k1:.4g}, {k2:.4g})", res, 1e-14))
    return checks


def random_atomic_measure(rng: np.random.Generator, n: int) -> SpectralMeasure:
    """n distinct atoms in [-5, 5] with weights scaled to unit normalized mass."""
    lam = np.sort(rng.uniform(-5, 5, n))
    w = rng.uniform(0.1, 1.0, n)
    w = w / np.sum(w / (1 + lam ** 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FiniteMeasureWarning)
        mu = SpectralMeasure(tuple(zip(lam.tolist(), w.tolist())))
    return mu


def _random_point(rng: np.random.Generator) -> complex:
    sign = 1 if rng.random() < 0.5 else -1
    return complex(rng.uniform(-4, 4), sign * rng.uniform(0.2, 3))


def resolvent_identity_residual(t, z: complex, w: complex) -> float:
    Rz, Rw = resolvent_T(t, z), resolvent_T(t, w)
    lhs = Rz - Rw
    rhs = (z - w) * Rz @ Rw
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs))))


def suite_resolvent(seed: int = DEFAULT_SEED, n_pairs: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for kappa in (0.0, 0.3, 0.7):
        for dim in (1, 3, 6, 8):
            t = model_triple(random_atomic_measure(rng, dim), kappa)
            worst_T = worst_B = 0.0
            for _ in range(n_pairs):
                z, w = _random_point(rng), _random_point(rng)
                worst_T = max(worst_T, resolvent_identity_residual(t, z, w))
                Bz, Bw = resolvent_B(t, z), resolvent_B(t, w)
                worst_B = max(worst_B, float(np.max(np.abs(Bz - Bw - (z - w) * Bz @ Bw))))
            checks.append(Check(f"resolvent identity T (kappa={kappa:g}, dim={dim})", worst_T, 1e-10))
            checks.append(Check(f"resolvent identity B (kappa={kappa:g}, dim={dim})", worst_B, 1e-13))
            if kappa == 0:
                diff = max(
                    abs(rank_one_coefficient(t, z) - rank_one_coefficient_kappa0(t, z))
                    for z in (_random_point(rng) for _ in range(n_pairs))
                )
                checks.append(Check(f"kappa=0 closed form (dim={dim})", diff, 1e-300))
    return checks


def suite_attractor(n_max: int = 20) -> list[Check]:
    theta = transport_system(1.0)
    rep = attractor_diagnostics(theta, [-1j], [1j], n_max)
    checks = []
    for r in rep.rows:
        checks.append(Check(f"|W(-i)|^{r.n}", abs(r.sup_lower_transfer - math.exp(-r.n)) / math.exp(-r.n), 1e-12))
        gap = 2 / (math.exp(r.n) + 1)
        checks.append(Check(f"|V_{r.n}(i) - i|", abs(r.sup_upper_impedance_gap - gap) / gap, 1e-12))
    checks.append(Check("kappa^n decreasing", 0.0 if rep.kappa_monotone else math.inf, 1.0))
    checks.append(Check("|W|^n decreasing", 0.0 if rep.transfer_monotone else math.inf, 1.0))
    return checks


def run_suite(name: str, seed: int = DEFAULT_SEED) -> dict:
    """Run one suite (or ``"all"``) and return a JSON-ready summary."""
    names = SUITES if name == "all" else (name,)
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    runners = {
        "examples": suite_examples,
        "matrices": suite_matrices,
        "resolvent": lambda: suite_resolvent(seed),
        "attractor": suite_attractor,
    }
    suites = {}
    for n in names:
        try:
            checks = runners[n]()
        except LsysError as exc:
            checks = [_failed(n, exc)]
        suites[n] = {"ok": all(c.ok for c in checks), "checks": [c.to_json() for c in checks]}
    return {"suite": name, "seed": seed, "ok": all(s["ok"] for s in suites.values()), "suites": suites}
