"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 unreadable input or bad
flags, 3 evaluation error or invalid system.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import donoghue
from .errors import LsysError, SchemaError
from .funcs import FuncExpr, dumps_expr, evaluate, expr_from_json
from .lsystem import Hypothesis, LSystem, couple, validate
from .models import catalog, transport_system
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_EVAL = 3

MIN_ABS_IM = 1e-6


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid; the imaginary range gives |Im z| and is mirrored
    into the requested half-planes."""

    re_min: float
    re_max: float
    re_steps: int
    im_min: float
    im_max: float
    im_steps: int
    half_plane: str = "upper"

    def __post_init__(self):
        if self.re_steps < 1 or self.im_steps < 1:
            raise UsageError("grid steps must be >= 1")
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise UsageError("grid ranges must satisfy min <= max")
        if self.im_min < MIN_ABS_IM:
            raise UsageError(f"grid imaginary range must stay at least {MIN_ABS_IM:g} away from the real axis")
        if self.half_plane not in ("upper", "lower", "both"):
            raise UsageError(f"unknown half-plane {self.half_plane!r}")

    @classmethod
    def parse(cls, text: str, half_plane: str = "upper") -> "GridSpec":
        try:
            re_part, im_part = text.split(",")
            r0, r1, rn = re_part.split(":")
            i0, i1, i_n = im_part.split(":")
            return cls(float(r0), float(r1), int(rn), float(i0), float(i1), int(i_n), half_plane)
        except ValueError:
            raise UsageError(f"grid must look like re_min:re_max:steps,im_min:im_max:steps, got {text!r}") from None

    def points(self) -> list[complex]:
        xs = np.linspace(self.re_min, self.re_max, self.re_steps)
        ys = np.linspace(self.im_min, self.im_max, self.im_steps)
        signs = {"upper": (1,), "lower": (-1,), "both": (1, -1)}[self.half_plane]
        return [complex(x, s * y) for s in signs for x in xs for y in ys]


def _write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory and rename over ``path``."""
    if path == "-":
        sys.stdout.write(text)
        return
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(prefix=".lsyscalc-", dir=os.path.dirname(target))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc


def _load_function(path: str) -> FuncExpr:
    """A FuncExpr document, or an L-system document (its impedance is used)."""
    doc = _read_json(path)
    if isinstance(doc, dict) and "transfer" in doc:
        return LSystem.from_json(doc).impedance
    return expr_from_json(doc)


def _err(msg: str) -> None:
    print(f"lsyscalc: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    try:
        f = _load_function(args.func_file)
        grid = GridSpec.parse(args.grid, args.half_plane)
    except (LsysError, UsageError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    lines = ["z_re,z_im,f_re,f_im"]
    for z in grid.points():
        try:
            v = evaluate(f, z)
        except LsysError as exc:
            _err(f"evaluation failed at z = {z.real!r}{z.imag:+}j: {exc}")
            return EXIT_EVAL
        lines.append("%.17g,%.17g,%.17g,%.17g" % (z.real, z.imag, v.real, v.imag))
    _write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_classify(args) -> int:
    try:
        f = _load_function(args.func_file)
    except LsysError as exc:
        _err(str(exc))
        return EXIT_PARSE
    try:
        tag = donoghue.classify(f, args.tol)
    except LsysError as exc:
        _err(f"evaluation at i failed: {exc}")
        return EXIT_EVAL
    print(json.dumps(tag.to_json(), sort_keys=True))
    return EXIT_OK


def cmd_couple(args) -> int:
    try:
        systems = [LSystem.from_json(_read_json(p)) for p in (args.sys1, args.sys2)]
    except LsysError as exc:
        _err(str(exc))
        return EXIT_PARSE
    for path, theta in zip((args.sys1, args.sys2), systems):
        report = validate(theta)
        if not report.ok:
            _err(f"{path} is not a valid L-system: {'; '.join(report.failures)}")
            return EXIT_EVAL
    theta = couple(*systems)
    try:
        tag = donoghue.classify(theta.impedance)
    except LsysError as exc:
        _err(f"coupled impedance cannot be classified: {exc}")
        return EXIT_EVAL
    _write_atomic(args.out, theta.dumps() + "\n")
    summary = {
        "kappa1": systems[0].kappa,
        "kappa2": systems[1].kappa,
        "kappa": theta.kappa,
        "hypothesis": theta.hypothesis.value,
        "expected_class": theta.expected_class(),
        "class": tag.to_json(),
        "class_ok": tag.kind == theta.expected_class(),
    }
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    summary = run_suite(args.suite, args.seed)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if summary["ok"] else EXIT_FAILED


def _named_system(name: str) -> LSystem:
    if name.startswith("transport:"):
        parts = name.split(":")
        try:
            ell = float(parts[1])
        except (IndexError, ValueError):
            raise UsageError(f"expected transport:ELL[:prime], got {name!r}") from None
        h = Hypothesis.SETUP_PRIME if parts[2:] == ["prime"] else Hypothesis.SETUP
        if parts[2:] not in ([], ["prime"]):
            raise UsageError(f"expected transport:ELL[:prime], got {name!r}")
        return transport_system(ell, h)
    systems = catalog()
    if name not in systems:
        raise UsageError(f"unknown system {name!r}; known: {', '.join(sorted(systems))}, transport:ELL[:prime]")
    return systems[name]


def cmd_show(args) -> int:
    try:
        theta = _named_system(args.name)
    except (UsageError, LsysError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    if args.part == "system":
        text = theta.dumps()
    else:
        text = dumps_expr(getattr(theta, args.part))
    _write_atomic(args.out, text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsyscalc", description="Donoghue classes and L-system calculus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a function on a grid, CSV output")
    p.add_argument("func_file")
    p.add_argument("--grid", required=True, help="re_min:re_max:steps,im_min:im_max:steps (im range is |Im z|)")
    p.add_argument("--half-plane", choices=("upper", "lower", "both"), default="upper")
    p.add_argument("--out", default="-")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("classify", help="Donoghue class of a function or of a system's impedance")
    p.add_argument("func_file")
    p.add_argument("--tol", type=float, default=donoghue.DEFAULT_TOL)
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("couple", help="couple two L-systems")
    p.add_argument("sys1")
    p.add_argument("sys2")
    p.add_argument("--out", default="-")
    p.set_defaults(run=cmd_couple)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", nargs="?", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("show", help="emit JSON for a named system")
    p.add_argument("name", help="catalog name or transport:ELL[:prime]")
    p.add_argument("--part", choices=("system", "transfer", "impedance"), default="system")
    p.add_argument("--out", default="-")
    p.set_defaults(run=cmd_show)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
