"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 evaluation failure, 3 verification
failure. Records go to stdout as CSV (default) or JSON; diagnostics go to
stderr. Floats are printed with 17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from . import dirichlet_l, functional_eq, sigma_solver, special_core, zero_finder
from .errors import (
    BracketError,
    DomainError,
    NonConvergence,
    NotPrimitive,
    PoleError,
    StepTooCoarse,
    ZeroCountMismatch,
    ZetaLabError,
)

EXIT_OK, EXIT_USAGE, EXIT_EVAL, EXIT_VERIFY = 0, 1, 2, 3
FUNCS = ("zeta", "eta", "gamma", "gfactor", "xi", "hurwitz", "lfunc")


@dataclass(frozen=True)
class RunConfig:
    precision_target: float = 1e-13
    tol: float = 1e-12
    fmt: str = "csv"
    seed: int = 42
    workers: int = 1
    fe_residual_max: float = 1e-9
    on_line_max: float = 1e-8
    deriv_rel_max: float = 1e-5
    zeros_step: float = 0.05
    lzeros_step: float = 0.02

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        base = cls()
        return cls(
            fmt=getattr(ns, "format", None) or base.fmt,
            seed=base.seed if getattr(ns, "seed", None) is None else ns.seed,
            workers=base.workers if getattr(ns, "workers", None) is None else ns.workers,
            tol=base.tol if getattr(ns, "tol", None) is None else ns.tol,
        )

    @property
    def eval_config(self) -> special_core.EvalConfig:
        return special_core.EvalConfig(target_abs_err=self.precision_target)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# output

def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _json_value(x) -> str:
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, (float, np.floating)) and not math.isfinite(float(x)):
        return "null"
    return fmt_number(x)


def json_record(rec: Dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in rec.items()) + "}"


class Emitter:
    """Writes records with a fixed header; JSON lists are closed by ``close``."""

    def __init__(self, stream: TextIO, header: Sequence[str], fmt: str, single: bool = False):
        self.stream = stream
        self.header = list(header)
        self.fmt = fmt
        self.single = single
        self.count = 0
        if fmt == "csv":
            self.writer = csv.writer(stream, lineterminator="\n")
            self.writer.writerow(self.header)

    def write(self, rec: Dict) -> None:
        if self.fmt == "csv":
            self.writer.writerow([fmt_number(rec[k]) for k in self.header])
        else:
            text = json_record({k: rec[k] for k in self.header})
            if self.single:
                self.stream.write(text + "\n")
            else:
                self.stream.write(("[\n  " if self.count == 0 else ",\n  ") + text)
        self.count += 1

    def close(self) -> None:
        if self.fmt == "json" and not self.single:
            self.stream.write("[]\n" if self.count == 0 else "\n]\n")


# ---------------------------------------------------------------------------
# argument helpers

def parse_complex(text: str) -> complex:
    """Parse 're,im' or a bare real number."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            z = complex(float(parts[0]), 0.0)
        elif len(parts) == 2:
            z = complex(float(parts[0]), float(parts[1]))
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise argparse.ArgumentTypeError("non-finite complex argument")
    return z


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonnegative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--workers", type=_positive_int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)

    parser = _Parser(prog="zetalab", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("eval", parents=[common], help="evaluate one function at one point")
    p.add_argument("--func", choices=FUNCS, required=True)
    p.add_argument("--s", type=parse_complex, required=True, help="point as 're,im'")
    p.add_argument("--a", type=float, help="Hurwitz parameter in (0, 1]")
    p.add_argument("--modulus", type=_positive_int)
    p.add_argument("--char-index", type=_nonnegative_int)

    p = sub.add_parser("check-fe", parents=[common], help="reflection-equation residuals")
    p.add_argument("--sigma-min", type=float, default=0.05)
    p.add_argument("--sigma-max", type=float, default=0.95)
    p.add_argument("--t-min", type=float, default=0.5)
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("zeros", parents=[common], help="zeros of zeta on the critical line")
    p.add_argument("--tmin", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--method", choices=("line-scan", "winding"), default="line-scan")

    p = sub.add_parser("lzeros", parents=[common], help="zeros of a Dirichlet L-function")
    p.add_argument("--modulus", type=_positive_int, required=True)
    p.add_argument("--char-index", type=_nonnegative_int, required=True)
    p.add_argument("--tmin", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--step", type=float, default=None)

    p = sub.add_parser("solve-sigma", parents=[common], help="bisection for the real-axis equations")
    p.add_argument("--eq", choices=("5", "9"), required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)

    p = sub.add_parser("scan", parents=[common], help="gap field on a strip grid")
    p.add_argument("--sigma-min", type=float, default=0.05)
    p.add_argument("--sigma-max", type=float, default=0.95)
    p.add_argument("--t-min", type=float, default=2.0)
    p.add_argument("--t-max", type=float, default=30.0)
    p.add_argument("--n-sigma", type=int, default=91)
    p.add_argument("--n-t", type=int, default=281)
    p.add_argument("--field", choices=functional_eq.FIELDS, default="abs_gap")

    p = sub.add_parser("certify", parents=[common], help="derivative sign certification")
    p.add_argument("--target", choices=sigma_solver.TARGETS, required=True)
    p.add_argument("--samples", type=int, default=100)
    return parser


# ---------------------------------------------------------------------------
# commands

def cmd_eval(ns, cfg: RunConfig, out: TextIO) -> int:
    s = ns.s
    ecfg = cfg.eval_config
    f = ns.func
    if f == "hurwitz" and ns.a is None:
        raise UsageError("--a is required for --func hurwitz")
    if f == "lfunc" and (ns.modulus is None or ns.char_index is None):
        raise UsageError("--modulus and --char-index are required for --func lfunc")
    if f == "zeta":
        r = special_core.zeta(s, ecfg) if s.real > 0 else special_core.zeta_em(s, ecfg)
    elif f == "eta":
        r = special_core.eta(s, ecfg)
    elif f == "gamma":
        r = special_core.gamma(s)
    elif f == "gfactor":
        r = special_core.g_factor(s)
    elif f == "xi":
        r = zero_finder.xi(s, ecfg)
    elif f == "hurwitz":
        r = dirichlet_l.hurwitz_zeta(s, ns.a, ecfg)
    else:
        try:
            chi = dirichlet_l.character(ns.modulus, ns.char_index)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        r = dirichlet_l.l_function(s, chi, ecfg)
    em = Emitter(out, ["func", "s_re", "s_im", "value_re", "value_im", "abs_err_bound", "terms_used"],
                 cfg.fmt, single=True)
    em.write({"func": f, "s_re": s.real, "s_im": s.imag, "value_re": r.value.real,
              "value_im": r.value.imag, "abs_err_bound": r.abs_err_bound, "terms_used": r.terms_used})
    em.close()
    return EXIT_OK


def _residual_chunk(points: List[complex]):
    out = []
    for p in points:
        try:
            out.append(functional_eq.fe_residual(p))
        except ZetaLabError:
            out.append(None)
    return out


def fe_residuals(points: Sequence[complex], workers: int = 1) -> List[Optional[float]]:
    """Residual per point; None where the point is a pole or fails to evaluate."""
    points = list(points)
    if workers <= 1 or len(points) < 64:
        return _residual_chunk(points)
    from concurrent.futures import ProcessPoolExecutor

    chunks = [list(c) for c in np.array_split(np.array(points, dtype=complex), workers * 4)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for part in pool.map(_residual_chunk, chunks) for r in part]


def sample_points(sigma_min, sigma_max, t_min, t_max, n, seed) -> List[complex]:
    rng = np.random.default_rng(seed)
    sig = rng.uniform(sigma_min, sigma_max, n)
    ts = rng.uniform(t_min, t_max, n)
    return [complex(a, b) for a, b in zip(sig, ts)]


def cmd_check_fe(ns, cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    if ns.samples < 1:
        raise UsageError("--samples must be at least 1")
    try:
        functional_eq.StripRect(ns.sigma_min, ns.sigma_max, ns.t_min, ns.t_max)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    pts = sample_points(ns.sigma_min, ns.sigma_max, ns.t_min, ns.t_max, ns.samples, cfg.seed)
    res = fe_residuals(pts, cfg.workers)
    good = [r for r in res if r is not None]
    skipped = len(res) - len(good)
    if skipped:
        err.write(f"skipped {skipped} pole/failed points\n")
    mx = max(good) if good else math.nan
    mean = float(np.mean(good)) if good else math.nan
    em = Emitter(out, ["samples", "evaluated", "skipped", "max_residual", "mean_residual"], cfg.fmt,
                 single=True)
    em.write({"samples": ns.samples, "evaluated": len(good), "skipped": skipped,
              "max_residual": mx, "mean_residual": mean})
    em.close()
    if not good or not mx < cfg.fe_residual_max:
        err.write(f"max residual {mx:.3g} is not below {cfg.fe_residual_max:g}\n")
        return EXIT_VERIFY
    return EXIT_OK


ZERO_HEADER = ["t", "sigma", "abs_value", "refine_iters"]


def _abs_value(rec) -> float:
    return rec.abs_zeta if hasattr(rec, "abs_zeta") else rec.abs_L


def _emit_zeros(rows, cfg: RunConfig, out: TextIO) -> None:
    em = Emitter(out, ZERO_HEADER, cfg.fmt)
    for r in rows:
        em.write({"t": r.t, "sigma": r.sigma, "abs_value": _abs_value(r), "refine_iters": r.refine_iters})
    em.close()


def _on_line(rows, cfg: RunConfig, err: TextIO) -> bool:
    ok = True
    for r in rows:
        if not (abs(r.sigma - 0.5) < cfg.on_line_max and _abs_value(r) < cfg.on_line_max):
            err.write(f"zero at t={r.t:.12g} failed on-line verification (sigma={r.sigma!r})\n")
            ok = False
    return ok


def cmd_zeros(ns, cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    step = cfg.zeros_step if ns.step is None else ns.step
    if not (0.0 <= ns.tmin < ns.tmax) or step <= 0:
        raise UsageError("need 0 <= tmin < tmax and step > 0")
    if ns.method == "line-scan":
        rows = zero_finder.find_zeros(ns.tmin, ns.tmax, step, workers=cfg.workers)
    else:
        rows = zero_finder.find_zeros_winding(ns.tmin, ns.tmax)
    _emit_zeros(rows, cfg, out)
    return EXIT_OK if _on_line(rows, cfg, err) else EXIT_VERIFY


def cmd_lzeros(ns, cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    step = cfg.lzeros_step if ns.step is None else ns.step
    if not (0.0 <= ns.tmin < ns.tmax) or step <= 0:
        raise UsageError("need 0 <= tmin < tmax and step > 0")
    try:
        chi = dirichlet_l.character(ns.modulus, ns.char_index)
        if not chi.primitive:
            raise NotPrimitive(f"character {ns.char_index} mod {ns.modulus} is not primitive")
        if ns.modulus > dirichlet_l.MAX_SCAN_MODULUS:
            raise DomainError(f"zero scans are limited to modulus <= {dirichlet_l.MAX_SCAN_MODULUS}")
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    rows = dirichlet_l.find_l_zeros(chi, ns.tmin, ns.tmax, step, workers=cfg.workers)
    _emit_zeros(rows, cfg, out)
    return EXIT_OK if _on_line(rows, cfg, err) else EXIT_VERIFY


def cmd_solve_sigma(ns, cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    if not (0.0 <= ns.lo < ns.hi <= 1.0) or not cfg.tol > 0:
        raise UsageError("need 0 <= lo < hi <= 1 and tol > 0")
    solve = sigma_solver.solve_eq5 if ns.eq == "5" else sigma_solver.solve_eq9
    rep = solve(ns.lo, ns.hi, cfg.tol)
    em = Emitter(out, ["equation", "root", "residual", "bracket_lo", "bracket_hi", "iterations"],
                 cfg.fmt, single=True)
    em.write(rep.__dict__)
    em.close()
    if abs(rep.root - 0.5) < 10.0 * cfg.tol:
        return EXIT_OK
    err.write(f"root {rep.root!r} differs from 1/2 by more than 10*tol\n")
    return EXIT_VERIFY


def cmd_scan(ns, cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    try:
        rect = functional_eq.StripRect(ns.sigma_min, ns.sigma_max, ns.t_min, ns.t_max)
        if ns.n_sigma < 2 or ns.n_t < 2:
            raise DomainError("grid dimensions must be >= 2")
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    sigmas = np.linspace(rect.sigma_min, rect.sigma_max, ns.n_sigma)
    em = Emitter(out, ["sigma", "t", "value"], cfg.fmt)
    failed = 0
    for t, row, row_err, nfail in functional_eq.iter_scan_rows(rect, ns.n_sigma, ns.n_t, ns.field,
                                                                cfg.workers):
        failed += nfail
        for sg, v in zip(sigmas, row):
            em.write({"sigma": float(sg), "t": t, "value": float(v)})
        changes = functional_eq.row_sign_changes(sigmas, row, row_err)
        brackets = " ".join(f"[{a:.6g},{b:.6g}]" for a, b in changes) or "none"
        err.write(f"t={t:.6g} sign_changes={len(changes)} {brackets}\n")
    em.close()
    if failed:
        err.write(f"{failed} cells failed to evaluate (NaN)\n")
    return EXIT_OK


def cmd_certify(ns, cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    if ns.samples < 2:
        raise UsageError("--samples must be at least 2")
    cert = sigma_solver.certify_monotone(ns.target, ns.samples)
    em = Emitter(out, ["sigma", "analytic", "finite_diff", "rel_err"], cfg.fmt)
    for c in cert.checks:
        em.write(c.__dict__)
    em.close()
    err.write(f"target={cert.target} all_negative={cert.all_negative} max_rel_err={cert.max_rel_err:.3g}\n")
    if cert.all_negative and cert.max_rel_err <= cfg.deriv_rel_max:
        return EXIT_OK
    return EXIT_VERIFY


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = RunConfig.from_args(ns)
        cmd = ns.command
        if cmd == "eval":
            return cmd_eval(ns, cfg, out)
        if cmd == "check-fe":
            return cmd_check_fe(ns, cfg, out, err)
        if cmd == "zeros":
            return cmd_zeros(ns, cfg, out, err)
        if cmd == "lzeros":
            return cmd_lzeros(ns, cfg, out, err)
        if cmd == "solve-sigma":
            return cmd_solve_sigma(ns, cfg, out, err)
        if cmd == "scan":
            return cmd_scan(ns, cfg, out, err)
        return cmd_certify(ns, cfg, out, err)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (BracketError, StepTooCoarse, ZeroCountMismatch) as exc:
        err.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except (PoleError, NonConvergence, ZetaLabError) as exc:
        err.write(f"evaluation failed: {exc}\n")
        return EXIT_EVAL


def run() -> None:
    sys.exit(main())
