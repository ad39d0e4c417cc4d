"""``wpc`` command line front end.

Exit codes: 0 success, 1 numeric or I/O failure (including lambda
non-convergence under --strict), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import PowerSeries, analytic_norm, boundary_trace, pre_schwarzian, alpha_map
from .beltrami import (
    BeltramiField,
    HalfPlaneGrid,
    beurling_ahlfors_extension,
    carleson_norm,
    mp_norm,
    vanishing_profile,
)
from .curves import (
    arc_length_defect,
    chord_arc_constant,
    curve_from_log_derivative,
    homeo_from_real_u,
    j_inverse,
    j_map,
    q_transform,
)
from .grids import CircleGrid, LineGrid, MonotoneMap, SampledFunction
from .io import (
    dump_json,
    read_any,
    read_csv_curve,
    rows_to_csv,
    to_dict,
    write_csv_curve,
)
from .spaces import (
    a_infty_constant,
    besov_seminorm,
    bmo_norm,
    conjugate_circle,
    hilbert_line,
    vmo_defect,
)
from .testfunctions import bump, random_smooth
from .welding import eval_lambda, eval_lambda_inverse, weld_decompose

SUBCOMMANDS = ("norm", "hilbert", "curve", "reparam", "jmap", "jinv", "diag", "lambda", "weld",
               "schwarzian", "anorm", "trace", "beltrami", "extend", "bench", "sweep")


class UsageError(Exception):
    pass


class NumericFailure(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    p: float | None = None
    tol: float = 1e-8
    max_iter: int = 50
    damping: float = 1.0
    seed: int = 0
    json_errors: bool = False
    strict: bool = False
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    return vals


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json-errors", action="store_true", default=argparse.SUPPRESS,
                        help="report errors as JSON on stderr")
    common.add_argument("--strict", action="store_true", default=argparse.SUPPRESS,
                        help="exit 1 when an iteration does not converge")

    ap = _Parser(prog="wpc", description="Function spaces, curves and welding for p-Weil-Petersson data.",
                 parents=[common])
    ap.add_argument("--version", action="store_true", help="print the version and exit")
    sub = ap.add_subparsers(dest="subcommand", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    s = add("norm", "Besov, BMO, VMO or A-infinity norm of a sampled function")
    s.add_argument("--kind", required=True, choices=["besov", "bmo", "vmo", "ainfty"])
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--input", required=True)
    s.add_argument("--scale", type=float)
    s.add_argument("--floor", type=float)
    s.add_argument("--method", choices=["double_sum", "fourier"], default="double_sum")

    s = add("hilbert", "Hilbert transform (line) or conjugate function (circle)")
    s.add_argument("--input", required=True)
    s.add_argument("--out")

    s = add("curve", "curve gamma = int e^w from a log-derivative")
    s.add_argument("--from-w", dest="w", required=True)
    s.add_argument("--out")

    s = add("reparam", "Q_u(w) = w o gamma_u + u")
    s.add_argument("--u", required=True)
    s.add_argument("--w", required=True)
    s.add_argument("--out")

    s = add("jmap", "J(u, v) = u + i v o gamma_u")
    s.add_argument("--u", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--no-normalize", action="store_true")
    s.add_argument("--out")

    s = add("jinv", "split w into (u, v)")
    s.add_argument("--w", required=True)
    s.add_argument("--out")

    s = add("diag", "arc-length or chord-arc diagnostics of a sampled curve")
    s.add_argument("--input", required=True)
    s.add_argument("--kind", required=True, choices=["arclen", "chordarc"])
    s.add_argument("--full", action="store_true", help="scan all pairs (chordarc)")

    s = add("lambda", "arc-length data v <-> log f' = u")
    s.add_argument("--direction", required=True, choices=["forward", "inverse"])
    s.add_argument("--input", required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=50)
    s.add_argument("--damping", type=float, default=1.0)
    s.add_argument("--out")

    s = add("weld", "welding gamma_w = h o f")
    s.add_argument("--input", required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=50)
    s.add_argument("--damping", type=float, default=1.0)
    s.add_argument("--out")

    s = add("schwarzian", "pre-Schwarzian and Schwarzian of a series g'")
    s.add_argument("--gprime", required=True)
    s.add_argument("--out")

    s = add("anorm", "analytic norm of a power series")
    s.add_argument("--kind", required=True, choices=["bloch", "besov", "ap", "ainf"])
    s.add_argument("--p", type=float)
    s.add_argument("--input", required=True)

    s = add("trace", "boundary values of a power series on the circle")
    s.add_argument("--input", required=True)
    s.add_argument("--n", type=int, default=2048)
    s.add_argument("--out")

    s = add("beltrami", "norms of a Beltrami coefficient")
    s.add_argument("--kind", required=True, choices=["mpnorm", "carleson", "profile"])
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--scales", type=_positive_list)
    s.add_argument("--input", required=True)

    s = add("extend", "Beurling-Ahlfors extension of an increasing map")
    s.add_argument("--input", required=True, help="monotone map JSON, or real u (f = gamma_u)")
    s.add_argument("--x-count", type=int, default=256)
    s.add_argument("--y-count", type=int, default=128)
    s.add_argument("--y-min", type=float, default=1e-3)
    s.add_argument("--out")

    s = add("bench", "timings of the main kernels")
    s.add_argument("--kernel", required=True, choices=["besov", "hilbert", "conjugate", "lambda"])
    s.add_argument("--sizes", type=_int_list, default=[256, 512, 1024])
    s.add_argument("--repeat", type=int, default=3)
    s.add_argument("--out")

    s = add("sweep", "lambda convergence over increasing amplitudes")
    s.add_argument("--amplitudes", type=_positive_list, default=[0.05, 0.1, 0.2])
    s.add_argument("--family", choices=["bump", "random"], default="bump")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--half-width", type=float, default=32.0)
    s.add_argument("--nodes", type=int, default=8192)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=50)
    s.add_argument("--damping", type=float, default=1.0)
    s.add_argument("--out")
    return ap


_INPUT_KEYS = ("input", "w", "u", "v", "gprime")


def parse(argv) -> RunConfig:
    """Validate argv into a RunConfig; raises UsageError (exit 2) on bad input."""
    argv = list(argv)
    ns = _build_parser().parse_args(argv)
    json_errors = getattr(ns, "json_errors", False)
    strict = getattr(ns, "strict", False)
    if ns.version:
        return RunConfig("version", json_errors=json_errors)
    if ns.subcommand is None:
        raise UsageError("wpc: a subcommand is required (one of " + ", ".join(SUBCOMMANDS) + ")")
    opts = {k: v for k, v in vars(ns).items()
            if k not in ("subcommand", "version", "json_errors", "strict")}
    inputs = {}
    for k in _INPUT_KEYS:
        if opts.get(k) is not None:
            path = opts.pop(k)
            if not Path(path).is_file():
                raise UsageError(f"wpc {ns.subcommand}: input file not found: {path}")
            inputs[k] = path
    cfg = RunConfig(ns.subcommand, inputs, opts.pop("out", None), json_errors=json_errors, strict=strict)
    cfg.p = opts.pop("p", None)
    for k in ("tol", "max_iter", "damping", "seed"):
        if k in opts:
            setattr(cfg, k, opts.pop(k))
    cfg.options = opts
    if cfg.p is not None and not cfg.p >= 1:
        raise UsageError(f"wpc {ns.subcommand}: --p must be >= 1")
    if not 0 < cfg.damping <= 1:
        raise UsageError("--damping must lie in (0, 1]")
    if cfg.tol <= 0 or cfg.max_iter < 1:
        raise UsageError("--tol must be positive and --max-iter at least 1")
    amps = opts.get("amplitudes")
    if amps is not None:
        a = np.asarray(amps)
        if np.any(a <= 0) or np.any(np.diff(a) <= 0):
            raise UsageError("--amplitudes must be positive and increasing")
    sizes = opts.get("sizes")
    if sizes is not None and any(n < 16 or n % 2 for n in sizes):
        raise UsageError("--sizes must be even integers >= 16")
    return cfg


# -- helpers ---------------------------------------------------------------------

def _emit_json(obj, out):
    text = dump_json(obj, out)
    if out is None:
        print(text)


def _emit_text(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load(path, *types):
    try:
        obj = read_any(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise ValueError(f"{path}: {exc}") from exc
    if types and not isinstance(obj, types):
        raise ValueError(f"{path}: expected {' or '.join(t.__name__ for t in types)}, got {type(obj).__name__}")
    return obj


def _line(path):
    u = _load(path, SampledFunction)
    if not u.is_line:
        raise ValueError(f"{path}: expected a line function")
    return u


def _real_line(path):
    u = _line(path)
    if not u.is_real:
        raise ValueError(f"{path}: expected real values")
    return u


# -- sweep -----------------------------------------------------------------------

SWEEP_COLUMNS = ["amplitude", "seed", "converged", "iterations", "residual", "roundtrip_error",
                 "damping", "flagged", "note"]


def sweep_lambda(amplitudes, cfg: RunConfig) -> list[dict]:
    """One row per amplitude: iterations, residual and round-trip error of lambda.

    ``family="bump"`` uses v = a * bump on [-1, 1]; ``family="random"`` draws
    one shape from the seeded generator and rescales it to sup a. The first
    non-converged amplitude is flagged.
    """
    o = cfg.options
    grid = LineGrid(o.get("half_width", 32.0), o.get("nodes", 8192))
    rng = np.random.default_rng(cfg.seed)
    if o.get("family", "bump") == "random":
        shape = random_smooth(grid, rng, amplitude=1.0).values
        shape = shape / np.max(np.abs(shape))
    else:
        shape = bump(grid.nodes)
    rows, flagged = [], False
    for a in amplitudes:
        v = SampledFunction(grid, a * shape)
        row = {"amplitude": float(a), "seed": cfg.seed}
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                r = eval_lambda(v, cfg.tol, cfg.max_iter, cfg.damping)
                back = eval_lambda_inverse(r.log_f_prime)
            rt = float(np.max(np.abs(back.values - v.values)))
            row.update(converged=r.converged, iterations=r.iterations, residual=float(r.residual),
                       roundtrip_error=rt, damping=float(r.damping), note="")
        except (ValueError, ArithmeticError, FloatingPointError) as exc:
            row.update(converged=False, iterations=cfg.max_iter, residual=float("nan"),
                       roundtrip_error=float("nan"), damping=cfg.damping, note=str(exc).replace(",", ";"))
        row["flagged"] = (not row["converged"]) and not flagged
        flagged = flagged or not row["converged"]
        rows.append(row)
    return rows


# -- dispatch --------------------------------------------------------------------

def _run(cfg: RunConfig) -> int:
    o, inp, out = cfg.options, cfg.inputs, cfg.output
    cmd = cfg.subcommand
    if cmd == "version":
        print(__version__)
        return 0
    if cmd == "norm":
        u = _load(inp["input"], SampledFunction)
        kind = o["kind"]
        if kind == "besov":
            rep = besov_seminorm(u, cfg.p if cfg.p is not None else 2.0, o["method"])
        elif kind == "bmo":
            rep = bmo_norm(u)
        elif kind == "vmo":
            if o.get("scale") is None:
                raise UsageError("wpc norm --kind vmo needs --scale")
            rep = {"value": vmo_defect(u, o["scale"]), "scale": o["scale"], "method": "dyadic_sup"}
        else:
            if o.get("floor") is None:
                raise UsageError("wpc norm --kind ainfty needs --floor")
            rep = a_infty_constant(u, o["floor"])
        _emit_json(rep if isinstance(rep, dict) else rep.to_dict(), None)
        return 0
    if cmd == "hilbert":
        u = _load(inp["input"], SampledFunction)
        _emit_json(hilbert_line(u) if u.is_line else conjugate_circle(u), out)
        return 0
    if cmd == "curve":
        curve = curve_from_log_derivative(_line(inp["w"]))
        _emit_text(write_csv_curve(curve), out)
        return 0
    if cmd == "reparam":
        _emit_json(q_transform(_real_line(inp["u"]), _line(inp["w"])), out)
        return 0
    if cmd == "jmap":
        w = j_map(_real_line(inp["u"]), _real_line(inp["v"]), normalize=not o["no_normalize"])
        _emit_json(w.w, out)
        return 0
    if cmd == "jinv":
        u, v = j_inverse(_line(inp["w"]))
        _emit_json({"u": to_dict(u), "v": to_dict(v)}, out)
        return 0
    if cmd == "diag":
        path = inp["input"]
        if Path(path).suffix.lower() == ".csv":
            curve = read_csv_curve(path)
        else:
            curve = curve_from_log_derivative(_line(path))
        if o["kind"] == "arclen":
            res = {"kind": "arclen", "value": arc_length_defect(curve)}
        else:
            res = {"kind": "chordarc", "value": chord_arc_constant(curve, full=o["full"])}
        _emit_json(res, None)
        return 0
    if cmd == "lambda":
        v = _real_line(inp["input"])
        if o["direction"] == "inverse":
            _emit_json(eval_lambda_inverse(v), out)
            return 0
        r = eval_lambda(v, cfg.tol, cfg.max_iter, cfg.damping)
        _emit_json(r, out)
        if not r.converged and cfg.strict:
            raise NumericFailure(f"lambda did not converge: residual {r.residual:.3g} "
                                 f"after {r.iterations} iterations")
        return 0
    if cmd == "weld":
        r = weld_decompose(_line(inp["input"]), cfg.tol, cfg.max_iter, cfg.damping)
        _emit_json(r, out)
        if not r.converged and cfg.strict:
            raise NumericFailure(f"lambda did not converge: residual {r.residual:.3g}")
        return 0
    if cmd == "schwarzian":
        gp = _load(inp["gprime"], PowerSeries)
        L = pre_schwarzian(gp)
        res = {"pre_schwarzian": to_dict(L)}
        if gp.degree >= 2:
            S = alpha_map(L)
            res["schwarzian"] = to_dict(S) if isinstance(S, PowerSeries) else {
                "domain": gp.domain_tag, "re": [float(np.real(S[0]))], "im": [float(np.imag(S[0]))]}
        _emit_json(res, out)
        return 0
    if cmd == "anorm":
        phi = _load(inp["input"], PowerSeries)
        kind = {"besov": "besov_p", "ap": "a_p", "ainf": "a_inf"}.get(o["kind"], o["kind"])
        _emit_json(analytic_norm(phi, kind, cfg.p).to_dict(), None)
        return 0
    if cmd == "trace":
        phi = _load(inp["input"], PowerSeries)
        try:
            grid = CircleGrid(o["n"])
        except ValueError as exc:
            raise UsageError(f"wpc trace: {exc}")
        _emit_json(boundary_trace(phi, grid), out)
        return 0
    if cmd == "beltrami":
        mu = _load(inp["input"], BeltramiField)
        if o["kind"] == "mpnorm":
            _emit_json(mp_norm(mu, cfg.p if cfg.p is not None else 2.0).to_dict(), None)
        elif o["kind"] == "carleson":
            _emit_json(carleson_norm(mu).to_dict(), None)
        else:
            scales = o.get("scales")
            if not scales:
                raise UsageError("wpc beltrami --kind profile needs --scales")
            prof = vanishing_profile(mu, scales)
            _emit_json({"scales": [float(s) for s in scales], "profile": [float(t) for t in prof]}, None)
        return 0
    if cmd == "extend":
        obj = _load(inp["input"], MonotoneMap, SampledFunction)
        f = obj if isinstance(obj, MonotoneMap) else homeo_from_real_u(obj)
        X = f.grid.half_width
        grid = HalfPlaneGrid(X, o["x_count"], o["y_min"], X, o["y_count"])
        _emit_json(beurling_ahlfors_extension(f, grid), out)
        return 0
    if cmd == "bench":
        rows = _bench(o["kernel"], o["sizes"], o["repeat"])
        _emit_text(rows_to_csv(rows, ["kernel", "size", "seconds", "value"]), out)
        return 0
    if cmd == "sweep":
        rows = sweep_lambda(o["amplitudes"], cfg)
        _emit_text(rows_to_csv(rows, SWEEP_COLUMNS), out)
        if cfg.strict and any(not r["converged"] for r in rows):
            raise NumericFailure("sweep: non-converged amplitude "
                                 + repr(next(r["amplitude"] for r in rows if not r["converged"])))
        return 0
    raise UsageError(f"unknown subcommand {cmd!r}")


def _bench(kernel, sizes, repeat):
    rows = []
    for n in sizes:
        if kernel == "conjugate":
            size = 1 << int(np.ceil(np.log2(n)))
            u = SampledFunction(CircleGrid(size), np.cos(3 * CircleGrid(size).nodes))
            fn = lambda: conjugate_circle(u).values[0]
        else:
            grid = LineGrid(8.0 if kernel != "lambda" else 32.0, n)
            u = SampledFunction(grid, (0.3 if kernel == "lambda" else 1.0) * bump(grid.nodes))
            fn = {
                "besov": lambda: besov_seminorm(u).value,
                "hilbert": lambda: hilbert_line(u).values[grid.origin_index],
                "lambda": lambda: eval_lambda(u).residual,
            }[kernel]
            size = n
        best, val = np.inf, None
        for _ in range(max(1, repeat)):
            t = time.perf_counter()
            val = fn()
            best = min(best, time.perf_counter() - t)
        rows.append({"kernel": kernel, "size": size, "seconds": float(best), "value": float(np.real(val))})
    return rows


def _report_error(cfg_json, code, exc):
    kind = {1: "numeric_failure", 2: "usage_error"}[code]
    if isinstance(exc, OSError):
        kind = "io_error"
    if cfg_json:
        sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"wpc: {exc}\n")
    return code


def execute(cfg: RunConfig) -> int:
    try:
        return _run(cfg)
    except UsageError as exc:
        return _report_error(cfg.json_errors, 2, exc)
    except (NumericFailure, OSError, ValueError, ArithmeticError, TypeError) as exc:
        return _report_error(cfg.json_errors, 1, exc)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse(argv)
    except UsageError as exc:
        return _report_error("--json-errors" in argv, 2, exc)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
