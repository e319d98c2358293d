"""Command-line interface.

    lienard check  --system eq48 --a 1 --b 1 --k 1 --C1 1
    lienard solve  --system gvdp --x0 0.5 --xdot0 1 --out sol.csv
    lienard verify --system eq48
    lienard sweep  --system eq48 --vary k=0.5,1,2
    lienard kernel-eval --k 1 --w 0.5,1,2

Options may also come from ``--config FILE`` (``key = value`` lines, ``#``
comments); flags on the command line win. Exit codes: 0 success/PASS,
1 FAIL, 2 usage error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import LienardError
from .families import BUILTINS
from .funcmodel import Polynomial, as_fraction, parse_poly
from .integrability import LienardSystem, check_chiellini, construct_g_from_f
from .kernel import G0, F_closed, KernelRegime
from .solver import (
    InitialConditions,
    characteristic_time,
    fit_initial_conditions,
    solve_parametric,
    solve_trajectory,
)
from .verify import compare, integrate_reference

__all__ = ["JobConfig", "main", "run", "build_parser", "read_config", "build_system"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("check", "construct", "solve", "verify", "sweep", "kernel-eval")
_DEFAULT_IC = {"eq48": (0.0, 1.0), "eq53": (1.0, 1.0), "gvdp": (0.5, 1.0)}
_FAMILY_KEYS = {
    "eq48": ("a", "b", "k", "C1"),
    "eq53": ("c", "d", "k", "C2", "sign"),
    "gvdp": ("mu", "k", "C1"),
}


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    options: dict = field(default_factory=dict)

    def get(self, key, default=None):
        v = self.options.get(key)
        return default if v is None else v


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _add_system(p):
    g = p.add_argument_group("system")
    g.add_argument("--system", choices=sorted(BUILTINS), help="built-in family")
    g.add_argument("--f", help="f as a polynomial '[c0, c1, ...]'")
    g.add_argument("--g", help="g as a polynomial '[c0, c1, ...]'")
    for name in ("a", "b", "k", "C1", "c", "d", "C2", "mu"):
        g.add_argument(f"--{name}", type=str)
    g.add_argument("--sign", type=int, choices=(-1, 1))
    g.add_argument("--domain", help="working interval 'lo,hi'")


def _add_ic(p):
    p.add_argument("--x0", type=float)
    p.add_argument("--xdot0", type=float)
    p.add_argument("--t-end", dest="t_end", type=float, help="final time (default: 5 characteristic times)")
    p.add_argument("--n-tau", dest="n_tau", type=float, default=5.0)
    p.add_argument("--n-samples", dest="n_samples", type=int, default=128,
                   help="samples per piece (trajectory) or per w-range")
    p.add_argument("--w-range", dest="w_range", help="sample one branch over 'w_lo,w_hi' instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lienard", description="Exact solutions of integrable Lienard equations")
    parser.add_argument("--config", help="key = value file; command-line flags override it")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("check", help="test the integrability condition and estimate k")
    _add_system(p)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=64)

    p = sub.add_parser("construct", help="build g from f (or f from g)")
    _add_system(p)

    p = sub.add_parser("solve", help="write the exact solution as CSV (w,x,t,xdot)")
    _add_system(p)
    _add_ic(p)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot", help="SVG path for x(t)")

    p = sub.add_parser("verify", help="compare the exact solution with an RK reference")
    _add_system(p)
    _add_ic(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--ref-tol", dest="ref_tol", type=float, default=1e-12)
    p.add_argument("--out", help="report CSV path")
    p.add_argument("--plot", help="SVG path for x(t)")

    p = sub.add_parser("sweep", help="solve + verify over a parameter grid")
    _add_system(p)
    _add_ic(p)
    p.add_argument("--vary", action="append", help="name=v1,v2,... (repeatable; full grid)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--ref-tol", dest="ref_tol", type=float, default=1e-12)
    p.add_argument("--out", help="summary CSV path (default: stdout)")

    p = sub.add_parser("kernel-eval", help="print F(w, k) and optionally G0")
    p.add_argument("--k", type=float)
    p.add_argument("--w", help="comma-separated w values")
    p.add_argument("--G0", dest="G0", help="s,s_ref,k1,k2")
    return parser


# ------------------------------------------------------------------ helpers


def _floats(text, what):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def build_system(cfg: JobConfig) -> LienardSystem:
    name = cfg.get("system")
    dom = cfg.get("domain")
    if name:
        kw = {key: cfg.get(key) for key in _FAMILY_KEYS[name] if cfg.get(key) is not None}
        if "sign" in kw:
            kw["sign"] = int(kw["sign"])
        if dom:
            kw["domain"] = tuple(_floats(dom, "domain"))
        try:
            return BUILTINS[name](**kw)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad parameters for {name}: {exc}") from None
    f_txt, g_txt = cfg.get("f"), cfg.get("g")
    if not (f_txt and g_txt):
        raise UsageError("give --system or both --f and --g")
    try:
        f, g = parse_poly(f_txt), parse_poly(g_txt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    domain = tuple(_floats(dom, "domain")) if dom else (-2.0, 2.0)
    return LienardSystem(f, g, domain=domain, name="custom")


def _ic(cfg, sys):
    d = _DEFAULT_IC.get(cfg.get("system"), (None, None))
    x0, v0 = cfg.get("x0", d[0]), cfg.get("xdot0", d[1])
    if x0 is None or v0 is None:
        raise UsageError("--x0 and --xdot0 are required for custom systems")
    try:
        return InitialConditions(float(x0), float(v0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _k_of(sys):
    if sys.k is not None:
        return sys.k
    cert = check_chiellini(sys)
    if not cert.holds:
        raise LienardError(f"system is not Chiellini-integrable: {cert}")
    return cert.k


def _solve(cfg, sys):
    ic = _ic(cfg, sys)
    params = fit_initial_conditions(sys, _k_of(sys), ic)
    n = int(cfg.get("n_samples", 128))
    if cfg.get("w_range"):
        wr = _floats(cfg.get("w_range"), "w-range")
        if len(wr) != 2:
            raise UsageError("--w-range needs two values")
        return ic, solve_parametric(sys, params, wr, n)
    t_end = cfg.get("t_end")
    if t_end is None:
        t_end = float(cfg.get("n_tau", 5.0)) * characteristic_time(sys, ic.x0)
    return ic, solve_trajectory(sys, params, float(t_end), n)


def _fmt(v):
    return f"{float(v):.17g}"


def solution_csv(sol) -> str:
    lines = ["w,x,t,xdot"]
    for row in zip(sol.w, sol.x, sol.t, sol.xdot):
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".lienard-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def svg_plot(t, x, title="x(t)", width=640, height=400) -> str:
    """A single polyline in a static SVG 1.1 document."""
    t, x = np.asarray(t, float), np.asarray(x, float)
    pad = 40
    tx0, tx1 = float(t.min()), float(t.max())
    y0, y1 = float(x.min()), float(x.max())
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    if tx1 == tx0:
        tx1 = tx0 + 1.0
    px = pad + (t - tx0) / (tx1 - tx0) * (width - 2 * pad)
    py = height - pad - (x - y0) / (y1 - y0) * (height - 2 * pad)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">\n'
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#999"/>\n'
        f'<text x="{pad}" y="{pad - 10}" font-size="14">{title}</text>\n'
        f'<text x="{pad}" y="{height - 10}" font-size="11">t in [{tx0:.4g}, {tx1:.4g}], '
        f'x in [{y0:.4g}, {y1:.4g}]</text>\n'
        f'<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{pts}"/>\n'
        "</svg>\n"
    )


def _emit(text, path, out):
    if path:
        write_atomic(path, text)
    else:
        out.write(text)


# ------------------------------------------------------------------ commands


def _cmd_check(cfg, out):
    sys_ = build_system(cfg)
    cert = check_chiellini(sys_, int(cfg.get("grid_size", 64)))
    out.write(str(cert) + "\n")
    return EXIT_OK if cert.holds else EXIT_FAIL


def _cmd_construct(cfg, out):
    k = cfg.get("k")
    if k is None:
        raise UsageError("construct needs --k")
    if cfg.get("system"):
        sys_ = build_system(cfg)
        out.write(f"f = {_describe(sys_.f)}\ng = {_describe(sys_.g)}\n")
        return EXIT_OK
    if cfg.get("f"):
        C1 = cfg.get("C1")
        if C1 is None:
            raise UsageError("construct from f needs --C1")
        g = construct_g_from_f(parse_poly(cfg.get("f")), k, C1)
        out.write(f"g = {g.to_text()}\n")
        return EXIT_OK
    if cfg.get("g"):
        C2 = cfg.get("C2")
        if C2 is None:
            raise UsageError("construct from g needs --C2")
        g = parse_poly(cfg.get("g"))
        sign = int(cfg.get("sign", 1))
        rad = Polynomial([C2]) + g.antiderivative() * (2 * as_fraction(k))
        out.write(f"f = {'+' if sign > 0 else '-'}g / sqrt(R), g = {g.to_text()}, R = {rad.to_text()}\n")
        return EXIT_OK
    raise UsageError("construct needs --f (with --C1) or --g (with --C2)")


def _describe(spec):
    return spec.to_text() if isinstance(spec, Polynomial) else (spec.name or "black box")


def _cmd_solve(cfg, out):
    sys_ = build_system(cfg)
    _, sol = _solve(cfg, sys_)
    _emit(solution_csv(sol), cfg.get("out"), out)
    if cfg.get("plot"):
        order = np.argsort(sol.t)
        write_atomic(cfg.get("plot"), svg_plot(sol.t[order], sol.x[order], f"{sys_.name}: x(t)"))
    if sol.truncated:
        sys.stderr.write(f"note: {sol.truncated}\n")
    return EXIT_OK


def _verify_one(cfg, sys_):
    ic, sol = _solve(cfg, sys_)
    t0, t1 = sol.t_span
    ref = integrate_reference(sys_, ic, (t0, t1), float(cfg.get("ref_tol", 1e-12)))
    return sol, compare(sol, ref, float(cfg.get("tol", 1e-6)))


def _cmd_verify(cfg, out):
    sys_ = build_system(cfg)
    sol, rep = _verify_one(cfg, sys_)
    if cfg.get("out"):
        write_atomic(cfg.get("out"), rep.to_csv())
    if cfg.get("plot"):
        write_atomic(cfg.get("plot"), svg_plot(rep.table[:, 0], rep.table[:, 1], f"{sys_.name}: x(t)"))
    out.write(rep.summary() + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_sweep(cfg, out):
    axes = []
    for spec in cfg.get("vary") or []:
        if "=" not in spec:
            raise UsageError(f"--vary expects name=v1,v2,..., got {spec!r}")
        name, values = spec.split("=", 1)
        axes.append((name.strip(), [v.strip() for v in values.split(",") if v.strip()]))
    if not axes:
        raise UsageError("sweep needs at least one --vary name=v1,v2,...")
    names = [a[0] for a in axes]
    rows = [",".join(names + ["max_abs_x_error", "max_abs_xdot_error", "pass"])]
    ok = True
    for combo in _grid([a[1] for a in axes]):
        opts = dict(cfg.options)
        opts.update(dict(zip(names, combo)))
        point = JobConfig(cfg.command, opts)
        try:
            _, rep = _verify_one(point, build_system(point))
            row = [_fmt(rep.max_abs_x_error), _fmt(rep.max_abs_xdot_error), "true" if rep.passed else "false"]
            ok &= rep.passed
        except LienardError as exc:
            row = ["nan", "nan", f"error: {str(exc).replace(',', ';')}"]
            ok = False
        rows.append(",".join(list(combo) + row))
    _emit("\n".join(rows) + "\n", cfg.get("out"), out)
    return EXIT_OK if ok else EXIT_FAIL


def _grid(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _grid(lists[1:]):
            yield (head,) + tail


def _cmd_kernel(cfg, out):
    if cfg.get("w"):
        if cfg.get("k") is None:
            raise UsageError("kernel-eval --w needs --k")
        reg = KernelRegime.for_k(float(cfg.get("k")))
        out.write(f"# regime {reg.tag.value}\nw,F\n")
        for w in _floats(cfg.get("w"), "w"):
            out.write(f"{_fmt(w)},{_fmt(F_closed(w, reg))}\n")
    if cfg.get("G0"):
        vals = _floats(cfg.get("G0"), "G0")
        if len(vals) != 4:
            raise UsageError("--G0 expects s,s_ref,k1,k2")
        out.write(f"G0={_fmt(G0(*vals))}\n")
    if not (cfg.get("w") or cfg.get("G0")):
        raise UsageError("kernel-eval needs --w or --G0")
    return EXIT_OK


_DISPATCH = {
    "check": _cmd_check,
    "construct": _cmd_construct,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "kernel-eval": _cmd_kernel,
}


def run(config: JobConfig, out=None) -> int:
    """Execute one job; returns the process exit code."""
    out = out or sys.stdout
    if config.command not in _DISPATCH:
        sys.stderr.write(f"error: unknown command {config.command!r}\n")
        return EXIT_USAGE
    try:
        return _DISPATCH[config.command](config, out)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (LienardError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def parse_job(argv: Optional[List[str]] = None) -> JobConfig:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    file_opts = read_config(known.config) if known.config else {}
    if not any(a in COMMANDS for a in argv) and "command" in file_opts:
        argv.append(file_opts["command"])
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.error("a command is required: " + ", ".join(COMMANDS))
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    known_keys = {a.dest for a in sub._actions}
    opts = {k: v for k, v in file_opts.items() if k in known_keys}
    unknown = set(file_opts) - known_keys - {"command"}
    if unknown:
        parser.error(f"unknown config key(s) for {ns.command}: {', '.join(sorted(unknown))}")
    explicit = {a.dest for a in sub._actions for s in a.option_strings if s in argv or
                any(x.startswith(s + "=") for x in argv)}
    for key, value in vars(ns).items():
        if key in ("command", "config", "help"):
            continue
        if key in explicit or key not in opts:
            opts[key] = value
    if isinstance(opts.get("vary"), str):
        opts["vary"] = [v for v in opts["vary"].split(";") if v.strip()]
    for key in ("x0", "xdot0", "t_end", "n_tau", "tol", "ref_tol"):
        if isinstance(opts.get(key), str):
            opts[key] = float(opts[key])
    for key in ("n_samples", "grid_size", "sign"):
        if isinstance(opts.get(key), str):
            opts[key] = int(opts[key])
    return JobConfig(ns.command, opts)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        job = parse_job(argv)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    return run(job)


if __name__ == "__main__":
    raise SystemExit(main())
