"""Command-line front door: single evaluations, sweeps, cross-checks, fits.

Subcommands
-----------
invariant   one state-sum evaluation at level N
sweep       growth sweep over a range of odd N (invariant / kashaev /
            quantum), CSV rows plus a fit footer
check       exact-identity, residue, oracle and saddle-constant suites
saddle      closed-form saddle data for a case/variant
classical   one classical integral evaluation
fit         re-fit a growth CSV

Output: stdout carries a human summary; --output writes the machine rows.
CSV schema: header ``N,value_re,value_im,modulus,growth,digits,seconds``
with decimal strings at full working precision and ``#fit`` footer lines.
Exit codes: 0 success, 1 check failure, 2 usage/validation error,
3 numeric failure (pole hit, non-convergence).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import mpmath as mp

from . import asymptotics as asy
from . import gluing, statesum
from .errors import QhiError
from .precision import PrecisionContext, context_for_level

CSV_HEADER = "N,value_re,value_im,modulus,growth,digits,seconds"


def _fail_usage(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _parse_complex(text: str):
    if text.strip().lower() == "complete":
        return "complete"
    try:
        re_s, im_s = text.split(",")
        return mp.mpc(mp.mpf(re_s.strip()), mp.mpf(im_s.strip()))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"complex values are 're,im' decimal pairs or 'complete': "
            f"{text!r}") from exc


def _read_config(path: str | None) -> dict:
    cfg = {}
    if not path:
        return cfg
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def _resolve_digits(args, n_for_schedule: int | None = None) -> int:
    """Precedence: QHI_PRECISION_DIGITS > --digits > config file >
    scheduled default."""
    env = os.environ.get("QHI_PRECISION_DIGITS")
    if env:
        return int(env)
    if getattr(args, "digits", None):
        return int(args.digits)
    cfg = _read_config(getattr(args, "config", None))
    if "digits" in cfg:
        return int(cfg["digits"])
    if n_for_schedule is not None:
        return context_for_level(n_for_schedule).digits
    return 30


def _build_point(args, ctx: PrecisionContext):
    u0 = getattr(args, "u0", "complete") or "complete"
    if u0 == "complete":
        return gluing.complete_point(ctx)
    roots = gluing.solve_curve(u0, ctx)
    branch = [r for r in roots if mp.im(r.v0) < 0] or roots
    return branch[0]


def _colors_for_case(case: str, a0: int, ctx: PrecisionContext):
    lk_lambda = (2j if case == "a" else 4j) * mp.pi
    return gluing.colors_from_weights(a0, lk_lambda, 0, ctx)


def _row(n, value, growth, digits, seconds, prec) -> str:
    value = mp.mpc(value)
    return ",".join([
        str(n),
        mp.nstr(mp.re(value), prec),
        mp.nstr(mp.im(value), prec),
        mp.nstr(abs(value), prec),
        mp.nstr(mp.mpf(growth), prec),
        str(digits),
        f"{seconds:.3f}",
    ])


def _emit(lines: list[str], args, as_json=None):
    text = "\n".join(lines) + "\n"
    path = getattr(args, "output", None)
    if path:
        with open(path, "w") as fh:
            if getattr(args, "format", "csv") == "json" and as_json is not None:
                json.dump(as_json, fh, indent=1)
            else:
                fh.write(text)
    print(text, end="")


# ---------------------------------------------------------------------------
# invariant
# ---------------------------------------------------------------------------

def cmd_invariant(args) -> int:
    if args.N < 3 or args.N % 2 == 0:
        return _fail_usage(f"N must be an odd integer >= 3, got {args.N}")
    if args.a0 % 2 or args.a0 < 4:
        return _fail_usage("a0 must be an even integer >= 4")
    digits = _resolve_digits(args, args.N)
    ctx = PrecisionContext(digits=digits)
    colors = _colors_for_case(args.case, args.a0, ctx)
    point = _build_point(args, ctx)
    q = gluing.quantum_lift(point, colors, args.N, ctx)
    res = statesum.full_qhi(q, ctx)
    case = gluing.classify_case(colors).value
    print(f"# case ({case}), a1 = {colors.a1}, growth = "
          f"{mp.nstr(res.growth, 10)}")
    rows = [CSV_HEADER,
            _row(res.N, res.value, res.growth, res.digits_used,
                 res.seconds, digits)]
    as_json = {"N": res.N, "growth": float(res.growth), "case": case,
               "modulus": mp.nstr(res.full_modulus, digits)}
    _emit(rows, args, as_json)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    if args.start % 2 == 0 or args.step % 2 != 0:
        return _fail_usage("sweep range must contain only odd N "
                           "(odd start, even step)")
    ns = list(range(args.start, args.end + 1, args.step))
    if not ns:
        return _fail_usage("empty sweep range")
    pairs = []
    rows = [CSV_HEADER]
    for n in ns:
        digits = _resolve_digits(args, n)
        ctx = PrecisionContext(digits=digits)
        t0 = time.perf_counter()
        if args.quantity == "kashaev":
            value = statesum.kashaev(n, ctx)
            growth = 2 * mp.pi / n * mp.log(abs(value))
        elif args.quantity == "invariant":
            colors = _colors_for_case(args.case, args.a0, ctx)
            q = gluing.quantum_lift(_build_point(args, ctx), colors, n, ctx)
            res = statesum.full_qhi(q, ctx)
            value, growth = res.value, res.growth
        else:  # quantum
            qctx = PrecisionContext(digits=digits, quad_rel_tol=float(
                mp.mpf(10) ** -(8 + 0.071 * n)))
            colors = _colors_for_case(args.case, args.a0, qctx)
            q = gluing.quantum_lift(_build_point(args, qctx), colors, n,
                                    qctx)
            r = asy.quantum_integral(q, qctx)
            value, growth = r.sigma, r.growth
        seconds = time.perf_counter() - t0
        pairs.append((n, value))
        rows.append(_row(n, value, growth, digits, seconds, digits))
        print(f"N={n:5d}  growth={mp.nstr(growth, 10)}")
    series = asy.GrowthSeries.from_values(pairs, PrecisionContext(digits=30))
    fit = asy.growth_fit(series, min_n=args.fit_min_n)
    rows.append(f"#fit model={fit.model}")
    rows.append(f"#fit c0={fit.c0!r} c1={fit.c1!r} c2={fit.c2!r} "
                f"residual={fit.residual!r}")
    print(f"fit: c0={fit.c0:.6f} c1={fit.c1:.4f} c2={fit.c2:.4f} "
          f"residual={fit.residual:.2e}")
    _emit(rows, args)
    return 0


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _suite_exact(n, ctx):
    import random
    rng = random.Random(20260808)
    checks = []
    from .dilog import g_n, omega, s_hat
    g1 = g_n(1, n, ctx)
    checks.append(("g_N(1) modulus", abs(abs(g1) - mp.sqrt(n)),
                   float(ctx.eps(8))))
    worst = mp.mpf(0)
    for _ in range(10):
        z = mp.mpc(rng.uniform(-2, 1), rng.uniform(0.3, 5.9))
        lhs = s_hat(z, n, ctx)
        rhs = s_hat(z + 2j * mp.pi / n, n, ctx) \
            * (1 - mp.exp(z + 2j * mp.pi / n))
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    checks.append(("S_N shift relation", worst, float(ctx.eps(5))))
    worst = mp.mpf(0)
    for _ in range(5):
        zc = mp.mpc(rng.uniform(-2, -0.2), rng.uniform(0.3, 2.9))
        x = mp.exp(zc)
        y = mp.exp(mp.log(1 - mp.exp(n * zc)) / n)
        k = rng.randrange(1, n)
        lhs = omega(x, y, k, n, ctx)
        rhs = y ** k * s_hat(zc + 2j * mp.pi * k / n, n, ctx) \
            / s_hat(zc, n, ctx)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
        worst = max(worst, abs(omega(x, y, n, n, ctx) - 1))
    checks.append(("omega ratio/periodicity", worst, float(ctx.eps(5))))
    checks.append(("J_N(1,1|0) = Kashaev",
                   abs(statesum.j_kernel(1, 1, 0, n, ctx)
                       - statesum.kashaev(n, ctx))
                   / statesum.kashaev(n, ctx), float(ctx.eps(8))))
    p = gluing.complete_point(ctx)
    colors = gluing.colors_from_weights(4, 2j * mp.pi, 0, ctx)
    q = gluing.quantum_lift(p, colors, n, ctx)
    red = statesum.reduced_qhi(q, ctx)
    checks.append(("kernel decomposition",
                   abs(statesum.kernel_total(q, ctx) - red) / abs(red),
                   float(ctx.eps(12))))
    return checks


def _suite_residue(n, case, ctx):
    p = gluing.complete_point(ctx)
    colors = _colors_for_case(case, 4, ctx)
    q = gluing.quantum_lift(p, colors, n, ctx)
    contour = statesum.residue_contour(q, ctx)
    res = statesum.residue_check(q, contour, ctx)
    return [("residue identity", res.rel_diff, 1e-8)]


def _suite_oracle(n, case, ctx):
    p = gluing.complete_point(ctx)
    colors = _colors_for_case(case, 4, ctx)
    q = gluing.quantum_lift(p, colors, n, ctx)
    su = statesum.sigma_n(q.uq[0], q.uq[1], n, ctx)
    sb = statesum.sigma_n_bruteforce(q.uq[0], q.uq[1], n, ctx)
    red = statesum.reduced_qhi(q, ctx)
    rb = statesum.reduced_qhi_bruteforce(q, ctx)
    return [("sigma vs brute force", abs(su - sb) / abs(su),
             float(ctx.eps(10))),
            ("reduced vs brute force", abs(red - rb) / abs(red),
             float(ctx.eps(10)))]


def _suite_spm(n, ctx):
    checks = []
    for kind, target in ((asy.PotentialKind.PLUS, None),
                         (asy.PotentialKind.MINUS, None)):
        pot = asy.Potential.case_b(kind)
        pred = asy.spm_prediction(pot, n, ctx)
        val = asy.classical_integral(
            pot, n, 0.05 * mp.pi / n, 1.5 * mp.pi / n, ctx,
            route="deformed", confirm=False,
            params=asy.ContourParams(alpha_minus=0.05, alpha_plus=1.5))
        rel = abs(mp.sqrt(n) * abs(val) - mp.sqrt(n) * pred.amplitude) \
            / (mp.sqrt(n) * pred.amplitude)
        checks.append((f"SPM modulus ({kind.value})", rel, 0.01))
    return checks


def cmd_check(args) -> int:
    n = args.N
    if n % 2 == 0:
        return _fail_usage("N must be odd")
    digits = _resolve_digits(args, None) if args.digits else (
        26 if args.suite in ("residue", "spm") else 32)
    tol = 1e-10 if args.suite in ("residue", "spm") else 0.0
    ctx = PrecisionContext(digits=digits, quad_rel_tol=tol)
    if args.suite == "exact":
        checks = _suite_exact(n, ctx)
    elif args.suite == "residue":
        checks = _suite_residue(n, args.case, ctx)
    elif args.suite == "oracle":
        checks = _suite_oracle(n, args.case, ctx)
    elif args.suite == "spm":
        checks = _suite_spm(n, ctx)
    else:
        return _fail_usage(f"unknown suite {args.suite!r}")
    failed = 0
    for name, metric, bound in checks:
        ok = metric <= bound
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:30s} "
              f"metric={mp.nstr(mp.mpf(metric), 4)} bound={bound:g}")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# saddle / classical / fit
# ---------------------------------------------------------------------------

def _potential_from_args(args):
    kind = asy.PotentialKind(args.variant)
    if args.case == "a":
        return asy.Potential.case_a(kind)
    return asy.Potential.case_b(kind)


def cmd_saddle(args) -> int:
    ctx = PrecisionContext(digits=_resolve_digits(args))
    pot = _potential_from_args(args)
    z0 = asy.saddle_points(pot, ctx)
    f0 = asy.potential_eval(pot, z0, ctx)
    fpp = asy.second_derivative(pot, z0, ctx)
    print(f"z0   = {mp.nstr(z0, ctx.digits)}")
    print(f"f    = {mp.nstr(f0, ctx.digits)}")
    print(f"f''  = {mp.nstr(fpp, ctx.digits)}")
    pred = asy.spm_prediction(pot, 2001, ctx)
    print(f"sqrt(N)*amplitude = {mp.nstr(pred.amplitude * mp.sqrt(2001), 10)}"
          f"   phase slope = {mp.nstr(pred.phase_slope, 10)}")
    return 0


def cmd_classical(args) -> int:
    if args.N % 2 == 0:
        return _fail_usage("N must be odd")
    ctx = PrecisionContext(digits=_resolve_digits(args) if args.digits
                           else 30, quad_rel_tol=1e-10)
    pot = _potential_from_args(args)
    t0 = time.perf_counter()
    val = asy.classical_integral(
        pot, args.N, args.alpha_minus * mp.pi / args.N,
        args.alpha_plus * mp.pi / args.N, ctx, route=args.route)
    seconds = time.perf_counter() - t0
    growth = 2 * mp.pi / args.N * mp.log(abs(val))
    rows = [CSV_HEADER,
            _row(args.N, val, growth, ctx.digits, seconds, ctx.digits)]
    _emit(rows, args)
    return 0


def cmd_fit(args) -> int:
    pairs = []
    with open(args.input) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("N,"):
                continue
            parts = line.split(",")
            pairs.append((int(parts[0]),
                          mp.mpc(mp.mpf(parts[1]), mp.mpf(parts[2]))))
    series = asy.GrowthSeries.from_values(pairs, PrecisionContext(digits=30))
    fit = asy.growth_fit(series, min_n=args.min_n)
    print(f"c0={fit.c0!r} c1={fit.c1!r} c2={fit.c2!r} "
          f"residual={fit.residual!r}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qhilab",
        description="Quantum hyperbolic invariants of the figure-eight "
                    "knot complement: evaluations, sweeps and checks.")
    ap.add_argument("--config", help="flat key=value config file")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_case=True):
        p.add_argument("--digits", type=int, default=0,
                       help="working precision (decimal digits); "
                            "QHI_PRECISION_DIGITS overrides")
        p.add_argument("--output", "-o", help="write machine output here")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--config", help="flat key=value config file")
        if with_case:
            p.add_argument("--case", choices=("a", "b"), default="a",
                           help="longitude-weight parity class")
            p.add_argument("--a0", type=int, default=4)
            p.add_argument("--u0", type=_parse_complex, default="complete",
                           help="curve coordinate: 're,im' or 'complete'")

    p = sub.add_parser("invariant", help="one state-sum evaluation")
    p.add_argument("--N", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("sweep", help="growth sweep over odd N")
    p.add_argument("--quantity", choices=("invariant", "kashaev", "quantum"),
                   default="invariant")
    p.add_argument("--start", type=int, default=5)
    p.add_argument("--end", type=int, default=101)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--fit-min-n", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="identity / oracle / constant suites")
    p.add_argument("--suite", choices=("exact", "residue", "oracle", "spm"),
                   default="exact")
    p.add_argument("--N", type=int, default=7)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("saddle", help="saddle-point data")
    p.add_argument("--variant", choices=("minus", "plus"), required=True)
    common(p)
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("classical", help="one classical integral")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--variant", choices=("minus", "plus"), required=True)
    p.add_argument("--route", choices=("auto", "vertical", "deformed"),
                   default="auto")
    p.add_argument("--alpha-minus", type=float, default=0.5)
    p.add_argument("--alpha-plus", type=float, default=1.5)
    common(p)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("fit", help="re-fit a growth CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--min-n", type=int, default=None)
    common(p, with_case=False)
    p.set_defaults(func=cmd_fit)
    return ap


_CONFIG_DEFAULTS = {"a0": 4, "case": "a", "u0": "complete"}


def _apply_config(args):
    """Config-file values fill in whatever flags were left at their
    defaults (flags override file; QHI_PRECISION_DIGITS overrides both,
    handled in _resolve_digits)."""
    cfg = _read_config(getattr(args, "config", None))
    for key, default in _CONFIG_DEFAULTS.items():
        if key in cfg and getattr(args, key, None) == default:
            value = cfg[key]
            if key == "a0":
                value = int(value)
            elif key == "u0":
                value = _parse_complex(value)
            setattr(args, key, value)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_config(args)
    try:
        return args.func(args)
    except QhiError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
