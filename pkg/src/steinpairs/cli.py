"""Command-line front end.

Usage::

    steinpairs narayana-verify --n-range 2:50 --format csv
    steinpairs pb-verify --p 1/2,1/3,3/4
    steinpairs pb-verify --random 200 --seed 7
    steinpairs hyp-verify --sweep --N-max 25
    steinpairs stein-check --mu 2 --sigma2 2/5 --trials 50 --seed 7

Exit codes: 0 every check passed, 1 some check failed (row has ok=false),
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import __version__
from .applications import (
    bound7,
    eq7_tp_comparison,
    hyp_s_and_varpoly,
    theorem3_certify,
    theorem4_certify,
)
from .distributions import binhat_dist, binhat_params, narayana_dist, raw_moments
from .errors import DomainError
from .narayana import (
    closed_moments,
    corollary_checks,
    lemma5_identities,
    moment_ladder,
    narayana_instance,
    pair_checks,
    theorem1_certify,
)
from .serialize import decimal_string, exact_string
from .stein_core import (
    characterization_check,
    monomials,
    pair_identity_check,
    perturb,
    random_functions,
    tail_and_a_estimates,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
ENV_PREFIX = "STEINPAIRS_"


class UsageError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or an integer. Decimal literals are refused."""
    text = text.strip()
    if not text or "." in text or "e" in text.lower():
        raise UsageError(f"not an exact rational: {text!r} (use a/b)")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exact rational: {text!r}") from None


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"bad range {text!r}, expected lo:hi") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def parse_p_list(text: str) -> list[Fraction]:
    ps = [parse_rational(x) for x in text.split(",")]
    for x in ps:
        if not 0 <= x <= 1:
            raise UsageError(f"probability {x} outside [0, 1]")
    return ps


def random_p_lists(count: int, seed: int, min_len: int = 2, max_len: int = 50,
                   max_den: int = 30) -> list[list[Fraction]]:
    """Seeded random rational probability lists with positive variance."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        size = rng.randint(min_len, max_len)
        ps = []
        for _ in range(size):
            den = rng.randint(1, max_den)
            ps.append(Fraction(rng.randint(0, den), den))
        if all(x * (1 - x) == 0 for x in ps):
            ps[rng.randrange(size)] = Fraction(1, 2)
        out.append(ps)
    return out


# ---------------------------------------------------------------- row builders
# Module-level so they pickle into worker processes.

def narayana_row(n: int) -> dict:
    cert = theorem1_certify(n)
    cor = corollary_checks(n)
    pairs = pair_checks(n)
    lemma5 = lemma5_identities(n)
    moments_ok = (moment_ladder(n) == closed_moments(n)
                  == raw_moments(narayana_dist(n), 4))
    row = {
        "n": n,
        "tv": cert.tv,
        "bound_12_over_n": cert.bound_12_over_n,
        "intermediate_bound": float(cert.intermediate),
        "slack_ratio": cert.report.slack_ratio,
        "kolmogorov": cor["kolmogorov"],
        "kolmogorov_bound": cor["kolmogorov_bound"],
        "local_limit_stat": cor["local_limit_stat"],
        "moments_ok": moments_ok,
        "reversibility_ok": pairs["reversibility_ok"],
        "lambda_ok": pairs["lambda_ok"] and cert.lambda_ok,
        "mean_s_ok": pairs["mean_s_ok"],
        "var_s_ok": pairs["var_s_ok"] and all(lemma5.values()),
        "theorem1_ok": cert.holds,
        "corollary_ok": cor["kolmogorov_ok"] and cor["sigma2_ge_n_over_8"],
    }
    row["ok"] = all(v for k, v in row.items() if k.endswith("_ok"))
    return row


def pb_row(item: tuple[int, Sequence[Fraction]]) -> dict:
    index, ps = item
    digest = hashlib.sha1(",".join(exact_string(x) for x in ps).encode()).hexdigest()[:12]
    cert = theorem3_certify(ps)
    row = {"index": index, "size": len(ps), "p_digest": digest,
           "mu": cert.mu, "sigma2": cert.sigma2, "degenerate": cert.degenerate}
    if cert.degenerate:
        row.update(tv=None, bound6=None, bound7=None, tv_tp=None, better=None,
                   abstract_ok=None, ok=True)
        return row
    cmp = eq7_tp_comparison(ps)
    row.update(
        tv=cert.report.tv_exact,
        bound6=float(cert.report.bound),
        bound7=float(bound7(ps)),
        tv_tp=cmp["tv_tp"],
        better=cmp["better"],
        abstract_ok=cert.matches_abstract_bound,
        ok=cert.holds,
    )
    return row


def hyp_row(params: tuple[int, int, int]) -> dict:
    N, n, m = params
    cert = theorem4_certify(N, n, m)
    vp = hyp_s_and_varpoly(N, n, m)
    tv = cert.tv
    row = {
        "N": N, "n": n, "m": m,
        "sigma2": cert.abstract.params["sigma2"],
        "lambda": cert.abstract.params["lambda"],
        "tv": tv,
        "tv_times_N": None if tv is None else tv * N,
        "bound8": float(cert.report.bound),
        "abstract_bound": float(cert.abstract.bound),
        "pair_ok": cert.abstract.valid,
        "s_closed_ok": vp["s_closed_form_ok"],
        "identity_ok": vp["identity_ok"],
        "steps_ok": vp["step1_ok"] and vp["step2_ok"],
        "bound_ok": cert.holds,
    }
    row["ok"] = all(v for k, v in row.items() if k.endswith("_ok"))
    return row


# ------------------------------------------------------------------ rendering

def _cell(value, precision: str):
    if isinstance(value, Fraction):
        return float(value) if precision == "float64" else decimal_string(value)
    return value


def render_json(header: dict, rows: list[dict], precision: str) -> str:
    out_rows = []
    for row in rows:
        exact = {k: exact_string(v) for k, v in row.items() if isinstance(v, Fraction)}
        rendered = {k: _cell(v, precision) for k, v in row.items()}
        rendered["exact"] = exact
        out_rows.append(rendered)
    return json.dumps({"header": header, "rows": out_rows}, indent=2) + "\n"


def render_csv(header: dict, rows: list[dict], precision: str) -> str:
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    if not rows:
        return buf.getvalue()
    fields = []
    for key in rows[0]:
        fields.append(key)
        if any(isinstance(r.get(key), Fraction) for r in rows):
            fields.append(f"{key}_exact")
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = {}
        for key, value in row.items():
            out[key] = _cell(value, precision)
            if f"{key}_exact" in fields:
                out[f"{key}_exact"] = exact_string(value) if isinstance(value, Fraction) else ""
        writer.writerow(out)
    return buf.getvalue()


def render_table(header: dict, rows: list[dict], precision: str) -> str:
    lines = [f"# {k}: {v}" for k, v in header.items()]
    if not rows:
        return "\n".join(lines) + "\n"
    keys = list(rows[0])

    def fmt(v):
        v = _cell(v, precision)
        if isinstance(v, str) and len(v) > 14:
            try:
                return f"{float(v):.6g}"
            except ValueError:
                return v
        return "-" if v is None else str(v)

    table = [keys] + [[fmt(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(keys))]
    for row in table:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "table": render_table}


def run_rows(fn: Callable, items: Iterable, workers: int) -> list[dict]:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _header(args, grid: dict) -> dict:
    return {
        "tool": "steinpairs",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "precision": args.precision,
        "grid": grid,
    }


def _emit(args, grid: dict, rows: list[dict]) -> int:
    text = RENDERERS[args.format](_header(args, grid), rows, args.precision)
    sys.stdout.write(text)
    return EXIT_OK if all(r.get("ok", True) for r in rows) else EXIT_VIOLATION


# ------------------------------------------------------------------- commands

def cmd_narayana_verify(args) -> int:
    lo, hi = parse_range(args.n_range)
    if lo < 2:
        raise UsageError("n must be >= 2")
    rows = run_rows(narayana_row, range(lo, hi + 1), args.workers)
    return _emit(args, {"n_range": [lo, hi]}, rows)


def _load_p_file(path: str) -> list[list[Fraction]]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if data and not isinstance(data[0], list):
        data = [data]
    lists = []
    for entry in data:
        if not isinstance(entry, list) or not entry:
            raise UsageError("p-file must hold a list of non-empty lists")
        lists.append(parse_p_list(",".join(str(x) for x in entry)))
    return lists


def cmd_pb_verify(args) -> int:
    if args.p is not None:
        lists, grid = [parse_p_list(args.p)], {"p": args.p}
    elif args.p_file is not None:
        lists, grid = _load_p_file(args.p_file), {"p_file": args.p_file}
    elif args.random is not None:
        if args.random < 1 or args.max_len < 2:
            raise UsageError("--random needs a positive count and --max-len >= 2")
        lists = random_p_lists(args.random, args.seed, max_len=args.max_len)
        grid = {"random": args.random, "max_len": args.max_len}
    else:
        raise UsageError("one of --p, --p-file, --random is required")
    rows = run_rows(pb_row, enumerate(lists), args.workers)
    return _emit(args, grid, rows)


def cmd_hyp_verify(args) -> int:
    if args.sweep:
        if args.N_max < 4:
            raise UsageError("--N-max must be >= 4")
        grid_items = [(N, n, m) for N in range(4, args.N_max + 1)
                      for n in range(1, N) for m in range(1, N)]
        grid = {"N_range": [4, args.N_max]}
    else:
        if None in (args.N, args.n, args.m):
            raise UsageError("give --N, --n and --m, or --sweep")
        if args.N < 4:
            raise UsageError("N < 4 is outside the hypergeometric bound's hypothesis")
        if not (1 <= args.m < args.N and 1 <= args.n < args.N):
            raise UsageError("need 1 <= m < N and 1 <= n < N")
        grid_items = [(args.N, args.n, args.m)]
        grid = {"N": args.N, "n": args.n, "m": args.m}
    rows = run_rows(hyp_row, grid_items, args.workers)
    return _emit(args, grid, rows)


def cmd_stein_check(args) -> int:
    mu = parse_rational(args.mu)
    sigma2 = parse_rational(args.sigma2)
    if sigma2 <= 0:
        raise UsageError("sigma2 must be positive")
    try:
        params = binhat_params(mu, sigma2)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    lo, hi = params.shift, params.shift + params.n_hat + 1
    funcs = monomials(6) + random_functions(lo, hi, args.trials, args.seed)
    dist = binhat_dist(params)
    if args.perturb:
        dist = perturb(dist, random.Random(args.seed))
    residual = characterization_check(params, funcs, dist)
    expected_zero = not args.perturb
    rows = [{
        "check": "characterization",
        "mu": mu, "sigma2": sigma2, "n_hat": params.n_hat,
        "delta": params.delta, "t": params.t, "shift": params.shift,
        "functions": len(funcs),
        "max_residual": residual,
        "expected": "zero" if expected_zero else "nonzero",
        "ok": (residual == 0) == expected_zero,
    }]
    grid = {"mu": args.mu, "sigma2": args.sigma2, "trials": args.trials,
            "perturb": args.perturb}
    if args.narayana_n is not None:
        if args.narayana_n < 2:
            raise UsageError("--narayana-n must be >= 2")
        rows.append(_narayana_stein_row(args.narayana_n, args.trials, args.seed))
        grid["narayana_n"] = args.narayana_n
    return _emit(args, grid, rows)


def _narayana_stein_row(n: int, trials: int, seed: int) -> dict:
    inst = narayana_instance(n)
    funcs = monomials(5) + random_functions(1, n + 1, trials, seed)
    pair_res = pair_identity_check(inst.kernel, inst.dist, inst.mu, inst.lambda_, funcs)
    est = tail_and_a_estimates(inst.dist, binhat_params(inst.mu, inst.sigma2))
    return {
        "check": f"narayana-pair n={n}",
        "mu": inst.mu, "sigma2": inst.sigma2, "n_hat": None,
        "delta": None, "t": None, "shift": None,
        "functions": len(funcs),
        "max_residual": pair_res,
        "expected": "zero",
        "ok": pair_res == 0 and est.holds,
    }


# ---------------------------------------------------------------------- parser

def _env(name: str, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    return type(default)(raw) if not isinstance(default, str) else raw


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=sorted(RENDERERS), default=_env("FORMAT", "table"))
    common.add_argument("--precision", choices=["exact", "float64"],
                        default=_env("PRECISION", "exact"))
    common.add_argument("--seed", type=int, default=_env("SEED", 0))
    common.add_argument("--workers", type=int, default=_env("WORKERS", 1))

    parser = argparse.ArgumentParser(prog="steinpairs", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"steinpairs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("narayana-verify", parents=[common],
                       help="certify the Narayana TV bound and its moment identities")
    p.add_argument("--n-range", default="2:300", help="inclusive lo:hi")
    p.set_defaults(func=cmd_narayana_verify)

    p = sub.add_parser("pb-verify", parents=[common],
                       help="certify the Poisson-binomial TV bound")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--p", help="comma-separated rationals, e.g. 1/2,1/3")
    src.add_argument("--p-file", help="JSON list of lists of 'a/b' strings")
    src.add_argument("--random", type=int, help="number of seeded random lists")
    p.add_argument("--max-len", type=int, default=50)
    p.set_defaults(func=cmd_pb_verify)

    p = sub.add_parser("hyp-verify", parents=[common],
                       help="certify the hypergeometric TV bound")
    p.add_argument("--N", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--N-max", type=int, default=25)
    p.set_defaults(func=cmd_hyp_verify)

    p = sub.add_parser("stein-check", parents=[common],
                       help="check the Bi-hat Stein characterization exactly")
    p.add_argument("--mu", required=True)
    p.add_argument("--sigma2", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--perturb", action="store_true",
                   help="negative control: perturb the law, expect a nonzero residual")
    p.add_argument("--narayana-n", type=int,
                   help="also check the pair identities and tail estimates for Narayana(n)")
    p.set_defaults(func=cmd_stein_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"steinpairs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
