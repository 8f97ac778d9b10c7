"""Command-line front end.

Every subcommand prints one result envelope on stdout, either JSON
(``{command, params, schema, rows, meta}``, keys sorted, every value a string)
or CSV (``# key=value`` metadata lines, then a fixed header and rows).
Exact rationals print as ``num/den``; enclosures as outward-rounded
scientific decimals.  Progress and timing go to stderr.

Exit codes: 0 success, 1 verification mismatch or unreachable width,
2 invalid arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction
from typing import Sequence

from .bruteforce import verify_counts
from .classical_renyi import SieveBudgetError, delta_constant, int_excess_counts, renyi_density
from .densities import (
    EpsilonNotAchieved,
    adjudicate,
    density_enclosures,
    exponent_fit,
    reduced_order_asymptotic_A,
    pole_order_asymptotic_A,
)
from .enclosure import Enclosure
from .finite_field import FieldError, field_of_order, prime_power
from .irreducibles import MemoryBudgetError, NuTable, sieve
from .polyring import format_poly
from .series import count_gf

SCHEMA = 1

HEADERS = {
    "nu": ["i", "nu"],
    "count": ["n", "k", "e_nk", "d_nk"],
    "density": ["k", "lo", "hi"],
    "verify": ["n", "k", "oracle", "series", "match"],
    "asymptotic": ["quantity", "lo", "hi"],
    "integers": ["k", "count", "empirical", "lo", "hi"],
}


class UsageError(Exception):
    pass


def _rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _prime_power_arg(text: str) -> int:
    try:
        q = int(text)
        prime_power(q)
    except (ValueError, FieldError) as exc:
        raise argparse.ArgumentTypeError(f"q must be a prime power, got {text!r}") from exc
    return q


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _add_global(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=["csv", "json"], default=d("json"))
    p.add_argument("--threads", type=_positive_int, default=d(os.cpu_count() or 1))
    p.add_argument("--precision", type=_positive_int, default=d(None), help="working precision in bits")
    p.add_argument("--digits", type=_positive_int, default=d(20), help="significant digits for enclosures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyrenyi", description="Excess statistics over GF(q)[x] and the integers.")
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_global(p, suppress=True)
        return p

    p = cmd("nu", "irreducible counts by degree")
    p.add_argument("--q", type=_prime_power_arg, required=True)
    p.add_argument("--max-degree", type=_positive_int, required=True)
    p.add_argument("--sieve-check", action="store_true", help="compare with an exhaustive sieve")
    p.add_argument("--list", action="store_true", help="also list the irreducibles (implies a sieve)")

    p = cmd("count", "e_{n,k} and d_{n,k} from the counting series")
    p.add_argument("--q", type=_prime_power_arg, required=True)
    p.add_argument("--max-degree", type=_nonneg_int, required=True)
    p.add_argument("--max-excess", type=_nonneg_int, required=True)

    p = cmd("density", "certified enclosures of d_k")
    p.add_argument("--q", type=_prime_power_arg, required=True)
    p.add_argument("--max-excess", type=_nonneg_int, required=True)
    p.add_argument("--eps", type=_parse_fraction, required=True)

    p = cmd("verify", "exhaustive enumeration against the series")
    p.add_argument("--q", type=_prime_power_arg, required=True)
    p.add_argument("--max-degree", type=_nonneg_int, required=True)
    p.add_argument("--max-excess", type=_nonneg_int, default=None)

    p = cmd("asymptotic", "both asymptotic constants and the exponent fit")
    p.add_argument("--q", type=_prime_power_arg, required=True)
    p.add_argument("--max-excess", type=_positive_int, default=40)
    p.add_argument("--eps-scale", type=_parse_fraction, default=Fraction(1, 10 ** 8),
                   help="target width of d_k is q^-k times this")

    p = cmd("integers", "integer excess: sieve counts, Euler product, delta")
    p.add_argument("--limit", type=_positive_int, required=True)
    p.add_argument("--max-excess", type=_nonneg_int, required=True)
    p.add_argument("--prime-limit", type=_positive_int, required=True)
    p.add_argument("--eps", type=_parse_fraction, default=Fraction(1, 10 ** 12))
    p.add_argument("--tail", choices=["zeta", "majorant"], default="zeta")
    return parser


# -- rendering ------------------------------------------------------------------------------------


def render(command: str, params: dict, rows: list[dict], meta: dict, fmt: str) -> str:
    params = {k: str(v) for k, v in params.items()}
    rows = [{k: str(v) for k, v in r.items()} for r in rows]
    meta = {k: str(v) for k, v in meta.items()}
    if fmt == "json":
        env = {"command": command, "params": params, "schema": str(SCHEMA), "rows": rows, "meta": meta}
        return json.dumps(env, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# command={command}\n# schema={SCHEMA}\n")
    for k in sorted(params):
        buf.write(f"# param.{k}={params[k]}\n")
    for k in sorted(meta):
        buf.write(f"# {k}={meta[k]}\n")
    w = csv.writer(buf, lineterminator="\n")
    header = list(HEADERS[command])
    if rows:
        header += [k for k in rows[0] if k not in header]
    w.writerow(header)
    for r in rows:
        w.writerow([r[h] for h in header])
    return buf.getvalue()


def _encl(e: Enclosure, digits: int) -> tuple[str, str]:
    return e.decimal(digits)


# -- subcommands ---------------------------------------------------------------------------------------


def _nu(a) -> tuple[list, dict, int]:
    nu = NuTable.build(a.q, a.max_degree)
    rows = [{"i": i, "nu": nu[i]} for i in range(1, a.max_degree + 1)]
    meta = {"degree_sum_identity": nu.degree_sum_ok()}
    code = 0
    if a.sieve_check or a.list:
        F = field_of_order(a.q)
        store = sieve(F, a.max_degree, spf=False)
        counts = store.counts()
        bad = [i for i in range(1, a.max_degree + 1) if counts[i - 1] != nu[i]]
        meta["sieve_mismatches"] = len(bad)
        code = 1 if bad else 0
        for r in rows:
            r["sieve"] = counts[r["i"] - 1]
            if a.list:
                r["irreducibles"] = ";".join(format_poly(f) for f in store.irreducible_polys(r["i"]))
    return rows, meta, code


def _count(a):
    E = count_gf(a.q, a.max_degree, a.max_excess)
    rows = [
        {"n": n, "k": k, "e_nk": E[n, k], "d_nk": _rational(Fraction(E[n, k], a.q ** n))}
        for n in range(a.max_degree + 1)
        for k in range(a.max_excess + 1)
    ]
    return rows, {}, 0


def _density(a):
    if not 0 < a.eps < 1:
        raise UsageError("--eps must lie strictly between 0 and 1")
    try:
        r = density_enclosures(a.q, a.max_excess, a.eps, prec=a.precision)
    except EpsilonNotAchieved as exc:
        print(f"error: {exc}", file=sys.stderr)
        worst = Enclosure.point(max(exc.widths)).decimal(6)[1]
        return [], {"achieved": "false", "max_width": worst}, 1
    rows = []
    for k, e in enumerate(r.enclosures):
        lo, hi = _encl(e, a.digits)
        rows.append({"k": k, "lo": lo, "hi": hi})
    bad = any(e.width > t for e, t in zip(r.enclosures, r.eps))
    meta = {
        "achieved": "false" if bad else "true",
        "truncation_degree": r.degree,
        "precision_bits": r.prec,
        "tau": Enclosure.point(r.tau).decimal(6)[1],
    }
    return rows, meta, 1 if bad else 0


def _verify(a):
    if a.q ** a.max_degree > 1 << 24:
        raise UsageError(f"q^n = {a.q ** a.max_degree} exceeds the enumeration budget 2^24")
    rep = verify_counts(a.q, a.max_degree, a.max_excess, threads=a.threads)
    print(
        f"verify q={a.q} n<={a.max_degree}: {rep.polynomials} polynomials in {rep.seconds:.2f}s "
        f"({rep.throughput:.3g}/s)",
        file=sys.stderr,
    )
    rows = [
        {"n": n, "k": k, "oracle": rep.oracle[n][k], "series": rep.series[n][k],
         "match": str(rep.oracle[n][k] == rep.series[n][k]).lower()}
        for n in range(rep.n_max + 1)
        for k in range(rep.K + 1)
    ]
    meta = {
        "mismatches": len(rep.mismatches),
        "reconstruction_checked": rep.reconstruction[0],
        "reconstruction_failures": rep.reconstruction[1],
        "polynomials": rep.polynomials,
    }
    return rows, meta, 0 if rep.ok else 1


def _asymptotic(a):
    q, K = a.q, a.max_excess
    eps = [Fraction(1, q ** k) * a.eps_scale for k in range(K + 1)]
    try:
        rep = density_enclosures(q, K, eps, prec=a.precision)
    except EpsilonNotAchieved as exc:
        print(f"error: {exc}", file=sys.stderr)
        return [], {"verdict": "indeterminate (width not reached)"}, 1
    ra = reduced_order_asymptotic_A(q)
    pb = pole_order_asymptotic_A(q)
    fit = exponent_fit(rep)
    v = adjudicate(q, fit, ra, pb)
    rows = []
    for name, e in (("A_reduced_order", ra), ("A_pole_order", pb), ("beta_fit", fit.beta),
                    ("A_fit", fit.A), ("beta_at_largest_k", fit.beta_last)):
        lo, hi = _encl(e, a.digits) if e is not None else ("", "")
        rows.append({"quantity": name, "lo": lo, "hi": hi})
    meta = {
        "verdict": v.line(),
        "form": v.form,
        "fit_status": fit.status,
        "fit_order": fit.order,
        "fit_k_range": f"{fit.k_range[0]}..{fit.k_range[1]}",
        "truncation_degree": rep.degree,
    }
    print(f"verdict: {v.line()}", file=sys.stderr)
    return rows, meta, 0


def _integers(a):
    if a.prime_limit < 3:
        raise UsageError("--prime-limit must be >= 3")
    if not 0 < a.eps < 1:
        raise UsageError("--eps must lie strictly between 0 and 1")
    counts = int_excess_counts(a.limit, a.max_excess, threads=a.threads)
    code = 0
    try:
        r = renyi_density(a.max_excess, a.prime_limit, a.eps, tail=a.tail, prec=a.precision)
        d = delta_constant(a.prime_limit, a.eps, tail=a.tail, prec=a.precision)
    except EpsilonNotAchieved as exc:
        print(f"error: {exc}", file=sys.stderr)
        r = renyi_density(a.max_excess, a.prime_limit, a.eps, tail=a.tail, prec=a.precision or 64)
        d = delta_constant(a.prime_limit, a.eps, tail=a.tail, prec=a.precision or 64)
        code = 1
    rows = []
    for k in range(a.max_excess + 1):
        lo, hi = _encl(r[k], a.digits)
        rows.append({"k": k, "count": counts[k], "empirical": _rational(counts.fraction(k)), "lo": lo, "hi": hi})
    dlo, dhi = _encl(d, a.digits)
    meta = {"delta_lo": dlo, "delta_hi": dhi, "tail": a.tail}
    return rows, meta, code


HANDLERS = {
    "nu": _nu,
    "count": _count,
    "density": _density,
    "verify": _verify,
    "asymptotic": _asymptotic,
    "integers": _integers,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    params = {k: v for k, v in vars(a).items() if k not in ("command", "format", "threads")}
    params = {k: ("" if v is None else v) for k, v in params.items()}
    t0 = time.perf_counter()
    try:
        rows, meta, code = HANDLERS[a.command](a)
    except UsageError as exc:
        print(f"polyrenyi {a.command}: error: {exc}", file=sys.stderr)
        return 2
    except (MemoryBudgetError, SieveBudgetError) as exc:
        print(f"polyrenyi {a.command}: error: {exc}", file=sys.stderr)
        return 2
    print(f"{a.command}: {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    out.write(render(a.command, params, rows, meta, a.format))
    return code


def run(argv: Sequence[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
