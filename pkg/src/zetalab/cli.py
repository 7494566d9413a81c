"""Command-line front end: parse a job, run one computation, print a table.

Every run is fully determined by its flags: no config files, no hidden
state, no environment defaults beyond file paths.  Output is JSON by
default (sorted keys, fixed separators, trailing newline) so identical
jobs produce byte-identical bytes; csv and text renderings are provided
for the table-shaped results.  Rationals print as "num/den", reals with
12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction
from typing import Any

from zetalab import artin, bundles, explicit, lattice as lat, nazeta
from zetalab.errors import ResourceError, ZetalabError
from zetalab.exact import Poly
from zetalab.ffield import FieldSpec, WeierstrassCurve, count_points

USAGE_EXIT = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# formatting

def fmt_rat(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fmt_real(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0   # normalize -0.0
    return f"{x:.12g}"


def fmt_complex(z: complex) -> dict[str, str]:
    return {"re": fmt_real(z.real), "im": fmt_real(z.imag)}


def fmt_poly(p: Poly) -> list[str]:
    return [fmt_rat(c) for c in p.coeffs]


# ---------------------------------------------------------------------------
# input parsing

_CURVE_RE = re.compile(r"^y2=x3(?P<rest>([+-][0-9]*\*?x|[+-][0-9]+)*)$")


def parse_curve(spec: str, p: int) -> WeierstrassCurve:
    """Parse `y2=x3+A*x+B` (integer A, B; `4x` and `x` accepted for `4*x`)."""
    compact = spec.replace(" ", "")
    m = _CURVE_RE.match(compact)
    if m is None:
        raise _UsageError(f"cannot parse curve {spec!r}; expected y2=x3+A*x+B")
    a = b = 0
    for term in re.findall(r"[+-][^+-]+", m.group("rest") or ""):
        sign = -1 if term[0] == "-" else 1
        body = term[1:]
        if body.endswith("x"):
            coeff = body[:-1].rstrip("*")
            a += sign * (int(coeff) if coeff else 1)
        else:
            b += sign * int(body)
    return WeierstrassCurve(FieldSpec(p), a, b)


def parse_matrix(spec: str) -> list[list[Fraction]]:
    """Row-major matrix with ` / ` between rows; entries are exact decimals
    or fractions (0.5 and 1/2 both mean one half).  The row separator must
    be surrounded by whitespace so fraction entries stay unambiguous."""
    rows = []
    for row in re.split(r"\s+/\s+", spec.strip()):
        entries = row.split()
        if not entries:
            raise _UsageError("empty matrix row")
        rows.append([Fraction(e) for e in entries])
    if any(len(r) != len(rows) for r in rows):
        raise _UsageError("matrix must be square")
    return rows


def parse_lattice(args) -> lat.Lattice:
    if getattr(args, "gram", None):
        return lat.Lattice.from_gram(parse_matrix(args.gram))
    if getattr(args, "lattice", None):
        rows = parse_matrix(args.lattice)
        columns = [list(col) for col in zip(*rows)]
        return lat.Lattice.from_basis_columns(columns)
    raise _UsageError("provide --lattice (basis) or --gram")


def parse_complex(spec: str) -> complex:
    try:
        return complex(spec.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise _UsageError(f"cannot parse complex number {spec!r}") from exc


def _convention(name: str) -> bundles.Convention:
    return (bundles.Convention.PAPER_SPLIT if name == "paper"
            else bundles.Convention.GALOIS_DESCENT)


def _curve_data(args) -> bundles.CurveData:
    curve = parse_curve(args.curve, args.p)
    return bundles.CurveData.from_curve(curve)


# ---------------------------------------------------------------------------
# commands

def cmd_artin(args) -> dict:
    curve = parse_curve(args.curve, args.p)
    n1 = count_points(curve, 1)
    zc = artin.elliptic_zeta(args.p, n1)
    recip = {str(n): artin.reciprocity_check(zc, n, args.order)
             for n in (2, 3, 4)}
    return {
        "q": args.p,
        "numerator": fmt_poly(zc.P),
        "counts": [str(artin.nm(zc, m)) for m in range(1, args.mmax + 1)],
        "functional_equation_ok": artin.fe_check_zeta(zc),
        "rh_ok": artin.rh_check(zc),
        "reciprocity_ok": recip,
    }


def cmd_nazeta(args) -> dict:
    data = _curve_data(args)
    z = nazeta.ell_na_zeta(data, args.rank, _convention(args.convention))
    report = nazeta.na_properties_check(z)
    return {
        "q": data.q,
        "n1": data.n1,
        "rank": args.rank,
        "convention": args.convention,
        "numerator": fmt_poly(z.P),
        "normalized_numerator": fmt_poly(z.normalized_numerator),
        "denominator": fmt_poly(z.denominator),
        "degree_ok": report.degree_ok,
        "functional_equation_ok": report.functional_equation_ok,
        "root_pairing_exact_ok": report.root_pairing_exact_ok,
        "root_pairing_numeric_residual": fmt_real(report.root_pairing_numeric_residual),
        "counts": [fmt_rat(nazeta.na_counts(z, m)) for m in range(1, args.mmax + 1)],
    }


def cmd_census(args) -> dict:
    data = _curve_data(args)
    res = bundles.strata_census(args.rank, data, _convention(args.convention))
    rows = [{
        "stratum": row.label,
        "classes": fmt_rat(row.classes),
        "bundles_per_class": str(row.bundles_per_class),
        "mass_per_class": fmt_rat(row.mass_per_class),
        "gamma_per_class": fmt_rat(row.gamma_per_class),
    } for row in res.rows]
    return {
        "q": data.q,
        "n1": data.n1,
        "rank": args.rank,
        "convention": args.convention,
        "slice": res.slice_note,
        "rows": rows,
        "total_classes": fmt_rat(res.total_classes),
        "mass": fmt_rat(res.mass),
        "gamma": fmt_rat(res.gamma),
    }


def cmd_mass(args) -> dict:
    data = _curve_data(args)
    zc = data.zeta
    rows = []
    for r in range(1, args.rmax + 1):
        for d in range(r):
            paper = bundles.invariant("beta", r, d, data, bundles.Convention.PAPER_SPLIT)
            descent = bundles.invariant("beta", r, d, data, bundles.Convention.GALOIS_DESCENT)
            recursion = bundles.mass_recursion_beta(r, d, zc)
            rows.append({
                "rank": str(r),
                "degree": str(d),
                "beta_paper": fmt_rat(paper),
                "beta_descent": fmt_rat(descent),
                "beta_recursion": fmt_rat(recursion),
                "descent_matches_recursion": descent == recursion,
                "paper_matches_recursion": paper == recursion,
            })
    return {
        "q": data.q,
        "n1": data.n1,
        "agreement_locus_note":
            "the split counts match the recursion exactly when N1 = 2(q-1)",
        "n1_equals_2q_minus_2": data.n1 == 2 * (data.q - 1),
        "rows": rows,
    }


def cmd_allbundles(args) -> dict:
    data = _curve_data(args)
    report = nazeta.allbundles_rank2(data, args.order)
    pieces = [{
        "piece": piece.name,
        "closed": [fmt_rat(c) for c in piece.closed],
        "direct": [fmt_rat(c) for c in piece.direct],
        "agree": piece.agree,
    } for piece in report.positive + (report.negative,)]
    return {
        "q": report.q,
        "n1": report.n1,
        "order": args.order,
        "degree_zero_closed": fmt_rat(report.degree_zero_closed),
        "degree_zero_direct": fmt_rat(report.degree_zero_direct),
        "pieces": pieces,
        "all_agree": report.all_agree,
    }


def cmd_euler(args) -> dict:
    curve = nazeta.GlobalCurve(args.A, args.B)
    report = nazeta.global_na_zeta_partial(
        curve, args.rank, parse_complex(args.s), args.pmax,
        _convention(args.convention), threads=args.threads)
    return {
        "A": args.A,
        "B": args.B,
        "rank": args.rank,
        "s": fmt_complex(report.s),
        "prime_bound": report.prime_bound,
        "factors_used": report.factors_used,
        "bad_primes": list(report.bad_primes_skipped),
        "value": fmt_complex(report.value),
        "log_value": fmt_complex(report.log_value),
        "tail_bound": fmt_real(report.tail_bound),
    }


def cmd_lattice(args) -> dict:
    lattice = parse_lattice(args)
    filtration = lat.hn_filtration(lattice)
    result: dict[str, Any] = {
        "rank": lattice.rank,
        "covolume2": fmt_rat(lattice.covolume2),
        "degree": fmt_real(lat.deg(lattice)),
        "semistable": lat.is_semistable(lattice),
        "hn_steps": [{
            "rank": step.rank,
            "covol2": fmt_rat(step.covol2),
            "slope": fmt_real(step.slope),
        } for step in filtration.steps],
    }
    if lattice.rank == 2 and lattice.covolume2 == 1:
        a, b, ok = lat.reduce_rank2(lattice)
        result["reduction"] = {"a": fmt_real(a), "b": fmt_real(b),
                               "in_domain": ok}
    integral = all(x.denominator == 1 for row in lattice.gram for x in row)
    if integral and lattice.covolume2 == 1:
        semi, stable = lat.unimodular_semistable_check(lattice)
        result["unimodular"] = {"semistable": semi, "stable": stable}
    return result


def cmd_theta(args) -> dict:
    lattice = parse_lattice(args)
    report = lat.rr_check(lattice, args.tol)
    return {
        "rank": lattice.rank,
        "covolume2": fmt_rat(lattice.covolume2),
        "h0": fmt_real(report.h0),
        "h1": fmt_real(report.h1),
        "degree": fmt_real(report.degree),
        "rr_residual": fmt_real(report.residual),
        "certified_tails": fmt_real(report.tail_total),
    }


def cmd_xi(args) -> dict:
    s = parse_complex(args.s)
    value = lat.xi_q(s, args.eps)
    mirrored = lat.xi_q(1 - s, args.eps)
    return {
        "s": fmt_complex(s),
        "value": fmt_complex(value),
        "functional_equation_residual": fmt_real(abs(value - mirrored)),
    }


def cmd_explicit_ff(args) -> dict:
    import random
    curve = parse_curve(args.curve, args.p)
    n1 = count_points(curve, 1)
    zc = artin.elliptic_zeta(args.p, n1)
    rng = random.Random(args.seed)
    all_ok = True
    positive = True
    hodge_count = 0
    samples = []
    for i in range(args.count):
        support = {n: Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                   for n in range(-args.span, args.span + 1)}
        f = explicit.FFTestFn.of(args.p, support)
        all_ok &= explicit.ff_explicit_formula_check(zc, f)
        value = explicit.ff_positivity(zc, f)
        positive &= value >= 0
        hodge_count += explicit.ff_hodge_defect(zc, f) == value
        if i < 3:
            samples.append({"positivity": fmt_rat(value)})
    f1 = explicit.FFTestFn.delta(args.p, 1)
    pairing = explicit.ff_pairing(zc, f1, f1)
    return {
        "q": args.p,
        "n1": n1,
        "trials": args.count,
        "explicit_formula_all_ok": bool(all_ok),
        "positivity_all_nonnegative": bool(positive),
        "hodge_equals_positivity_count": hodge_count,
        "delta1_pairing": {
            "deg1": fmt_rat(pairing.deg1),
            "deg2": fmt_rat(pairing.deg2),
            "diag": fmt_rat(pairing.diag),
        },
        "samples": samples,
    }


def cmd_explicit_nf(args) -> dict:
    zeros = explicit.load_zeros(args.zeros)
    f = explicit.NFTestFn(args.mu, args.sigma)
    model = explicit.MicroModel(args.K, zeros)
    pairing = explicit.global_pairing(model, f, f)
    rw = explicit.riemann_weil_residual(f, zeros, args.K, args.pmax)
    return {
        "zeros_loaded": len(zeros),
        "K": args.K,
        "mu": fmt_real(args.mu),
        "sigma": fmt_real(args.sigma),
        "prime_bound": args.pmax,
        "micro_examples": {
            "d0_d0": fmt_real(explicit.micro_pairing(model, 0, 0)),
            "d0_d1": fmt_real(explicit.micro_pairing(model, 0, 1)),
            "d0_dhalf": fmt_real(explicit.micro_pairing(model, 0, 0.5)),
        },
        "global_pairing": {
            "deg1_residual": fmt_real(pairing.deg1_residual),
            "deg2_residual": fmt_real(pairing.deg2_residual),
            "explicit_formula_residual": fmt_real(pairing.explicit_formula_residual),
            "fixed_point_residual": fmt_real(pairing.fixed_point_residual),
        },
        "riemann_weil": {
            "residual": fmt_real(rw.residual),
            "zero_sum": fmt_real(rw.zero_sum),
            "fhat0": fmt_real(rw.fhat0),
            "fhat1": fmt_real(rw.fhat1),
            "prime_sum": fmt_real(rw.prime_sum),
            "arch_term": fmt_real(rw.arch_term),
        },
    }


def cmd_andrianov(args) -> dict:
    return {
        "substitution": {"k": "2", "lambda_p": "1 - p",
                         "lambda_p2": "p^2 - 4p + 4"},
        "formal_match": nazeta.andrianov_formal_match(),
    }


# ---------------------------------------------------------------------------
# rendering

def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _flatten(prefix: str, value: Any, out: list[tuple[str, str]]):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten(f"{prefix}[{i}]", item, out)
    else:
        out.append((prefix, str(value)))


def render_csv(payload: dict) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", payload, rows)
    lines = ["key,value"] + [f"{k},{v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def render_text(payload: dict) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", payload, rows)
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "text": render_text}


# ---------------------------------------------------------------------------
# argument wiring

def build_parser() -> _Parser:
    parser = _Parser(prog="zetalab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        p.add_argument("--out", default=None, help="write output to a file")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("artin", help="zeta datum of an elliptic curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--order", type=int, default=8)
    common(p)
    p.set_defaults(fn=cmd_artin)

    p = sub.add_parser("nazeta", help="rank-r zeta function of an elliptic curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--convention", choices=("paper", "descent"), default="paper")
    p.add_argument("--mmax", type=int, default=6)
    common(p)
    p.set_defaults(fn=cmd_nazeta)

    p = sub.add_parser("census", help="degree-0 semistable class census")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--convention", choices=("paper", "descent"), default="descent")
    common(p)
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("mass", help="beta masses: conventions vs the recursion")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--rmax", type=int, default=3)
    common(p)
    p.set_defaults(fn=cmd_mass)

    p = sub.add_parser("allbundles", help="unstable rank-2 contributions")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--order", type=int, default=10)
    common(p)
    p.set_defaults(fn=cmd_allbundles)

    p = sub.add_parser("euler", help="partial global Euler product")
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--s", required=True)
    p.add_argument("--pmax", type=int, default=1000)
    p.add_argument("--convention", choices=("paper", "descent"), default="paper")
    common(p)
    p.set_defaults(fn=cmd_euler)

    p = sub.add_parser("lattice", help="semistability, filtration, reduction")
    p.add_argument("--lattice", default=None, help="basis rows, '/'-separated")
    p.add_argument("--gram", default=None, help="Gram rows, '/'-separated")
    common(p)
    p.set_defaults(fn=cmd_lattice)

    p = sub.add_parser("theta", help="theta cohomology and Riemann-Roch")
    p.add_argument("--lattice", default=None)
    p.add_argument("--gram", default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p)
    p.set_defaults(fn=cmd_theta)

    p = sub.add_parser("xi", help="completed zeta of the rationals")
    p.add_argument("--s", required=True)
    p.add_argument("--eps", type=float, default=1e-14)
    common(p)
    p.set_defaults(fn=cmd_xi)

    p = sub.add_parser("explicit-ff", help="exact function-field explicit formulas")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--span", type=int, default=3)
    common(p)
    p.set_defaults(fn=cmd_explicit_ff)

    p = sub.add_parser("explicit-nf", help="micro model and Riemann-Weil residual")
    p.add_argument("--zeros", required=True)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--K", type=int, default=100)
    p.add_argument("--pmax", type=int, default=10 ** 4)
    common(p)
    p.set_defaults(fn=cmd_explicit_nf)

    p = sub.add_parser("andrianov", help="spinor-factor formal match")
    common(p)
    p.set_defaults(fn=cmd_andrianov)

    return parser


def _public_params(args) -> dict:
    # threads is an execution detail, not part of the job: results must be
    # byte-identical across thread counts
    skip = {"fn", "command", "format", "out", "threads"}
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and v is not None}


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        result = args.fn(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return USAGE_EXIT
    except ResourceError as exc:
        sys.stderr.write(f"resource error: {exc}\n")
        return 2
    except ZetalabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    payload = {
        "command": args.command,
        "params": {k: (v if isinstance(v, (int, bool)) else str(v))
                   for k, v in _public_params(args).items()},
        "result": result,
    }
    rendered = RENDERERS[args.format](payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return 0


if __name__ == "__main__":
    sys.exit(main())
