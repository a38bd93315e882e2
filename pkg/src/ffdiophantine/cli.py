"""Command-line front end: every subcommand prints one JSON report.

Reports have the shape ``{"command", "input", "result", "meta"}``.  Everything
except ``meta`` (timestamp, elapsed time, version) is a pure function of the
input, and keys are sorted, so two runs with the same flags give identical
bytes outside ``meta``.

Exit codes: 0 success, 1 usage or parse error, 2 insufficient precision or
budget, 3 hypothesis or certificate failure.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .algebra import Poly, gf
from .automata import (christol_relation_search, parse_automaton,
                       series_from_automaton, substitute_relation)
from .classia import (ClassIAPattern, degree_certificate, empirical_extrema, generate_quotients,
                      ratio_bounds)
from .constructions import (build_conti1, build_conti2, build_gap_series, build_mainalg,
                            build_realequal, conti1_threshold_ok, floor_pow, seq_search)
from .contfrac import cf_expand, convergent_at, convergents, format_cf, parse_cf, quadratic_value
from .errors import (AutomatonFormatError, CertificateFailed, EnumerationTooLarge, FFDError,
                     HypothesisViolated, InsufficientPrecision, PreconditionViolated,
                     SearchExhausted, SideConditionViolated, ThresholdViolated)
from .exponents import (brute_force_wn, check_bestquad, check_bestrational, records_to_csv,
                        w1_estimate)
from .laurent import LaurentSeries, format_series, from_rational

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_HYPOTHESIS = 0, 1, 2, 3

_RATIONAL = re.compile(r"^\s*-?\d+\s*(/\s*\d+\s*)?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def exact_rational(text: str) -> Fraction:
    """'a/b' or an integer; decimals and exponents are refused."""
    if not _RATIONAL.match(text):
        raise argparse.ArgumentTypeError(f"{text!r} is not an exact rational (use a/b)")
    x = Fraction(text.replace(" ", ""))
    return x


def positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _field(args):
    mod = tuple(int(c) for c in args.modulus.split(",")) if args.modulus else ()
    try:
        return gf(args.p, args.m, mod)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _poly(F, text):
    try:
        return Poly.parse(F, text)
    except ValueError as exc:
        raise UsageError(f"cannot parse polynomial {text!r}: {exc}") from None


def _polys(F, text):
    return [_poly(F, t) for t in text.split(",") if t.strip()]


# --- input series -------------------------------------------------------------------------

def _mahler(F, r: int, known: int) -> LaurentSeries:
    coeffs = [0] * known
    e = 1
    while e < known:
        coeffs[e] = 1
        e *= r
    return LaurentSeries(F, 0, coeffs, known)


def _input_series(args, F, default_known=None):
    """The series selected by --rational / --mahler / --cf; returns (series-or-pair, description)."""
    chosen = [x for x in ("rational", "mahler", "cf") if getattr(args, x, None) is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --rational, --mahler, --cf")
    prec = args.prec if args.prec is not None else default_known
    if args.rational is not None:
        num_s, sep, den_s = args.rational.partition(",")
        if not sep:
            raise UsageError("--rational expects 'num,den'")
        num, den = _poly(F, num_s), _poly(F, den_s)
        if den.is_zero():
            raise UsageError("denominator is zero")
        if prec is None:
            return (num, den), {"rational": [str(num), str(den)]}
        return from_rational(num, den, prec), {"rational": [str(num), str(den)]}
    if prec is None:
        raise InsufficientPrecision("this series is infinite; pass --prec with a coefficient budget")
    if args.mahler is not None:
        if args.mahler < 2:
            raise UsageError("--mahler needs r >= 2")
        return _mahler(F, args.mahler, prec), {"mahler": args.mahler}
    # --cf "[a0; a1, ...]" with optional --period "b1, b2"
    pre = parse_cf(F, args.cf)
    if getattr(args, "period", None):
        alpha = quadratic_value(pre, _polys(F, args.period))
        return alpha.series(prec), {"cf": args.cf, "period": args.period}
    return cf_to_series(pre, prec), {"cf": args.cf}


def cf_to_series(quotients, known):
    c = convergent_at(quotients)
    return from_rational(c.p, c.q, known)


# --- commands -------------------------------------------------------------------------------

def cmd_expand(args):
    F = _field(args)
    x, desc = _input_series(args, F)
    e = cf_expand(x, args.N, strict=not args.partial)
    return desc, {"quotients": [str(a) for a in e.quotients], "cf": format_cf(e.quotients),
                  "complete": e.complete, "reason": e.reason, "count": len(e.quotients)}


def cmd_convergents(args):
    F = _field(args)
    x, desc = _input_series(args, F)
    e = cf_expand(x, args.N, strict=not args.partial)
    rows = [{"n": c.index, "p": str(c.p), "q": str(c.q), "deg_q": int(c.q.degree)}
            for c in convergents(e)]
    return desc, {"quotients": [str(a) for a in e.quotients], "convergents": rows,
                  "complete": e.complete, "reason": e.reason}


def cmd_classia(args):
    F = _field(args)
    seed = _polys(F, args.seed)
    pre = _polys(F, args.preperiod) if args.preperiod else []
    pat = ClassIAPattern(seed=tuple(seed), unit=F.parse_code(args.unit), k=args.k, preperiod=tuple(pre))
    rb = ratio_bounds(pat)
    ext = empirical_extrema(pat, args.N)
    out = {"pattern": pat.to_json(),
           "ratio_bounds": {"r": [str(r) for r in rb.r], "limsup": str(rb.limsup), "liminf": str(rb.liminf)},
           "empirical": {k: None if v is None else str(v) for k, v in ext.items()},
           "quotient_degrees": [int(a.degree) if a else None
                                for a in generate_quotients(pat, min(args.N, 16))]}
    if args.certificate:
        out["certificate"] = degree_certificate(ClassIAPattern(seed=pat.seed, unit=pat.unit, k=pat.k)).to_json()
    return {"seed": args.seed, "k": args.k, "unit": args.unit, "preperiod": args.preperiod}, out


def cmd_mainalg(args):
    if args.w <= 2 * args.d - 1:
        raise UsageError(f"need w > 2d-1 = {2 * args.d - 1}")
    F = _field(args)
    results = []
    for params in seq_search(args.d, args.w, F.p, count=args.j, max_side=args.max_side):
        pat = build_mainalg(params, args.d, args.w, F)
        rb = ratio_bounds(pat)
        cert = degree_certificate(pat)
        s = len(pat.seed)
        N = args.N or 4 * s + 1
        est = w1_estimate(generate_quotients(pat, N + 1), N)
        ext = empirical_extrema(pat, N + 1)
        results.append({"params": params.to_json(), "degrees": list(pat.seed_degrees),
                        "ratio_bounds": {"r": [str(r) for r in rb.r], "limsup": str(rb.limsup),
                                         "liminf": str(rb.liminf)},
                        "certificate": cert.to_json(), "w1_estimate": est.to_json(),
                        "residue_limits": {"max": str(ext["limit_max"]), "min": str(ext["limit_min"])}})
    return {"d": args.d, "w": str(args.w), "j": args.j}, {"members": results}


def cmd_realequal(args):
    if args.w < 2 * args.d - 1:
        raise UsageError(f"need w >= 2d-1 = {2 * args.d - 1}")
    F = _field(args)
    eps = [int(c) for c in args.eps] if args.eps else []
    if any(e not in (0, 1) for e in eps):
        raise UsageError("--eps is a string of 0/1 digits")
    rule = build_realequal(args.d, args.w, eps, F)
    degq = [rule.deg_q(n) for n in range(args.N + 1)]
    ratios = [str(Fraction(degq[n + 1], degq[n])) for n in range(1, args.N)]
    est = w1_estimate(rule.quotients(args.N + 1), args.N)
    sample = [str(rule(n)) for n in range(min(args.N, 6))]
    return ({"d": args.d, "w": str(args.w), "eps": args.eps or "", "N": args.N},
            {"deg_Q": degq, "ratios": ratios, "quotient_sample": sample, "w1_estimate": est.to_json()})


def _conti_params(args):
    d, w = args.d, args.w
    if args.variant == 1:
        theta, delta, rho = w, w - d, w - d
        eps = chi = Fraction(1)
    else:
        two = 2 + args.eta
        theta, delta = w, 2 * w / two - d
        rho = delta
        eps = chi = 2 / two
    return theta, rho, delta, eps, chi


def cmd_conti(args):
    F = _field(args)
    d, w = args.d, args.w
    if args.variant == 1:
        if not conti1_threshold_ok(d, w):
            raise UsageError(f"w = {w} is below the admissible threshold for d = {d}")
        need = floor_pow(w, args.j + 1) + 1
    else:
        if args.eta is None:
            raise UsageError("--eta is required for variant 2")
        if not (args.eta > 0 and args.eta * args.eta * d * d < w):
            raise UsageError("need 0 < eta < sqrt(w)/d")
        if w < 121 * d * d:
            raise UsageError(f"need w >= 121 d^2 = {121 * d * d}")
        L = args.eta * w ** args.j
        need = floor_pow(w, args.j + 1) + 2 * (L.numerator // L.denominator) + 1
    if need > args.max_quotients:
        raise InsufficientPrecision(
            f"records up to j={args.j} need about {need} quotients; raise --max-quotients to at least {need}")
    a, b = _poly(F, args.a), _poly(F, args.b)
    if args.variant == 1:
        fam = build_conti1(d, w, a, b)
    else:
        fam = build_conti2(d, w, args.eta, a, b, _poly(F, args.c))
    recs = fam.records(args.j)
    theta, rho, delta, eps, chi = _conti_params(args)
    verdict = check_bestquad(recs, d, theta, rho, delta, eps, chi, window_start=args.window_start,
                             strict=False)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(records_to_csv(recs))
    inp = {"variant": args.variant, "d": d, "w": str(w), "eta": None if args.eta is None else str(args.eta),
           "j": args.j, "a": str(a), "b": str(b), "c": args.c if args.variant == 2 else None}
    out = {"family": fam.to_json(), "records": [r.to_json() for r in recs],
           "checker_parameters": {"theta": str(theta), "rho": str(rho), "delta": str(delta),
                                "eps": str(eps), "chi": str(chi)},
           "verdict": verdict.to_json()}
    return inp, out, (EXIT_OK if verdict.passed else EXIT_HYPOTHESIS)


def cmd_gap(args):
    F = _field(args)
    fam = build_gap_series(args.k, F=F)
    recs = fam.records(args.j, j_min=1)
    k = Fraction(args.k)
    verdict = check_bestrational(recs, 1, k, k - 1, k - 1, strict=False)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(records_to_csv(recs))
    out = {"records": [r.to_json() for r in recs], "verdict": verdict.to_json()}
    return {"k": args.k, "j": args.j}, out, (EXIT_OK if verdict.passed else EXIT_HYPOTHESIS)


def cmd_brute(args):
    F = _field(args)
    x, desc = _input_series(args, F, default_known=128)
    est = brute_force_wn(x, args.n, args.hmax, precision=args.prec)
    details = {k: v for k, v in est.details.items()}
    return ({**desc, "n": args.n, "hmax": args.hmax},
            {"estimate": est.to_json(), "details": json.loads(json.dumps(details, default=str))})


def cmd_automaton(args):
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    A = parse_automaton(text)
    inp = {"file": args.file, "automaton": A.to_json()}
    if args.christol:
        D, H = args.christol
        N = args.prec or 512
        xi = series_from_automaton(A, N)
        rel = christol_relation_search(xi, D, H)
        check = substitute_relation(rel, xi)
        inp.update({"christol": [D, H], "prec": N})
        return inp, {"relation": rel.to_json(), "substitution": format_series(check),
                     "verified": check.is_zero_to_precision() or check.is_exact_zero()}
    N = args.N or 32
    xi = series_from_automaton(A, N)
    inp["N"] = N
    return inp, {"coefficients": [A.field.format_code(c) for c in xi.coefficients(0, N)]}


# --- parser ---------------------------------------------------------------------------------

def _field_args(p, default_p=2):
    p.add_argument("-p", type=positive_int, default=default_p, help="characteristic")
    p.add_argument("-m", type=positive_int, default=1, help="extension degree")
    p.add_argument("--modulus", help="comma-separated F_p coefficients of the modulus, lowest first")


def _series_args(p):
    p.add_argument("--rational", help="'num,den' polynomials")
    p.add_argument("--mahler", type=int, help="sum of T^-(r^n), n >= 0")
    p.add_argument("--cf", help="continued fraction prefix '[a0; a1, ...]'")
    p.add_argument("--period", help="periodic tail 'b1, b2, ...' appended to --cf")
    p.add_argument("--prec", type=positive_int, help="number of known coefficients")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ffdiophantine", description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("expand", help="continued fraction of a series")
    _field_args(s)
    _series_args(s)
    s.add_argument("-N", type=positive_int, default=10)
    s.add_argument("--partial", action="store_true", help="return the certified prefix instead of failing")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("convergents", help="convergents p_n/q_n")
    _field_args(s)
    _series_args(s)
    s.add_argument("-N", type=positive_int, default=10)
    s.add_argument("--partial", action="store_true")
    s.set_defaults(func=cmd_convergents)

    s = sub.add_parser("classia", help="twisted-periodic pattern: ratios and degree certificate")
    _field_args(s)
    s.add_argument("--seed", required=True, help="comma-separated seed polynomials")
    s.add_argument("--preperiod", default="")
    s.add_argument("--unit", default="1")
    s.add_argument("-k", type=int, default=1)
    s.add_argument("-N", type=positive_int, default=50)
    s.add_argument("--certificate", action="store_true")
    s.set_defaults(func=cmd_classia)

    s = sub.add_parser("mainalg", help="algebraic examples with prescribed exponent")
    _field_args(s)
    s.add_argument("-d", type=positive_int, required=True)
    s.add_argument("-w", type=exact_rational, required=True)
    s.add_argument("-j", type=positive_int, default=1)
    s.add_argument("-N", type=positive_int, help="quotients for the ratio estimate")
    s.add_argument("--max-side", type=positive_int, default=200)
    s.set_defaults(func=cmd_mainalg)

    s = sub.add_parser("realequal", help="expansion with prescribed degree ratio")
    _field_args(s)
    s.add_argument("-d", type=positive_int, default=1)
    s.add_argument("-w", type=exact_rational, required=True)
    s.add_argument("--eps", default="", help="0/1 string")
    s.add_argument("-N", type=positive_int, default=12)
    s.set_defaults(func=cmd_realequal)

    s = sub.add_parser("conti", help="quadratic approximant families and best-approximation verdict")
    _field_args(s, default_p=3)
    s.add_argument("--variant", type=int, choices=(1, 2), required=True)
    s.add_argument("-d", type=positive_int, required=True)
    s.add_argument("-w", type=exact_rational, required=True)
    s.add_argument("--eta", type=exact_rational)
    s.add_argument("-j", type=positive_int, default=2)
    s.add_argument("--a", default="T")
    s.add_argument("--b", default="T + 1")
    s.add_argument("--c", default="T + 2")
    s.add_argument("--window-start", type=int, default=None)
    s.add_argument("--max-quotients", type=positive_int, default=2_000_000)
    s.add_argument("--csv", help="write the record table here")
    s.set_defaults(func=cmd_conti)

    s = sub.add_parser("gap", help="gap series and rational approximants")
    _field_args(s)
    s.add_argument("-k", type=int, default=2)
    s.add_argument("-j", type=positive_int, default=8)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("brute", help="exhaustive small-height exponent search")
    _field_args(s)
    _series_args(s)
    s.add_argument("-n", type=positive_int, default=1)
    s.add_argument("--hmax", type=positive_int, default=3)
    s.set_defaults(func=cmd_brute)

    s = sub.add_parser("automaton", help="series of an automatic sequence, or an algebraic relation")
    s.add_argument("file")
    s.add_argument("-N", type=positive_int)
    s.add_argument("--christol", type=int, nargs=2, metavar=("D", "H"))
    s.add_argument("--prec", type=positive_int, help="coefficients used by --christol")
    s.set_defaults(func=cmd_automaton)
    return ap


def _inputs(args) -> dict:
    skip = {"func", "out", "command"}
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items())
            if k not in skip}


def _emit(report: dict, path: str | None):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    start = time.perf_counter()
    report = {"command": args.command, "input": {"flags": _inputs(args)}}
    code = EXIT_OK
    try:
        out = args.func(args)
        if len(out) == 3:
            desc, result, code = out
        else:
            desc, result = out
        report["input"]["resolved"] = desc
        report["result"] = result
    except (InsufficientPrecision, EnumerationTooLarge) as exc:
        print(f"insufficient precision: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (HypothesisViolated, SideConditionViolated, CertificateFailed, ThresholdViolated,
            SearchExhausted) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (UsageError, AutomatonFormatError, PreconditionViolated, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FFDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    report["meta"] = {"version": __version__,
                      "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                      "elapsed_seconds": round(time.perf_counter() - start, 3)}
    _emit(report, args.out)
    if code != EXIT_OK:
        print("one or more hypothesis checks failed; see result.verdict", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
