"""Heights, Liouville inequalities, exponent estimators and the best-approximation checkers.

Every size is a log_q integer; ratios are exact Fractions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import Poly
from .contfrac import Convergent, QuadraticNumber, conjugate_distance
from .errors import (EnumerationTooLarge, HypothesisViolated, InsufficientPrecision,
                     NotApplicable, PreconditionViolated, SideConditionViolated)
from .laurent import LaurentSeries, from_rational

log = logging.getLogger(__name__)

ENUMERATION_LIMIT = 2 ** 24


def height(P) -> int:
    """log_q H(P) for P given by its coefficient polynomials (any order)."""
    coeffs = [c for c in P if not c.is_zero()]
    if not coeffs:
        raise PreconditionViolated("height of the zero polynomial")
    return int(max(c.degree for c in coeffs))


def quadratic_height(alpha: QuadraticNumber) -> int:
    return height((alpha.A, alpha.B, alpha.C))


def poly_mul_x(P, Q) -> list:
    """Product of two polynomials in X with F_q[T] coefficients (lowest X-degree first)."""
    F = P[0].field
    out = [Poly.zero(F)] * (len(P) + len(Q) - 1)
    for i, a in enumerate(P):
        for j, b in enumerate(Q):
            out[i + j] = out[i + j] + a * b
    return out


@dataclass(frozen=True)
class ExponentEstimate:
    n: int
    lower: Fraction
    upper: Fraction
    method: str
    window: tuple = ()
    details: dict = field(default_factory=dict, compare=False)

    @property
    def best(self) -> Fraction:
        return self.lower

    def to_json(self) -> dict:
        return {"n": self.n, "lower": str(self.lower), "upper": str(self.upper),
                "method": self.method, "window": list(self.window)}


def _degrees(quotients, N: int) -> list:
    if callable(quotients):
        return [int(quotients(i).degree) if quotients(i) else 0 for i in range(N + 1)]
    qs = list(quotients)[: N + 1]
    if len(qs) < N + 1:
        raise PreconditionViolated(f"need {N + 1} quotients a_0..a_N, got {len(qs)}")
    return [int(a.degree) if a else 0 for a in qs]


def default_window(count: int) -> int:
    """Keep the last 80% of the available statistics."""
    return max(1, count - count // 5)


def w1_estimate(quotients, N: int, window: int | None = None) -> ExponentEstimate:
    """Bracket the limsup of deg q_{n+1}/deg q_n using a_1..a_N.

    ``quotients`` is a list a_0, a_1, ... (or a callable n -> a_n).  The ratios
    for n = 1..N-1 are formed and the last ``window`` of them are reported as
    (min, max).
    """
    if N < 2:
        raise PreconditionViolated("N must be >= 2")
    degs = _degrees(quotients, N)
    D = [0]
    for dg in degs[1:]:
        D.append(D[-1] + dg)
    ratios = [Fraction(D[n + 1], D[n]) for n in range(1, N)]
    if window is None:
        window = default_window(len(ratios))
    if window < 1 or window > len(ratios):
        raise PreconditionViolated(f"window must lie in [1, {len(ratios)}]")
    used = ratios[-window:]
    return ExponentEstimate(1, min(used), max(used), "ratio", (N - window, N - 1),
                            {"ratios": [str(r) for r in used]})


# --- Liouville inequalities ---------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicData:
    """An algebraic element known through a series, its degree and its height."""

    series: LaurentSeries
    degree: int | None
    height: int


def as_algebraic(x, known: int = 256) -> AlgebraicData:
    if isinstance(x, AlgebraicData):
        return x
    if isinstance(x, QuadraticNumber):
        return AlgebraicData(x.series(known), 2, x.height_log)
    if isinstance(x, Convergent):
        s = from_rational(x.p, x.q, known)
        return AlgebraicData(s, 1, int(max(x.p.degree, x.q.degree)))
    if isinstance(x, tuple) and len(x) == 2:
        num, den = x
        return AlgebraicData(from_rational(num, den, known), 1, int(max(num.degree, den.degree)))
    raise NotApplicable(f"cannot read degree and height from {type(x).__name__}")


def _eval_x(P, s: LaurentSeries) -> LaurentSeries:
    acc = LaurentSeries.zero(s.field)
    for c in reversed(list(P)):
        acc = acc * s + c
    return acc


@dataclass(frozen=True)
class LiouvilleVerdict:
    holds: bool
    lhs: int
    bound: int

    @property
    def margin(self) -> int:
        return self.lhs - self.bound


def liouville_check(first, second, known: int = 256) -> LiouvilleVerdict:
    """Check one of the two Liouville inequalities in log form.

    * ``first`` a polynomial in X (list of Poly, lowest degree first) and
      ``second`` algebraic: log|P(a)| >= -(n-1) h(P) - m h(a), m = deg_X P, n = deg a.
    * both algebraic: log|a - b| >= -n h(a) - m h(b), m = deg a, n = deg b.
    """
    if isinstance(first, (list, tuple)) and first and isinstance(first[0], Poly):
        P = list(first)
        while P and P[-1].is_zero():
            P.pop()
        m = len(P) - 1
        if m < 1:
            raise PreconditionViolated("P must be non-constant")
        a = as_algebraic(second, known)
        if a.degree is None:
            raise NotApplicable("degree of the algebraic argument is unknown")
        val = _eval_x(P, a.series)
        if val.is_exact_zero():
            raise PreconditionViolated("P vanishes at the algebraic argument")
        lhs = val.logabs()
        bound = -(a.degree - 1) * height(P) - m * a.height
        return LiouvilleVerdict(lhs >= bound, int(lhs), int(bound))
    a = as_algebraic(first, known)
    b = as_algebraic(second, known)
    if a.degree is None or b.degree is None:
        raise NotApplicable("degree unknown")
    diff = a.series - b.series
    if diff.is_exact_zero():
        raise PreconditionViolated("the two numbers coincide")
    lhs = diff.logabs()
    bound = -b.degree * a.height - a.degree * b.height
    return LiouvilleVerdict(lhs >= bound, int(lhs), int(bound))


def galois_margin(alpha: QuadraticNumber) -> int:
    """log|a - a'| + h(a), nonnegative for every separable quadratic."""
    return conjugate_distance(alpha) + alpha.height_log


# --- brute-force oracle ---------------------------------------------------------------------

def _fp_vector(s: LaurentSeries, lo: int, hi: int) -> np.ndarray:
    """Coefficients of T^{-lo}..T^{-(hi-1)} as F_p coordinates (m per coefficient)."""
    F = s.field
    out = np.zeros((hi - lo, F.m), dtype=np.int64)
    for i, n in enumerate(range(lo, hi)):
        out[i] = F.coords(s.coeff(n))
    return out.reshape(-1)


def brute_force_wn(xi: LaurentSeries, n: int, h_max: int, precision: int | None = None,
                   chunk: int = 1 << 16) -> ExponentEstimate:
    """Enumerate every nonzero P with deg_X P <= n and coefficient degrees <= h_max.

    For each P with h(P) >= 1 and P(xi) nonzero to precision the exponent
    -log|P(xi)| / h(P) is formed.  Two statistics are reported:

    * ``upper``: the raw maximum of that ratio;
    * ``lower`` (also ``best``): the maximum of (-log|P(xi)| - n*beta) / h(P),
      clipped at 0, where beta = max(0, max_c v(xi - c)) over constants c.
      Small heights let xi's own smallness inflate the raw ratio; subtracting
      n*beta removes exactly the part obtainable by multiplying by the linear
      factors X - c.  The statistic is monotone in n and in h_max.

    Polynomials that vanish to the available precision are counted and
    excluded (for exact rational xi they are confirmed exactly).
    """
    F = xi.field
    q = F.q
    total = q ** ((n + 1) * (h_max + 1))
    if total > ENUMERATION_LIMIT:
        raise EnumerationTooLarge(f"{total} polynomials exceed the limit {ENUMERATION_LIMIT}")
    if xi.is_zero_to_precision():
        raise InsufficientPrecision("xi vanishes to precision")
    # basis T^e xi^i (times the F_p-basis x^l of F_q)
    pows = [LaurentSeries.from_poly(Poly.one(F))]
    for i in range(1, n + 1):
        pows.append(pows[-1] * xi)
    basis = []
    labels = []
    for i in range(n + 1):
        for e in range(h_max + 1):
            for l in range(F.m):
                c = F.element(tuple(1 if t == l else 0 for t in range(F.m))).code
                basis.append(pows[i].shift(e).scale(c))
                labels.append((i, e, l))
    lo = min(int(b.val) for b in basis)
    hi = min(b.prec for b in basis)
    if precision is not None:
        hi = min(hi, lo + precision) if hi != float("inf") else lo + precision
    if hi == float("inf"):
        hi = lo + 64
    hi = int(hi)
    if hi <= lo:
        raise InsufficientPrecision("no overlapping precision for evaluation")
    M = np.stack([_fp_vector(b, lo, hi) for b in basis])    # (nb, K*m)
    p = F.p
    K = hi - lo
    digit_count = (n + 1) * (h_max + 1) * F.m
    best_raw = None
    best_corr = None
    depth_by_h = np.full(h_max + 1, np.iinfo(np.int64).min, dtype=np.int64)
    zero_hits = 0
    exact_zero_hits = 0
    # beta from constants c: v(xi - c)
    beta = 0
    for c in range(q):
        d = xi - c
        try:
            beta = max(beta, d.valuation())
        except InsufficientPrecision:
            beta = max(beta, int(d.prec))
    # enumerate coefficient digits in chunks
    radix = np.array([p ** k for k in range(digit_count)], dtype=np.int64)
    for start in range(1, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (idx[:, None] // radix[None, :]) % p                # (c, nb)
        vals = (digits @ M) % p                                          # (c, K*m)
        vals = vals.reshape(len(idx), K, F.m).any(axis=2)
        nz = vals.any(axis=1)
        first = np.where(nz, vals.argmax(axis=1), -1)
        # h(P): largest e with a nonzero digit
        dig = digits.reshape(len(idx), n + 1, h_max + 1, F.m).any(axis=(1, 3))
        hP = np.where(dig.any(axis=1), h_max - np.argmax(dig[:, ::-1], axis=1), 0)
        for t in np.nonzero(~nz)[0]:
            if xi.rational is not None and _exact_zero(digits[t], n, h_max, F, xi):
                exact_zero_hits += 1
            else:
                zero_hits += 1
        ok = nz & (hP >= 1)
        if not ok.any():
            continue
        depth = lo + first[ok]
        hs = hP[ok]
        corr_num = np.maximum(0, depth - n * beta)
        np.maximum.at(depth_by_h, hs, depth)
        for num_arr, current in ((depth, "raw"), (corr_num, "corr")):
            score = num_arr / hs
            top = score.max()
            cand = np.nonzero(score >= top - 1e-9)[0]
            val = max(Fraction(int(num_arr[c]), int(hs[c])) for c in cand)
            if current == "raw":
                best_raw = val if best_raw is None or val > best_raw else best_raw
            else:
                best_corr = val if best_corr is None or val > best_corr else best_corr
    if zero_hits:
        log.info("brute_force_wn: %d polynomials vanish to precision and were excluded", zero_hits)
    if best_raw is None:
        raise InsufficientPrecision("every polynomial vanished to precision")
    return ExponentEstimate(n, best_corr, max(best_raw, best_corr), "brute", (1, h_max), {
        "beta": beta,
        "depth_by_height": {str(h): int(depth_by_h[h]) for h in range(1, h_max + 1)
                            if depth_by_h[h] != np.iinfo(np.int64).min},
        "zero_to_precision": zero_hits,
        "exact_zero": exact_zero_hits,
        "precision": K,
    })


def _exact_zero(digits, n, h_max, F, xi) -> bool:
    num, den = xi.rational
    digs = digits.reshape(n + 1, h_max + 1, F.m)
    total = Poly.zero(F)
    for i in range(n + 1):
        c = Poly(F, [F.element(tuple(int(x) for x in digs[i, e])).code for e in range(h_max + 1)])
        total = total + c * num ** i * den ** (n - i)
    return total.is_zero()


# --- best-approximation checkers ----------------------------------------------------------------

@dataclass
class VerdictReport:
    passed: bool
    checks: list
    implied: dict
    window: tuple

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks,
                "implied": {k: ["inf" if x is None else str(x) for x in v]
                            for k, v in self.implied.items()},
                "window": list(self.window)}


def _window(records, window_start):
    if not records:
        raise HypothesisViolated("empty record window", index=None)
    start = len(records) // 5 if window_start is None else window_start
    used = list(records[start:])
    if not used:
        raise HypothesisViolated("empty record window", index=None)
    return used


def _tol(h) -> Fraction:
    return Fraction(3, h)


def _common_checks(used, d, theta, rho, delta):
    checks = []
    for i, r in enumerate(used):
        if r.dist <= 0:
            checks.append(("dist_positive", r.j, r.dist, 0, False))
        if i + 1 < len(used):
            nxt = used[i + 1]
            checks.append(("height_increasing", r.j, nxt.h, r.h, nxt.h > r.h))
            ratio = Fraction(nxt.h, r.h)
            checks.append(("height_growth", r.j, ratio, theta, ratio <= theta + _tol(r.h)))
        ratio = Fraction(r.dist, r.h)
        tol = _tol(r.h)
        checks.append(("dist_lower", r.j, ratio, d + delta, ratio >= d + delta - tol))
        checks.append(("dist_upper", r.j, ratio, d + rho, ratio <= d + rho + tol))
    return checks


def _finish(checks, implied, used, strict):
    rows = [{"name": n, "j": j, "value": str(v), "bound": str(b), "ok": bool(ok)}
            for n, j, v, b, ok in checks]
    passed = all(r["ok"] for r in rows)
    if strict and not passed:
        bad = next(r for r in rows if not r["ok"])
        raise HypothesisViolated(f"{bad['name']} fails at j={bad['j']}: {bad['value']} vs {bad['bound']}",
                                 index=bad["j"])
    return VerdictReport(passed, rows, implied if passed else {}, (used[0].j, used[-1].j))


def check_bestrational(records, d: int, theta, rho, delta, window_start: int | None = None,
                       strict: bool = True) -> VerdictReport:
    """Hypotheses of the rational best-approximation criterion, with tolerance 3/h_j.

    On success the report implies d-1+delta <= w_n* <= w_n <= max(d-1+rho, d theta/delta)
    for 1 <= n <= d.
    """
    theta, rho, delta = Fraction(theta), Fraction(rho), Fraction(delta)
    used = _window(records, window_start)
    checks = _common_checks(used, d, theta, rho, delta)
    implied = {"w_star": (d - 1 + delta, max(d - 1 + rho, d * theta / delta)),
               "w": (d - 1 + delta, max(d - 1 + rho, d * theta / delta))}
    return _finish(checks, implied, used, strict)


def check_bestquad(records, d: int, theta, rho, delta, eps=None, chi=None,
                   window_start: int | None = None, strict: bool = True) -> VerdictReport:
    """Hypotheses of the quadratic best-approximation criterion, with tolerance 3/h_j.

    Emits the bracket [d-1+delta, d-1+rho] for w_n*, and with eps / chi the
    bracket [eps, chi] for w_n - w_n*, for 2 <= n <= d.
    """
    if d < 2:
        raise PreconditionViolated("d must be >= 2")
    theta, rho, delta = Fraction(theta), Fraction(rho), Fraction(delta)
    if 2 * d * theta > (d - 2 + rho) * delta:
        raise SideConditionViolated(f"2d*theta = {2 * d * theta} > (d-2+rho)*delta = {(d - 2 + rho) * delta}")
    if eps is not None and 2 * d * theta > (d - 2 + delta) * delta:
        raise SideConditionViolated(f"2d*theta = {2 * d * theta} > (d-2+delta)*delta = {(d - 2 + delta) * delta}")
    used = _window(records, window_start)
    checks = _common_checks(used, d, theta, rho, delta)
    implied = {"w_star": (d - 1 + delta, d - 1 + rho)}
    if eps is not None:
        eps = Fraction(eps)
        for r in used:
            if r.conj is None:
                raise HypothesisViolated(f"record j={r.j} lacks a conjugate distance", index=r.j)
        best = max(Fraction(r.conj, r.h) + _tol(r.h) for r in used)
        checks.append(("conj_limsup_lower", used[-1].j, best, eps, best >= eps))
        if chi is not None:
            chi = Fraction(chi)
            for r in used:
                ratio = Fraction(r.conj, r.h)
                checks.append(("conj_upper", r.j, ratio, chi, ratio <= chi + _tol(r.h)))
        implied["gap"] = (eps, chi)
        implied["w"] = (d - 1 + delta + eps, None if chi is None else d - 1 + rho + chi)
    return _finish(checks, implied, used, strict)


def records_to_csv(records) -> str:
    lines = ["j,h,dist,conj,dist_over_h,conj_over_h"]
    for r in records:
        conj = "" if r.conj is None else str(r.conj)
        co = "" if r.conj is None else f"{r.conj / r.h:.12g}"
        lines.append(f"{r.j},{r.h},{r.dist},{conj},{r.dist / r.h:.12g},{co}")
    return "\n".join(lines) + "\n"
