"""Explicit families: parameter search, algebraic Class IA examples, prescribed-exponent
continued fractions, the two mixed-exponent schedules and gap series."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterator

from .algebra import FieldSpec, Poly, gf
from .classia import ClassIAPattern, ratio_bounds
from .contfrac import (Convergent, QuadraticNumber, conjugate_distance, prefix_distance,
                       quadratic_from_runs)
from .errors import (InternalInvariantViolated, PreconditionViolated, SearchExhausted,
                     ThresholdViolated)
from .laurent import LaurentSeries


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction or an "a/b" string; floats are refused."""
    if isinstance(x, float):
        raise TypeError("floats are not accepted for exact parameters; pass 'a/b'")
    return Fraction(x)


def floor_pow(w: Fraction, i: int) -> int:
    return (w.numerator ** i) // (w.denominator ** i)


# --- parameter search -------------------------------------------------------------

@dataclass(frozen=True)
class SeqParams:
    j: int
    k: int
    n: int
    u: Fraction

    def to_json(self) -> dict:
        return {"j": self.j, "k": self.k, "n": self.n, "u": str(self.u)}


def split_p_part(a: int, p: int):
    m = 0
    while a % p == 0:
        a //= p
        m += 1
    return m, a


def minmax_holds(d: int, w: Fraction, p: int, k: int, n: int, u: Fraction) -> bool:
    """2d-1 < min{w, u, p^k/(w u^(n-2))} and max{...} = w, exactly."""
    third = Fraction(p ** k) / (w * u ** (n - 2))
    vals = (w, u, third)
    return min(vals) > 2 * d - 1 and max(vals) == w


def _dense_candidates(r: int, p: int, m: int, max_side: int):
    """r^y / p^x with x >= m, ordered by expanding squares side = max(x - m, y)."""
    for side in range(max_side + 1):
        for y in range(side + 1):
            xs = range(side + 1) if y == side else (side,)
            for xo in xs:
                yield Fraction(r ** y, p ** (xo + m)), xo + m, y


def seq_search(d: int, w, p: int, count: int = 1, max_side: int = 200) -> Iterator[SeqParams]:
    """Yield `count` parameter tuples (k_j, n_j, u_j) with strictly increasing k_j."""
    w = as_fraction(w)
    if w <= 2 * d - 1:
        raise PreconditionViolated(f"need w > 2d-1 = {2 * d - 1}")
    m, _ = split_p_part(w.numerator, p)
    r = 2 if p % 2 else 3
    lo0 = Fraction(2 * d - 1)
    ratio = w / lo0
    k_prev = None
    for j in range(1, count + 1):
        bound = p if k_prev is None else p ** k_prev
        n = 3
        while ratio ** (n - 1) <= bound:
            n += 1
        while True:
            # smallest admissible k with w (2d-1)^(n-1) < p^k < w^n and k > k_prev
            k = 1 if k_prev is None else k_prev + 1
            while p ** k <= w * lo0 ** (n - 1):
                k += 1
            if p ** k < w ** n:
                break
            n += 1
        pk = p ** k
        e = n - 2
        found = None
        for u, x, y in _dense_candidates(r, p, m, max_side):
            if not (lo0 < u < w):
                continue
            ue = u ** e
            if ue * w * w > pk and ue * lo0 * w < pk:
                found = u
                break
        if found is None:
            raise SearchExhausted(f"no u_{j} found with exponents up to {max_side}")
        if not minmax_holds(d, w, p, k, n, found):
            raise InternalInvariantViolated("search produced a tuple violating the min/max condition")
        yield SeqParams(j, k, n, found)
        k_prev = k


# --- algebraic examples ---------------------------------------------------------------

def mainalg_degrees(params: SeqParams, w, p: int) -> tuple:
    w = as_fraction(w)
    a, b = w.numerator, w.denominator
    m, _ = split_p_part(a, p)
    aj, bj = params.u.numerator, params.u.denominator
    n, pm, pk = params.n, p ** m, p ** params.k
    raw = [Fraction(bj ** (n - 2) * (a - b), pm)]
    for i in range(2, n):
        raw.append(Fraction(a * aj ** (i - 2) * bj ** (n - i - 1) * (aj - bj), pm))
    raw.append(Fraction(pk * b * bj ** (n - 2) - a * aj ** (n - 2), pm))
    for i, x in enumerate(raw, start=1):
        if x.denominator != 1 or x <= 0:
            raise InternalInvariantViolated(f"d_{i} = {x} is not a positive integer")
    degs = tuple(int(x) for x in raw)
    if gcd(degs[-1], p) != 1:
        raise InternalInvariantViolated(f"gcd(d_n, p) = gcd({degs[-1]}, {p}) != 1")
    return degs


def build_mainalg(params: SeqParams, d: int, w, F: FieldSpec | None = None,
                  quotient_style: Callable | None = None) -> ClassIAPattern:
    """Class IA pattern whose seed has the prescribed degrees d_1..d_n.

    ``quotient_style(i, degree)`` may supply the seed polynomials; the default
    is the monomial T^degree.
    """
    w = as_fraction(w)
    F = F or gf(2)
    degs = mainalg_degrees(params, w, F.p)
    if quotient_style is None:
        seed = tuple(Poly.monomial(F, dg) for dg in degs)
    else:
        seed = tuple(quotient_style(i, dg) for i, dg in enumerate(degs, start=1))
        if tuple(int(b.degree) for b in seed) != degs:
            raise PreconditionViolated("quotient_style returned polynomials of the wrong degree")
    pat = ClassIAPattern(seed=seed, unit=1, k=params.k)
    rb = ratio_bounds(pat)
    a, b = w.numerator, w.denominator
    aj, bj = params.u.numerator, params.u.denominator
    pk, n = F.p ** params.k, params.n
    closed = [Fraction(a - b, (pk - 1) * b)]
    closed += [Fraction(aj - bj, (pk - 1) * bj)] * (n - 2)
    closed.append(Fraction(pk * b * bj ** (n - 2) - a * aj ** (n - 2), (pk - 1) * a * aj ** (n - 2)))
    if tuple(closed) != rb.r:
        raise InternalInvariantViolated("ratio constants disagree with their closed forms")
    if rb.limsup != w or not rb.liminf > 2 * d - 1:
        raise InternalInvariantViolated("ratio bounds miss the target exponent")
    return pat


# --- prescribed-ratio expansions ------------------------------------------------------

class RealEqualRule:
    """a_0 = 0, a_1 = T + e_1, a_n = T^floor((w-1) deg Q_{n-1}) + e_n."""

    def __init__(self, d: int, w, eps, F: FieldSpec | None = None):
        self.w = as_fraction(w)
        if self.w < 2 * d - 1:
            raise PreconditionViolated(f"need w >= 2d-1 = {2 * d - 1}")
        self.d = d
        self.field = F or gf(2)
        self._eps = eps if callable(eps) else (lambda n, seq=tuple(eps): seq[n - 1] if n - 1 < len(seq) else 0)
        self._degQ = [0, 1]     # deg Q_0, deg Q_1
        self._cache = {}

    def eps(self, n: int) -> int:
        e = int(self._eps(n))
        if e not in (0, 1):
            raise PreconditionViolated("eps entries must be 0 or 1")
        return e

    def degree(self, n: int) -> int:
        if n == 0:
            return 0
        if n == 1:
            return 1
        while len(self._degQ) <= n:
            m = len(self._degQ)
            dm = (self.w - 1) * self._degQ[m - 1]
            self._degQ.append(self._degQ[m - 1] + dm.numerator // dm.denominator)
        return self._degQ[n] - self._degQ[n - 1]

    def deg_q(self, n: int) -> int:
        self.degree(n)
        return self._degQ[n]

    def __call__(self, n: int) -> Poly:
        F = self.field
        if n == 0:
            return Poly.zero(F)
        if n not in self._cache:
            self._cache[n] = Poly.monomial(F, self.degree(n)) + Poly.const(F, self.eps(n))
        return self._cache[n]

    def quotients(self, n: int) -> list:
        return [self(i) for i in range(n)]


def build_realequal(d: int, w, eps, F: FieldSpec | None = None) -> RealEqualRule:
    return RealEqualRule(d, w, eps, F)


# --- approximation records -----------------------------------------------------------

@dataclass(frozen=True)
class ApproximationRecord:
    j: int
    h: int
    dist: int
    conj: int | None = None
    h_next: int | None = None

    def to_json(self) -> dict:
        return {"j": self.j, "h": self.h, "dist": self.dist, "conj": self.conj, "h_next": self.h_next}


class SparseSchedule:
    """Quotient rule that is a default polynomial except at listed positions."""

    def __init__(self, default: Poly, specials: dict, a0: Poly):
        self.default = default
        self.specials = specials
        self.positions = sorted(specials)
        self.a0 = a0

    def __call__(self, n: int) -> Poly:
        if n == 0:
            return self.a0
        return self.specials.get(n, self.default)

    def runs(self, stop: int) -> list:
        """Run-length form of a_0..a_{stop-1}."""
        out = [(self.a0, 1)]
        prev = 0
        for pos in self.positions:
            if pos >= stop:
                break
            if pos - prev - 1 > 0:
                out.append((self.default, pos - prev - 1))
            out.append((self.specials[pos], 1))
            prev = pos
        if stop - prev - 1 > 0:
            out.append((self.default, stop - prev - 1))
        return out

    def deg_q(self, n: int) -> int:
        """deg q_n = sum of deg a_1..deg a_n."""
        e = int(self.default.degree)
        total = n * e
        for pos in self.positions:
            if pos > n:
                break
            total += int(self.specials[pos].degree) - e
        return total


@dataclass
class ApproximantFamily:
    kind: str
    params: dict
    target: Callable
    approximant: Callable
    targets: dict = field(default_factory=dict)
    records_fn: Callable | None = None

    def records(self, j_max: int, j_min: int = 1) -> list:
        return self.records_fn(j_min, j_max)

    def schedule_sample(self, n: int = 16) -> list:
        return [str(self.target(i)) for i in range(n)]

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params, "schedule_sample": self.schedule_sample(),
                "targets": {k: str(v) for k, v in self.targets.items()}}


def _check_quotients(polys):
    for x in polys:
        if x.degree < 1:
            raise PreconditionViolated("schedule polynomials must be non-constant")
    for i in range(len(polys)):
        for k in range(i + 1, len(polys)):
            if polys[i] == polys[k]:
                raise PreconditionViolated("schedule polynomials must be distinct")


def conti1_threshold_ok(d: int, w: Fraction) -> bool:
    """w >= (3d + 2 + sqrt(9d^2 + 4d + 4)) / 2, decided exactly."""
    lhs = 2 * w - 3 * d - 2
    return lhs >= 0 and lhs * lhs >= 9 * d * d + 4 * d + 4


def _first_divergence(target: SparseSchedule, approx_specials: Callable, start: int, stop: int,
                      default: Poly):
    """First index >= start where the target differs from an approximant.

    ``approx_specials(limit)`` lists (position, poly) of non-default approximant
    quotients beyond ``start`` up to limit.
    """
    limit = stop
    cand = {}
    for pos in target.positions:
        if start <= pos <= limit:
            cand[pos] = None
    for pos, _ in approx_specials(limit):
        cand[pos] = None
    approx = dict(approx_specials(limit))
    for pos in sorted(cand):
        t = target(pos)
        a = approx.get(pos, default)
        if t != a:
            return pos, t, a
    return None


def _quadratic_record(j, F, target: SparseSchedule, pre_stop: int, period_runs, approx_specials,
                      search_stop: int, with_poly: bool):
    """Height, distance and conjugate distance of one quadratic approximant."""
    pre = target.runs(pre_stop)
    alpha = quadratic_from_runs(pre, period_runs)
    div = _first_divergence(target, approx_specials, pre_stop, search_stop, target.default)
    if div is None:
        raise InternalInvariantViolated("approximant never separates from the target within the search range")
    M, t_poly, a_poly = div
    dist = -prefix_distance(target.deg_q(M - 1), t_poly, a_poly)
    conj = -conjugate_distance(alpha)
    return alpha, ApproximationRecord(j, alpha.height_log, dist, conj), M


def _link_heights(records):
    out = []
    for i, r in enumerate(records):
        h_next = records[i + 1].h if i + 1 < len(records) else None
        out.append(ApproximationRecord(r.j, r.h, r.dist, r.conj, h_next))
    return out


def build_conti1(d: int, w, a: Poly, b: Poly) -> ApproximantFamily:
    """b at the indices floor(w^i), a elsewhere; approximants with tail (a) repeated."""
    w = as_fraction(w)
    _check_quotients([a, b])
    if d < 2:
        raise PreconditionViolated("d must be >= 2")
    if not conti1_threshold_ok(d, w):
        raise ThresholdViolated(f"w = {w} is below (3d+2+sqrt(9d^2+4d+4))/2 for d = {d}")
    F = a.field
    zero = Poly.zero(F)

    def schedule(limit: int) -> SparseSchedule:
        specials = {}
        i = 0
        while True:
            pos = floor_pow(w, i)
            if pos > limit:
                break
            specials[pos] = b
            i += 1
        return SparseSchedule(a, specials, zero)

    def target(n: int) -> Poly:
        return schedule(n)(n)

    def approximant(j: int) -> QuadraticNumber:
        N = floor_pow(w, j)
        return quadratic_from_runs(schedule(N).runs(N + 1), [(a, 1)])

    def records(j_min: int, j_max: int):
        out = []
        for j in range(j_min, j_max + 1):
            N = floor_pow(w, j)
            stop = floor_pow(w, j + 1) + 1
            sch = schedule(stop)
            _, rec, _ = _quadratic_record(j, F, sch, N + 1, [(a, 1)], lambda lim: [], stop, False)
            out.append(rec)
        return _link_heights(out)

    fam = ApproximantFamily("conti1", {"d": d, "w": str(w), "a": str(a), "b": str(b)},
                            target, approximant,
                            {"w_star": w - 1, "w": w, "dist_over_h": w, "conj_over_h": Fraction(1)},
                            records)
    return fam


def conti2_m(w: Fraction, eta: Fraction, i: int) -> int:
    L = (eta * w ** i)
    L = L.numerator // L.denominator
    return (floor_pow(w, i + 1) - (floor_pow(w, i) - 1)) // L


def build_conti2(d: int, w, eta, a: Poly, b: Poly, c: Poly) -> ApproximantFamily:
    """Three-case schedule (b at floor(w^i), c on the arithmetic runs, a elsewhere)."""
    w = as_fraction(w)
    eta = as_fraction(eta)
    _check_quotients([a, b, c])
    if d < 2:
        raise PreconditionViolated("d must be >= 2")
    if w < 121 * d * d:
        raise ThresholdViolated(f"need w >= 121 d^2 = {121 * d * d}")
    if not (eta > 0 and eta * eta * d * d < w):
        raise ThresholdViolated("need 0 < eta < sqrt(w)/d")
    F = a.field
    zero = Poly.zero(F)

    def L_of(j):
        x = eta * w ** j
        return x.numerator // x.denominator

    def schedule(limit: int) -> SparseSchedule:
        specials = {}
        bpos = set()
        i = 0
        while floor_pow(w, i) <= limit:
            bpos.add(floor_pow(w, i))
            i += 1
        j = 1
        while floor_pow(w, j) <= limit:
            Nj, Lj, mj = floor_pow(w, j), L_of(j), conti2_m(w, eta, j)
            for m in range(1, mj + 1):
                pos = Nj + m * Lj
                if pos > limit:
                    break
                if pos not in bpos:
                    specials[pos] = c
            j += 1
        for pos in bpos:
            specials[pos] = b
        return SparseSchedule(a, specials, zero)

    def target(n: int) -> Poly:
        return schedule(n)(n)

    def period_runs(j):
        L = L_of(j)
        return ([(a, L - 1)] if L > 1 else []) + [(c, 1)]

    def approximant(j: int) -> QuadraticNumber:
        N = floor_pow(w, j)
        return quadratic_from_runs(schedule(N).runs(N + 1), period_runs(j))

    def records(j_min: int, j_max: int):
        out = []
        for j in range(j_min, j_max + 1):
            N, L = floor_pow(w, j), L_of(j)
            stop = floor_pow(w, j + 1) + 2 * L + 1
            sch = schedule(stop)

            def approx_specials(limit, N=N, L=L):
                return [(N + m * L, c) for m in range(1, (limit - N) // L + 1)]

            _, rec, _ = _quadratic_record(j, F, sch, N + 1, period_runs(j), approx_specials, stop, False)
            out.append(rec)
        return _link_heights(out)

    two = 2 + eta
    targets = {
        "w_star": (2 * w - 2 - eta) / two,
        "w": (2 * w - eta) / two,
        "gap": 2 / two,
        "dist_over_h": 2 * w / two,
        "conj_over_h": 2 / two,
    }
    return ApproximantFamily("conti2", {"d": d, "w": str(w), "eta": str(eta), "a": str(a),
                                        "b": str(b), "c": str(c)},
                             target, approximant, targets, records)


# --- gap series ---------------------------------------------------------------------

def build_gap_series(k: int = 2, schedule: Callable | None = None, F: FieldSpec | None = None,
                     ) -> ApproximantFamily:
    """xi = sum_j T^{-n_j} with rational approximants p_j / T^{n_j}."""
    if k < 2:
        raise PreconditionViolated("k must be >= 2")
    F = F or gf(2)
    sched = schedule or (lambda j: k ** j)
    for j in range(8):
        if sched(j + 1) <= sched(j):
            raise PreconditionViolated("schedule must be strictly increasing")

    def target(n: int) -> int:
        """Coefficient a_n of T^{-n}."""
        j = 0
        while sched(j) < n:
            j += 1
        return 1 if sched(j) == n else 0

    def approximant(j: int) -> Convergent:
        nj = sched(j)
        q = Poly.monomial(F, nj)
        p = Poly(F, [0] * 0)
        for i in range(j + 1):
            p = p + Poly.monomial(F, nj - sched(i))
        return Convergent(p, q, j)

    def records(j_min: int, j_max: int):
        out = [ApproximationRecord(j, sched(j), sched(j + 1), None, sched(j + 1))
               for j in range(j_min, j_max + 1)]
        return out

    def series(N: int) -> LaurentSeries:
        return LaurentSeries.from_coefficients(F, 0, [target(n) for n in range(N)])

    fam = ApproximantFamily("gap", {"k": k}, target, approximant,
                            {"ratio": Fraction(sched(1), sched(0)) if sched(0) else None}, records)
    fam.series = series
    return fam
