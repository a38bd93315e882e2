"""Continued fractions in F_q((T^{-1})): expansion, convergents, periodic values, distances."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .algebra import Poly, poly_gcd
from .errors import (DegenerateQuadratic, InseparableQuadratic, InsufficientPrecision,
                     PreconditionViolated)
from .laurent import EXACT, LaurentSeries, from_rational, fractional_part, polynomial_part


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients a_0, a_1, ... and why the list stops."""

    quotients: tuple
    complete: bool = False
    reason: str = "requested"

    def __post_init__(self):
        qs = tuple(self.quotients)
        object.__setattr__(self, "quotients", qs)
        for i, a in enumerate(qs[1:], start=1):
            if a.degree < 1:
                raise PreconditionViolated(f"partial quotient a_{i} has degree < 1")

    @property
    def field(self):
        return self.quotients[0].field

    def __len__(self):
        return len(self.quotients)

    def __getitem__(self, i):
        return self.quotients[i]

    def __str__(self):
        return format_cf(self.quotients)


@dataclass(frozen=True)
class Convergent:
    p: Poly
    q: Poly
    index: int


def format_cf(quotients) -> str:
    qs = [str(a) for a in quotients]
    if not qs:
        return "[]"
    return "[" + qs[0] + ("; " + ", ".join(qs[1:]) if len(qs) > 1 else "") + "]"


def parse_cf(F, text: str) -> list:
    from .algebra import parse_poly
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError("continued fraction must be written [a0; a1, a2, ...]")
    body = text[1:-1]
    head, _, tail = body.partition(";")
    out = [parse_poly(F, head)]
    if tail.strip():
        out += [parse_poly(F, tok) for tok in tail.split(",")]
    return out


# --- expansion ---------------------------------------------------------------

def _euclid(num: Poly, den: Poly, limit: int):
    out = []
    while den and len(out) < limit:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    return out, not den


def cf_expand(x, max_quotients: int, strict: bool = True) -> CFExpansion:
    """Expand x into at most max_quotients partial quotients.

    ``x`` may be a Poly, a pair (num, den), or a LaurentSeries.  Series that
    remember a rational origin are expanded by the Euclidean algorithm.
    Otherwise each step is checked against the precision actually carried by
    the series: taking a fractional part of valuation d and inverting it costs
    2d absolute digits, and a quotient is emitted only when its polynomial part
    is fully determined.  If the budget runs out first, InsufficientPrecision
    is raised (or, with strict=False, the certified prefix is returned).
    """
    if isinstance(x, Poly):
        x = (x, Poly.one(x.field))
    if isinstance(x, LaurentSeries) and x.rational is not None:
        x = x.rational
    if isinstance(x, tuple):
        num, den = x
        qs, done = _euclid(num, den, max_quotients)
        return CFExpansion(tuple(qs), complete=done, reason="rational" if done else "requested")

    quotients = []
    cur = x
    while len(quotients) < max_quotients:
        try:
            a = polynomial_part(cur)
        except InsufficientPrecision:
            if strict:
                raise InsufficientPrecision(
                    f"precision exhausted after {len(quotients)} certified quotients")
            return CFExpansion(tuple(quotients), reason="precision")
        quotients.append(a)
        frac = fractional_part(cur)
        if frac.is_exact_zero():
            return CFExpansion(tuple(quotients), complete=True, reason="rational")
        if len(quotients) == max_quotients:
            break
        if frac.is_zero_to_precision():
            if strict:
                raise InsufficientPrecision(
                    f"fractional part vanishes to precision after {len(quotients)} quotients")
            return CFExpansion(tuple(quotients), reason="precision")
        cur = frac.inv()
    return CFExpansion(tuple(quotients), reason="requested")


# --- convergents ---------------------------------------------------------------

def convergents(e) -> Iterable[Convergent]:
    """Yield (p_n, q_n) from the three-term recurrence."""
    qs = e.quotients if isinstance(e, CFExpansion) else list(e)
    if not qs:
        return
    F = qs[0].field
    p2, p1 = Poly.zero(F), Poly.one(F)   # p_{-2}, p_{-1}
    q2, q1 = Poly.one(F), Poly.zero(F)
    for n, a in enumerate(qs):
        p2, p1 = p1, a * p1 + p2
        q2, q1 = q1, a * q1 + q2
        yield Convergent(p1, q1, n)


def _mat_mul(X, Y):
    (a, b), (c, d) = X
    (e, f), (g, h) = Y
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def _run_matrix(a: Poly, count: int):
    """[[a, 1], [1, 0]]^count by repeated squaring."""
    one, zero = Poly.one(a.field), Poly.zero(a.field)
    base = ((a, one), (one, zero))
    out = None
    while count:
        if count & 1:
            out = base if out is None else _mat_mul(out, base)
        count >>= 1
        if count:
            base = _mat_mul(base, base)
    return out


def runs_of(quotients) -> list:
    """Run-length encode a quotient list as [(poly, count), ...]."""
    runs = []
    for a in quotients:
        if runs and runs[-1][0] == a:
            runs[-1][1] += 1
        else:
            runs.append([a, 1])
    return [(a, c) for a, c in runs]


def quotient_matrix(quotients=None, runs=None) -> tuple:
    """Product of [[a_i, 1], [1, 0]] over the list, by a balanced product tree.

    For a list a_0..a_n the result is [[p_n, p_{n-1}], [q_n, q_{n-1}]].
    Repeated quotients are collapsed into runs and powered by squaring, so
    long constant stretches cost O(log length) products.
    """
    if runs is None:
        runs = runs_of(quotients or [])
    if not runs:
        raise ValueError("empty quotient list")
    level = [_run_matrix(a, c) for a, c in runs if c > 0]
    while len(level) > 1:
        nxt = [_mat_mul(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def convergent_at(quotients) -> Convergent:
    """The last convergent p_n/q_n of the given quotient list."""
    (p, _), (q, _) = quotient_matrix(quotients)
    return Convergent(p, q, len(quotients) - 1)


def cf_value(e, target_known: int) -> LaurentSeries:
    """Series of a finite continued fraction with target_known digits."""
    c = convergent_at(e.quotients if isinstance(e, CFExpansion) else e)
    return from_rational(c.p, c.q, target_known)


def verify_identities(x: LaurentSeries, e: CFExpansion) -> list:
    """Check the convergent identities for every index; return failures (empty if all hold)."""
    failures = []
    conv = list(convergents(e))
    degsum = 0
    qs = e.quotients
    tails = []
    cur = x
    for n in range(len(qs)):
        tails.append(cur)
        if n + 1 < len(qs):
            cur = fractional_part(cur).inv()
    for n, c in enumerate(conv):
        if n >= 1:
            degsum += qs[n].degree
        if c.q.degree != degsum:
            failures.append((n, "degree additivity"))
        if n >= 1:
            det = c.p * conv[n - 1].q - conv[n - 1].p * c.q
            if det != Poly.const(c.p.field, 1 if n % 2 == 1 else -1):
                failures.append((n, "determinant"))
        if poly_gcd(c.p, c.q) != Poly.one(c.p.field):
            failures.append((n, "coprimality"))
        # value of the finite continued fraction, by backward evaluation
        num, den = qs[n], Poly.one(c.p.field)
        for a in reversed(qs[:n]):
            num, den = a * num + den, num
        if num * c.q != den * c.p:
            failures.append((n, "convergent value"))
        if n + 1 < len(qs):
            expected = -(c.q.degree + c.q.degree + qs[n + 1].degree)
            diff = x - from_rational(c.p, c.q, max(1, int(x.prec) + c.q.degree + 2) if x.prec != EXACT else 64)
            try:
                if diff.logabs() != expected:
                    failures.append((n, "distance"))
            except InsufficientPrecision:
                pass
            if n >= 1:
                t = tails[n + 1]
                prev = conv[n - 1]
                num = t * c.p + LaurentSeries.from_poly(prev.p)
                den = t * c.q + LaurentSeries.from_poly(prev.q)
                if not (num - x * den).is_zero_to_precision():
                    failures.append((n, "complete quotient"))
    return failures


# --- quadratic numbers ---------------------------------------------------------

@dataclass(frozen=True)
class QuadraticNumber:
    """Root of the primitive quadratic A X^2 + B X + C selected by its CF prefix."""

    A: Poly
    B: Poly
    C: Poly
    root_tag: tuple = ()
    preperiod_runs: tuple = field(default=(), compare=False, repr=False)
    period_runs: tuple = field(default=(), compare=False, repr=False)

    @property
    def height_log(self) -> int:
        return int(max(self.A.degree, self.B.degree, self.C.degree))

    @property
    def field(self):
        return self.A.field

    def discriminant(self) -> Poly:
        return self.B * self.B - (self.A * self.C).scale(4 % self.field.p)

    def quotients(self, n: int) -> list:
        """First n partial quotients of the selected root."""
        if not self.period_runs:
            raise PreconditionViolated("quotient stream unknown for this quadratic")
        out = []
        for a, c in self.preperiod_runs:
            if len(out) >= n:
                return out[:n]
            out.extend([a] * min(c, n - len(out)))
        while len(out) < n:
            for a, c in self.period_runs:
                out.extend([a] * min(c, n - len(out)))
        return out[:n]

    def series(self, known: int) -> LaurentSeries:
        """The root to ``known`` digits, read off a convergent that is close enough.

        |xi - p_n/q_n| = q^{-(2 deg q_n + deg a_{n+1})}, so the convergent fixes
        every coefficient of T^{-i} with i below that exponent.
        """
        n = 1
        while True:
            qs = self.quotients(n + 2)
            lead = -int(qs[0].degree) if qs[0] else int(qs[1].degree)
            deg_qn = sum(int(a.degree) for a in qs[1:n + 1])
            err = 2 * deg_qn + int(qs[n + 1].degree)
            if err >= lead + known:
                break
            n *= 2
        c = convergent_at(qs[: n + 1])
        s = from_rational(c.p, c.q, err - lead + 2)
        return s.truncate_abs(lead + known)

    def evaluate(self, x: LaurentSeries) -> LaurentSeries:
        """A x^2 + B x + C as a series."""
        return x * x * self.A + x * self.B + self.C

    def __str__(self):
        return f"({self.A})*X^2 + ({self.B})*X + ({self.C})"


def _pullback(A, B, C, r, s, t, u):
    """Coefficients of (tX+u)^2 * f((rX+s)/(tX+u)) for f = A Y^2 + B Y + C."""
    A2 = A * r * r + B * r * t + C * t * t
    B2 = (A * r * s).scale(2 % A.field.p) + B * (r * u + s * t) + (C * t * u).scale(2 % A.field.p)
    C2 = A * s * s + B * s * u + C * u * u
    return A2, B2, C2


def quadratic_value(preperiod, period) -> QuadraticNumber:
    """Minimal polynomial of [a_0, ..., a_{t-1}, period repeated].

    ``preperiod`` starts with a_0 (pass [] for a purely periodic expansion
    whose first period element plays the role of a_0).
    """
    return quadratic_from_runs(runs_of(preperiod), runs_of(period))


def quadratic_from_runs(preperiod_runs, period_runs) -> QuadraticNumber:
    """quadratic_value with run-length encoded quotient lists [(poly, count), ...]."""
    pre = [(a, c) for a, c in preperiod_runs if c > 0]
    per = [(a, c) for a, c in period_runs if c > 0]
    if not per:
        raise PreconditionViolated("period must be nonempty")
    if any(b.degree < 1 for b, _ in per):
        raise PreconditionViolated("period quotients need degree >= 1")
    if pre:
        tail = pre[1:] if pre[0][1] == 1 else [(pre[0][0], pre[0][1] - 1)] + pre[1:]
        if any(a.degree < 1 for a, _ in tail):
            raise PreconditionViolated("partial quotients after a_0 need degree >= 1")
    F = per[0][0].field
    (P1, P2), (Q1, Q2) = quotient_matrix(runs=per)
    # beta = (P1 beta + P2)/(Q1 beta + Q2)
    A, B, C = Q1, Q2 - P1, -P2
    if pre:
        (r, s), (t, u) = quotient_matrix(runs=pre)
        # xi = (r beta + s)/(t beta + u), so beta = (u xi - s)/(-t xi + r) up to the unit det
        A, B, C = _pullback(A, B, C, u, -s, -t, r)
    # the period form is primitive (gcd(Q1, P2) = 1) and the pullback is unimodular,
    # so no content division is needed.
    if A.is_zero():
        raise DegenerateQuadratic("leading coefficient vanished; the value is rational")
    lam = F.inv(A.lc)
    A, B, C = A.scale(lam), B.scale(lam), C.scale(lam)
    if F.p != 2 and (B * B - (A * C).scale(4 % F.p)).is_zero():
        raise DegenerateQuadratic("zero discriminant")
    qn = QuadraticNumber(A, B, C, (), tuple(pre), tuple(per))
    return QuadraticNumber(A, B, C, tuple(qn.quotients(3)), tuple(pre), tuple(per))


def normalize_quadratic(A: Poly, B: Poly, C: Poly):
    """Divide out content and make A's leading T-coefficient 1."""
    g = poly_gcd(poly_gcd(A, B), C)
    if g.is_zero():
        raise DegenerateQuadratic("zero polynomial")
    if g.degree > 0:
        A, B, C = A // g, B // g, C // g
    lead = A if A else (B if B else C)
    lam = A.field.inv(lead.lc)
    return A.scale(lam), B.scale(lam), C.scale(lam)


def conjugate_distance(alpha: QuadraticNumber):
    """log_q |alpha - alpha'| for the Galois conjugate alpha'."""
    F = alpha.field
    if F.p == 2:
        if alpha.B.is_zero():
            raise InseparableQuadratic("B = 0 in characteristic 2: the conjugate coincides")
        return int(alpha.B.degree - alpha.A.degree)
    disc = alpha.discriminant()
    if disc.is_zero():
        raise InseparableQuadratic("zero discriminant")
    if disc.degree % 2:
        raise PreconditionViolated("odd discriminant degree: roots do not lie in F_q((1/T))")
    return int(disc.degree // 2 - alpha.A.degree)


# --- distances -------------------------------------------------------------------

def prefix_distance(deg_qm: int, a_next: Poly | None, b_next: Poly | None) -> int:
    """log_q|x - y| when x, y share a_0..a_m and next quotients are a_next, b_next.

    A missing next quotient means that side terminates at p_m/q_m.
    """
    if a_next is None and b_next is None:
        raise InsufficientPrecision("expansions coincide; distance is zero")
    if a_next is None or b_next is None:
        nxt = a_next if a_next is not None else b_next
        return -(2 * deg_qm + int(nxt.degree))
    diff = a_next - b_next
    if diff.is_zero():
        raise PreconditionViolated("next quotients agree; shared prefix is longer")
    return int(diff.degree) - int(a_next.degree) - int(b_next.degree) - 2 * deg_qm


def prefix_distance_degrees(deg_qm: int, da: int, db: int, ddiff: int) -> int:
    """Same as prefix_distance but from degrees alone (both sides continue)."""
    return ddiff - da - db - 2 * deg_qm


def cf_distance(x, y, shared_prefix_hint: int | None = None):
    """Exact log_q |x - y| for expansions or series."""
    if isinstance(x, CFExpansion) and isinstance(y, CFExpansion):
        xs, ys = x.quotients, y.quotients
        if shared_prefix_hint is None:
            m = 0
            while m < len(xs) and m < len(ys) and xs[m] == ys[m]:
                m += 1
        else:
            m = shared_prefix_hint
            if xs[:m] != ys[:m]:
                raise PreconditionViolated("hinted prefix is not shared")
        if m == 0:
            if not xs or not ys:
                raise InsufficientPrecision("empty expansion")
            return int((xs[0] - ys[0]).degree)
        a_next = xs[m] if m < len(xs) else None
        b_next = ys[m] if m < len(ys) else None
        for side, nxt in ((x, a_next), (y, b_next)):
            if nxt is None and not side.complete:
                raise InsufficientPrecision("expansion ends before the two numbers separate")
        deg_qm = sum(int(a.degree) for a in xs[1:m])
        return prefix_distance(deg_qm, a_next, b_next)
    if isinstance(x, CFExpansion):
        x = cf_value(x, 64) if x.complete else None
    if isinstance(y, CFExpansion):
        y = cf_value(y, 64) if y.complete else None
    if x is None or y is None:
        raise PreconditionViolated("mixing an incomplete expansion with a series")
    d = x - y
    return d.logabs()
