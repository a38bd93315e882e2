"""Twisted-periodic ("Class IA") continued fractions.

A pattern (preperiod, seed b_1..b_s, unit a, k) describes the quotient list

    preperiod..., b_1, b_2, ...   with  b_{j+s} = a^{+1} b_j^{p^k} (j odd),
                                        b_{j+s} = a^{-1} b_j^{p^k} (j even).

The first generated element sits in the a_0 slot of the continued fraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, inf

from .algebra import Poly
from .contfrac import convergent_at, quotient_matrix
from .errors import CertificateFailed, InsufficientPrecision, PreconditionViolated
from .laurent import LaurentSeries, from_rational


@dataclass(frozen=True)
class ClassIAPattern:
    seed: tuple
    unit: int = 1
    k: int = 1
    preperiod: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "seed", tuple(self.seed))
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        if not self.seed:
            raise PreconditionViolated("seed must be nonempty")
        if any(b.degree < 1 for b in self.seed):
            raise PreconditionViolated("seed polynomials need degree >= 1")
        if self.unit == 0:
            raise PreconditionViolated("unit must be nonzero")
        if self.k < 0:
            raise PreconditionViolated("k must be >= 0")

    @property
    def field(self):
        return self.seed[0].field

    @property
    def seed_degrees(self) -> tuple:
        return tuple(int(b.degree) for b in self.seed)

    def to_json(self) -> dict:
        return {
            "preperiod": [str(a) for a in self.preperiod],
            "seed": [str(b) for b in self.seed],
            "unit": self.field.format_code(self.unit),
            "k": self.k,
        }

    @classmethod
    def from_json(cls, F, data: dict) -> "ClassIAPattern":
        return cls(seed=tuple(Poly.parse(F, s) for s in data["seed"]),
                   unit=F.parse_code(str(data.get("unit", 1))),
                   k=int(data.get("k", 1)),
                   preperiod=tuple(Poly.parse(F, s) for s in data.get("preperiod", [])))


def generate_periodic_part(pat: ClassIAPattern, n: int) -> list:
    """b_1, ..., b_n."""
    F = pat.field
    inv_unit = F.inv(pat.unit)
    out = list(pat.seed[:n])
    s = len(pat.seed)
    while len(out) < n:
        j = len(out) - s + 1          # b_{j+s} is being produced, j counted from 1
        c = pat.unit if j % 2 == 1 else inv_unit
        out.append(out[j - 1].frobenius_pow(pat.k).scale(c))
    return out


def generate_quotients(pat: ClassIAPattern, n: int) -> list:
    """First n quotients: the preperiod verbatim, then b_1, b_2, ..."""
    if n < 1:
        raise PreconditionViolated("n must be >= 1")
    pre = list(pat.preperiod[:n])
    return pre + generate_periodic_part(pat, n - len(pre))


def periodic_degrees(pat: ClassIAPattern, n: int) -> list:
    """deg b_1..deg b_n, without building the polynomials."""
    pk = pat.field.p ** pat.k
    d = list(pat.seed_degrees[:n])
    s = len(pat.seed)
    while len(d) < n:
        d.append(pk * d[len(d) - s])
    return d


@dataclass(frozen=True)
class RatioBounds:
    r: tuple
    limsup: Fraction
    liminf: Fraction


def ratio_bounds(pat: ClassIAPattern) -> RatioBounds:
    """Exact limsup / liminf of deg q_{n+1} / deg q_n."""
    pk = pat.field.p ** pat.k
    d = pat.seed_degrees
    r = tuple(Fraction(d[i], pk * sum(d[:i]) + sum(d[i:])) for i in range(len(d)))
    return RatioBounds(r, 1 + (pk - 1) * max(r), 1 + (pk - 1) * min(r))


def empirical_ratios(quotient_degrees, skip: int = 0):
    """Raw ratios deg q_{n+1}/deg q_n for the CF [a_0; a_1, ...] with given degrees.

    Entry 0 of ``quotient_degrees`` is deg a_0 and does not enter q_n.
    Returns (n, ratio) pairs with n >= max(1, skip).
    """
    D = [0]
    for dg in quotient_degrees[1:]:
        D.append(D[-1] + dg)
    return [(n, Fraction(D[n + 1], D[n])) for n in range(max(1, skip), len(D) - 1)]


def residue_limits(quotient_degrees, s: int, skip: int = 0):
    """Exact limits of deg q_{n+1}/deg q_n along each residue class mod s.

    Once the degrees are twisted-periodic, the block sums
    S_n = deg q_{n+s} - deg q_n satisfy S_{n+s} = p^k S_n, and the ratio
    along a residue class tends to S_{n+1}/S_n, which is constant on that
    class.  Every such value is read off directly from finite data.
    """
    D = [0]
    for dg in quotient_degrees[1:]:
        D.append(D[-1] + dg)
    out = []
    for n in range(max(1, skip), len(D) - s - 1):
        out.append((n, Fraction(D[n + 1 + s] - D[n + 1], D[n + s] - D[n])))
    return out


def empirical_extrema(pat: ClassIAPattern, n: int) -> dict:
    """Raw and limit-extracted extrema over n generated quotients.

    The first t+s ratios (preperiod plus one seed block) are discarded.
    """
    degs = [int(a.degree) if a else 0 for a in pat.preperiod]
    degs += periodic_degrees(pat, n - len(degs))
    skip = len(pat.preperiod) + len(pat.seed)
    raw = [r for _, r in empirical_ratios(degs, skip)]
    lim = [r for _, r in residue_limits(degs, len(pat.seed), skip)]
    return {
        "raw_max": max(raw) if raw else None,
        "raw_min": min(raw) if raw else None,
        "limit_max": max(lim) if lim else None,
        "limit_min": min(lim) if lim else None,
    }


# --- Newton polygon -----------------------------------------------------------

def newton_irreducible(valuations, m: int) -> bool:
    """Irreducibility over F_q((1/T)) of X^m + a_1 X^{m-1} + ... + a_m.

    ``valuations`` lists v(a_1)..v(a_m); use math.inf for a vanishing a_i.
    Requires v(a_m) > 0 with gcd(v(a_m), m) = 1.
    """
    vals = list(valuations)
    if len(vals) != m:
        raise PreconditionViolated("need exactly m valuations")
    vm = vals[-1]
    if vm == inf or vm <= 0 or vm != int(vm) or gcd(int(vm), m) != 1:
        raise PreconditionViolated(f"v(a_m) = {vm} must be a positive integer coprime to m = {m}")
    vm = int(vm)
    for i, v in enumerate(vals[:-1], start=1):
        if v == inf:
            continue
        if not v * m > vm * i:
            return False
    return True


@dataclass
class DegreeCertificate:
    degree: int
    checks: list = field(default_factory=list)
    verdict: bool = True

    def to_json(self) -> dict:
        return {"degree": self.degree, "verdict": self.verdict, "checks": self.checks}


def expected_valuations(pat: ClassIAPattern) -> list:
    """Closed-form v(c_1)..v(c_{p^k}) for the cofactor Q(X) = P(X)/(X - beta)."""
    pk = pat.field.p ** pat.k
    d = pat.seed_degrees
    tail = 2 * sum(d[1:])
    out = [(pk - i + 1) * d[0] + tail for i in range(1, pk)]
    out.append(d[-1])
    return out


def degree_certificate(pat: ClassIAPattern, precision: int | None = None) -> DegreeCertificate:
    """Certify that beta = [b_1, b_2, ...] has algebraic degree p^k + 1.

    beta satisfies beta^{p^k+1} - (p/q) beta^{p^k} + (q'/(a q)) beta - p'/(a q) = 0
    with p/q, p'/q' the last two convergents of the seed block.  Dividing out
    (X - beta) leaves Q(X) of degree p^k whose coefficients are evaluated as
    series; their valuations are compared with the closed forms and fed to the
    Newton-polygon test.
    """
    F = pat.field
    p = F.p
    pk = p ** pat.k
    d = pat.seed_degrees
    s = len(d)
    if gcd(d[-1], p) != 1:
        raise PreconditionViolated(f"gcd(deg b_s, p) = gcd({d[-1]}, {p}) != 1")
    expected = expected_valuations(pat)
    top = max(expected) + pk * d[0]
    budget = precision if precision is not None else 4 * top + 64
    # beta from a convergent whose error lies beyond the budget
    lead = -d[0]
    n = s + 1
    while True:
        degs = periodic_degrees(pat, n + 1)
        err = 2 * sum(degs[1:n]) + degs[n]
        if err >= lead + budget:
            break
        n += s
    qs = generate_periodic_part(pat, n)
    c = convergent_at(qs)
    beta = from_rational(c.p, c.q, budget + 2 * int(c.q.degree) + 8).truncate_abs(lead + budget)

    (P1, P2), (Q1, Q2) = quotient_matrix(pat.seed)
    big = budget + 4 * top + 16
    r1 = from_rational(P1, Q1, big)                  # p_{s-1}/q_{s-1}
    tail = from_rational(Q2, Q1.scale(pat.unit), big) if Q2 else LaurentSeries.zero(F)

    coeffs = []
    base = beta - r1
    cur = base
    for i in range(1, pk):
        coeffs.append(cur)
        cur = cur * beta
    coeffs.append(cur + tail)

    checks = []
    computed = []
    ok = True
    for i, (ci, ev) in enumerate(zip(coeffs, expected), start=1):
        try:
            v = ci.valuation()
        except InsufficientPrecision as exc:
            raise InsufficientPrecision(f"coefficient c_{i} vanishes to precision; raise the budget") from exc
        computed.append(v)
        good = v == ev
        checks.append({"i": i, "expected": ev, "computed": v, "ok": good})
        if not good and ok:
            ok = False
            first_bad = (i, ev, v)
    if not ok:
        i, ev, v = first_bad
        raise CertificateFailed(f"v(c_{i}) = {v}, expected {ev}")
    newton = newton_irreducible(computed, pk)
    checks.append({"newton_irreducible": newton})
    if not newton:
        raise CertificateFailed("Newton polygon criterion failed")
    return DegreeCertificate(pk + 1, checks, True)
