"""Truncated Laurent series in F_q((T^{-1})) with explicit precision.

A series is stored as ``xi = sum_{n >= val} a_n T^{-n}`` with the coefficient
codes ``a_val, a_{val+1}, ...`` and a count ``known`` of guaranteed
coefficients.  Internally the coefficient list is a power series in
``t = T^{-1}``, so multiplication and inversion reuse the polynomial kernels.

Exact series (finite Laurent polynomials, e.g. images of polynomials) carry
``known = EXACT``; everything past the stored list is then genuinely zero.
Absolute values are only ever handled as log_q integers.
"""
from __future__ import annotations

import math
import re

from .algebra import NEG_INF, FieldSpec, Poly, mul_codes, add_codes, neg_codes, scale_codes, _trim
from .errors import DivisionByZero, InsufficientPrecision, PreconditionViolated, SpecMismatch

EXACT = math.inf


def _lowtrim(codes):
    """Number of leading zero codes."""
    i = 0
    n = len(codes)
    while i < n and codes[i] == 0:
        i += 1
    return i


def series_inverse(F: FieldSpec, codes, n: int) -> list:
    """First n coefficients of 1/u for a power series u with u[0] != 0 (Newton)."""
    if not codes or codes[0] == 0:
        raise DivisionByZero("power series with zero constant term")
    g = [F.inv(codes[0])]
    k = 1
    while k < n:
        k = min(2 * k, n)
        ug = mul_codes(F, list(codes[:k]), g)[:k]
        # Newton step g <- g (2 - u g)  (mod t^k)
        e = neg_codes(F, ug)
        e += [0] * (k - len(e))
        e[0] = F.add(e[0], 2 % F.p)
        g = mul_codes(F, g, e)[:k]
        g += [0] * (k - len(g))
    return g[:n]


class LaurentSeries:
    """Immutable truncated element of F_q((T^{-1}))."""

    __slots__ = ("field", "val", "codes", "known", "rational")

    def __init__(self, field: FieldSpec, val, codes=(), known=EXACT, rational=None):
        codes = list(codes)
        if known != EXACT:
            known = int(known)
            if known < 0:
                raise ValueError("known must be non-negative")
            codes = codes[:known] + [0] * max(0, known - len(codes))
        lead = _lowtrim(codes)
        if lead == len(codes):
            # zero to all stored digits
            if known == EXACT:
                val, codes, known = math.inf, [], EXACT
            else:
                val, codes, known = val + known, [], 0
        else:
            val += lead
            codes = codes[lead:]
            if known != EXACT:
                known -= lead
            else:
                _trim(codes)
        self.field = field
        self.val = val
        self.codes = tuple(codes)
        self.known = known
        self.rational = rational

    # --- constructors ---

    @classmethod
    def zero(cls, F):
        return cls(F, 0, (), EXACT)

    @classmethod
    def from_poly(cls, f: Poly) -> "LaurentSeries":
        if f.is_zero():
            return cls.zero(f.field)
        return cls(f.field, -f.degree, tuple(reversed(f.codes)), EXACT, rational=(f, Poly.one(f.field)))

    @classmethod
    def from_coefficients(cls, F, start: int, coeffs, known=None):
        """Series with a_start, a_{start+1}, ... given by coeffs (codes or ints)."""
        codes = [F.element(c).code for c in coeffs]
        return cls(F, start, codes, len(codes) if known is None else known)

    @classmethod
    def monomial(cls, F, n: int, c: int = 1):
        """c * T^{-n}."""
        return cls(F, n, (c,), EXACT)

    # --- inspection ---

    @property
    def is_exact(self) -> bool:
        return self.known == EXACT

    @property
    def prec(self):
        """Absolute index of the first unknown coefficient (a_n known for n < prec)."""
        if self.known == EXACT:
            return EXACT
        return self.val + self.known

    def is_exact_zero(self) -> bool:
        return self.known == EXACT and not self.codes

    def is_zero_to_precision(self) -> bool:
        return not self.codes

    def coeff(self, n: int) -> int:
        """Code of a_n, the coefficient of T^{-n}."""
        if n >= self.prec:
            raise InsufficientPrecision(f"coefficient of T^-{n} lies beyond precision {self.prec}")
        i = n - self.val if self.codes else -1
        return self.codes[i] if 0 <= i < len(self.codes) else 0

    def coefficients(self, start: int, stop: int) -> list:
        return [self.coeff(n) for n in range(start, stop)]

    def logabs(self):
        """log_q |x|; NEG_INF only for the exact zero."""
        if self.is_exact_zero():
            return NEG_INF
        if not self.codes:
            raise InsufficientPrecision(f"series is zero to precision {self.prec}; |x| unknown")
        return -self.val

    def valuation(self):
        a = self.logabs()
        return -a

    # --- arithmetic ---

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            if other.field != self.field:
                raise SpecMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, Poly):
            if other.field != self.field:
                raise SpecMismatch(f"{self.field} vs {other.field}")
            return LaurentSeries.from_poly(other)
        if isinstance(other, int):
            return LaurentSeries.from_poly(Poly.const(self.field, other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        if self.is_exact_zero():
            return o
        if o.is_exact_zero():
            return self
        prec = min(self.prec, o.prec)
        vals = [s.val for s in (self, o) if s.codes]
        if not vals:
            return LaurentSeries(F, prec, (), 0)
        start = min(vals)
        if prec != EXACT and prec <= start:
            return LaurentSeries(F, prec, (), 0)

        def window(s):
            if not s.codes:
                return []
            return [0] * (s.val - start) + list(s.codes)

        codes = add_codes(F, window(self), window(o))
        known = EXACT if prec == EXACT else prec - start
        return LaurentSeries(F, start, codes, known)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.field, self.val, neg_codes(self.field, self.codes), self.known)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        if self.is_exact_zero() or o.is_exact_zero():
            return LaurentSeries.zero(F)
        if not self.codes or not o.codes:
            # one factor is zero to precision: bound the product's size
            if not self.codes and not o.codes:
                return LaurentSeries(F, self.prec + o.prec, (), 0)
            z, nz = (self, o) if not self.codes else (o, self)
            return LaurentSeries(F, z.prec + nz.val, (), 0)
        known = min(self.known, o.known)
        a, b = self.codes, o.codes
        if known != EXACT:
            a, b = a[:known], b[:known]
        codes = mul_codes(F, list(a), list(b))
        if known != EXACT:
            codes = codes[:known]
        return LaurentSeries(F, self.val + o.val, codes, known)

    __rmul__ = __mul__

    def scale(self, c: int) -> "LaurentSeries":
        if c == 0:
            return LaurentSeries.zero(self.field)
        return LaurentSeries(self.field, self.val, scale_codes(self.field, self.codes, c), self.known)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by T^k."""
        if self.is_exact_zero():
            return self
        return LaurentSeries(self.field, self.val - k, self.codes, self.known)

    def inv(self, known=None) -> "LaurentSeries":
        """Multiplicative inverse; keeps the relative precision of self.

        An exact series with more than one term has an infinite inverse, so a
        ``known`` budget must be supplied for it.
        """
        if self.is_exact_zero():
            raise DivisionByZero("inverse of the zero series")
        if not self.codes:
            raise InsufficientPrecision("cannot invert a series that is zero to precision")
        F = self.field
        if self.known == EXACT:
            if len(self.codes) == 1:
                return LaurentSeries(F, -self.val, (F.inv(self.codes[0]),), EXACT)
            if known is None:
                raise PreconditionViolated("inverse of an exact non-monomial series needs a precision budget")
            k = known
        else:
            k = self.known if known is None else min(known, self.known)
        if k == 0:
            return LaurentSeries(F, -self.val, (), 0)
        return LaurentSeries(F, -self.val, series_inverse(F, self.codes, k), k)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        budget = None
        if o.is_exact and len(o.codes) > 1:
            if self.known == EXACT:
                raise PreconditionViolated("exact division needs a precision budget; use from_rational")
            budget = self.known
        return self * o.inv(budget)

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = LaurentSeries.from_poly(Poly.one(self.field))
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def frobenius_pow(self, k: int) -> "LaurentSeries":
        """x -> x^(p^k), computed by spreading exponents (exact in characteristic p)."""
        F = self.field
        step = F.p ** k
        if self.is_exact_zero():
            return self
        if not self.codes:
            return LaurentSeries(F, self.prec * step, (), 0)
        codes = [0] * ((len(self.codes) - 1) * step + 1)
        for i, c in enumerate(self.codes):
            codes[i * step] = F.frob(c, k)
        # the gaps after the last spread slot are known zeros as well
        known = EXACT if self.known == EXACT else self.known * step
        return LaurentSeries(F, self.val * step, codes, known)

    def truncate(self, known: int) -> "LaurentSeries":
        """Forget everything beyond ``known`` coefficients after the leading one."""
        if self.known != EXACT and known > self.known:
            raise InsufficientPrecision("cannot extend precision by truncation")
        return LaurentSeries(self.field, self.val, self.codes, known)

    def truncate_abs(self, prec: int) -> "LaurentSeries":
        """Keep exactly the coefficients a_n with n < prec."""
        if prec > self.prec:
            raise InsufficientPrecision(f"requested absolute precision {prec} > {self.prec}")
        if not self.codes:
            return LaurentSeries(self.field, prec, (), 0)
        return LaurentSeries(self.field, self.val, self.codes, max(0, prec - self.val))

    # --- comparisons ---

    def agrees(self, other, upto=None) -> bool:
        """True when both series have the same coefficients below min precision (or ``upto``)."""
        o = self._coerce(other)
        limit = min(self.prec, o.prec)
        if upto is not None:
            limit = min(limit, upto)
        if limit == EXACT:
            return self.val == o.val and self.codes == o.codes
        start = min(s.val for s in (self, o) if s.codes) if (self.codes or o.codes) else limit
        return all(self.coeff(n) == o.coeff(n) for n in range(int(start), int(limit)))

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.field == other.field and self.val == other.val
                and self.codes == other.codes and self.known == other.known)

    def __hash__(self):
        return hash((self.val, self.codes, self.known))

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"LaurentSeries({format_series(self)!r})"


def from_rational(num: Poly, den: Poly, target_known: int) -> LaurentSeries:
    """Expansion of num/den with target_known guaranteed coefficients.

    Polynomial quotients come back exact.  Otherwise the quotient is expanded
    by inverting the reversed denominator as a power series in T^{-1}.
    """
    F = num.field
    if den.is_zero():
        raise DivisionByZero("from_rational with zero denominator")
    if num.is_zero():
        return LaurentSeries.zero(F)
    qt, r = divmod(num, den)
    if r.is_zero():
        s = LaurentSeries.from_poly(qt)
        s.rational = (num, den)
        return s
    val = den.degree - num.degree
    rn = list(reversed(num.codes))
    rd = list(reversed(den.codes))
    inv = series_inverse(F, rd, target_known)
    codes = mul_codes(F, rn[:target_known], inv)[:target_known]
    return LaurentSeries(F, val, codes, target_known, rational=(num, den))


def polynomial_part(x: LaurentSeries) -> Poly:
    """The polynomial a_0 with |x - a_0| < 1."""
    F = x.field
    if x.is_exact_zero():
        return Poly.zero(F)
    if x.prec < 1:
        raise InsufficientPrecision("polynomial part needs coefficients down to T^0")
    if not x.codes or x.val > 0:
        return Poly.zero(F)
    top = -x.val
    codes = [x.coeff(-j) for j in range(top + 1)]
    return Poly(F, codes)


def fractional_part(x: LaurentSeries) -> LaurentSeries:
    """x minus its polynomial part, keeping the precision of x."""
    if x.is_exact_zero():
        return x
    if x.prec < 1:
        raise InsufficientPrecision("fractional part needs coefficients down to T^0")
    if not x.codes or x.val > 0:
        return x
    drop = 1 - x.val
    known = EXACT if x.known == EXACT else x.known - drop
    return LaurentSeries(x.field, 1, x.codes[drop:], known)


# --- text format "T^{-N}: c0 c1 c2 ... (known=K)" ---------------------------

def format_series(x: LaurentSeries) -> str:
    F = x.field
    if x.is_exact_zero():
        return "0 (known=exact)"
    if not x.codes:
        return f"T^{{-{x.prec}}}: (known=0)"
    body = " ".join(F.format_code(c) for c in x.codes)
    known = "exact" if x.known == EXACT else str(x.known)
    return f"T^{{{-x.val}}}: {body} (known={known})".replace("T^{--", "T^{")


_SERIES = re.compile(r"^T\^\{(?P<e>-?\d+)\}:\s*(?P<body>.*?)\s*\(known=(?P<k>exact|\d+)\)$")


def parse_series(F: FieldSpec, text: str) -> LaurentSeries:
    text = text.strip()
    if text == "0 (known=exact)":
        return LaurentSeries.zero(F)
    m = _SERIES.match(text)
    if not m:
        raise ValueError(f"cannot parse series {text!r}")
    val = -int(m.group("e"))
    body = m.group("body")
    tokens = re.findall(r"\([^)]*\)|\S+", body)
    codes = [F.parse_code(tok) for tok in tokens]
    known = EXACT if m.group("k") == "exact" else int(m.group("k"))
    if known == 0 and not codes:
        return LaurentSeries(F, val, (), 0)
    return LaurentSeries(F, val, codes, known)
