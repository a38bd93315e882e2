"""Exact arithmetic in F_q (q = p^m) and in the polynomial ring F_q[T].

Field elements are encoded as integer codes ``sum(coords[i] * p**i)`` in the
polynomial basis of ``F_p[x]/(modulus)``.  Polynomials store a tuple of codes,
lowest degree first, so the hot loops never touch Python objects per
coefficient.  The zero polynomial has degree ``NEG_INF``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, SpecMismatch

try:  # GMP multiplication is much faster than CPython's for huge operands
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

NEG_INF = float("-inf")

SCHOOLBOOK_LIMIT = 512   # extension fields: Karatsuba at or above this length
KRONECKER_LIMIT = 24     # prime fields: packed big-integer product above this
_GMP_LIMIT = 4000        # bytes


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# --- arithmetic in F_p[x], used only to set up extension fields ------------

def _fp_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a, b, p):
    a = _fp_trim(a)
    b = _fp_trim(b)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        s = len(a) - len(b)
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        a = _fp_trim(a)
    return a


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            r[i + j] = (r[i + j] + x * y) % p
    return _fp_trim(r)


def is_irreducible_mod_p(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _fp_trim(poly)
    m = len(poly) - 1
    if m < 1:
        return False
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _fp_mod(poly, list(low) + [1], p):
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, m: int) -> tuple:
    """First monic irreducible of degree m over F_p in lexicographic order."""
    if m == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=m):
        cand = list(reversed(low)) + [1]
        if cand[0] != 0 and is_irreducible_mod_p(cand, p):
            return tuple(cand)
    raise ValueError(f"no irreducible polynomial of degree {m} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """The finite field F_{p^m} = F_p[x]/(modulus)."""

    p: int
    m: int = 1
    modulus: tuple = ()
    _exp: list = field(default=None, compare=False, repr=False)
    _log: list = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.m < 1:
            raise ValueError("extension degree must be >= 1")
        mod = tuple(self.modulus) if self.modulus else default_modulus(self.p, self.m)
        mod = tuple(int(c) % self.p for c in mod)
        if len(_fp_trim(mod)) != self.m + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if self.m > 1 and not is_irreducible_mod_p(mod, self.p):
            raise ValueError(f"modulus {mod} is reducible over F_{self.p}")
        object.__setattr__(self, "modulus", mod)
        if self.m > 1:
            self._build_tables()

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def is_prime(self) -> bool:
        return self.m == 1

    # -- extension-field tables (exp/log over a primitive element) --

    def _build_tables(self):
        p, q = self.p, self.q
        for g in range(2, q):
            exp = [0] * (q - 1)
            log = [None] * q
            cur = [1]
            gpoly = self.coords(g)
            ok = True
            for i in range(q - 1):
                code = self._encode(cur)
                if log[code] is not None:
                    ok = False
                    break
                exp[i] = code
                log[code] = i
                cur = _fp_mod(_fp_mul(cur, list(gpoly), p), list(self.modulus), p)
            if ok:
                object.__setattr__(self, "_exp", exp)
                object.__setattr__(self, "_log", log)
                return
        raise AssertionError("no primitive element found")  # pragma: no cover

    def _encode(self, coords) -> int:
        code = 0
        for c in reversed(list(coords)):
            code = code * self.p + c
        return code

    def coords(self, code: int) -> tuple:
        out = []
        for _ in range(self.m):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    # -- operations on codes --

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        p = self.p
        out, mul = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += ((x + y) % p) * mul
            mul *= p
        return out

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        p = self.p
        out, mul = 0, 1
        while a:
            a, x = divmod(a, p)
            out += (-x % p) * mul
            mul *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero in F_q")
        if self.m == 1:
            return pow(a, -1, self.p)
        return self._exp[-self._log[a] % (self.q - 1)]

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(a), -e)
        if self.m == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 0 if e else 1
        return self._exp[self._log[a] * e % (self.q - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a -> a^(p^k)."""
        if self.m == 1 or a == 0:
            return a
        return self._exp[self._log[a] * pow(self.p, k, self.q - 1) % (self.q - 1)]

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise SpecMismatch("element from a different field")
            return value
        if isinstance(value, (tuple, list)):
            if len(value) != self.m:
                raise ValueError("coords length must equal m")
            return FieldElement(self, self._encode([c % self.p for c in value]))
        if self.m == 1:
            return FieldElement(self, int(value) % self.p)
        if not 0 <= value < self.q:
            raise ValueError("field element code out of range")
        return FieldElement(self, int(value))

    def elements(self):
        return [FieldElement(self, c) for c in range(self.q)]

    def format_code(self, code: int) -> str:
        if self.m == 1:
            return str(code)
        terms = []
        for i, c in reversed(list(enumerate(self.coords(code)))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "(" + ("+".join(terms) if terms else "0") + ")"

    def parse_code(self, text: str) -> int:
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        if self.m == 1:
            return int(text) % self.p
        coords = [0] * self.m
        for sign, term in _split_terms(text):
            term = term.strip()
            coef, _, mono = term.partition("x")
            coef = coef.rstrip("*") or "1"
            if not mono and "x" not in term:
                deg = 0
            elif mono.startswith("^"):
                deg = int(mono[1:])
            else:
                deg = 1
            if deg >= self.m:
                raise ValueError(f"field element term {term!r} exceeds basis degree")
            coords[deg] = (coords[deg] + sign * int(coef)) % self.p
        return self._encode(coords)

    def __str__(self):
        return f"F_{self.q}" if self.m == 1 else f"F_{self.q}[mod {self.modulus}]"


@lru_cache(maxsize=None)
def gf(p: int, m: int = 1, modulus: tuple = ()) -> FieldSpec:
    """Cached FieldSpec constructor; irreducibility is checked once per field."""
    return FieldSpec(p, m, tuple(modulus))


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    code: int

    @property
    def coords(self) -> tuple:
        return self.spec.coords(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise SpecMismatch(f"{self.spec} vs {other.spec}")
            return other.code
        if isinstance(other, int):
            return self.spec.element(other % self.spec.p).code
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElement(self.spec, self.spec.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElement(self.spec, self.spec.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElement(self.spec, self.spec.sub(o, self.code))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.code))

    def __mul__(self, other):
        o = self._other(other)
        return FieldElement(self.spec, self.spec.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElement(self.spec, self.spec.mul(self.code, self.spec.inv(o)))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.power(self.code, e))

    def inv(self):
        return FieldElement(self.spec, self.spec.inv(self.code))

    def frobenius(self, k: int = 1):
        return FieldElement(self.spec, self.spec.frob(self.code, k))

    def __bool__(self):
        return self.code != 0

    def __str__(self):
        return self.spec.format_code(self.code)

    __repr__ = __str__


# --- coefficient-list kernels ----------------------------------------------

def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def add_codes(F: FieldSpec, a, b) -> list:
    if len(a) < len(b):
        a, b = b, a
    if F.m == 1:
        p = F.p
        out = [(x + y) % p for x, y in zip(a, b)]
    else:
        out = [F.add(x, y) for x, y in zip(a, b)]
    out.extend(a[len(b):])
    return _trim(out)


def neg_codes(F: FieldSpec, a) -> list:
    if F.m == 1:
        return [-x % F.p for x in a]
    return [F.neg(x) for x in a]


def sub_codes(F: FieldSpec, a, b) -> list:
    return add_codes(F, a, neg_codes(F, b))


def scale_codes(F: FieldSpec, a, c: int) -> list:
    if c == 0:
        return []
    if F.m == 1:
        p = F.p
        return [x * c % p for x in a]
    return [F.mul(x, c) for x in a]


def _pack(codes, width: int) -> int:
    arr = np.asarray(codes, dtype="<u8")
    raw = arr.view(np.uint8).reshape(-1, 8)[:, :width].tobytes()
    return int.from_bytes(raw, "little")


def _unpack(value, width: int, n: int, p: int) -> list:
    raw = value.to_bytes(n * width, "little")
    buf = np.frombuffer(raw, dtype=np.uint8).reshape(n, width)
    if width < 8:
        wide = np.zeros((n, 8), dtype=np.uint8)
        wide[:, :width] = buf
        buf = wide
    return (buf.view("<u8").ravel() % p).tolist()


def _kronecker(a, b, p: int) -> list:
    bound = min(len(a), len(b)) * (p - 1) ** 2
    width = (bound.bit_length() + 7) // 8
    x = _pack(a, width)
    y = _pack(b, width)
    if gmpy2 is not None and width * min(len(a), len(b)) > _GMP_LIMIT:
        prod = gmpy2.mpz(x) * gmpy2.mpz(y)
    else:
        prod = x * y
    return _unpack(prod, width, len(a) + len(b) - 1, p)


def _schoolbook(F: FieldSpec, a, b) -> list:
    out = [0] * (len(a) + len(b) - 1)
    if F.m == 1:
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        p = F.p
        return [v % p for v in out]
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def _karatsuba(F: FieldSpec, a, b) -> list:
    if min(len(a), len(b)) < SCHOOLBOOK_LIMIT:
        return _schoolbook(F, a, b)
    h = max(len(a), len(b)) // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    z0 = mul_codes(F, a0, b0)
    z2 = mul_codes(F, a1, b1)
    z1 = mul_codes(F, add_codes(F, a0, a1), add_codes(F, b0, b1))
    z1 = sub_codes(F, sub_codes(F, z1, z0), z2)
    out = [0] * (len(a) + len(b) - 1)
    for shift, part in ((0, z0), (h, z1), (2 * h, z2)):
        for i, c in enumerate(part):
            out[shift + i] = F.add(out[shift + i], c)
    return out


def mul_codes(F: FieldSpec, a, b) -> list:
    if not a or not b:
        return []
    if F.m == 1:
        if min(len(a), len(b)) <= KRONECKER_LIMIT:
            return _trim(_schoolbook(F, a, b))
        return _trim(_kronecker(a, b, F.p))
    return _trim(_karatsuba(F, list(a), list(b)))


def divmod_codes(F: FieldSpec, a, b):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = list(a)
    if len(a) < len(b):
        return [], _trim(a)
    inv = F.inv(b[-1])
    quot = [0] * (len(a) - len(b) + 1)
    p = F.p
    prime = F.m == 1
    nb = len(b)
    for s in range(len(a) - nb, -1, -1):
        c = a[s + nb - 1]
        if not c:
            continue
        c = F.mul(c, inv)
        quot[s] = c
        if prime:
            for i in range(nb):
                a[s + i] = (a[s + i] - c * b[i]) % p
        else:
            for i in range(nb):
                a[s + i] = F.sub(a[s + i], F.mul(c, b[i]))
    return _trim(quot), _trim(a[: nb - 1])


# --- polynomials ------------------------------------------------------------

class Poly:
    """Immutable polynomial over F_q in the variable T."""

    __slots__ = ("field", "_c")

    def __init__(self, field: FieldSpec, codes=()):
        self.field = field
        self._c = tuple(_trim(list(codes)))

    # constructors
    @classmethod
    def zero(cls, F):
        return cls(F, ())

    @classmethod
    def one(cls, F):
        return cls(F, (1,))

    @classmethod
    def T(cls, F):
        return cls(F, (0, 1))

    @classmethod
    def monomial(cls, F, d: int, c: int = 1):
        return cls(F, [0] * d + [c])

    @classmethod
    def const(cls, F, c):
        if isinstance(c, FieldElement):
            c = c.code
        return cls(F, (F.element(c).code,))

    @classmethod
    def from_ints(cls, F, ints):
        """Lowest degree first; for prime fields the ints are reduced mod p."""
        return cls(F, [F.element(i).code for i in ints])

    @classmethod
    def parse(cls, F, text: str) -> "Poly":
        return parse_poly(F, text)

    # accessors
    @property
    def codes(self) -> tuple:
        return self._c

    @property
    def coeffs(self) -> tuple:
        return tuple(FieldElement(self.field, c) for c in self._c)

    @property
    def degree(self):
        return len(self._c) - 1 if self._c else NEG_INF

    @property
    def lc(self) -> int:
        return self._c[-1] if self._c else 0

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def coeff(self, i: int) -> int:
        return self._c[i] if 0 <= i < len(self._c) else 0

    # arithmetic
    def _check(self, other):
        if isinstance(other, int):
            return Poly.const(self.field, other)
        if isinstance(other, FieldElement):
            return Poly.const(self.field, other)
        if not isinstance(other, Poly):
            return None
        if other.field != self.field:
            raise SpecMismatch(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return Poly(self.field, add_codes(self.field, self._c, o._c))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, neg_codes(self.field, self._c))

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return Poly(self.field, sub_codes(self.field, self._c, o._c))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return Poly(self.field, mul_codes(self.field, self._c, o._c))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = Poly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        o = self._check(other)
        qt, r = divmod_codes(self.field, self._c, o._c)
        return Poly(self.field, qt), Poly(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def scale(self, c) -> "Poly":
        if isinstance(c, FieldElement):
            c = c.code
        return Poly(self.field, scale_codes(self.field, self._c, c))

    def shift(self, k: int) -> "Poly":
        """Multiply by T^k (k >= 0)."""
        if not self._c:
            return self
        return Poly(self.field, (0,) * k + self._c)

    def monic(self) -> "Poly":
        if not self._c:
            return self
        return self.scale(self.field.inv(self.lc))

    def __call__(self, x):
        F = self.field
        x = F.element(x)
        acc = 0
        for c in reversed(self._c):
            acc = F.add(F.mul(acc, x.code), c)
        return FieldElement(F, acc)

    def frobenius_pow(self, k: int) -> "Poly":
        """f -> f^(p^k): Frobenius on coefficients, exponents multiplied by p^k."""
        if not self._c or k == 0:
            return self
        F = self.field
        step = F.p ** k
        out = [0] * ((len(self._c) - 1) * step + 1)
        for i, c in enumerate(self._c):
            out[i * step] = F.frob(c, k)
        return Poly(F, out)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self._c == other._c
        if isinstance(other, int):
            return self == Poly.const(self.field, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.m, self._c))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r} over {self.field})"


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    while g:
        f, g = g, f % g
    return f.monic()


def poly_xgcd(f: Poly, g: Poly):
    """Return (d, s, t) with s*f + t*g = d monic."""
    F = f.field
    r0, r1 = f, g
    s0, s1 = Poly.one(F), Poly.zero(F)
    t0, t1 = Poly.zero(F), Poly.one(F)
    while r1:
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if not r0:
        return r0, s0, t0
    u = F.inv(r0.lc)
    return r0.scale(u), s0.scale(u), t0.scale(u)


# --- text format "c_d*T^d + ... + c_0" ---------------------------------------

def format_poly(f: Poly, var: str = "T") -> str:
    if not f.codes:
        return "0"
    F = f.field
    parts = []
    for d in range(len(f.codes) - 1, -1, -1):
        c = f.codes[d]
        if not c:
            continue
        mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
        coef = F.format_code(c)
        if not mono:
            parts.append(coef)
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{coef}*{mono}")
    return " + ".join(parts)


def _split_terms(text: str):
    """Split on top-level + and - signs, yielding (sign, term)."""
    terms, depth, cur, sign = [], 0, "", 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and not cur.rstrip().endswith(("^", "*")):
            if cur.strip():
                terms.append((sign, cur))
            elif ch == "-":
                sign = -sign
                continue
            sign = 1 if ch == "+" else -1
            cur = ""
            continue
        cur += ch
    if cur.strip():
        terms.append((sign, cur))
    return terms


_TERM = re.compile(r"^(?P<coef>\(.*\)|\d+)?\s*\*?\s*(?P<var>T(\s*\^\s*(?P<exp>\d+))?)?$")


def parse_poly(F: FieldSpec, text: str) -> Poly:
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    out: dict = {}
    for sign, term in _split_terms(text):
        term = term.strip()
        m = _TERM.match(term)
        if not m or (m.group("coef") is None and m.group("var") is None):
            raise ValueError(f"cannot parse polynomial term {term!r}")
        coef = F.parse_code(m.group("coef")) if m.group("coef") else 1
        if sign < 0:
            coef = F.neg(coef)
        if m.group("var"):
            d = int(m.group("exp")) if m.group("exp") else 1
        else:
            d = 0
        out[d] = F.add(out.get(d, 0), coef)
    top = max(out) if out else 0
    return Poly(F, [out.get(i, 0) for i in range(top + 1)])
