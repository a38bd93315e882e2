"""Deterministic k-automata with outputs in F_q, and relation search for Christol checks."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .algebra import FieldSpec, Poly, gf
from .errors import AutomatonFormatError, InsufficientPrecision, RelationNotFound
from .laurent import EXACT, LaurentSeries


@dataclass(frozen=True)
class Automaton:
    k: int
    states: tuple
    delta: dict          # (state, digit) -> state
    q0: str
    tau: dict            # state -> field element code
    field: FieldSpec
    reachable: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        if self.k < 2:
            raise AutomatonFormatError("base must be >= 2")
        for s in self.states:
            for dgt in range(self.k):
                if (s, dgt) not in self.delta:
                    raise AutomatonFormatError(f"transition from {s!r} on digit {dgt} is missing")
                if self.delta[(s, dgt)] not in self.states:
                    raise AutomatonFormatError(f"transition to unknown state {self.delta[(s, dgt)]!r}")
            if s not in self.tau:
                raise AutomatonFormatError(f"state {s!r} has no output")
        if self.q0 not in self.states:
            raise AutomatonFormatError(f"unknown start state {self.q0!r}")
        seen = {self.q0}
        todo = [self.q0]
        while todo:
            s = todo.pop()
            for dgt in range(self.k):
                t = self.delta[(s, dgt)]
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        object.__setattr__(self, "reachable", frozenset(seen))

    def to_json(self) -> dict:
        return {
            "base": self.k,
            "field": {"p": self.field.p, "m": self.field.m, "modulus": list(self.field.modulus)},
            "start": self.q0,
            "delta": {s: [self.delta[(s, d)] for d in range(self.k)] for s in self.states},
            "out": {s: self.field.format_code(self.tau[s]) for s in self.states},
        }

    @classmethod
    def from_json(cls, data) -> "Automaton":
        if isinstance(data, str):
            data = json.loads(data)
        fd = data.get("field", {"p": 2})
        F = gf(int(fd["p"]), int(fd.get("m", 1)), tuple(fd.get("modulus", ())))
        k = int(data["base"])
        states = tuple(data["delta"])
        delta = {}
        for s, targets in data["delta"].items():
            if len(targets) != k:
                raise AutomatonFormatError(f"state {s!r} needs {k} transitions")
            for d, t in enumerate(targets):
                delta[(s, d)] = t
        tau = {s: F.parse_code(str(v)) for s, v in data["out"].items()}
        return cls(k, states, delta, data.get("start", states[0]), tau, F)


def digits_msb(n: int, k: int) -> list:
    """Base-k digits of n, most significant first; 0 gives [0]."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return [0]
    out = []
    while n:
        n, r = divmod(n, k)
        out.append(r)
    return out[::-1]


def run(A: Automaton, n: int) -> int:
    """Output code tau(delta(q0, W_n)) with W_n read most significant digit first."""
    s = A.q0
    for d in digits_msb(n, A.k):
        s = A.delta[(s, d)]
    return A.tau[s]


def series_from_automaton(A: Automaton, N: int) -> LaurentSeries:
    """sum_{n < N} a_n T^{-n} with a_n = run(A, n), known to N coefficients."""
    return LaurentSeries(A.field, 0, [run(A, n) for n in range(N)], N)


# --- text format ---------------------------------------------------------------------

def parse_automaton(text: str, F: FieldSpec | None = None) -> Automaton:
    """Parse the line format

        base k
        field p [m]            (optional, default taken from F or F_2)
        start q                (optional, default: first state mentioned)
        q d -> r
        out q = element

    Blank lines and '#' comments are ignored.
    """
    k = None
    field_spec = F
    start = None
    delta = {}
    tau = {}
    states = []
    decl_line = {}

    def note(s, lineno):
        if s not in decl_line:
            decl_line[s] = lineno
            states.append(s)

    tau_raw = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "base":
                if len(parts) != 2:
                    raise ValueError("expected 'base k'")
                k = int(parts[1])
                if k < 2:
                    raise ValueError("base must be >= 2")
            elif parts[0] == "field":
                if len(parts) not in (2, 3):
                    raise ValueError("expected 'field p [m]'")
                field_spec = gf(int(parts[1]), int(parts[2]) if len(parts) == 3 else 1)
            elif parts[0] == "start":
                if len(parts) != 2:
                    raise ValueError("expected 'start state'")
                start = parts[1]
                note(start, lineno)
            elif parts[0] == "out":
                lhs, eq, rhs = line[3:].partition("=")
                if not eq or not lhs.strip() or not rhs.strip():
                    raise ValueError("expected 'out state = element'")
                note(lhs.strip(), lineno)
                tau_raw.append((lhs.strip(), rhs.strip(), lineno))
            elif "->" in line:
                lhs, _, rhs = line.partition("->")
                lp = lhs.split()
                if len(lp) != 2 or len(rhs.split()) != 1:
                    raise ValueError("expected 'state digit -> state'")
                if k is None:
                    raise ValueError("'base k' must come before transitions")
                d = int(lp[1])
                if not 0 <= d < k:
                    raise ValueError(f"digit {d} outside 0..{k - 1}")
                if (lp[0], d) in delta:
                    raise ValueError(f"duplicate transition for ({lp[0]}, {d})")
                note(lp[0], lineno)
                note(rhs.strip(), lineno)
                delta[(lp[0], d)] = rhs.strip()
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as exc:
            raise AutomatonFormatError(str(exc), line=lineno) from None
    if k is None:
        raise AutomatonFormatError("missing 'base k' header", line=1)
    field_spec = field_spec or gf(2)
    for s, v, lineno in tau_raw:
        try:
            tau[s] = field_spec.parse_code(v)
        except ValueError as exc:
            raise AutomatonFormatError(f"bad output element: {exc}", line=lineno) from None
    for s in states:
        for d in range(k):
            if (s, d) not in delta:
                raise AutomatonFormatError(f"state {s!r} has no transition on digit {d}", line=decl_line[s])
        if s not in tau:
            raise AutomatonFormatError(f"state {s!r} has no output", line=decl_line[s])
    if not states:
        raise AutomatonFormatError("no states defined")
    return Automaton(k, tuple(states), delta, start or states[0], tau, field_spec)


def format_automaton(A: Automaton) -> str:
    lines = [f"base {A.k}"]
    if A.field.m == 1:
        lines.append(f"field {A.field.p}")
    else:
        lines.append(f"field {A.field.p} {A.field.m}")
    lines.append(f"start {A.q0}")
    for s in A.states:
        for d in range(A.k):
            lines.append(f"{s} {d} -> {A.delta[(s, d)]}")
    for s in A.states:
        lines.append(f"out {s} = {A.field.format_code(A.tau[s])}")
    return "\n".join(lines) + "\n"


# --- fixtures ------------------------------------------------------------------------------

def thue_morse(F: FieldSpec | None = None) -> Automaton:
    F = F or gf(2)
    delta = {("even", 0): "even", ("even", 1): "odd", ("odd", 0): "odd", ("odd", 1): "even"}
    return Automaton(2, ("even", "odd"), delta, "even", {"even": 0, "odd": 1}, F)


def powers_of(k: int, F: FieldSpec | None = None) -> Automaton:
    """Outputs 1 exactly at n = k^j (digit string 1 0 ... 0)."""
    F = F or gf(2)
    states = ("zero", "one", "dead")
    delta = {}
    for d in range(k):
        delta[("zero", d)] = "one" if d == 1 else "zero" if d == 0 else "dead"
        delta[("one", d)] = "one" if d == 0 else "dead"
        delta[("dead", d)] = "dead"
    # "zero" only while reading the leading zero of n = 0
    return Automaton(k, states, delta, "zero", {"zero": 0, "one": 1, "dead": 0}, F)


# --- relation search ------------------------------------------------------------------------

def _kernel_vector(F: FieldSpec, rows, ncols: int):
    """A nonzero solution of rows * x = 0 over F_q, or None."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = F.inv(mat[r][c])
        mat[r] = [F.mul(x, inv) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    x = [0] * ncols
    x[fc] = 1
    for i, c in enumerate(pivots):
        x[c] = F.neg(mat[i][fc])
    return x


@dataclass
class Relation:
    """B_{-1} + sum_i B_i xi^{p^i} = 0."""

    constant: Poly
    coefficients: list
    depth: int
    degree_bound: int
    verified_to: int

    def to_json(self) -> dict:
        return {"B_-1": str(self.constant), "B": [str(b) for b in self.coefficients],
                "D": self.depth, "H": self.degree_bound, "verified_coefficients": self.verified_to}


def _relation_rows(xi_pows, H: int, n_lo: int, n_hi: int, F):
    rows = []
    for n in range(n_lo, n_hi):
        row = [F.element(1).code if e == -n else 0 for e in range(H + 1)]   # B_{-1} T^e
        for s in xi_pows:
            for e in range(H + 1):
                row.append(s.coeff(n + e))
        rows.append(row)
    return rows


def christol_relation_search(xi: LaurentSeries, D: int, H: int, margin: int = 8) -> Relation:
    """Smallest (depth, degree) relation B_{-1} + sum_{i<=depth} B_i xi^{p^i} = 0.

    The search uses the first half of the available coefficients; any kernel
    vector is then re-verified by substitution on all of them.
    """
    F = xi.field
    if xi.known == EXACT:
        raise InsufficientPrecision("relation search needs a truncated series with a finite budget")
    for depth in range(D + 1):
        pows = [xi.frobenius_pow(i) for i in range(depth + 1)]
        for h in range(H + 1):
            unknowns = (depth + 2) * (h + 1)
            lo = -h
            full = int(min(s.prec for s in pows)) - h
            half = lo + (full - lo) // 2
            if half - lo < unknowns + margin:
                raise InsufficientPrecision(
                    f"need at least {2 * (unknowns + margin)} usable coefficients, have {full - lo}")
            rows = _relation_rows(pows, h, lo, half, F)
            x = _kernel_vector(F, rows, unknowns)
            if x is None:
                continue
            check = _relation_rows(pows, h, lo, full, F)
            for row in check:
                acc = 0
                for a, b in zip(row, x):
                    if a and b:
                        acc = F.add(acc, F.mul(a, b))
                if acc:
                    break
            else:
                c = Poly(F, x[: h + 1])
                Bs = [Poly(F, x[(i + 1) * (h + 1):(i + 2) * (h + 1)]) for i in range(depth + 1)]
                if c.is_zero() and all(b.is_zero() for b in Bs):
                    continue
                return Relation(c, Bs, depth, h, full - lo)
    raise RelationNotFound(f"no relation with depth <= {D} and coefficient degree <= {H}")


def substitute_relation(rel: Relation, xi: LaurentSeries) -> LaurentSeries:
    """Evaluate the relation at xi (zero to the available precision when it holds)."""
    acc = LaurentSeries.from_poly(rel.constant)
    for i, B in enumerate(rel.coefficients):
        acc = acc + xi.frobenius_pow(i) * B
    return acc
