"""Exact symbolic construction of image differential invariants.

Invariants are built by composing two second-order differential operators over
a product of function copies attached to auxiliary points, then identifying all
points.  The F operator is the symmetric (dot-product-like) one, G the
antisymmetric (cross-product-like) one; both are linear and commute, so a
composition is a multiset of operators, not a sequence.

Everything in this module is exact: coefficients are `fractions.Fraction`,
monomials are tuples of derivative orders, and all operations are pure
functions over immutable values.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import prod

# A derivative symbol (i, j) stands for the order-(i+j) partial derivative
# taken i times in x and j times in y.
Symbol = tuple[int, int]
# Collapsed monomial: sorted multiset of symbols, one factor per point.
Mono = tuple[Symbol, ...]
Poly = dict[Mono, Fraction]
# Pre-collapse monomial over n points: slot k holds the orders at point k+1.
PointMono = tuple[Symbol, ...]
PointPoly = dict[PointMono, Fraction]


@dataclass(frozen=True, order=True)
class Operator:
    """One canonical operator application: kind 'F' (p <= q) or 'G' (p < q)."""

    kind: str
    p: int
    q: int


def make_operator(kind: str, p: int, q: int) -> tuple[Operator, int]:
    """Build a canonical operator, returning (operator, sign).

    F is symmetric in its indices; G is antisymmetric, so swapping indices
    flips the sign and G(p, p) is identically zero and rejected.
    """
    if kind not in ("F", "G"):
        raise ValueError(f"unknown operator kind {kind!r}")
    if p < 1 or q < 1:
        raise ValueError("point indices are 1-based positive integers")
    if kind == "F":
        return Operator("F", min(p, q), max(p, q)), 1
    if p == q:
        raise ValueError("identically zero operator: G(p, p)")
    if p < q:
        return Operator("G", p, q), 1
    return Operator("G", q, p), -1


@dataclass(frozen=True)
class OperatorChain:
    """A multiset of canonical operators over points 1..n, with a net sign."""

    ops: tuple[Operator, ...]
    n: int
    sign: int = 1

    def usage(self) -> tuple[int, ...]:
        """Times each point is differentiated (index k -> point k+1)."""
        u = [0] * self.n
        for op in self.ops:
            u[op.p - 1] += 1
            u[op.q - 1] += 1
        return tuple(u)

    @property
    def degree(self) -> int:
        return self.n

    @property
    def order(self) -> int:
        return max(self.usage())

    @property
    def p_count(self) -> int:
        return sum(1 for op in self.ops if op.kind == "F")

    @property
    def q_count(self) -> int:
        return sum(1 for op in self.ops if op.kind == "G")


def chain(raw_ops, n: int | None = None) -> OperatorChain:
    """Assemble a chain from (kind, p, q) triples or Operators.

    G indices are normalised with the sign tracked on the chain.  The point
    count defaults to the highest index used; every point 1..n must be used
    at least once.
    """
    ops: list[Operator] = []
    sign = 1
    for item in raw_ops:
        if isinstance(item, Operator):
            op, s = make_operator(item.kind, item.p, item.q)
        else:
            op, s = make_operator(*item)
        ops.append(op)
        sign *= s
    if not ops:
        raise ValueError("empty chain")
    if n is None:
        # compact non-contiguous labels (monotone, so G orientations survive)
        used = sorted({i for op in ops for i in (op.p, op.q)})
        relabel = {old: new for new, old in enumerate(used, start=1)}
        ops = [Operator(op.kind, relabel[op.p], relabel[op.q]) for op in ops]
        n = len(used)
    elif max(max(op.p, op.q) for op in ops) > n:
        raise ValueError(f"operator index exceeds point count {n}")
    ch = OperatorChain(tuple(sorted(ops)), n, sign)
    if min(ch.usage()) == 0:
        raise ValueError("degree/coverage violation: unused point in chain")
    return ch


def unit_point_poly(n: int) -> PointPoly:
    """The undifferentiated product of n function copies."""
    return {tuple((0, 0) for _ in range(n)): Fraction(1)}


def apply_operator(op: Operator, poly: PointPoly) -> PointPoly:
    """Apply one operator linearly to a pre-collapse polynomial."""
    out: PointPoly = {}
    p, q = op.p - 1, op.q - 1
    for mono, coeff in poly.items():
        if op.kind == "F":
            # d/dx_p d/dx_q + d/dy_p d/dy_q
            bumps = (((p, 0), (q, 0)), ((p, 1), (q, 1)))
            signs = (1, 1)
        else:
            # d/dx_p d/dy_q - d/dx_q d/dy_p
            bumps = (((p, 0), (q, 1)), ((q, 0), (p, 1)))
            signs = (1, -1)
        for (b1, b2), s in zip(bumps, signs):
            m = list(mono)
            for point, axis in (b1, b2):
                a, b = m[point]
                m[point] = (a + 1, b) if axis == 0 else (a, b + 1)
            key = tuple(m)
            c = out.get(key, Fraction(0)) + s * coeff
            if c:
                out[key] = c
            else:
                out.pop(key, None)
    return out


def apply_chain(ch: OperatorChain) -> PointPoly:
    """Apply all operators of a chain to the unit product (order immaterial)."""
    if min(ch.usage()) == 0:
        raise ValueError("degree/coverage violation: unused point in chain")
    poly = unit_point_poly(ch.n)
    for op in ch.ops:
        poly = apply_operator(op, poly)
    if ch.sign != 1:
        poly = {m: ch.sign * c for m, c in poly.items()}
    return poly


def collapse(poly: PointPoly, n: int | None = None) -> Poly:
    """Identify all points: each point's orders become one derivative symbol."""
    out: Poly = {}
    for mono, coeff in poly.items():
        if n is not None and len(mono) != n:
            raise ValueError("monomial does not match declared point count")
        key = tuple(sorted(mono))
        c = out.get(key, Fraction(0)) + coeff
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return out


def chain_invariant(ch: OperatorChain) -> Poly:
    return collapse(apply_chain(ch), ch.n)


def canonical_chain(ch: OperatorChain) -> tuple[OperatorChain, int]:
    """Canonical representative under point relabeling, plus the net sign.

    The representative is the lexicographically smallest sorted operator tuple
    over all permutations of the point labels; the sign comes from the first
    minimizing permutation (the identity wins ties, making this idempotent).
    Chains odd under relabeling collapse to zero, so their sign is moot.
    """
    best: tuple[Operator, ...] | None = None
    best_sign = 1
    for perm in permutations(range(1, ch.n + 1)):
        relabel = {i + 1: perm[i] for i in range(ch.n)}
        ops: list[Operator] = []
        sign = ch.sign
        for op in ch.ops:
            new, s = make_operator(op.kind, relabel[op.p], relabel[op.q])
            ops.append(new)
            sign *= s
        key = tuple(sorted(ops))
        if best is None or key < best:
            best = key
            best_sign = sign
    assert best is not None
    return OperatorChain(best, ch.n, 1), best_sign


def enumerate_chains(max_order: int, max_degree: int) -> list[OperatorChain]:
    """All canonical chains with degree <= max_degree and order <= max_order.

    Every point must be used at least once; chains equal up to point
    relabeling are returned once, in a deterministic order.
    """
    if not (1 <= max_order <= 4 and 1 <= max_degree <= 4):
        raise ValueError("order and degree bounds must be in 1..4")
    found: dict[tuple[int, tuple[Operator, ...]], OperatorChain] = {}
    for n in range(1, max_degree + 1):
        pool: list[Operator] = []
        for p in range(1, n + 1):
            for q in range(p, n + 1):
                pool.append(Operator("F", p, q))
        for p in range(1, n + 1):
            for q in range(p + 1, n + 1):
                pool.append(Operator("G", p, q))
        pool.sort()
        # Points reachable by ops at index >= i (for coverage pruning).
        reach_after = [set() for _ in range(len(pool) + 1)]
        for i in range(len(pool) - 1, -1, -1):
            reach_after[i] = reach_after[i + 1] | {pool[i].p, pool[i].q}

        def extend(start: int, usage: list[int], ops: list[Operator]) -> None:
            if ops and min(usage) >= 1:
                ch = OperatorChain(tuple(ops), n, 1)
                rep, _ = canonical_chain(ch)
                found.setdefault((n, rep.ops), rep)
            for i in range(start, len(pool)):
                op = pool[i]
                # any still-unused point must remain reachable
                unused = {k + 1 for k in range(n) if usage[k] == 0}
                if unused - reach_after[i]:
                    break
                du_p = 2 if op.p == op.q else 1
                if usage[op.p - 1] + du_p > max_order:
                    continue
                if op.p != op.q and usage[op.q - 1] + 1 > max_order:
                    continue
                usage[op.p - 1] += du_p
                if op.p != op.q:
                    usage[op.q - 1] += 1
                ops.append(op)
                extend(i, usage, ops)
                ops.pop()
                usage[op.p - 1] -= du_p
                if op.p != op.q:
                    usage[op.q - 1] -= 1

        extend(0, [0] * n, [])
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------------------
# polynomial arithmetic on collapsed invariants

def poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, Fraction(0)) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_neg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def poly_sub(a: Poly, b: Poly) -> Poly:
    return poly_add(a, poly_neg(b))


def poly_scale(a: Poly, s: Fraction) -> Poly:
    s = Fraction(s)
    if not s:
        return {}
    return {m: c * s for m, c in a.items()}


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            key = tuple(sorted(ma + mb))
            c = out.get(key, Fraction(0)) + ca * cb
            if c:
                out[key] = c
            else:
                out.pop(key, None)
    return out


def poly_pow(a: Poly, k: int) -> Poly:
    if k < 0:
        raise ValueError("negative power")
    out: Poly = {(): Fraction(1)}
    for _ in range(k):
        out = poly_mul(out, a)
    return out


def poly_eval(poly: Poly, values):
    """Evaluate at a symbol->value map; exact for rational values.

    Raises if a symbol of the polynomial is missing from the map.
    """
    total = None
    for mono, coeff in poly.items():
        try:
            term = coeff * prod(values[s] for s in mono)
        except KeyError as exc:
            raise ValueError(f"jet is missing derivative symbol {exc.args[0]}") from None
        total = term if total is None else total + term
    if total is None:
        return Fraction(0)
    return total


def poly_diff(poly: Poly, sym: Symbol) -> Poly:
    """Formal partial derivative with respect to one derivative symbol."""
    out: Poly = {}
    for mono, coeff in poly.items():
        mult = mono.count(sym)
        if not mult:
            continue
        reduced = list(mono)
        reduced.remove(sym)
        key = tuple(reduced)
        c = out.get(key, Fraction(0)) + mult * coeff
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return out


def poly_support(poly: Poly) -> set[Symbol]:
    syms: set[Symbol] = set()
    for mono in poly:
        syms.update(mono)
    return syms


def poly_scalar_ratio(a: Poly, b: Poly) -> Fraction | None:
    """The nonzero rational s with a == s*b, or None if no such scalar exists."""
    if not a or not b:
        return None
    if set(a) != set(b):
        return None
    mono = next(iter(a))
    s = a[mono] / b[mono]
    if not s:
        return None
    for m, c in a.items():
        if b[m] * s != c:
            return None
    return s


# ---------------------------------------------------------------------------
# serialization

_TERM_RE = re.compile(r"([FG])\((\d+),(\d+)\)(?:\^(\d+))?$")


def format_chain(ch: OperatorChain) -> str:
    """Chain text: dot-joined terms with repeat powers, e.g. F(1,1).G(1,2)^2."""
    parts = []
    i = 0
    ops = ch.ops
    while i < len(ops):
        j = i
        while j < len(ops) and ops[j] == ops[i]:
            j += 1
        op, count = ops[i], j - i
        term = f"{op.kind}({op.p},{op.q})"
        if count > 1:
            term += f"^{count}"
        parts.append(term)
        i = j
    return ".".join(parts)


def parse_chain(text: str, n: int | None = None) -> OperatorChain:
    raw = []
    for term in text.strip().split("."):
        m = _TERM_RE.match(term.strip())
        if not m:
            raise ValueError(f"bad chain term {term!r}")
        kind, p, q, power = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
        raw.extend([(kind, p, q)] * (int(power) if power else 1))
    return chain(raw, n)


def _symbol_name(sym: Symbol) -> str:
    i, j = sym
    if not (0 <= i <= 9 and 0 <= j <= 9):
        raise ValueError(f"symbol {sym} out of single-digit range")
    return f"f{i}{j}"


def _mono_text(mono: Mono) -> str:
    parts = []
    i = 0
    while i < len(mono):
        j = i
        while j < len(mono) and mono[j] == mono[i]:
            j += 1
        name, count = _symbol_name(mono[i]), j - i
        parts.append(name if count == 1 else f"{name}^{count}")
        i = j
    return "*".join(parts)


def format_poly(poly: Poly) -> str:
    """Sorted term list, e.g. "2*f02*f20 - 2*f11^2"; empty polynomial is "0"."""
    if not poly:
        return "0"
    pieces = []
    for mono in sorted(poly):
        coeff = poly[mono]
        body = _mono_text(mono)
        mag = abs(coeff)
        txt = body if (mag == 1 and body) else (f"{mag}*{body}" if body else str(mag))
        pieces.append(("- " if coeff < 0 else "+ ") + txt)
    head = pieces[0]
    head = ("-" + head[2:]) if head.startswith("- ") else head[2:]
    return " ".join([head] + pieces[1:])


_FACTOR_RE = re.compile(r"f(\d)(\d)(?:\^(\d+))?$")


def parse_poly(text: str) -> Poly:
    """Parse the term-list format; accepts '+'/'-' separators and */^ factors."""
    text = text.strip()
    if text in ("0", ""):
        return {}
    tokens = re.findall(r"[+-]|[^+\-\s]+", text)
    out: Poly = {}
    sign = 1
    pending: str | None = None
    for tok in tokens:
        if tok == "+":
            sign = 1 if pending is None else sign
            continue
        if tok == "-":
            sign = -1 if pending is None else -sign
            continue
        coeff = Fraction(sign)
        sign = 1
        pending = None
        symbols: list[Symbol] = []
        for factor in tok.split("*"):
            m = _FACTOR_RE.match(factor)
            if m:
                sym = (int(m.group(1)), int(m.group(2)))
                symbols.extend([sym] * (int(m.group(3)) if m.group(3) else 1))
            else:
                coeff *= Fraction(factor)
        key = tuple(sorted(symbols))
        c = out.get(key, Fraction(0)) + coeff
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return out


def poly_to_json(poly: Poly) -> dict:
    terms = []
    for mono in sorted(poly):
        m: dict[str, int] = {}
        for sym in mono:
            key = f"{sym[0]}{sym[1]}"
            m[key] = m.get(key, 0) + 1
        terms.append({"c": str(poly[mono]), "m": m})
    return {"terms": terms}


def poly_from_json(doc: dict) -> Poly:
    out: Poly = {}
    for term in doc["terms"]:
        symbols: list[Symbol] = []
        for key, exp in term["m"].items():
            sym = (int(key[0]), int(key[1]))
            symbols.extend([sym] * exp)
        mono = tuple(sorted(symbols))
        c = out.get(mono, Fraction(0)) + Fraction(term["c"])
        if c:
            out[mono] = c
        else:
            out.pop(mono, None)
    return out


def poly_json_text(poly: Poly) -> str:
    return json.dumps(poly_to_json(poly), separators=(",", ":"))
