"""Jets, linear coordinate maps, and invariance checking.

A jet holds the partial-derivative values of one image point up to a maximum
order.  Transforming a jet under an invertible linear map uses the chain rule
for a linear substitution, so order-m output derivatives are degree-m forms in
the entries of the inverse map and order-m input derivatives.  With rational
inputs everything is exact, which turns invariance checks into literal zero
tests.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

from .symbolic import OperatorChain, Poly, Symbol, poly_eval


def jet_symbols(max_order: int) -> list[Symbol]:
    """All derivative symbols with 1 <= i+j <= max_order, sorted by (order, j)."""
    out = []
    for m in range(1, max_order + 1):
        for j in range(m + 1):
            out.append((m - j, j))
    return out


@dataclass(frozen=True)
class Jet:
    """Derivative values at one point, complete up to max_order."""

    values: dict
    max_order: int = 4

    def __post_init__(self):
        missing = [s for s in jet_symbols(self.max_order) if s not in self.values]
        if missing:
            raise ValueError(f"incomplete jet, missing {missing[:3]}...")

    def __getitem__(self, sym: Symbol):
        return self.values[sym]


@dataclass(frozen=True)
class LinearMap2:
    """Invertible map (x, y) -> (a x + b y, c x + d y); translations dropped."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    kind: str = field(init=False)

    def __post_init__(self):
        a, b, c, d = (Fraction(v) for v in (self.a, self.b, self.c, self.d))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if a * d - b * c == 0:
            raise ValueError("singular map")
        if a == d and b == -c:
            kind = "euclidean" if a * a + b * b == 1 else "similarity"
        else:
            kind = "affine"
        object.__setattr__(self, "kind", kind)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def scale_sq(self) -> Fraction:
        """Squared isotropic scale for euclidean/similarity maps."""
        if self.kind == "affine":
            raise ValueError("scale is undefined for a general affine map")
        return self.a * self.a + self.b * self.b

    def inverse(self) -> "LinearMap2":
        det = self.det
        return LinearMap2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def compose(self, other: "LinearMap2") -> "LinearMap2":
        """self after other: (self*other)(x) = self(other(x))."""
        return LinearMap2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


def rotation(cos_t, sin_t) -> LinearMap2:
    """Rotation with the convention h_u = cos*f_x + sin*f_y for the output jet."""
    c, s = Fraction(cos_t), Fraction(sin_t)
    if c * c + s * s != 1:
        raise ValueError("not a unit rotation pair")
    return LinearMap2(c, s, -s, c)


def similarity(scale, cos_t, sin_t) -> LinearMap2:
    c, s, k = Fraction(cos_t), Fraction(sin_t), Fraction(scale)
    if c * c + s * s != 1 or k <= 0:
        raise ValueError("bad similarity parameters")
    return LinearMap2(k * c, k * s, -k * s, k * c)


def jet_transform(jet: Jet, m: LinearMap2) -> Jet:
    """Jet of h(u,v) = f(x,y) at the corresponding point under (u,v) = m(x,y)."""
    inv = m.inverse()
    a11, a12 = inv.a, inv.b
    a21, a22 = inv.c, inv.d
    # d/du = a11 d/dx + a21 d/dy ; d/dv = a12 d/dx + a22 d/dy
    out = {}
    for (i, j) in jet_symbols(jet.max_order):
        total = 0
        for k in range(i + 1):
            ck = comb(i, k) * a11**k * a21 ** (i - k)
            for l in range(j + 1):
                cl = comb(j, l) * a12**l * a22 ** (j - l)
                total += ck * cl * jet.values[(k + l, i + j - k - l)]
        out[(i, j)] = total
    return Jet(out, jet.max_order)


def chain_weight(chain: OperatorChain, m: LinearMap2):
    """Predicted ratio DI(transformed jet) / DI(original jet), or None.

    Euclidean maps give 1 for every chain; similarity maps give
    scale^(-2(P+Q)); affine maps carry a weight only for chains built purely
    from the antisymmetric operator (P = 0), where it is det^(-Q).  None means
    no invariance is claimed for this chain under this map.
    """
    p, q = chain.p_count, chain.q_count
    if m.kind == "euclidean":
        return Fraction(1)
    if m.kind == "similarity":
        return Fraction(1) / m.scale_sq ** (p + q)
    if p > 0:
        return None
    return Fraction(1) / m.det**q


def check_invariance(inv: Poly, chain: OperatorChain, m: LinearMap2, jet: Jet):
    """Residual eval(inv, transformed jet) - weight * eval(inv, jet)."""
    w = chain_weight(chain, m)
    if w is None:
        raise ValueError("not invariant under this group (mixed chain, affine map)")
    return poly_eval(inv, jet_transform(jet, m).values) - w * poly_eval(inv, jet.values)


# ---------------------------------------------------------------------------
# seeded exact test data

def _primitive_triples(count: int) -> list[tuple[int, int, int]]:
    """Primitive Pythagorean triples (a, b, h) ordered by hypotenuse."""
    out = []
    m = 2
    while len(out) < count:
        for n in range(1, m):
            if (m - n) % 2 == 1 and gcd(m, n) == 1:
                out.append((m * m - n * n, 2 * m * n, m * m + n * n))
        m += 1
    out.sort(key=lambda t: t[2])
    return out[:count]


def pythagorean_rotations(count: int, seed: int = 0) -> list[LinearMap2]:
    """Seeded exact rational rotations from primitive Pythagorean triples."""
    rng = random.Random(seed)
    maps = []
    for a, b, h in _primitive_triples(count):
        if rng.random() < 0.5:
            a, b = b, a
        cos = Fraction(a, h) * rng.choice((1, -1))
        sin = Fraction(b, h) * rng.choice((1, -1))
        maps.append(rotation(cos, sin))
    return maps


def random_similarities(count: int, seed: int = 0) -> list[LinearMap2]:
    rng = random.Random(seed)
    scales = [Fraction(1, 2), Fraction(2, 3), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3)]
    maps = []
    for rot in pythagorean_rotations(count, seed + 1):
        k = rng.choice(scales)
        maps.append(LinearMap2(k * rot.a, k * rot.b, k * rot.c, k * rot.d))
    return maps


def random_affines(count: int, seed: int = 0) -> list[LinearMap2]:
    rng = random.Random(seed)
    maps = []
    while len(maps) < count:
        vals = [Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3))) for _ in range(4)]
        if vals[0] * vals[3] - vals[1] * vals[2] == 0:
            continue
        maps.append(LinearMap2(*vals))
    return maps


def random_rational_jet(max_order: int = 4, seed: int = 0, rng: random.Random | None = None) -> Jet:
    """Seeded exact jet with numerators in [-24, 24], denominators in {1,2,4,8}."""
    if rng is None:
        rng = random.Random(seed)
    values = {
        s: Fraction(rng.randint(-24, 24), rng.choice((1, 2, 4, 8)))
        for s in jet_symbols(max_order)
    }
    return Jet(values, max_order)
