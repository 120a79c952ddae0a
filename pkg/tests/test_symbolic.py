import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from diffinv.symbolic import (
    Operator,
    apply_chain,
    apply_operator,
    canonical_chain,
    chain,
    chain_invariant,
    collapse,
    enumerate_chains,
    format_chain,
    format_poly,
    make_operator,
    parse_chain,
    parse_poly,
    poly_add,
    poly_eval,
    poly_from_json,
    poly_scale,
    poly_to_json,
    unit_point_poly,
)

F11 = Operator("F", 1, 1)


def sym(*pairs):
    return tuple(sorted(pairs))


class TestOperators:
    def test_f_symmetric_canonical(self):
        op, sign = make_operator("F", 3, 1)
        assert op == Operator("F", 1, 3) and sign == 1

    def test_g_antisymmetric_sign(self):
        op, sign = make_operator("G", 2, 1)
        assert op == Operator("G", 1, 2) and sign == -1

    def test_g_diagonal_rejected(self):
        with pytest.raises(ValueError, match="identically zero"):
            make_operator("G", 2, 2)

    def test_apply_f_to_unit(self):
        # one point, both second derivatives
        out = apply_operator(F11, unit_point_poly(1))
        assert out == {((2, 0),): 1, ((0, 2),): 1}

    def test_apply_g_twice_three_terms(self):
        # the classic two-point expansion before collapse
        g12 = Operator("G", 1, 2)
        out = apply_operator(g12, apply_operator(g12, unit_point_poly(2)))
        assert out == {
            ((2, 0), (0, 2)): 1,
            ((1, 1), (1, 1)): -2,
            ((0, 2), (2, 0)): 1,
        }

    def test_apply_to_zero_poly(self):
        assert apply_operator(F11, {}) == {}


class TestChains:
    def test_chain_f12_over_two_points(self):
        ch = parse_chain("F(1,2)")
        assert collapse(apply_chain(ch)) == {sym((1, 0), (1, 0)): 1, sym((0, 1), (0, 1)): 1}

    def test_chain_f11_twice(self):
        ch = parse_chain("F(1,1)^2")
        assert chain_invariant(ch) == {((4, 0),): 1, ((2, 2),): 2, ((0, 4),): 1}

    def test_unused_point_rejected(self):
        with pytest.raises(ValueError, match="coverage"):
            chain([("F", 1, 1)], n=2)

    def test_collapse_merges_eq53_terms(self):
        ch = parse_chain("G(1,2)^2")
        assert chain_invariant(ch) == {sym((2, 0), (0, 2)): 2, ((1, 1), (1, 1)): -2}

    def test_collapse_single_monomial(self):
        assert collapse({((1, 0), (0, 2)): Fraction(7)}) == {sym((1, 0), (0, 2)): 7}

    def test_square_of_laplacian(self):
        ch = parse_chain("F(1,1).F(2,2)")
        squared = chain_invariant(ch)
        lap = chain_invariant(parse_chain("F(1,1)"))
        from diffinv.symbolic import poly_mul

        assert squared == poly_mul(lap, lap)


class TestCanonical:
    def test_g_flip(self):
        ch = chain([("G", 2, 1)])
        rep, sign = canonical_chain(ch)
        assert format_chain(rep) == "G(1,2)" and sign == -1

    def test_relabeling_compacts_gap_labels(self):
        rep, sign = canonical_chain(chain([("F", 3, 3), ("F", 1, 1)]))
        assert format_chain(rep) == "F(1,1).F(2,2)" and sign == 1 and rep.n == 2

    def test_explicit_point_count_rejects_gaps(self):
        with pytest.raises(ValueError, match="coverage"):
            chain([("F", 3, 3), ("F", 1, 1)], n=3)

    def test_relabeling_merges(self):
        a, _ = canonical_chain(chain([("F", 1, 1), ("F", 2, 2)]))
        b, _ = canonical_chain(chain([("F", 2, 2), ("F", 1, 1)]))
        assert a == b

    def test_fixed_point(self):
        ch = chain([("F", 1, 2)])
        rep, sign = canonical_chain(ch)
        assert rep.ops == ch.ops and sign == 1

    def test_idempotent(self):
        ch = chain([("G", 1, 3), ("F", 2, 3), ("G", 1, 2)])
        rep, _ = canonical_chain(ch)
        rep2, sign2 = canonical_chain(rep)
        assert rep2 == rep and sign2 == 1


class TestEnumeration:
    def test_order1_degree1_empty(self):
        assert enumerate_chains(1, 1) == []

    def test_order2_degree1(self):
        chains = enumerate_chains(2, 1)
        assert [format_chain(c) for c in chains] == ["F(1,1)"]

    def test_bounds_respected(self):
        for ch in enumerate_chains(3, 2):
            assert ch.order <= 3 and ch.degree <= 2
            assert min(ch.usage()) >= 1

    def test_deduplication(self):
        chains = enumerate_chains(2, 2)
        reps = {canonical_chain(c)[0].ops for c in chains}
        assert len(reps) == len(chains)


class TestEval:
    def test_laplacian_style_sum(self):
        poly = {((2, 0),): Fraction(1), ((0, 2),): Fraction(1)}
        vals = {(2, 0): Fraction(3), (0, 2): Fraction(4)}
        assert poly_eval(poly, vals) == 7

    def test_zero_jet(self):
        poly = chain_invariant(parse_chain("G(1,2)^2"))
        vals = {(2, 0): 0, (0, 2): 0, (1, 1): 0}
        assert poly_eval(poly, vals) == 0

    def test_corrected_two_point_form_vanishes(self):
        poly = chain_invariant(parse_chain("G(1,2)^2"))
        vals = {(2, 0): Fraction(1), (0, 2): Fraction(1), (1, 1): Fraction(1)}
        assert poly_eval(poly, vals) == 0  # 2*1*1 - 2*1^2

    def test_missing_symbol(self):
        poly = {((2, 0),): Fraction(1)}
        with pytest.raises(ValueError, match="missing"):
            poly_eval(poly, {(0, 2): 1})


class TestSerialization:
    def test_chain_roundtrip(self):
        text = "F(1,1).F(1,2)^2.G(2,3)"
        assert format_chain(parse_chain(text)) == text

    def test_poly_text_roundtrip(self):
        poly = chain_invariant(parse_chain("F(1,1).F(1,2)^2.G(2,3)"))
        assert parse_poly(format_poly(poly)) == poly

    def test_poly_json_roundtrip(self):
        poly = chain_invariant(parse_chain("F(1,2)^2.G(1,3)"))
        doc = poly_to_json(poly)
        assert poly_from_json(doc) == poly
        assert all(isinstance(t["c"], str) for t in doc["terms"])

    def test_zero_poly_text(self):
        assert format_poly({}) == "0"
        assert parse_poly("0") == {}


# ---------------------------------------------------------------------------
# properties

_ops_strategy = st.lists(
    st.tuples(
        st.sampled_from(["F", "G"]),
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=1, max_value=3),
    ).filter(lambda t: not (t[0] == "G" and t[1] == t[2])),
    min_size=1,
    max_size=5,
)


def _try_chain(raw):
    try:
        return chain(raw)
    except ValueError:
        return None


@settings(max_examples=60, deadline=None)
@given(_ops_strategy, st.randoms(use_true_random=False))
def test_commutativity_of_application_order(raw, rnd):
    ch = _try_chain(raw)
    if ch is None or ch.order > 4:
        return
    shuffled = list(ch.ops)
    rnd.shuffle(shuffled)
    poly = unit_point_poly(ch.n)
    for op in shuffled:
        poly = apply_operator(op, poly)
    reference = apply_chain(ch)
    if ch.sign != 1:
        poly = {m: ch.sign * c for m, c in poly.items()}
    assert collapse(poly) == collapse(reference)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([("F", 1, 1), ("F", 1, 2), ("G", 1, 2)]),
    st.fractions(min_value=-5, max_value=5),
    st.fractions(min_value=-5, max_value=5),
)
def test_linearity(op_spec, a, b):
    op, _ = make_operator(*op_spec)
    p = {((1, 0), (0, 0)): Fraction(2), ((0, 1), (1, 1)): Fraction(-1)}
    q = {((1, 1), (2, 0)): Fraction(3)}
    left = apply_operator(op, poly_add(poly_scale(p, a), poly_scale(q, b)))
    right = poly_add(
        poly_scale(apply_operator(op, p), a), poly_scale(apply_operator(op, q), b)
    )
    assert left == right


@settings(max_examples=60, deadline=None)
@given(_ops_strategy)
def test_homogeneity_of_collapsed_chain(raw):
    ch = _try_chain(raw)
    if ch is None or ch.order > 4:
        return
    poly = chain_invariant(ch)
    for mono in poly:
        assert len(mono) == ch.degree


@settings(max_examples=40, deadline=None)
@given(_ops_strategy)
def test_antisymmetry_of_g(raw):
    base = _try_chain(raw + [("G", 1, 2)])
    if base is None or base.order > 4:
        return
    flipped = chain(raw + [("G", 2, 1)], n=base.n)
    a = chain_invariant(base)
    b = chain_invariant(flipped)
    assert b == {m: -c for m, c in a.items()}


@settings(max_examples=40, deadline=None)
@given(_ops_strategy)
def test_canonical_idempotence(raw):
    ch = _try_chain(raw)
    if ch is None:
        return
    rep, _ = canonical_chain(ch)
    rep2, sign2 = canonical_chain(rep)
    assert rep2 == rep and sign2 == 1


# ---------------------------------------------------------------------------
# independent differentiation oracle

def test_chain_rule_oracle_matches_engine():
    """Apply the operators via sympy differentiation of an explicit random
    polynomial image and compare the evaluated result exactly."""
    sp = pytest.importorskip("sympy")
    rng = random.Random(5)
    x, y = sp.symbols("x y")
    image = sum(
        sp.Rational(rng.randint(-5, 5), rng.choice([1, 2])) * x**a * y**b
        for a in range(5)
        for b in range(5)
        if a + b <= 5
    )
    point = {x: sp.Rational(1, 3), y: sp.Rational(-1, 2)}
    jet = {
        (i, j): Fraction(str(sp.diff(image, x, i, y, j).subs(point)))
        for i in range(5)
        for j in range(5)
        if 1 <= i + j <= 4
    }

    for text in ["F(1,1)", "G(1,2)^2", "F(1,2).F(1,3)", "F(1,1).F(1,2)^2",
                 "F(1,2)^3.F(1,3)", "F(1,1).F(2,3).G(1,2).G(1,3).G(2,3)^2"]:
        ch = parse_chain(text)
        xs = sp.symbols(f"x1:{ch.n + 1}")
        ys = sp.symbols(f"y1:{ch.n + 1}")
        expr = sp.prod(
            [image.subs({x: xs[k], y: ys[k]}) for k in range(ch.n)]
        )
        for op in ch.ops:
            p, q = op.p - 1, op.q - 1
            if op.kind == "F":
                expr = sp.diff(expr, xs[p], xs[q]) + sp.diff(expr, ys[p], ys[q])
            else:
                expr = sp.diff(expr, xs[p], ys[q]) - sp.diff(expr, xs[q], ys[p])
        oracle = expr.subs({v: point[x] for v in xs} | {v: point[y] for v in ys})
        engine = poly_eval(chain_invariant(ch), jet)
        assert sp.Rational(engine.numerator, engine.denominator) == oracle, text
