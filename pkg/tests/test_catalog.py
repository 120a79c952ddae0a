from fractions import Fraction

import pytest

from diffinv import catalog
from diffinv.catalog import (
    build_catalog,
    classic_invariants,
    entry,
    load_printed_table,
    parse_expression,
    poly_substitute,
    regenerate_table10,
    select_set,
    verify_relations,
)
from diffinv.symbolic import parse_poly


class TestBuild:
    def test_full_catalog(self):
        cat = build_catalog()
        assert len(cat) == 230
        assert all(e.order <= 4 and e.degree <= 4 for e in cat)
        assert all(e.poly for e in cat)

    def test_entry_one_is_laplacian(self):
        assert entry(1).poly == parse_poly("f20 + f02")

    def test_entry_nine_matches_printed_row_six(self):
        # the printed table's row labels are permuted against entry numbers
        assert entry(9).poly == parse_poly("f01*f03 + f01*f21 + f10*f12 + f10*f30")

    def test_entry_six_from_hand_expansion(self):
        assert entry(6).poly == parse_poly("f10^2*f20 + 2*f01*f10*f11 + f01^2*f02")

    def test_entry_three_corrected_square(self):
        assert entry(3).poly == parse_poly("2*f02*f20 - 2*f11^2")

    def test_counts_by_kind(self):
        cat = build_catalog()
        antisymmetric_only = [e.id for e in cat if e.p_count == 0]
        assert antisymmetric_only == [3, 8, 18, 22, 37, 103, 147, 161]


class TestExpressions:
    def test_square_expansion(self):
        expr = parse_expression("I1^2")
        out = poly_substitute(expr, {1: entry(1).poly})
        assert out == parse_poly("f20^2 + 2*f02*f20 + f02^2")

    def test_known_relation_exact(self):
        expr = parse_expression("I1*I2 - I6")
        bindings = {i: entry(i).poly for i in (1, 2, 6)}
        assert poly_substitute(expr, bindings) == entry(8).poly

    def test_zero_expression(self):
        assert poly_substitute(parse_expression("0"), {}) == {}

    def test_unbound_variable(self):
        with pytest.raises(ValueError, match="unbound"):
            poly_substitute(parse_expression("I7"), {1: entry(1).poly})

    def test_rational_coefficients(self):
        expr = parse_expression("-(1/2)*I2*I3")
        bindings = {i: entry(i).poly for i in (2, 3)}
        assert poly_substitute(expr, bindings) == entry(17).poly


class TestRelations:
    @pytest.fixture(scope="class")
    def records(self):
        return {r.lhs_id: r for r in verify_relations()}

    def test_total(self, records):
        assert len(records) == 134

    @pytest.mark.parametrize("lhs", [5, 19, 38, 8, 17, 64, 114])
    def test_examples_hold(self, records, lhs):
        assert records[lhs].status == "holds"

    def test_at_least_108_hold(self, records):
        good = sum(1 for r in records.values() if r.status in ("holds", "holds_up_to_scalar"))
        assert good >= 108

    def test_failures_carry_residuals(self, records):
        for r in records.values():
            if r.status == "fails":
                assert r.residual


class TestTable10:
    def test_row_count(self):
        assert len(load_printed_table()) == 34

    def test_match_report(self):
        matches = regenerate_table10()
        matched = [m for m in matches if m.matched_id is not None]
        assert len(matched) >= 30
        by_label = {m.printed_label: m for m in matches}
        # the known permutation on the low rows
        assert by_label[2].matched_id == 4
        assert by_label[3].matched_id == 2
        # the dropped-square row cannot match; nearest support is entry 3
        assert by_label[4].matched_id is None
        assert by_label[4].nearest_id == 3
        # identity rows
        assert by_label[1].matched_id == 1 and by_label[1].scalar == 1

    def test_printed_row_six_matches_entry_nine(self):
        by_label = {m.printed_label: m for m in regenerate_table10()}
        assert by_label[6].matched_id == 9 and by_label[6].scalar == 1


class TestSets:
    def test_li_44_is_everything(self):
        desc = select_set(4, 4, "LI")
        assert desc.member_ids == tuple(range(1, 231))

    def test_ir_43_matches_published(self):
        desc = select_set(4, 3, "IR")
        assert desc.member_ids == catalog.PRINTED_IR_IDS[(4, 3)]

    def test_fi_33(self):
        assert select_set(3, 3, "FI").member_ids == (1, 2, 3, 6, 9, 10, 13, 29)

    def test_fi_equal_across_degree(self):
        assert select_set(3, 4, "FI").member_ids == select_set(3, 3, "FI").member_ids
        assert select_set(4, 4, "FI").member_ids == select_set(4, 3, "FI").member_ids

    def test_cardinalities(self):
        expected = {
            ("LI", 4, 4): 230, ("IR", 4, 4): 96, ("FI", 4, 4): 13,
            ("LI", 4, 3): 59, ("IR", 4, 3): 34, ("FI", 4, 3): 13,
            ("LI", 3, 4): 64, ("IR", 3, 4): 30, ("FI", 3, 4): 8,
            ("LI", 3, 3): 25, ("IR", 3, 3): 17, ("FI", 3, 3): 8,
        }
        for (kind, o, d), n in expected.items():
            assert len(select_set(o, d, kind).member_ids) == n, (kind, o, d)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            select_set(2, 3, "LI")

    def test_ir_44_contains_the_printed_omission(self):
        assert 79 in select_set(4, 4, "IR").member_ids

    def test_li_43_contains_the_printed_omission(self):
        assert 35 in select_set(4, 3, "LI").member_ids


class TestClassics:
    def test_matches(self):
        table = {name: (mid, scalar) for name, _, mid, scalar in classic_invariants()}
        assert table["gradient_sq"] == (2, Fraction(1))
        assert table["laplacian"] == (1, Fraction(1))
        assert table["hessian_det"] == (3, Fraction(1, 2))
        assert table["isophote_curv_num"] == (8, Fraction(1))
        assert table["flowline_curv_num"] == (11, Fraction(1))
