from fractions import Fraction

import pytest

from diffinv import catalog
from diffinv.moments import (
    central_moments,
    gmi_value,
    moment_isomorphism_check,
    random_cloud,
    transform_cloud,
)
from diffinv.symbolic import parse_chain
from diffinv.transform import LinearMap2, random_affines


class TestCentralMoments:
    def test_first_central_moments_vanish(self):
        points, weights = random_cloud(6, seed=1)
        eta = central_moments(points, weights)
        assert eta[(1, 0)] == 0 and eta[(0, 1)] == 0

    def test_translation_invariant(self):
        points, weights = random_cloud(5, seed=2)
        shifted = [(x + 7, y - 3) for x, y in points]
        assert central_moments(points, weights) == central_moments(shifted, weights)

    def test_zero_total_weight_rejected(self):
        with pytest.raises(ValueError, match="centroid"):
            central_moments([(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))],
                            [Fraction(1), Fraction(-1)])


class TestIsomorphism:
    def test_identity_map(self):
        ch = parse_chain("G(1,2)^2")
        points, weights = random_cloud(5, seed=3)
        assert moment_isomorphism_check(ch, points, weights, LinearMap2(1, 0, 0, 1)) == 0

    def test_affine_exact(self):
        ch = parse_chain("G(1,2)^2")
        points, weights = random_cloud(5, seed=4)
        m = LinearMap2(2, 0, 0, 1)  # det 2, weight should be 2^Q = 4
        assert moment_isomorphism_check(ch, points, weights, m) == 0

    def test_degenerate_collinear_cloud(self):
        ch = parse_chain("G(1,2)^2")
        points = [(Fraction(k), Fraction(2 * k)) for k in range(4)]
        weights = [Fraction(1)] * 4
        for m in random_affines(3, seed=5):
            assert moment_isomorphism_check(ch, points, weights, m) == 0

    def test_mixed_chain_rejected(self):
        ch = parse_chain("F(1,1).G(1,2)")
        points, weights = random_cloud(4, seed=6)
        with pytest.raises(ValueError, match="antisymmetric"):
            moment_isomorphism_check(ch, points, weights, LinearMap2(1, 0, 0, 1))

    def test_all_antisymmetric_catalog_entries(self):
        g_only = [e for e in catalog.build_catalog() if e.p_count == 0]
        assert len(g_only) == 8
        points, weights = random_cloud(6, seed=7)
        maps = random_affines(2, seed=8)
        for e in g_only:
            for m in maps:
                assert moment_isomorphism_check(e.chain, points, weights, m) == 0, e.id

    def test_weight_direction(self):
        # after/before ratio equals det^Q explicitly
        ch = parse_chain("G(1,2)^2")
        poly = catalog.entry(3).poly
        points, weights = random_cloud(5, seed=9)
        m = LinearMap2(1, 1, 0, 3)  # det 3
        before = gmi_value(poly, central_moments(points, weights))
        after = gmi_value(poly, central_moments(transform_cloud(points, m), weights))
        assert after == 9 * before
