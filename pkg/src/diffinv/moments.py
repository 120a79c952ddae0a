"""Weighted point-cloud central moments and the moment/derivative isomorphism.

Substituting central moments for the matching derivative symbols in an
invariant built purely from the antisymmetric operator gives a moment
invariant: under (x, y) -> (a x + b y, c x + d y) point-cloud central moments
transform tensorially (point masses carry no area element, so no Jacobian
factor), and each antisymmetric operator contributes one determinant factor.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .symbolic import OperatorChain, Poly, chain_invariant, poly_eval
from .transform import LinearMap2

Cloud = list[tuple[Fraction, Fraction]]


def central_moments(points: Cloud, weights, max_order: int = 4) -> dict:
    """Discrete central moments eta_ij for 0 <= i+j <= max_order, exact."""
    weights = [Fraction(w) for w in weights]
    total = sum(weights)
    if total == 0:
        raise ValueError("total weight is zero; centroid undefined")
    xbar = sum(w * x for w, (x, y) in zip(weights, points)) / total
    ybar = sum(w * y for w, (x, y) in zip(weights, points)) / total
    out = {}
    for i in range(max_order + 1):
        for j in range(max_order + 1 - i):
            out[(i, j)] = sum(
                w * (x - xbar) ** i * (y - ybar) ** j
                for w, (x, y) in zip(weights, points)
            )
    return out


def transform_cloud(points: Cloud, m: LinearMap2) -> Cloud:
    return [(m.a * x + m.b * y, m.c * x + m.d * y) for x, y in points]


def gmi_value(poly: Poly, moments: dict) -> Fraction:
    """Evaluate an invariant with central moments substituted for symbols."""
    return poly_eval(poly, moments)


def moment_isomorphism_check(chain: OperatorChain, points: Cloud, weights,
                             m: LinearMap2) -> Fraction:
    """GMI(transformed cloud) - det^Q * GMI(cloud); exactly zero by theory."""
    if chain.p_count > 0:
        raise ValueError("moment isomorphism check needs a purely antisymmetric chain")
    poly = chain_invariant(chain)
    before = gmi_value(poly, central_moments(points, weights))
    after = gmi_value(poly, central_moments(transform_cloud(points, m), weights))
    return after - m.det**chain.q_count * before


def random_cloud(n_points: int, seed: int = 0) -> tuple[Cloud, list[Fraction]]:
    """Seeded rational cloud with positive total weight."""
    rng = random.Random(seed)
    points = [
        (Fraction(rng.randint(-12, 12), rng.choice((1, 2, 3))),
         Fraction(rng.randint(-12, 12), rng.choice((1, 2, 3))))
        for _ in range(n_points)
    ]
    weights = [Fraction(rng.randint(1, 9), rng.choice((1, 2))) for _ in range(n_points)]
    return points, weights
