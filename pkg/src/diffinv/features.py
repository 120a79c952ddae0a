"""Numeric image features from catalog invariants and classical quantities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import default_kernel_size, jet_maps, local_jet, standardize
from .symbolic import Poly
from .transform import Jet, jet_symbols

_SYMBOL_INDEX = {s: i for i, s in enumerate(jet_symbols(4))}


@dataclass(frozen=True)
class CompiledInvariants:
    """Vectorised float evaluator for a list of invariant polynomials."""

    factors: np.ndarray      # (n_monomials, 4, 2): (symbol slot, exponent), padded
    coeffs: np.ndarray       # (n_monomials,)
    weights: np.ndarray      # (n_monomials, n_polys) coefficient matrix
    count: int

    def evaluate(self, jets: np.ndarray, chunk: int = 512) -> np.ndarray:
        """jets: (..., 14) array of jet values -> (..., n_polys)."""
        jets = np.asarray(jets, dtype=float)
        flat = jets.reshape(-1, 14)
        out = np.empty((flat.shape[0], self.count))
        exps = np.arange(5)
        for start in range(0, flat.shape[0], chunk):
            block = flat[start:start + chunk]
            powers = block[:, :, None] ** exps  # (n, 14, 5)
            monos = powers[:, self.factors[:, :, 0], self.factors[:, :, 1]].prod(axis=2)
            out[start:start + chunk] = monos @ self.weights
        return out.reshape(jets.shape[:-1] + (self.count,))


def compile_invariants(polys: list[Poly]) -> CompiledInvariants:
    factors = []
    weights_rows = []
    for idx, poly in enumerate(polys):
        for mono, coeff in sorted(poly.items()):
            if len(mono) > 4:
                raise ValueError("monomial degree above 4 is not supported")
            fac = []
            seen: dict = {}
            for s in mono:
                seen[s] = seen.get(s, 0) + 1
            for s, e in sorted(seen.items()):
                fac.append((_SYMBOL_INDEX[s], e))
            while len(fac) < 4:
                fac.append((0, 0))
            factors.append(fac)
            weights_rows.append((idx, float(coeff)))
    n_mono = len(factors)
    weights = np.zeros((n_mono, len(polys)))
    for row, (idx, coeff) in enumerate(weights_rows):
        weights[row, idx] = coeff
    return CompiledInvariants(
        factors=np.array(factors, dtype=np.intp),
        coeffs=np.array([c for _, c in weights_rows]),
        weights=weights,
        count=len(polys),
    )


def jet_to_array(jet: Jet) -> np.ndarray:
    return np.array([float(jet.values[s]) for s in jet_symbols(4)])


def feature_vector(patch: np.ndarray, polys: list[Poly], sigmas,
                   size: int | None = None) -> np.ndarray:
    """Standardise, take the centre jet per scale, evaluate the invariants."""
    std, _ = standardize(patch)
    h, w = std.shape
    center = (w // 2, h // 2)
    compiled = compile_invariants(polys)
    parts = []
    for sigma in sigmas:
        if size is not None:
            ksize = size
        else:
            cap = min(h, w)
            if cap % 2 == 0:
                cap -= 1
            ksize = min(default_kernel_size(sigma), cap)
        half = ksize // 2
        fits = (center[0] - half >= 0 and center[1] - half >= 0
                and center[0] + half < w and center[1] + half < h)
        mode = "strict" if fits else "reflect"
        jet = local_jet(std, center, sigma, ksize, mode=mode)
        parts.append(compiled.evaluate(jet_to_array(jet)))
    return np.concatenate(parts)


def feature_map(image: np.ndarray, polys: list[Poly], sigma: float,
                size: int | None = None) -> np.ndarray:
    """Per-pixel invariant values, reflect padding: (n_polys, H, W)."""
    maps = jet_maps(image, sigma, size)
    stacked = np.stack([maps[s] for s in jet_symbols(4)], axis=-1)
    values = compile_invariants(polys).evaluate(stacked)
    return np.moveaxis(values, -1, 0)


# ---------------------------------------------------------------------------
# classical derived features of the order-2 jet

def derived_features(jet: Jet) -> dict:
    """Standard local-structure quantities computed from one jet.

    The shape index is undefined (None) where both principal curvatures
    vanish.  All other entries are plain floats.
    """
    v = {s: float(val) for s, val in jet.values.items()}
    fx, fy = v[(1, 0)], v[(0, 1)]
    fxx, fxy, fyy = v[(2, 0)], v[(1, 1)], v[(0, 2)]

    grad_sq = fx * fx + fy * fy
    lap = fxx + fyy
    det = fxx * fyy - fxy * fxy
    disc = math.sqrt(max((fxx - fyy) ** 2 + 4 * fxy * fxy, 0.0))
    lam1 = 0.5 * (lap + disc)
    lam2 = 0.5 * (lap - disc)

    iso = fx * fx * fyy - 2 * fx * fy * fxy + fy * fy * fxx
    gauss_curv = det / (1 + grad_sq) ** 2
    mean_curv = (lap + iso) / (2 * (1 + grad_sq) ** 1.5)

    kappa_disc = math.sqrt(max(mean_curv**2 - gauss_curv, 0.0))
    kappa1 = mean_curv + kappa_disc
    kappa2 = mean_curv - kappa_disc
    if kappa1 == 0 and kappa2 == 0:
        shape_index = None
    else:
        shape_index = (2 / math.pi) * math.atan2(kappa2 - kappa1, kappa2 + kappa1)
    curvedness = math.sqrt((kappa1**2 + kappa2**2) / 2)

    jet2_norm = math.sqrt(grad_sq + 0.5 * (fxx**2 + 2 * fxy**2 + fyy**2))
    bif = (
        2 * math.sqrt(grad_sq),
        lap,
        -lap,
        (disc + lap) / math.sqrt(2),
        (disc - lap) / math.sqrt(2),
        disc,
    )
    return {
        "lambda1": lam1,
        "lambda2": lam2,
        "gaussian_curvature": gauss_curv,
        "mean_curvature": mean_curv,
        "shape_index": shape_index,
        "curvedness": curvedness,
        "jet2_norm": jet2_norm,
        "bif": bif,
        "dir1_max": grad_sq,
        "dir1_min": 0.0,
        "dir2_max": lam1,
        "dir2_min": lam2,
    }
