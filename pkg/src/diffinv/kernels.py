"""Gaussian-derivative kernels, local jets, and Gaussian-Hermite moments.

Kernels are separable products of sampled 1-D Gaussian-derivative factors,
scaled by sigma^order so jet entries are dimensionless in the scale.  Every
derivative factor is mean-corrected to sum exactly to zero (constant inputs
must give exactly zero responses); the smoothing factor is normalised to sum
one.  Jet values follow the convolution sign convention, fixed so the first
x-derivative is positive on a rightward-increasing ramp.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import convolve1d

from .transform import Jet, jet_symbols


def default_kernel_size(sigma: float) -> int:
    """Smallest odd integer >= 8*sigma + 1 (footprint of about +-4 sigma)."""
    size = int(math.ceil(8 * sigma + 1))
    return size + 1 if size % 2 == 0 else size


def hermite_values(m: int, t: np.ndarray) -> np.ndarray:
    """Physicists' Hermite polynomial H_m sampled at t."""
    h_prev = np.ones_like(t)
    if m == 0:
        return h_prev
    h = 2 * t
    for k in range(1, m):
        h, h_prev = 2 * t * h - 2 * k * h_prev, h
    return h


def gauss_deriv_1d(m: int, sigma: float, size: int | None = None,
                   scaled: bool = True, dc_correct: bool = True) -> np.ndarray:
    """Samples of sigma^m * d^m/dx^m of the 1-D Gaussian at integer offsets."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if size is None:
        size = default_kernel_size(sigma)
    if size % 2 == 0:
        raise ValueError("kernel size must be odd")
    half = size // 2
    x = np.arange(-half, half + 1, dtype=float)
    g = np.exp(-(x * x) / (2 * sigma * sigma)) / (math.sqrt(2 * math.pi) * sigma)
    k = (-1.0 / (sigma * math.sqrt(2))) ** m * hermite_values(m, x / (sigma * math.sqrt(2))) * g
    if scaled:
        k = sigma**m * k
    if dc_correct:
        if m == 0:
            k = k / k.sum()
        else:
            k = k - k.sum() / size
            # absorb float residue into the centre sample so the sum is 0.0
            for _ in range(4):
                s = k.sum()
                if s == 0.0:
                    break
                k[half] -= s
    return k


def gaussian_derivative_kernel(i: int, j: int, sigma: float, size: int | None = None,
                               dc_correct: bool = True) -> np.ndarray:
    """2-D sampled kernel sigma^(i+j) * d^(i+j) G / dx^i dy^j, rows = y."""
    kx = gauss_deriv_1d(i, sigma, size, dc_correct=dc_correct)
    ky = gauss_deriv_1d(j, sigma, size, dc_correct=dc_correct)
    return np.outer(ky, kx)


def kernel_stack(sigma: float, size: int | None = None, max_order: int = 4) -> dict:
    """All kernels for one scale, including the (0, 0) smoothing kernel."""
    if size is None:
        size = default_kernel_size(sigma)
    stack = {(0, 0): gaussian_derivative_kernel(0, 0, sigma, size)}
    for sym in jet_symbols(max_order):
        stack[sym] = gaussian_derivative_kernel(sym[0], sym[1], sigma, size)
    return stack


def standardize(patch: np.ndarray) -> tuple[np.ndarray, bool]:
    """Zero-mean unit-variance copy; constant patches come back all-zero, flagged."""
    patch = np.asarray(patch, dtype=float)
    if patch.max() == patch.min():
        return np.zeros_like(patch), True
    return (patch - patch.mean()) / patch.std(), False


def local_jet(patch: np.ndarray, point: tuple[int, int], sigma: float,
              size: int | None = None, max_order: int = 4, mode: str = "strict") -> Jet:
    """Jet at one pixel: convolution of the patch with each derivative kernel.

    point is (x, y) with x the column index.  In "strict" mode the kernel
    footprint must lie inside the patch; "reflect" mirrors at the borders.
    """
    patch = np.asarray(patch, dtype=float)
    if size is None:
        size = default_kernel_size(sigma)
    half = size // 2
    x, y = point
    h, w = patch.shape
    if mode == "strict":
        if x - half < 0 or y - half < 0 or x + half >= w or y + half >= h:
            raise ValueError("kernel footprint exceeds the patch; use mode='reflect'")
        window = patch[y - half:y + half + 1, x - half:x + half + 1]
        values = {}
        for sym in jet_symbols(max_order):
            k = gaussian_derivative_kernel(sym[0], sym[1], sigma, size)
            values[sym] = float(np.sum(np.flip(k) * window))
        return Jet(values, max_order)
    if mode == "reflect":
        maps = jet_maps(patch, sigma, size, max_order)
        return Jet({sym: float(maps[sym][y, x]) for sym in jet_symbols(max_order)}, max_order)
    raise ValueError(f"unknown mode {mode!r}")


def jet_maps(image: np.ndarray, sigma: float, size: int | None = None,
             max_order: int = 4) -> dict:
    """Whole-image jets by separable convolution with reflect padding."""
    image = np.asarray(image, dtype=float)
    if size is None:
        size = default_kernel_size(sigma)
    col_filtered = {}
    out = {}
    for (i, j) in jet_symbols(max_order):
        if j not in col_filtered:
            ky = gauss_deriv_1d(j, sigma, size)
            col_filtered[j] = convolve1d(image, ky, axis=0, mode="reflect")
        kx = gauss_deriv_1d(i, sigma, size)
        out[(i, j)] = convolve1d(col_filtered[j], kx, axis=1, mode="reflect")
    return out


# ---------------------------------------------------------------------------
# Gaussian-Hermite moments

def gh_function_1d(m: int, sigma: float, coords: np.ndarray) -> np.ndarray:
    """Normalised Hermite function of order m at the given offsets."""
    norm = 1.0 / math.sqrt(2.0**m * math.factorial(m) * math.sqrt(math.pi) * sigma)
    return norm * np.exp(-(coords * coords) / (2 * sigma * sigma)) * hermite_values(m, coords / sigma)


def gh_basis(sigma: float, size: int, max_order: int = 4, center: tuple[float, float] | None = None) -> dict:
    """Sampled 2-D Hermite-function products over a size x size grid."""
    if center is None:
        center = ((size - 1) / 2.0, (size - 1) / 2.0)
    xs = np.arange(size, dtype=float) - center[0]
    ys = np.arange(size, dtype=float) - center[1]
    out = {}
    for m in range(0, max_order + 1):
        for j in range(m + 1):
            i = m - j
            out[(i, j)] = np.outer(gh_function_1d(j, sigma, ys), gh_function_1d(i, sigma, xs))
    return out


def gh_moment(patch: np.ndarray, i: int, j: int, sigma: float,
              center: tuple[float, float] | str | None = None) -> float:
    """Projection of the patch onto the (i, j) Hermite-function product.

    center defaults to the patch center; pass "centroid" for the intensity
    centroid, or an explicit (x0, y0).
    """
    patch = np.asarray(patch, dtype=float)
    h, w = patch.shape
    if center is None:
        cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    elif center == "centroid":
        total = patch.sum()
        if total == 0:
            raise ValueError("centroid undefined for a zero-mass patch")
        ys, xs = np.mgrid[0:h, 0:w]
        cx, cy = float((xs * patch).sum() / total), float((ys * patch).sum() / total)
    else:
        cx, cy = center
    hx = gh_function_1d(i, sigma, np.arange(w, dtype=float) - cx)
    hy = gh_function_1d(j, sigma, np.arange(h, dtype=float) - cy)
    return float(hy @ patch @ hx)
