"""Seeded synthetic patch databases for stability/discriminability experiments.

A database holds 8x8 classes of patches cropped around a fixed grid on a base
texture, each class replicated with seeded random transforms.  Every patch is
reproducible bit-exactly from (base image, spec, seed): parameters come from a
per-patch generator seeded by (seed, class row, class column, instance), so
parallel and serial builds agree byte for byte.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from .pgm import quantize_u16, read_pgm, write_pgm

ALL_TRANSFORMS = (
    "rotation", "intensity_affine", "translation", "scaling",
    "shear", "gaussian_noise", "power_law",
)

DEFAULT_RANGES = {
    "translation": (-10.0, 10.0),
    "scaling": (0.5, 1.5),
    "shear": (0.0, 0.3),
    "gaussian_noise": (0.001, 0.005),
    "power_law": (0.5, 2.0),
    "intensity_gain": (0.5, 2.0),
    "intensity_bias": (-0.5, 0.5),
}


class SynthDbError(ValueError):
    pass


@dataclass(frozen=True)
class SynthDbSpec:
    transforms: tuple[str, ...]
    seed: int = 0
    classes_per_side: int = 8
    patch_size: int = 65
    instances: int = 60
    base_size: int = 512
    margin: int | None = None  # None = auto from enabled transform ranges
    base_smooth_sigma: float = 3.0
    ranges: dict = field(default_factory=lambda: dict(DEFAULT_RANGES))

    def __post_init__(self):
        bad = [t for t in self.transforms if t not in ALL_TRANSFORMS]
        if bad:
            raise SynthDbError(f"unknown transforms {bad}; valid: {ALL_TRANSFORMS}")

    def resolved_margin(self) -> int:
        if self.margin is not None:
            return self.margin
        crop = self.patch_size
        if "scaling" in self.transforms:
            crop = int(round(self.patch_size * self.ranges["scaling"][1]))
            if crop % 2 == 0:
                crop += 1
        reach = crop // 2
        if "translation" in self.transforms:
            reach += int(math.ceil(max(abs(v) for v in self.ranges["translation"])))
        # centres sit at 64(k-1)+32 (+margin, 0-based); both borders must fit.
        # Note the stated grid already overflows an exact 512 base by one pixel
        # at the far classes, so a plain build needs margin 1.
        last = 64 * (self.classes_per_side - 1) + 32
        need_low = reach - 32
        need_high = last + reach + 1 - self.base_size
        return max(0, need_low, need_high)


@dataclass(frozen=True)
class PatchRecord:
    class_row: int
    class_col: int
    instance: int
    path: Path
    params: dict

    @property
    def class_id(self) -> int:
        return self.class_row * 1000 + self.class_col

    def load(self) -> np.ndarray:
        return read_pgm(self.path)


def default_base_image(seed: int, size: int, smooth_sigma: float) -> np.ndarray:
    """Band-limited noise texture on [0, 1] (Gaussian-filtered white noise)."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xBA5E]))
    tex = gaussian_filter(rng.normal(size=(size, size)), smooth_sigma, mode="wrap")
    tex -= tex.min()
    peak = tex.max()
    return tex / peak if peak > 0 else tex


def grid_centers(spec: SynthDbSpec) -> list[tuple[int, int]]:
    """1-based centres x = 64(k1-1)+33 shifted by the margin, as 0-based pixels."""
    margin = spec.resolved_margin()
    step = 64
    out = []
    for k1 in range(1, spec.classes_per_side + 1):
        for k2 in range(1, spec.classes_per_side + 1):
            x = step * (k1 - 1) + 33 - 1 + margin
            y = step * (k2 - 1) + 33 - 1 + margin
            out.append((x, y))
    return out


def _draw_params(spec: SynthDbSpec, k1: int, k2: int, instance: int) -> dict:
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, k1, k2, instance]))
    params: dict = {}
    r = spec.ranges
    if "rotation" in spec.transforms:
        params["theta"] = float(rng.uniform(0.0, 2.0 * math.pi))
    if "intensity_affine" in spec.transforms:
        params["gain"] = float(rng.uniform(*r["intensity_gain"]))
        params["bias"] = float(rng.uniform(*r["intensity_bias"]))
    if "translation" in spec.transforms:
        params["tx"] = float(rng.uniform(*r["translation"]))
        params["ty"] = float(rng.uniform(*r["translation"]))
    if "scaling" in spec.transforms:
        params["scale"] = float(rng.uniform(*r["scaling"]))
    if "shear" in spec.transforms:
        params["shear_x"] = float(rng.uniform(*r["shear"]))
        params["shear_y"] = float(rng.uniform(*r["shear"]))
    if "gaussian_noise" in spec.transforms:
        params["noise_sigma"] = float(rng.uniform(*r["gaussian_noise"]))
        params["noise_seed"] = [int(spec.seed), k1, k2, instance, 0x401]
    if "power_law" in spec.transforms:
        params["alpha"] = float(rng.uniform(*r["power_law"]))
    return params


def _bilinear_shift_crop(base: np.ndarray, cx: float, cy: float, size: int,
                         ident: str) -> np.ndarray:
    """Axis-aligned crop of size x size centred at fractional (cx, cy)."""
    half = (size - 1) / 2.0
    x0, x1 = cx - half, cx + half
    y0, y1 = cy - half, cy + half
    h, w = base.shape
    if x0 < 0 or y0 < 0 or x1 > w - 1 or y1 > h - 1:
        raise SynthDbError(f"crop exceeds base image for {ident}")
    ys = np.linspace(y0, y1, size)
    xs = np.linspace(x0, x1, size)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    return map_coordinates(base, [gy, gx], order=1, mode="nearest")


def _warp_in_patch(patch: np.ndarray, theta: float, shear_x: float, shear_y: float) -> np.ndarray:
    """Shear then rotate about the patch centre, bilinear, reflect padding."""
    size = patch.shape[0]
    c = (size - 1) / 2.0
    ys, xs = np.mgrid[0:size, 0:size].astype(float)
    dx, dy = xs - c, ys - c
    if theta:
        ct, st = math.cos(theta), math.sin(theta)
        dx, dy = ct * dx - st * dy, st * dx + ct * dy
    if shear_x or shear_y:
        dx, dy = dx + shear_x * dy, dy + shear_y * dx
    return map_coordinates(patch, [dy + c, dx + c], order=1, mode="reflect")


def synthesize_patch(base: np.ndarray, cx: int, cy: int, spec: SynthDbSpec,
                     params: dict, ident: str) -> np.ndarray:
    scale = params.get("scale", 1.0)
    crop_px = int(round(spec.patch_size * scale))
    if crop_px % 2 == 0:
        crop_px += 1
    x = cx + params.get("tx", 0.0)
    y = cy + params.get("ty", 0.0)
    patch = _bilinear_shift_crop(base, x, y, crop_px, ident)
    patch = _warp_in_patch(patch, params.get("theta", 0.0),
                           params.get("shear_x", 0.0), params.get("shear_y", 0.0))
    if "noise_sigma" in params:
        noise_rng = np.random.default_rng(np.random.SeedSequence(params["noise_seed"]))
        patch = patch + noise_rng.normal(0.0, params["noise_sigma"], patch.shape)
    if "alpha" in params:
        patch = np.clip(patch, 0.0, None) ** params["alpha"]
    if "gain" in params:
        patch = params["gain"] * patch + params["bias"]
    if crop_px != spec.patch_size:
        grid = np.linspace(0, crop_px - 1, spec.patch_size)
        gy, gx = np.meshgrid(grid, grid, indexing="ij")
        patch = map_coordinates(patch, [gy, gx], order=1, mode="nearest")
    return patch


def build_synth_db(spec: SynthDbSpec, out_dir, base: np.ndarray | None = None) -> list[PatchRecord]:
    """Build the database on disk and return its patch records."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    margin = spec.resolved_margin()
    if base is None:
        base = default_base_image(spec.seed, spec.base_size + 2 * margin, spec.base_smooth_sigma)
    else:
        base = np.asarray(base, dtype=float)
        need = spec.base_size + 2 * margin
        if base.shape[0] < need or base.shape[1] < need:
            raise SynthDbError(f"base image smaller than required {need}x{need}")
    meta = {
        "spec": {**asdict(spec), "margin_resolved": margin},
        "format": "c<k1>_<k2>/i<instance>.pgm + params.json, 16-bit min-max quantised",
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    records = []
    centers = grid_centers(spec)
    idx = 0
    for k1 in range(1, spec.classes_per_side + 1):
        for k2 in range(1, spec.classes_per_side + 1):
            cx, cy = centers[idx]
            idx += 1
            cdir = out / f"c{k1}_{k2}"
            cdir.mkdir(exist_ok=True)
            for i in range(1, spec.instances + 1):
                ident = f"class ({k1},{k2}) instance {i}"
                params = _draw_params(spec, k1, k2, i)
                patch = synthesize_patch(base, cx, cy, spec, params, ident)
                q, vmin, vmax = quantize_u16(patch)
                ppath = cdir / f"i{i}.pgm"
                write_pgm(ppath, q)
                rec_params = {**params, "vmin": vmin, "vmax": vmax}
                (cdir / f"i{i}_params.json").write_text(json.dumps(rec_params, sort_keys=True))
                records.append(PatchRecord(k1, k2, i, ppath, rec_params))
    return records


def load_db(db_dir) -> list[PatchRecord]:
    db = Path(db_dir)
    if not (db / "meta.json").exists():
        raise SynthDbError(f"{db} is not a patch database (missing meta.json)")
    records = []
    for cdir in sorted(db.glob("c*_*")):
        k1, k2 = (int(v) for v in cdir.name[1:].split("_"))
        for ppath in sorted(cdir.glob("i*.pgm"), key=lambda p: int(p.stem[1:])):
            inst = int(ppath.stem[1:])
            params = json.loads((cdir / f"i{inst}_params.json").read_text())
            records.append(PatchRecord(k1, k2, inst, ppath, params))
    return records
