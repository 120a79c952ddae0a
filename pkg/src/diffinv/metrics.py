"""Distance, classification, stability, and verification metrics."""
from __future__ import annotations

import numpy as np

from .features import compile_invariants, jet_to_array
from .kernels import local_jet, standardize
from .symbolic import Poly
from .synthdb import PatchRecord


def csd(x, y) -> float:
    """Componentwise normalised L1 distance; 0/0 terms contribute 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    num = np.abs(x - y)
    den = np.abs(x) + np.abs(y)
    return float(np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0).sum())


def csd_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise distances between rows of a (n, d) and b (m, d) -> (n, m)."""
    num = np.abs(a[:, None, :] - b[None, :, :])
    den = np.abs(a)[:, None, :] + np.abs(b)[None, :, :]
    terms = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return terms.sum(axis=2)


def invariant_values(records: list[PatchRecord], polys: list[Poly], sigma: float,
                     size: int | None = None, threads: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate invariants at every patch centre.

    Patches are standardised first (quantised intensities are an affine map of
    the originals, so standardisation recovers the same input either way).
    Returns (values [n, n_polys], class labels, instance ids).
    """
    compiled = compile_invariants(polys)

    def one(rec: PatchRecord) -> np.ndarray:
        patch = rec.load().astype(float)
        std, _ = standardize(patch)
        h, w = std.shape
        if size is None:
            ksize = min(h, w)
            if ksize % 2 == 0:
                ksize -= 1
        else:
            ksize = size
        jet = local_jet(std, (w // 2, h // 2), sigma, ksize, mode="strict")
        return compiled.evaluate(jet_to_array(jet))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, records))
    else:
        rows = [one(rec) for rec in records]
    values = np.stack(rows)
    labels = np.array([rec.class_id for rec in records])
    instances = np.array([rec.instance for rec in records])
    return values, labels, instances


def nn_classify(records: list[PatchRecord], polys: list[Poly], sigma: float,
                size: int | None = None, threads: int = 1) -> dict:
    """First instance per class is the model; the rest are classified to the
    nearest model by the componentwise distance; ties go to the lowest class id."""
    values, labels, instances = invariant_values(records, polys, sigma, size, threads)
    model_mask = instances == 1
    model_values = values[model_mask]
    model_labels = labels[model_mask]
    order = np.argsort(model_labels, kind="stable")
    model_values, model_labels = model_values[order], model_labels[order]
    test_mask = ~model_mask
    d = csd_matrix(values[test_mask], model_values)
    predicted = model_labels[np.argmin(d, axis=1)]  # argmin takes the first (lowest id) on ties
    truth = labels[test_mask]
    correct = predicted == truth
    per_class = {}
    for cls in np.unique(truth):
        sel = truth == cls
        per_class[int(cls)] = float(correct[sel].mean())
    return {
        "accuracy": float(correct.mean()),
        "n_test": int(test_mask.sum()),
        "n_models": int(model_mask.sum()),
        "per_class": per_class,
    }


def mre_values(records: list[PatchRecord], polys: list[Poly], sigma: float,
               size: int | None = None, threads: int = 1) -> np.ndarray:
    """Mean relative error (percent) per invariant across transformed instances.

    Each class's first instance is the reference; terms with a zero denominator
    contribute zero and are still counted.
    """
    values, labels, instances = invariant_values(records, polys, sigma, size, threads)
    total = np.zeros(values.shape[1])
    count = 0
    for cls in np.unique(labels):
        sel = labels == cls
        v = values[sel]
        inst = instances[sel]
        ref = v[inst == 1][0]
        rest = v[inst != 1]
        num = np.abs(rest - ref[None, :])
        den = np.abs(rest) + np.abs(ref)[None, :]
        terms = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        total += terms.sum(axis=0)
        count += rest.shape[0]
    return 100.0 * total / count


def average_precision(scores: np.ndarray, positive: np.ndarray) -> float:
    """Ranked-retrieval AP; scores ascending = better (distances)."""
    order = np.argsort(scores, kind="stable")
    rel = positive[order]
    hits = np.cumsum(rel)
    ranks = np.arange(1, len(rel) + 1)
    precision = hits / ranks
    n_pos = rel.sum()
    if n_pos == 0:
        return 0.0
    return float((precision * rel).sum() / n_pos)


def pair_verify(records: list[PatchRecord], polys: list[Poly], sigma: float,
                size: int | None = None, negatives_per_positive: int = 5,
                seed: int = 0, threads: int = 1) -> dict:
    """Same-class pairs against a seeded sample of cross-class pairs, ranked by
    ascending distance; reports the average precision and curve data."""
    values, labels, _ = invariant_values(records, polys, sigma, size, threads)
    n = len(records)
    pos_pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if labels[i] == labels[j]]
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7E81F]))
    n_neg = negatives_per_positive * len(pos_pairs)
    neg_pairs = []
    while len(neg_pairs) < n_neg:
        i, j = rng.integers(0, n, size=2)
        if i != j and labels[i] != labels[j]:
            neg_pairs.append((int(i), int(j)))
    pairs = pos_pairs + neg_pairs
    a = values[[p[0] for p in pairs]]
    b = values[[p[1] for p in pairs]]
    num = np.abs(a - b)
    den = np.abs(a) + np.abs(b)
    scores = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0).sum(axis=1)
    positive = np.array([1] * len(pos_pairs) + [0] * len(neg_pairs))
    ap = average_precision(scores, positive)
    return {
        "map": ap,
        "n_positive": len(pos_pairs),
        "n_negative": len(neg_pairs),
        "scores_positive_mean": float(scores[: len(pos_pairs)].mean()),
        "scores_negative_mean": float(scores[len(pos_pairs):].mean()),
    }
