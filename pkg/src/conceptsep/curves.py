"""Concept separation curves: cosine samples, Gaussian KDE, overlap score.

For one (embedder, corpus) pair, every original sentence is compared with its
fuzzed and negated variants by cosine similarity. Each mode's similarity
samples are smoothed with a Gaussian kernel density estimate on a shared
uniform grid over [-1, 1], each curve's grid densities are normalized to sum
to 1 (this compensates for the unequal fuzz/negation variant volumes), and
the separation score is the summed pointwise minimum of the two curves:
0 means perfectly separated concepts, 1 means no separation at all.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .embed import batched_embed, texts_of
from .perturb import Mode, PerturbationSet

DEFAULT_RESOLUTION = 512
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("degenerate vector (zero norm)")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


@dataclass(frozen=True)
class SimilaritySample:
    """Cosine similarity between one original and one of its variants."""

    original_id: int
    mode: Mode
    value: float


def similarity_samples(corpus: Corpus, perturbation_sets: list[PerturbationSet],
                       embedder, jobs: int = 1,
                       max_skip_fraction: float = 0.1) -> list[SimilaritySample]:
    """One sample per (original, variant) pair, in deterministic order.

    Variants whose embedding is degenerate (zero norm or non-finite) are
    skipped with a counted warning; if more than *max_skip_fraction* of all
    pairs are skipped the run is considered broken and an error is raised.
    Originals must embed successfully.
    """
    by_id = {s.id: s for s in corpus}
    ordered = sorted(perturbation_sets, key=lambda p: (p.original_id, p.mode.value))
    referenced = sorted({p.original_id for p in ordered})
    missing = [i for i in referenced if i not in by_id]
    if missing:
        raise ValueError(f"perturbation sets reference unknown sentence ids {missing}")

    original_vecs = batched_embed(embedder, [by_id[i].text for i in referenced], jobs)
    originals = {i: original_vecs[row] for row, i in enumerate(referenced)}
    for i in referenced:
        if not np.all(np.isfinite(originals[i])) or np.linalg.norm(originals[i]) == 0.0:
            raise ValueError(f"original sentence {i} has a degenerate embedding")

    variant_texts = [v.text for p in ordered for v in p.variants]
    variant_vecs = batched_embed(embedder, variant_texts, jobs)

    samples: list[SimilaritySample] = []
    skipped = 0
    row = 0
    for pset in ordered:
        origin = originals[pset.original_id]
        for _ in pset.variants:
            vec = variant_vecs[row]
            row += 1
            if not np.all(np.isfinite(vec)) or np.linalg.norm(vec) == 0.0:
                skipped += 1
                continue
            samples.append(SimilaritySample(original_id=pset.original_id,
                                            mode=pset.mode,
                                            value=cosine(origin, vec)))
    total = len(variant_texts)
    if total and skipped / total > max_skip_fraction:
        raise RuntimeError(f"skipped {skipped} of {total} variant embeddings "
                           f"(> {max_skip_fraction:.0%} threshold)")
    if skipped:
        warnings.warn(f"skipped {skipped} of {total} variant embeddings "
                      "with degenerate vectors")
    return samples


def sample_values(samples: list[SimilaritySample], mode: Mode) -> np.ndarray:
    return np.array([s.value for s in samples if s.mode is mode])


# ---------------------------------------------------------------------------
# Density curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityCurve:
    """Densities on a uniform grid over [-1, 1] inclusive."""

    grid: np.ndarray
    densities: np.ndarray
    mode: Mode | None = None

    def __post_init__(self):
        if self.grid.shape != self.densities.shape:
            raise ValueError("grid and densities must have equal length")


def uniform_grid(resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """Uniform grid of *resolution* points from -1 to 1 inclusive."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    return np.linspace(-1.0, 1.0, resolution)


def scott_bandwidth(samples: np.ndarray) -> float:
    """Scott's rule: sample standard deviation times m^(-1/5)."""
    m = len(samples)
    return float(np.std(samples, ddof=1)) * m ** (-0.2)


def kde(samples: np.ndarray, grid: np.ndarray,
        bandwidth_override: float | None = None,
        mode: Mode | None = None) -> DensityCurve:
    """Gaussian kernel density estimate of *samples* evaluated on *grid*.

    density(x) = (1 / (m h)) * sum_k phi((x - s_k) / h) with phi the standard
    normal density. The bandwidth h follows Scott's rule unless overridden.
    Fewer than two samples, or zero variance, is a degenerate sample set
    unless an override bandwidth is supplied.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    m = len(samples)
    if bandwidth_override is not None:
        if bandwidth_override <= 0:
            raise ValueError("bandwidth must be positive")
        if m < 1:
            raise ValueError("degenerate sample set (no samples)")
        h = float(bandwidth_override)
    else:
        if m < 2 or np.std(samples) == 0.0:
            raise ValueError("degenerate sample set (need >= 2 samples with "
                             "non-zero variance, or a bandwidth override)")
        h = scott_bandwidth(samples)

    densities = np.zeros_like(grid)
    # chunk over samples to bound the (grid x samples) intermediate
    for start in range(0, m, 4096):
        chunk = samples[start:start + 4096]
        z = (grid[:, None] - chunk[None, :]) / h
        densities += np.exp(-0.5 * z * z).sum(axis=1)
    densities /= m * h * _SQRT_2PI
    return DensityCurve(grid=np.asarray(grid, dtype=float), densities=densities,
                        mode=mode)


def normalize(curve: DensityCurve) -> DensityCurve:
    """Divide each density by the grid sum so the curve carries unit mass."""
    total = float(curve.densities.sum())
    if total <= 0.0:
        raise ValueError("cannot normalize an all-zero density curve")
    return DensityCurve(grid=curve.grid, densities=curve.densities / total,
                        mode=curve.mode)


def overlap(fuz: DensityCurve, neg: DensityCurve) -> float:
    """Summed pointwise minimum of two normalized curves on the same grid."""
    if fuz.grid.shape != neg.grid.shape or not np.array_equal(fuz.grid, neg.grid):
        raise ValueError("grid mismatch between curves")
    return float(np.minimum(fuz.densities, neg.densities).sum())


@dataclass(frozen=True)
class CscResult:
    """Paired normalized fuzz/negation curves plus their overlap score."""

    fuzz_curve: DensityCurve
    negation_curve: DensityCurve
    overlap: float
    sample_counts: dict


def build_csc(fuzz_samples: np.ndarray, negation_samples: np.ndarray,
              resolution: int = DEFAULT_RESOLUTION,
              bandwidth_override: float | None = None) -> CscResult:
    """KDE, normalize and score both sample sets on one shared grid.

    Samples are clamped to [-1, 1] first so floating-point excursions cannot
    fall off-grid. The per-curve normalization is what makes the differing
    fuzz/negation sample volumes comparable.
    """
    grid = uniform_grid(resolution)
    fuzz_samples = np.clip(np.asarray(fuzz_samples, dtype=float).ravel(), -1.0, 1.0)
    negation_samples = np.clip(np.asarray(negation_samples, dtype=float).ravel(),
                               -1.0, 1.0)
    fuz = normalize(kde(fuzz_samples, grid, bandwidth_override, mode=Mode.FUZZ))
    neg = normalize(kde(negation_samples, grid, bandwidth_override, mode=Mode.NEGATE))
    return CscResult(fuzz_curve=fuz, negation_curve=neg,
                     overlap=overlap(fuz, neg),
                     sample_counts={Mode.FUZZ.value: len(fuzz_samples),
                                    Mode.NEGATE.value: len(negation_samples)})


def build_csc_from_samples(samples: list[SimilaritySample],
                           resolution: int = DEFAULT_RESOLUTION,
                           bandwidth_override: float | None = None) -> CscResult:
    """Split mixed similarity samples by mode and build the curves."""
    return build_csc(sample_values(samples, Mode.FUZZ),
                     sample_values(samples, Mode.NEGATE),
                     resolution=resolution,
                     bandwidth_override=bandwidth_override)
