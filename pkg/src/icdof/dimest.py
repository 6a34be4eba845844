"""Empirical information dimension via quantized-entropy slopes.

The dimension of a distribution is the growth rate of H(floor(k X)/k) in
log k.  The estimator samples the truncated self-similar series, computes
plug-in entropies of floor(k X) over a grid of quantization levels, and fits
the slope of entropy (bits) against log2 k.  Grids aligned with powers of
1/r tame the log-periodic oscillation self-similar measures exhibit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import ifs
from .ifs import IFSSpec


def quantized_entropy(
    samples: np.ndarray, k: int, miller_madow: bool = False
) -> float:
    """Plug-in entropy in bits of the multiset {floor(k * x)}.

    With ``miller_madow`` the small-sample bias correction
    (occupied - 1)/(2 n ln 2) is added.
    """
    if k < 1:
        raise ValueError(f"quantization level must be >= 1, got {k}")
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n == 0:
        raise ValueError("need at least one sample")
    _, counts = np.unique(np.floor(k * samples), return_counts=True)
    occupied = len(counts)
    if occupied > n / 10:
        warnings.warn(
            f"{occupied} occupied cells for {n} samples at k={k}; "
            "entropy estimate is likely undersampled",
            stacklevel=2,
        )
    p = counts / n
    entropy = float(-(p * np.log2(p)).sum())
    if miller_madow:
        entropy += (occupied - 1) / (2 * n * math.log(2))
    return entropy


def required_depth(spec: IFSSpec, k_max: int) -> int:
    """Smallest depth m with r^m <= 1/(2 k_max), so truncation error stays
    below the finest quantization cell."""
    r = float(spec.r)
    return max(1, math.ceil(math.log(2 * k_max) / math.log(1 / r)))


def aligned_k_grid(spec: IFSSpec, k_min: int, k_max: int) -> list[int]:
    """Quantization levels at powers of 1/r within [k_min, k_max]."""
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}..{k_max}")
    inv_r = 1.0 / float(spec.r)
    grid = []
    j = 1
    while True:
        k = round(inv_r**j)
        if k > k_max:
            break
        if k >= k_min and (not grid or k > grid[-1]):
            grid.append(k)
        j += 1
    if not grid:
        raise ValueError(
            f"no power of 1/r = {inv_r:.4g} falls in [{k_min}, {k_max}]"
        )
    return grid


@dataclass(frozen=True)
class DimensionEstimate:
    spec: IFSSpec
    k_grid: Tuple[int, ...]
    entropies: Tuple[float, ...]
    pointwise: Tuple[float, ...]
    slope: float
    lower_proxy: float
    upper_proxy: float
    sample_count: int
    depth: int
    seed: int


def estimate_dimension(
    spec: IFSSpec,
    k_grid: Sequence[int],
    sample_count: int,
    depth: int | None = None,
    seed: int = 0,
    chunks: int = 1,
    miller_madow: bool = True,
) -> DimensionEstimate:
    """Quantized entropies over ``k_grid`` and the fitted dimension slope.

    The truncation depth must satisfy r^depth <= 1/(2 max k); it is derived
    automatically when not given.  The pointwise min/max of H/log2(k) are
    reported as crude lower/upper dimension proxies.
    """
    k_grid = sorted(int(k) for k in k_grid)
    if not k_grid or k_grid[0] < 1:
        raise ValueError("k_grid must hold positive integers")
    needed = required_depth(spec, k_grid[-1])
    if depth is None:
        depth = needed
    elif depth < needed:
        raise ValueError(
            f"depth {depth} insufficient for k_max={k_grid[-1]}; "
            f"need depth >= {needed}"
        )
    samples = ifs.sample(spec, depth, sample_count, seed, chunks=chunks)
    entropies = [quantized_entropy(samples, k, miller_madow) for k in k_grid]
    log_k = np.log2(np.array(k_grid, dtype=float))
    if len(k_grid) > 1:
        slope = float(np.polyfit(log_k, np.array(entropies), 1)[0])
    else:
        slope = entropies[0] / float(log_k[0]) if log_k[0] else 0.0
    pointwise = tuple(
        float(h / lk) if lk else 0.0 for h, lk in zip(entropies, log_k)
    )
    return DimensionEstimate(
        spec=spec,
        k_grid=tuple(k_grid),
        entropies=tuple(entropies),
        pointwise=pointwise,
        slope=slope,
        lower_proxy=min(pointwise),
        upper_proxy=max(pointwise),
        sample_count=sample_count,
        depth=depth,
        seed=seed if isinstance(seed, int) else -1,
    )


@dataclass(frozen=True)
class FormulaComparison:
    formula: float
    empirical: float
    abs_error: float
    within_tolerance: bool


def compare_with_formula(
    spec: IFSSpec, estimate: DimensionEstimate, tolerance: float = 0.05
) -> FormulaComparison:
    """Pair the entropy-formula dimension with the empirical slope."""
    if estimate.spec != spec:
        raise ValueError("estimate was computed for a different IFS spec")
    formula = ifs.hochman_dimension(spec)
    err = abs(formula - estimate.slope)
    return FormulaComparison(formula, estimate.slope, err, err <= tolerance)
