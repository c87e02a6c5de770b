"""Confidence intervals and cumulative-by-shot series for shot estimators.

All reported quantities are functions of per-setting means of per-shot
values, so combiners receive a mapping ``setting -> means`` where the means
array has shape ``(..., n_series)`` and must broadcast over leading axes.
The bootstrap is stratified: each measurement setting is resampled with
replacement independently, and rows of a setting's value matrix are kept
together so correlated series from the same shots stay correlated.
"""
from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Mapping, Sequence

import numpy as np

Combiner = Callable[[dict[str, np.ndarray]], np.ndarray]


def _as_matrix(values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("per-shot values must be a nonempty 1D or 2D array")
    return arr


def nearest_rank_quantile(sorted_values: np.ndarray, q: float) -> float:
    n = len(sorted_values)
    idx = min(max(int(np.ceil(q * n)) - 1, 0), n - 1)
    return float(sorted_values[idx])


def bootstrap_ci(
    per_setting_values: Mapping[str, np.ndarray],
    combiner: Combiner,
    level: float = 0.68,
    resamples: int = 1000,
    seed: int = 0,
) -> tuple[float, float]:
    """Stratified bootstrap interval for ``combiner`` of per-setting means."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0,1)")
    if not per_setting_values:
        raise ValueError("need at least one setting")
    mats = {name: _as_matrix(v) for name, v in per_setting_values.items()}
    rng = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    resampled_means = {}
    for name in sorted(mats):
        mat = mats[name]
        idx = rng.integers(0, mat.shape[0], size=(resamples, mat.shape[0]))
        resampled_means[name] = mat[idx].mean(axis=1)
    stats = np.asarray(combiner(resampled_means), dtype=float)
    stats.sort()
    alpha = (1.0 - level) / 2.0
    return nearest_rank_quantile(stats, alpha), nearest_rank_quantile(stats, 1.0 - alpha)


def point_estimate(per_setting_values: Mapping[str, np.ndarray], combiner: Combiner) -> float:
    means = {name: _as_matrix(v).mean(axis=0) for name, v in per_setting_values.items()}
    return float(np.asarray(combiner(means)))


def normal_ci(
    terms: Sequence[tuple[np.ndarray, float]],
    const: float = 0.0,
    level: float = 0.68,
) -> tuple[float, float]:
    """Cross-check interval: mean +/- z * SE for an affine combination of
    independent per-setting per-shot series."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0,1)")
    point = const
    var = 0.0
    for values, coef in terms:
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            raise ValueError("empty per-shot series")
        point += coef * arr.mean()
        if arr.size > 1:
            var += coef**2 * arr.var(ddof=1) / arr.size
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    half = z * np.sqrt(var)
    return point - half, point + half


@dataclass
class CumulativeSeries:
    """Estimates recomputed on the first i shots of every setting, i = start..S."""

    quantity: str
    start: int
    values: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray

    def __post_init__(self) -> None:
        if not len(self.values) == len(self.ci_lo) == len(self.ci_hi):
            raise ValueError("series and interval lists must have equal length")

    @property
    def shot_indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self.values))


def cumulative_series(
    per_setting_values: Mapping[str, np.ndarray],
    combiner: Combiner,
    quantity: str = "",
    level: float = 0.68,
    resamples: int = 200,
    seed: int = 0,
    start: int = 2,
) -> CumulativeSeries:
    """Cumulative estimates with a bootstrap interval at every prefix length."""
    mats = {name: _as_matrix(v) for name, v in per_setting_values.items()}
    total = min(m.shape[0] for m in mats.values())
    if total < 2:
        raise ValueError("need at least 2 shots per setting")
    values, lo, hi = [], [], []
    for i in range(start, total + 1):
        prefix = {name: m[:i] for name, m in mats.items()}
        values.append(point_estimate(prefix, combiner))
        ci = bootstrap_ci(prefix, combiner, level=level, resamples=resamples, seed=seed + i)
        lo.append(ci[0])
        hi.append(ci[1])
    return CumulativeSeries(quantity, start, np.array(values), np.array(lo), np.array(hi))


def _ranks(x: np.ndarray) -> np.ndarray:
    """Average ranks, handling ties."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=float)
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_perm(
    x: np.ndarray,
    y: np.ndarray,
    permutations: int = 20000,
    seed: int = 0,
    alternative: str = "less",
) -> tuple[float, float]:
    """Spearman rank correlation with a seeded permutation p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 3:
        raise ValueError("need two 1D arrays of equal length >= 3")
    rx, ry = _ranks(x), _ranks(y)
    rx = (rx - rx.mean()) / rx.std()
    ry_c = (ry - ry.mean()) / ry.std()
    rho = float(np.mean(rx * ry_c))
    rng = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    count = 0
    for _ in range(permutations):
        perm_rho = float(np.mean(rx * rng.permutation(ry_c)))
        if alternative == "less":
            count += perm_rho <= rho
        elif alternative == "greater":
            count += perm_rho >= rho
        else:
            count += abs(perm_rho) >= abs(rho)
    pvalue = (count + 1) / (permutations + 1)
    return rho, pvalue
