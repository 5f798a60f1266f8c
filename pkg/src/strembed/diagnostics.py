"""Kernel-level diagnostics.

Monte-Carlo estimates of the reference-string kernel, Gram matrices with a
positive-semidefiniteness check, the (indefinite) edit-distance substitution
baselines, and an empirical convergence-rate harness against a large nested
reference bank.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distance import SOFT_FEATURE, apply_feature_map, distance_matrix, levenshtein


@dataclass(frozen=True)
class KernelEstimate:
    value: float
    r_used: int
    std_error: float


@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.values)

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues()[0])

    @property
    def max_eigenvalue(self):
        return float(self.eigenvalues()[-1])

    def diagonal_dominance_ratio(self):
        """mean(diagonal) / mean(off-diagonal); large values flag an
        almost-identity Gram matrix that linear separators generalize badly
        from."""
        g = self.values
        n = g.shape[0]
        off = (g.sum() - np.trace(g)) / (n * n - n)
        return float(np.mean(np.diag(g)) / off)


@dataclass(frozen=True)
class ConvergenceReport:
    r_grid: tuple
    max_abs_error: tuple
    mean_abs_error: tuple
    fitted_rate: float


def feature_vectors(strings, bank, params, workers=None):
    """Raw (un-normalized) feature matrix: rows are strings, columns bank
    entries."""
    dist = distance_matrix(strings, bank.strings, workers=workers)
    return apply_feature_map(dist, params)


def estimate_kernel(x, y, bank, params):
    """Monte-Carlo kernel estimate (1/R) * sum_i f_i(x) f_i(y) with its
    standard error."""
    if len(bank) == 0:
        raise ValueError("bank is empty")
    f = feature_vectors([x, y], bank, params)
    summands = f[0] * f[1]
    r = len(bank)
    value = float(summands.mean())
    if r > 1:
        std_error = float(summands.std(ddof=1) / math.sqrt(r))
    else:
        std_error = 0.0
    return KernelEstimate(value=value, r_used=r, std_error=std_error)


def gram_matrix(strings, bank, params, workers=None):
    """Gram matrix of normalized embeddings; positive semidefinite up to
    eigensolver noise because it is an explicit inner-product matrix."""
    if len(strings) < 2:
        raise ValueError("need at least 2 strings for a Gram matrix")
    f = feature_vectors(strings, bank, params, workers=workers)
    z = f / math.sqrt(len(bank))
    return GramMatrix(values=z @ z.T)


def distance_substitution_kernel(x, y, kind, gamma):
    """Classic substitution of the edit distance into an RBF profile.

    Not positive-definite in general; kept as a diagnostic baseline.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    d = levenshtein(x, y)
    if kind == "gaussian":
        return math.exp(-gamma * d * d)
    if kind == "laplacian":
        return math.exp(-gamma * d)
    raise ValueError(f"unknown kind {kind!r}, expected 'gaussian' or 'laplacian'")


def distance_substitution_gram(strings, kind, gamma):
    dist = distance_matrix(strings, strings).astype(np.float64)
    if kind == "gaussian":
        return GramMatrix(values=np.exp(-gamma * dist * dist))
    if kind == "laplacian":
        return GramMatrix(values=np.exp(-gamma * dist))
    raise ValueError(f"unknown kind {kind!r}")


def convergence_harness(probe_pairs, ref_bank, params, r_grid, workers=None):
    """Empirical convergence of the Monte-Carlo kernel estimate.

    For each R in the grid, the estimate uses the first R strings of the
    reference bank (nested prefixes), and the error is measured against the
    full-bank estimate.  Restricted to the bounded soft feature, where the
    per-sample summands lie in (0, 1] and the expected decay is R^(-1/2).
    """
    r_grid = tuple(sorted(r_grid))
    r_ref = len(ref_bank)
    if params.map_kind != SOFT_FEATURE:
        raise ValueError("convergence harness requires the bounded soft feature ('sf')")
    if r_ref < 16 * max(r_grid):
        raise ValueError(f"reference bank size {r_ref} must be >= 16 * max grid point {max(r_grid)}")

    strings = sorted({s for pair in probe_pairs for s in pair})
    pos = {s: i for i, s in enumerate(strings)}
    f = feature_vectors(strings, ref_bank, params, workers=workers)

    max_err = np.zeros(len(r_grid))
    sum_err = np.zeros(len(r_grid))
    for x, y in probe_pairs:
        summands = f[pos[x]] * f[pos[y]]
        csum = np.cumsum(summands)
        ref = csum[-1] / r_ref
        for gi, r in enumerate(r_grid):
            err = abs(csum[r - 1] / r - ref)
            max_err[gi] = max(max_err[gi], err)
            sum_err[gi] += err
    mean_err = sum_err / len(probe_pairs)
    slope = float(np.polyfit(np.log(r_grid), np.log(np.maximum(max_err, 1e-300)), 1)[0])
    return ConvergenceReport(
        r_grid=r_grid,
        max_abs_error=tuple(max_err),
        mean_abs_error=tuple(mean_err),
        fitted_rate=slope,
    )
