"""Scaling benchmarks: embedding wall time versus dataset size, string
length, and bank size, with a log-log slope fit."""

import string
import time
from dataclasses import dataclass

import numpy as np

from .data import Alphabet, LabeledString, SequenceDataset
from .distance import FeatureParams
from .embedding import embed
from .rng import substream
from .sampler import SamplerConfig, build_bank

AXES = ("n", "l", "r")

# the 20-letter amino-acid alphabet, used when alphabet_size == 20
_PROTEIN = "ACDEFGHIKLMNPQRSTVWY"


@dataclass(frozen=True)
class ScalingRun:
    axis: str
    grid: tuple
    wall_times: tuple  # median seconds per grid point
    all_times: tuple  # tuple of per-run tuples
    fitted_slope: float
    r_squared: float
    workers: int


def _alphabet(size):
    if size == len(_PROTEIN):
        letters = _PROTEIN
    else:
        letters = (string.ascii_uppercase + string.ascii_lowercase + string.digits)[:size]
    if len(letters) < size:
        raise ValueError(f"alphabet_size {size} too large")
    return Alphabet(tuple(letters))


def gen_synthetic(num, length, alphabet_size, seed):
    """num uniform-random strings of exact length over a fixed alphabet; a
    single dummy class since benchmarks only embed."""
    if num < 1 or length < 1 or alphabet_size < 1:
        raise ValueError("num, length, and alphabet_size must all be >= 1")
    alphabet = _alphabet(alphabet_size)
    rng = substream(seed, "synthetic")
    codes = rng.integers(0, alphabet_size, size=(num, length))
    symbols = np.array(list(alphabet.symbols))
    records = tuple(LabeledString("".join(symbols[row]), 0) for row in codes)
    return SequenceDataset(alphabet=alphabet, train=records, test=(), label_names=("synthetic",))


def fit_loglog_slope(sizes, times):
    """Least-squares slope of log(time) vs log(size), plus the fit's R^2."""
    lx = np.log(np.asarray(sizes, dtype=np.float64))
    ly = np.log(np.asarray(times, dtype=np.float64))
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(((ly - pred) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def run_scaling(
    axis,
    grid,
    num=2000,
    length=512,
    alphabet_size=20,
    d_max=10,
    r=256,
    gamma=0.1,
    repeats=3,
    workers=1,
    seed=0,
):
    """Time the embedding stage at each grid point along one axis.

    Only the embedding is inside the timed region; dataset and bank
    generation are excluded.  Each point runs once untimed as warm-up, then
    `repeats` timed runs; the median enters the slope fit.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    grid = tuple(grid)
    if len(grid) < 4:
        raise ValueError(f"grid needs >= 4 points for a slope fit, got {len(grid)}")
    if list(grid) != sorted(set(grid)):
        raise ValueError("grid must be strictly increasing")

    params = FeatureParams(map_kind="sf", gamma=gamma)
    medians = []
    all_times = []
    for size in grid:
        n_i = size if axis == "n" else num
        l_i = size if axis == "l" else length
        r_i = size if axis == "r" else r
        ds = gen_synthetic(n_i, l_i, alphabet_size, seed)
        bank = build_bank(ds, SamplerConfig(strategy="rf", d_max=d_max, seed=seed), r_i)
        strings = ds.train_strings
        embed(strings[: min(64, len(strings))], bank, params, workers=workers)  # warm-up
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            embed(strings, bank, params, workers=workers)
            times.append(time.perf_counter() - t0)
        medians.append(float(np.median(times)))
        all_times.append(tuple(times))
    slope, r2 = fit_loglog_slope(grid, medians)
    return ScalingRun(
        axis=axis,
        grid=grid,
        wall_times=tuple(medians),
        all_times=tuple(all_times),
        fitted_slope=slope,
        r_squared=r2,
        workers=workers,
    )
