"""Levenshtein distance and the per-reference feature transforms.

The optimized path is a rolling two-row dynamic program whose memory is
proportional to the shorter string; reference strings are short, so a
distance evaluation against a reference of length D costs O(L*D) time and
O(D) memory.  A deliberately naive full-matrix transcription is kept as an
independent test oracle.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

DIRECT_FEATURE = "df"
SOFT_FEATURE = "sf"


@dataclass(frozen=True)
class FeatureParams:
    """Choice of per-reference feature: the raw distance ('df') or the
    similarity exp(-gamma * distance) ('sf')."""

    map_kind: str
    gamma: float = 0.0

    def __post_init__(self):
        if self.map_kind not in (DIRECT_FEATURE, SOFT_FEATURE):
            raise ValueError(f"unknown map_kind {self.map_kind!r}, expected 'df' or 'sf'")
        if self.map_kind == SOFT_FEATURE and not self.gamma > 0:
            raise ValueError(f"soft feature requires gamma > 0, got {self.gamma}")


def encode(s):
    """Encode a string as an int32 code-point array."""
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int32)


def encode_batch(strings, width=None):
    """Pad-encode strings into a (n, width) int32 matrix plus a length vector."""
    lengths = np.array([len(s) for s in strings], dtype=np.int64)
    if width is None:
        width = max(1, int(lengths.max(initial=0)))
    out = np.zeros((len(strings), width), dtype=np.int32)
    for i, s in enumerate(strings):
        out[i, : len(s)] = encode(s)
    return out, lengths


@njit(cache=True)
def _ld_two_row(a, na, b, nb):
    # b is the column dimension; callers pass the shorter string as b.
    prev = np.empty(nb + 1, dtype=np.int64)
    curr = np.empty(nb + 1, dtype=np.int64)
    for j in range(nb + 1):
        prev[j] = j
    for i in range(1, na + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, nb + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            dele = prev[j] + 1
            ins = curr[j - 1] + 1
            best = sub
            if dele < best:
                best = dele
            if ins < best:
                best = ins
            curr[j] = best
        prev, curr = curr, prev
    return prev[nb]


@njit(cache=True, parallel=True)
def _ld_matrix(X, xlen, W, wlen, out):
    n = X.shape[0]
    r = W.shape[0]
    wmax = W.shape[1]
    for i in prange(n):
        prev = np.empty(wmax + 1, dtype=np.int64)
        curr = np.empty(wmax + 1, dtype=np.int64)
        xi = X[i]
        nx = xlen[i]
        for j in range(r):
            wj = W[j]
            nw = wlen[j]
            for t in range(nw + 1):
                prev[t] = t
            for p in range(1, nx + 1):
                curr[0] = p
                cp = xi[p - 1]
                for t in range(1, nw + 1):
                    sub = prev[t - 1] + (0 if cp == wj[t - 1] else 1)
                    dele = prev[t] + 1
                    ins = curr[t - 1] + 1
                    best = sub
                    if dele < best:
                        best = dele
                    if ins < best:
                        best = ins
                    curr[t] = best
                tmp = prev
                prev = curr
                curr = tmp
            out[i, j] = prev[nw]


def levenshtein(x, w):
    """Minimum number of single-character insertions, deletions, and
    substitutions transforming x into w."""
    if len(w) > len(x):
        x, w = w, x
    if len(w) == 0:
        return len(x)
    return int(_ld_two_row(encode(x), len(x), encode(w), len(w)))


def naive_levenshtein_oracle(x, w):
    """Full-matrix dynamic program, kept as an independent reference for
    testing the optimized implementation.  O(|x|*|w|) memory."""
    nx, nw = len(x), len(w)
    d = [[0] * (nw + 1) for _ in range(nx + 1)]
    for i in range(nx + 1):
        d[i][0] = i
    for j in range(nw + 1):
        d[0][j] = j
    for i in range(1, nx + 1):
        for j in range(1, nw + 1):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (x[i - 1] != w[j - 1]),
            )
    return d[nx][nw]


def distance_matrix(strings, references, workers=None):
    """Pairwise distances between data strings (rows) and reference strings
    (columns) as an int64 matrix.  Exact integer arithmetic throughout, so the
    result is independent of the worker count."""
    import numba

    X, xlen = encode_batch(strings)
    W, wlen = encode_batch(references)
    out = np.empty((len(strings), len(references)), dtype=np.int64)
    if workers is not None:
        old = numba.get_num_threads()
        numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))
        try:
            _ld_matrix(X, xlen, W, wlen, out)
        finally:
            numba.set_num_threads(old)
    else:
        _ld_matrix(X, xlen, W, wlen, out)
    return out


def feature(x, w, params):
    """Feature value of string x against reference w."""
    d = levenshtein(x, w)
    if params.map_kind == DIRECT_FEATURE:
        return float(d)
    return math.exp(-params.gamma * d)


def apply_feature_map(distances, params):
    """Vectorized feature transform of an integer distance array."""
    if params.map_kind == DIRECT_FEATURE:
        return distances.astype(np.float64)
    return np.exp(-params.gamma * distances.astype(np.float64))
