"""Random reference-string generation.

Four strategies build the bank of reference strings the embedding is measured
against:

* ``rf``  -- characters drawn uniformly from the alphabet,
* ``rfd`` -- characters drawn from the training-set character frequencies,
* ``ss``  -- a contiguous substring of a random training string,
* ``bss`` -- several blocks cut from a random training string.

Each bank slot uses its own named sub-stream of the master seed, so banks are
reproducible and independent of generation order.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .data import DatasetError
from .rng import substream

STRATEGIES = ("rf", "rfd", "ss", "bss")
DATA_DEPENDENT = ("ss", "bss")

BANK_MAGIC = "RSE-BANK"
BANK_VERSION = "v1"

# attempts to find a long-enough training string before clamping the
# requested substring length
_SS_RESAMPLE_ATTEMPTS = 32


class BankFormatError(ValueError):
    """Corrupt or truncated bank file."""


@dataclass(frozen=True)
class SamplerConfig:
    strategy: str
    d_max: int
    seed: int

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if self.d_max < 1:
            raise ValueError(f"d_max must be >= 1, got {self.d_max}")


@dataclass(frozen=True)
class CharacterHistogram:
    """Per-symbol occurrence counts over the training strings only."""

    symbols: tuple
    counts: tuple

    def __post_init__(self):
        if sum(self.counts) <= 0:
            raise ValueError("histogram has no observations")

    @property
    def probabilities(self):
        c = np.asarray(self.counts, dtype=np.float64)
        return c / c.sum()

    @classmethod
    def from_strings(cls, alphabet, strings):
        counts = [0] * len(alphabet)
        idx = alphabet.index
        for s in strings:
            for ch in s:
                counts[idx[ch]] += 1
        return cls(symbols=tuple(alphabet.symbols), counts=tuple(counts))


@dataclass(frozen=True)
class RandomStringBank:
    strings: tuple
    config: SamplerConfig

    @property
    def lengths(self):
        return [len(s) for s in self.strings]

    def __len__(self):
        return len(self.strings)

    def fingerprint(self):
        h = hashlib.sha256()
        h.update(self.header().encode("utf-8"))
        for s in self.strings:
            h.update(s.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()

    def header(self, extra=None):
        line = (
            f"{BANK_MAGIC} {BANK_VERSION} strategy={self.config.strategy.upper()} "
            f"d_max={self.config.d_max} seed={self.config.seed} R={len(self.strings)}"
        )
        if extra:
            line += " " + " ".join(f"{k}={v}" for k, v in extra.items())
        return line

    def save(self, path, extra=None):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.header(extra) + "\n")
            for s in self.strings:
                fh.write(s + "\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if not lines or not lines[0]:
            raise BankFormatError(f"{path}:1: missing bank header")
        tokens = lines[0].split()
        if len(tokens) < 2 or tokens[0] != BANK_MAGIC or tokens[1] != BANK_VERSION:
            raise BankFormatError(f"{path}:1: not a {BANK_MAGIC} {BANK_VERSION} file")
        kv = {}
        for tok in tokens[2:]:
            if "=" in tok:
                k, v = tok.split("=", 1)
                kv.setdefault(k, v)
        for req in ("strategy", "d_max", "seed", "R"):
            if req not in kv:
                raise BankFormatError(f"{path}:1: header missing {req}=")
        r = int(kv["R"])
        strings = []
        for i in range(r):
            lineno = i + 2
            if i + 1 >= len(lines) or not lines[i + 1]:
                raise BankFormatError(f"{path}:{lineno}: bank truncated, expected {r} strings")
            strings.append(lines[i + 1])
        config = SamplerConfig(strategy=kv["strategy"].lower(), d_max=int(kv["d_max"]), seed=int(kv["seed"]))
        return cls(strings=tuple(strings), config=config)


def draw_length(rng, d_max):
    """Uniform integer length in [1, d_max]."""
    return int(rng.integers(1, d_max + 1))


def sample_rf(alphabet, d, rng):
    """d characters i.i.d. uniform over the alphabet."""
    idx = rng.integers(0, len(alphabet), size=d)
    return "".join(alphabet.symbols[i] for i in idx)


def sample_rfd(hist, d, rng):
    """d characters i.i.d. from the training character frequencies."""
    idx = rng.choice(len(hist.symbols), size=d, p=hist.probabilities)
    return "".join(hist.symbols[i] for i in idx)


def sample_ss(train_strings, d, rng):
    """A contiguous length-d substring of a uniformly chosen training string.

    If the chosen string is shorter than d, a different string is drawn (a
    bounded number of times); as a last resort d is clamped and the whole
    string returned.
    """
    if not train_strings:
        raise DatasetError("substring sampling needs a nonempty training set")
    s = train_strings[int(rng.integers(0, len(train_strings)))]
    for _ in range(_SS_RESAMPLE_ATTEMPTS):
        if len(s) >= d:
            break
        s = train_strings[int(rng.integers(0, len(train_strings)))]
    if len(s) < d:
        return s
    start = int(rng.integers(0, len(s) - d + 1))
    return s[start : start + d]


def sample_bss(train_strings, d, rng):
    """Blocks of length d cut from a uniformly chosen training string.

    The string is partitioned into floor(L/d) consecutive blocks (remainder
    dropped); a uniform number of block indices is drawn with replacement and
    the distinct block values returned.  Strings shorter than d yield the
    whole string as a single block.
    """
    if not train_strings:
        raise DatasetError("block sampling needs a nonempty training set")
    s = train_strings[int(rng.integers(0, len(train_strings)))]
    b = len(s) // d
    if b == 0:
        return [s]
    blocks = [s[k * d : (k + 1) * d] for k in range(b)]
    count = int(rng.integers(1, b + 1))
    picked = rng.integers(0, b, size=count)
    out = []
    seen = set()
    for k in picked:
        blk = blocks[int(k)]
        if blk not in seen:
            seen.add(blk)
            out.append(blk)
    return out


def build_bank(ds, config, r):
    """Generate exactly r reference strings from the dataset's training
    partition under the given strategy.

    Pure function of (dataset, config, r): slot j derives its own sub-stream,
    and the block strategy's variable per-iteration yield is truncated at r.
    """
    if r < 1:
        raise ValueError(f"bank size must be >= 1, got {r}")
    if config.strategy in DATA_DEPENDENT and ds.max_length and config.d_max > ds.max_length:
        raise ValueError(
            f"d_max={config.d_max} exceeds the longest training string ({ds.max_length}) "
            f"for data-dependent strategy {config.strategy!r}"
        )
    train = ds.train_strings
    hist = None
    if config.strategy == "rfd":
        hist = CharacterHistogram.from_strings(ds.alphabet, train)

    strings = []
    j = 0
    while len(strings) < r:
        rng = substream(config.seed, "bank", j)
        d = draw_length(rng, config.d_max)
        if config.strategy == "rf":
            strings.append(sample_rf(ds.alphabet, d, rng))
        elif config.strategy == "rfd":
            strings.append(sample_rfd(hist, d, rng))
        elif config.strategy == "ss":
            strings.append(sample_ss(train, d, rng))
        else:
            strings.extend(sample_bss(train, d, rng))
        j += 1
    return RandomStringBank(strings=tuple(strings[:r]), config=config)
