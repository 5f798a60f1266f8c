"""Synthetic splice-junction-style dataset used where the real DNA data is
unavailable.

Three classes of length-60 DNA strings: donor-motif strings, acceptor-motif
strings, and background.  Motifs sit near the center with positional jitter
and per-character mutation noise, so classification is learnable but not
trivial."""

from strembed.data import Alphabet, LabeledString, SequenceDataset
from strembed.rng import substream

ALPHABET = "ACGT"
LENGTH = 60

DONOR = "CAGGTAAGT"  # exon/intron boundary consensus
ACCEPTOR = "TTTTTTTCAGG"  # pyrimidine tract + acceptor consensus


def _background(rng, n):
    probs = [0.27, 0.23, 0.23, 0.27]
    idx = rng.choice(4, size=n, p=probs)
    return "".join(ALPHABET[i] for i in idx)


def _with_motif(rng, motif, mutation_rate=0.08, jitter=3):
    s = list(_background(rng, LENGTH))
    center = LENGTH // 2 - len(motif) // 2
    start = center + int(rng.integers(-jitter, jitter + 1))
    for k, ch in enumerate(motif):
        if rng.random() < mutation_rate:
            ch = ALPHABET[int(rng.integers(0, 4))]
        s[start + k] = ch
    return "".join(s)


def make_splice_like(n=3190, seed=7):
    """Unsplit dataset of n records with roughly 25/25/50 class priors."""
    rng = substream(seed, "surrogate")
    records = []
    for _ in range(n):
        u = rng.random()
        if u < 0.25:
            records.append(LabeledString(_with_motif(rng, DONOR), 0))
        elif u < 0.5:
            records.append(LabeledString(_with_motif(rng, ACCEPTOR), 1))
        else:
            records.append(LabeledString(_background(rng, LENGTH), 2))
    return SequenceDataset(
        alphabet=Alphabet(tuple(ALPHABET)),
        train=tuple(records),
        test=(),
        label_names=("EI", "IE", "N"),
    )
