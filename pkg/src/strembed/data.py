"""Labeled string datasets: parsing, alphabet handling, and splits.

Two on-disk formats are supported: tab-separated ``label<TAB>string`` lines,
and a FASTA-like format where a ``>label`` header precedes one or more
sequence lines that are concatenated into a single record.
"""

from dataclasses import dataclass, replace
from functools import cached_property

from .rng import substream

FORMAT_TSV = "tsv"
FORMAT_FASTA = "fasta"


class DatasetError(ValueError):
    """Malformed dataset file or invalid dataset operation."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of characters defining the symbol space."""

    symbols: tuple

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise DatasetError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise DatasetError("alphabet contains duplicate symbols")

    @cached_property
    def index(self):
        return {c: i for i, c in enumerate(self.symbols)}

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, c):
        return c in self.index

    @classmethod
    def from_strings(cls, strings):
        """Infer the alphabet as the sorted set of characters seen."""
        seen = set()
        for s in strings:
            seen.update(s)
        return cls(tuple(sorted(seen)))


@dataclass(frozen=True)
class LabeledString:
    """A record: the character sequence plus its dense 0-based class id."""

    text: str
    label: int

    def __len__(self):
        return len(self.text)


@dataclass(frozen=True)
class SequenceDataset:
    alphabet: Alphabet
    train: tuple
    test: tuple
    label_names: tuple  # original label tokens, position = dense class id

    def __post_init__(self):
        train_labels = {r.label for r in self.train}
        for r in self.test:
            if r.label not in train_labels:
                raise DatasetError(f"test label {self.label_names[r.label]!r} absent from training set")

    @property
    def num_classes(self):
        return len(self.label_names)

    @property
    def max_length(self):
        return max((len(r) for r in self.train + self.test), default=0)

    @property
    def train_strings(self):
        return [r.text for r in self.train]

    @property
    def test_strings(self):
        return [r.text for r in self.test]


def _read_tsv(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if "\t" not in line:
                raise DatasetError(f"{path}:{lineno}: expected 'label<TAB>string'")
            label, text = line.split("\t", 1)
            records.append((label, text, lineno))
    return records


def _read_fasta(path):
    records = []
    label = None
    chunks = []
    start_line = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                if label is not None:
                    records.append((label, "".join(chunks), start_line))
                label = line[1:].strip()
                chunks = []
                start_line = lineno
            else:
                if label is None:
                    raise DatasetError(f"{path}:{lineno}: sequence line before any '>label' header")
                chunks.append(line)
    if label is not None:
        records.append((label, "".join(chunks), start_line))
    return records


def parse_dataset(path, format=FORMAT_TSV, alphabet=None):
    """Parse a labeled string file into a dataset with all records in the
    training partition.

    Labels are mapped to dense 0-based ids in first-seen order.  The alphabet
    is inferred (sorted distinct characters) unless a fixed one is supplied,
    in which case out-of-alphabet characters are rejected.
    """
    if format == FORMAT_TSV:
        raw = _read_tsv(path)
    elif format == FORMAT_FASTA:
        raw = _read_fasta(path)
    else:
        raise DatasetError(f"unknown format {format!r}, expected 'tsv' or 'fasta'")

    label_ids = {}
    records = []
    for idx, (label, text, lineno) in enumerate(raw):
        if not text:
            raise DatasetError(f"{path}: record {idx} (line {lineno}) has an empty string")
        if alphabet is not None:
            for c in text:
                if c not in alphabet:
                    raise DatasetError(
                        f"{path}: record {idx} (line {lineno}) contains character {c!r} "
                        f"outside the fixed alphabet"
                    )
        if label not in label_ids:
            label_ids[label] = len(label_ids)
        records.append(LabeledString(text, label_ids[label]))
    if not records:
        raise DatasetError(f"{path}: no records")
    if alphabet is None:
        alphabet = Alphabet.from_strings(r.text for r in records)
    return SequenceDataset(
        alphabet=alphabet,
        train=tuple(records),
        test=(),
        label_names=tuple(label_ids),
    )


def load_train_test(train_path, test_path, format=FORMAT_TSV, alphabet=None):
    """Load a pre-split dataset from two files sharing one label map and
    alphabet."""
    if format == FORMAT_TSV:
        raw_tr, raw_te = _read_tsv(train_path), _read_tsv(test_path)
    elif format == FORMAT_FASTA:
        raw_tr, raw_te = _read_fasta(train_path), _read_fasta(test_path)
    else:
        raise DatasetError(f"unknown format {format!r}")
    label_ids = {}
    parts = []
    for path, raw in ((train_path, raw_tr), (test_path, raw_te)):
        recs = []
        for idx, (label, text, lineno) in enumerate(raw):
            if not text:
                raise DatasetError(f"{path}: record {idx} (line {lineno}) has an empty string")
            if label not in label_ids:
                label_ids[label] = len(label_ids)
            recs.append(LabeledString(text, label_ids[label]))
        parts.append(tuple(recs))
    if alphabet is None:
        alphabet = Alphabet.from_strings(r.text for part in parts for r in part)
    return SequenceDataset(alphabet=alphabet, train=parts[0], test=parts[1], label_names=tuple(label_ids))


def write_dataset(records, label_names, path, format=FORMAT_TSV):
    """Serialize records (train or test partition) back to disk."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            if format == FORMAT_TSV:
                fh.write(f"{label_names[r.label]}\t{r.text}\n")
            else:
                fh.write(f">{label_names[r.label]}\n{r.text}\n")


def split_dataset(ds, train_fraction, seed):
    """Deterministically shuffle and partition an unsplit dataset.

    Splits are unstratified: a uniform shuffle followed by a cut at
    ``round(n * train_fraction)``.
    """
    if ds.test:
        raise DatasetError("split_dataset expects an unsplit dataset (empty test partition)")
    if not 0 < train_fraction < 1:
        raise DatasetError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = substream(seed, "split")
    order = rng.permutation(len(ds.train))
    cut = int(round(len(ds.train) * train_fraction))
    train = tuple(ds.train[i] for i in order[:cut])
    test = tuple(ds.train[i] for i in order[cut:])
    return replace(ds, train=train, test=test)
