"""Dense feature matrices over a reference-string bank.

Row i, column j holds feature(x_i, w_j) / sqrt(R), so the inner product of
two rows is the R-sample Monte-Carlo estimate of the underlying kernel.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .distance import FeatureParams, apply_feature_map, distance_matrix
from .sampler import RandomStringBank


class EmbeddingFormatError(ValueError):
    """Corrupt embedding file or mismatched bank fingerprint."""


def _params_tag(params):
    if params.map_kind == "df":
        return "df"
    return f"sf:gamma={params.gamma!r}"


@dataclass(frozen=True)
class EmbeddingMatrix:
    values: np.ndarray  # n x R float64, includes the 1/sqrt(R) factor
    row_ids: tuple
    bank_fingerprint: str

    @property
    def r(self):
        return self.values.shape[1]

    def __len__(self):
        return self.values.shape[0]


def bank_fingerprint(bank, params):
    h = hashlib.sha256()
    h.update(bank.fingerprint().encode())
    h.update(_params_tag(params).encode())
    return h.hexdigest()


def embed(strings, bank, params, workers=None, row_ids=None):
    """Embed strings against the bank: values[i, j] = feature(x_i, w_j)/sqrt(R).

    Distances are exact integers, so the result is bit-identical for any
    worker count.
    """
    if len(bank) == 0:
        raise ValueError("bank is empty")
    dist = distance_matrix(strings, bank.strings, workers=workers)
    values = apply_feature_map(dist, params) / math.sqrt(len(bank))
    if row_ids is None:
        row_ids = tuple(range(len(strings)))
    return EmbeddingMatrix(values=values, row_ids=tuple(row_ids), bank_fingerprint=bank_fingerprint(bank, params))


def embed_with_saved_bank(strings, bank_path, params, workers=None, row_ids=None):
    """Embed against a bank deserialized from disk; identical to the in-memory
    path for the same bank."""
    bank = RandomStringBank.load(bank_path)
    return embed(strings, bank, params, workers=workers, row_ids=row_ids)


def check_same_bank(a, b):
    """Raise unless two embeddings were built from the same bank and params."""
    if a.bank_fingerprint != b.bank_fingerprint:
        raise EmbeddingFormatError(
            f"embeddings come from different banks/params: "
            f"{a.bank_fingerprint[:12]} vs {b.bank_fingerprint[:12]}"
        )


def write_dense(em, labels, path, header_lines=()):
    """Dense text export: '#' header lines, then 'label v1 v2 ...' per row."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"# fingerprint {em.bank_fingerprint}\n")
        for i, label in enumerate(labels):
            row = " ".join("%.17g" % v for v in em.values[i])
            fh.write(f"{label} {row}\n")


def write_svmlight(em, labels, path, header_lines=()):
    """Sparse 'label idx:val ...' export with 1-based indices."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"# fingerprint {em.bank_fingerprint}\n")
        for i, label in enumerate(labels):
            pairs = " ".join(
                "%d:%.17g" % (j + 1, v) for j, v in enumerate(em.values[i]) if v != 0.0
            )
            fh.write(f"{label} {pairs}\n")


def read_embeddings(path):
    """Read either export format back into (values, labels, fingerprint)."""
    labels = []
    rows = []
    fingerprint = ""
    width = 0
    sparse = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "fingerprint":
                    fingerprint = parts[1]
                continue
            fields = line.split()
            labels.append(fields[0])
            try:
                if any(":" in f for f in fields[1:]):
                    sparse = True
                    row = {}
                    for f in fields[1:]:
                        idx, val = f.split(":", 1)
                        row[int(idx)] = float(val)
                    width = max(width, max(row, default=0))
                    rows.append(row)
                else:
                    row = [float(f) for f in fields[1:]]
                    width = max(width, len(row))
                    rows.append(row)
            except ValueError as exc:
                raise EmbeddingFormatError(f"{path}:{lineno}: {exc}") from exc
    values = np.zeros((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if sparse:
            for idx, val in row.items():
                values[i, idx - 1] = val
        else:
            values[i, : len(row)] = row
    return values, labels, fingerprint
