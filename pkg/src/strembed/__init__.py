"""Fixed-dimension string embeddings built from edit distances to random
reference strings, with linear classification and kernel diagnostics."""

from .data import Alphabet, LabeledString, SequenceDataset, parse_dataset, split_dataset
from .distance import FeatureParams, feature, levenshtein, naive_levenshtein_oracle
from .embedding import EmbeddingMatrix, embed, embed_with_saved_bank
from .sampler import CharacterHistogram, RandomStringBank, SamplerConfig, build_bank
from .svm import EvalReport, LinearModel, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "CharacterHistogram",
    "EmbeddingMatrix",
    "EvalReport",
    "FeatureParams",
    "LabeledString",
    "LinearModel",
    "RandomStringBank",
    "SamplerConfig",
    "SequenceDataset",
    "build_bank",
    "embed",
    "embed_with_saved_bank",
    "evaluate",
    "feature",
    "levenshtein",
    "naive_levenshtein_oracle",
    "parse_dataset",
    "split_dataset",
    "train",
]
