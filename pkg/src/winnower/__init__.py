"""Corpus winnowing toolkit.

Ranks a large document corpus against a small seed corpus by word-distribution
divergence, cuts it down by percentile, supports expert relevance labeling of
sampled tranches, reseeds from the labels, and audits each stage with an LDA
topic model.
"""

__version__ = "0.1.0"

from .corpus import Corpus, Document, NormalizationConfig, Vocabulary, ingest_corpus, normalize
from .distributions import SmoothingConfig, WordDistribution, build_distribution, pool_seeds, smooth
from .divergence import DivergenceScore, Metric, jsd, kld, score_corpus, symmetric_kld
from .winnow import Label, Tranche, cut, hit_rate_of, sample_tranches

__all__ = [
    "Corpus",
    "Document",
    "NormalizationConfig",
    "Vocabulary",
    "ingest_corpus",
    "normalize",
    "SmoothingConfig",
    "WordDistribution",
    "build_distribution",
    "pool_seeds",
    "smooth",
    "DivergenceScore",
    "Metric",
    "jsd",
    "kld",
    "score_corpus",
    "symmetric_kld",
    "Label",
    "Tranche",
    "cut",
    "hit_rate_of",
    "sample_tranches",
]
