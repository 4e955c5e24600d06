"""Duplicate-question detection: text and image-augmented ranking.

Thin wrapper over the compiled `_dupq` module. The heavy lifting
(corpus preparation, tf-idf, training, ranking, evaluation) happens in
C++; this package adds JSON decoding and a stable import surface.
"""

import json as _json

from ._dupq import (
    ConfigError,
    DataError,
    Error,
    Featurizer,
    PairBuild,
    ParseError,
    ProviderError,
    Question,
    QuestionPair,
    TrainedModel,
    build_featurizer,
    build_pairs,
    candidate_pool,
    combined_image_similarity,
    config_feature_names,
    config_names,
    cosine,
    delta_audit,
    entity_overlap,
    feature_names,
    filter_image_questions,
    load_corpus,
    porter_stem,
    rank,
    recall_rate,
    run_matrix_json,
    similarity_delta,
    split_pairs,
    term_overlap,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "Featurizer",
    "PairBuild",
    "ParseError",
    "ProviderError",
    "Question",
    "QuestionPair",
    "TrainedModel",
    "build_featurizer",
    "build_pairs",
    "candidate_pool",
    "combined_image_similarity",
    "config_feature_names",
    "config_names",
    "cosine",
    "delta_audit",
    "entity_overlap",
    "feature_names",
    "filter_image_questions",
    "load_corpus",
    "porter_stem",
    "rank",
    "recall_rate",
    "run_matrix",
    "run_matrix_json",
    "similarity_delta",
    "split_pairs",
    "term_overlap",
    "train",
]


def run_matrix(questions, **kwargs):
    """Run the full evaluation matrix and return the report as a dict.

    Accepts the same keyword arguments as :func:`run_matrix_json`
    (pairing_seed, train_fraction, split_seed, training_seed,
    image_cache, synonyms_csv, configs, k_values, pool,
    split_image_features, jobs).
    """
    return _json.loads(run_matrix_json(questions, **kwargs))
