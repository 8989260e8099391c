"""Concept separation analysis for sentence embedders.

Generates surface-level (fuzz: article insertion) and semantic (negation:
particle insertion) perturbations of a corpus, embeds originals and variants,
and summarizes each embedder's behaviour as a pair of normalized cosine
similarity density curves plus their overlap: 0 means the embedder cleanly
separates meaning changes from surface noise, 1 means it cannot tell them
apart.
"""

from .corpus import (Corpus, Language, Sentence, TokenBinTable, demo_corpus_path,
                     filter_by_length, format_token_bin_table, load_corpus,
                     token_bin_stats, tokenize)
from .curves import (CscResult, DensityCurve, SimilaritySample, build_csc,
                     build_csc_from_samples, cosine, kde, normalize, overlap,
                     scott_bandwidth, similarity_samples, uniform_grid)
from .embed import (AverageVectorEmbedder, EmbedderKind, EmbedderSpec,
                    PositionHashEmbedder, RemoteEmbedder, RemoteEmbeddingError,
                    TfidfEmbedder, TfidfModel, WordVectorTable, build_embedder,
                    embed_average, embed_tfidf, fit_tfidf, load_word_vectors,
                    parse_embedder_spec)
from .perturb import (Mode, PerturbationSet, PerturbedSentence, TermTable,
                      dump_tsv, fuzz, generate_variants, grammar_negate_en,
                      insertion_slots, negate)
from .report import (OverlapMatrix, export_csv, overlap_matrix, read_csv_curves,
                     render_curves)
from .config import RunConfig, make_run_config, parse_config_file
from .pipeline import generate_perturbations, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AverageVectorEmbedder", "Corpus", "CscResult", "DensityCurve",
    "EmbedderKind", "EmbedderSpec", "Language", "Mode", "OverlapMatrix",
    "PerturbationSet", "PerturbedSentence", "PositionHashEmbedder",
    "RemoteEmbedder", "RemoteEmbeddingError", "RunConfig", "Sentence",
    "SimilaritySample", "TermTable", "TfidfEmbedder", "TfidfModel",
    "TokenBinTable", "WordVectorTable", "build_csc", "build_csc_from_samples",
    "build_embedder", "cosine", "demo_corpus_path", "dump_tsv", "embed_average",
    "embed_tfidf", "export_csv", "filter_by_length", "fit_tfidf",
    "format_token_bin_table", "fuzz", "generate_perturbations",
    "generate_variants", "grammar_negate_en", "insertion_slots", "kde",
    "load_corpus", "load_word_vectors", "make_run_config", "negate",
    "normalize", "overlap", "overlap_matrix", "parse_config_file",
    "parse_embedder_spec", "read_csv_curves", "render_curves", "run_pipeline",
    "scott_bandwidth", "similarity_samples", "token_bin_stats", "tokenize",
    "uniform_grid",
]
