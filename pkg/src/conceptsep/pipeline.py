"""Full evaluation pipeline: corpus -> fuzz/negate -> embed -> curves -> report.

One run evaluates every configured embedder on one corpus. A failing
(embedder, dataset) combination is recorded in the manifest and does not
abort the remaining combinations. Everything except timestamps and wall time
is fully determined by the corpus bytes and the configuration.
"""

from __future__ import annotations

import datetime
import json
import re
import time
import warnings
from pathlib import Path

from .config import RunConfig
from .corpus import Corpus, Language, filter_by_length, load_corpus
from .curves import build_csc_from_samples, similarity_samples
from .embed import build_embedder
from .perturb import (Mode, PerturbationSet, TermTable, fuzz, grammar_negate_en,
                      negate)
from .report import export_csv, overlap_matrix, render_curves

MANIFEST_NAME = "manifest.json"
MATRIX_CSV_NAME = "overlap_matrix.csv"
MATRIX_TXT_NAME = "overlap_matrix.txt"


def safe_name(name: str) -> str:
    """Filesystem-safe artifact name component."""
    return re.sub(r"[^A-Za-z0-9.-]+", "_", name)


def generate_perturbations(corpus: Corpus, x: int, seed: int,
                           grammar_negation: bool = False) -> list[PerturbationSet]:
    """Fuzz and negation sets for every sentence of *corpus*."""
    if grammar_negation and corpus.language is not Language.EN:
        raise ValueError("grammar-aware negation is English-only")
    table = TermTable.for_language(corpus.language)
    sets: list[PerturbationSet] = []
    for sentence in corpus:
        sets.append(fuzz(sentence, table, x, seed))
        if grammar_negation:
            sets.append(grammar_negate_en(sentence, x, seed))
        else:
            sets.append(negate(sentence, table, x, seed))
    return sets


def run_pipeline(config: RunConfig) -> dict:
    """Execute the configured run and return the manifest (also written to
    ``<out>/manifest.json``)."""
    config.validate()
    t0 = time.monotonic()

    corpus = load_corpus(config.corpus, config.language)
    loaded = corpus.n
    if config.filter_max_tokens is not None:
        corpus = filter_by_length(corpus, config.filter_max_tokens)
    if corpus.n == 0:
        raise ValueError("corpus has no sentences"
                         + (" after length filtering" if loaded else ""))

    sets = generate_perturbations(corpus, config.x, config.seed,
                                  config.grammar_negation)
    n_fuzz = sum(len(p.variants) for p in sets if p.mode is Mode.FUZZ)
    n_neg = sum(len(p.variants) for p in sets if p.mode is Mode.NEGATE)
    fit_texts = [s.text for s in corpus] + [v.text for p in sets for v in p.variants]

    dataset = Path(config.corpus).stem
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    combinations = []
    results = {}
    for spec in config.embedders:
        entry: dict = {"embedder": spec.name, "dataset": dataset}
        try:
            embedder = build_embedder(spec, fit_texts, jobs=config.jobs)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                samples = similarity_samples(corpus, sets, embedder,
                                             jobs=config.jobs)
            result = build_csc_from_samples(samples, config.resolution)
            base = f"{safe_name(dataset)}__{safe_name(spec.name)}"
            csv_path = export_csv(result, out_dir / f"{base}.csv")
            svg_path = render_curves(result, f"{dataset} / {spec.name}",
                                     out_dir / f"{base}.svg")
            expected = n_fuzz + n_neg
            entry.update({
                "status": "ok",
                "overlap": result.overlap,
                "samples": result.sample_counts,
                "skipped_variants": expected - len(samples),
                "warnings": [str(w.message) for w in caught],
                "csv": csv_path.name,
                "svg": svg_path.name,
            })
            results[(spec.name, dataset)] = result
        except Exception as exc:  # keep evaluating the other combinations
            entry.update({"status": "failed", "error": str(exc)})
        combinations.append(entry)

    matrix_files = {}
    if results:
        matrix = overlap_matrix(results)
        (out_dir / MATRIX_CSV_NAME).write_text(matrix.to_csv_text(),
                                               encoding="utf-8", newline="\n")
        (out_dir / MATRIX_TXT_NAME).write_text(matrix.to_text(),
                                               encoding="utf-8", newline="\n")
        matrix_files = {"matrix_csv": MATRIX_CSV_NAME,
                        "matrix_txt": MATRIX_TXT_NAME}

    manifest = {
        "config": config.to_dict(),
        "dataset": dataset,
        "corpus": {
            "path": str(config.corpus),
            "language": config.language.value,
            "sentences_loaded": loaded,
            "sentences_used": corpus.n,
        },
        "perturbation": {
            "x": config.x,
            "seed": config.seed,
            "grammar_negation": config.grammar_negation,
            "fuzz_variants": n_fuzz,
            "negation_variants": n_neg,
            "variant_bound_2xn": 2 * config.x * corpus.n,
        },
        "combinations": combinations,
        **matrix_files,
        "wall_time_seconds": round(time.monotonic() - t0, 3),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    (out_dir / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8", newline="\n")
    return manifest


def all_succeeded(manifest: dict) -> bool:
    return all(c["status"] == "ok" for c in manifest["combinations"])
