"""Fuzz and negation perturbations via single-token insertion.

Both perturbations share one algorithm: enumerate every (term, slot) pair,
shuffle the pool with a seeded Fisher-Yates, keep the first ``min(X, W*T)``
pairs and realize each as a new sentence. Fuzzing inserts articles and keeps
the concept; negation inserts a negation particle and flips it. Terms are
inserted in front of a word, never appended after the final one.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

from .corpus import Language, Sentence

FUZZ_TERMS = {Language.NL: ("de", "het"), Language.EN: ("a", "the")}
NEGATION_TERMS = {Language.NL: ("niet",), Language.EN: ("not",)}

# Auxiliaries whose following position admits a grammatical "not" in English.
EN_AUXILIARIES = frozenset({
    "is", "are", "was", "were", "am", "be",
    "can", "could", "will", "would", "shall", "should", "must", "may", "might",
    "do", "does", "did", "has", "have", "had",
})


class Mode(str, Enum):
    FUZZ = "fuzz"
    NEGATE = "negate"


@dataclass(frozen=True)
class TermTable:
    """Insertable terms per perturbation mode for one language."""

    language: Language
    fuzz_terms: tuple[str, ...]
    negation_terms: tuple[str, ...]

    @classmethod
    def for_language(cls, language: Language) -> "TermTable":
        return cls(language=language,
                   fuzz_terms=FUZZ_TERMS[language],
                   negation_terms=NEGATION_TERMS[language])


@dataclass(frozen=True)
class PerturbedSentence:
    """One variant: *inserted_term* placed in front of token[*slot*]."""

    text: str
    inserted_term: str
    slot: int


@dataclass(frozen=True)
class PerturbationSet:
    """All variants generated for one sentence under one mode."""

    original_id: int
    mode: Mode
    variants: tuple[PerturbedSentence, ...]


def insertion_slots(tokens: Iterable[str]) -> list[int]:
    """Viable insertion positions: in front of each word, 0..W-1."""
    return list(range(len(list(tokens))))


def derive_seed(global_seed: int, sentence_id: int, mode: Mode) -> int:
    """Stable per-(sentence, mode) RNG seed.

    Keyed hashing keeps every sentence on its own stream, so corpus-level
    parallelism or reordering cannot change any sentence's variants.
    """
    key = f"{global_seed}:{sentence_id}:{mode.value}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _realize(tokens: tuple[str, ...], term: str, slot: int) -> PerturbedSentence:
    new_tokens = list(tokens[:slot]) + [term] + list(tokens[slot:])
    return PerturbedSentence(text=" ".join(new_tokens), inserted_term=term, slot=slot)


def _draw(tokens: tuple[str, ...], candidates: list[tuple[str, int]],
          max_variants: int, seed: int) -> tuple[PerturbedSentence, ...]:
    rng = random.Random(seed)
    pool = list(candidates)
    rng.shuffle(pool)
    return tuple(_realize(tokens, term, slot) for term, slot in pool[:max_variants])


def generate_variants(sentence: Sentence, terms: Iterable[str],
                      max_variants: int, seed: int) -> list[PerturbedSentence]:
    """Insert each of *terms* in front of each word, capped at *max_variants*.

    The candidate pool is built in canonical order (term-table order major,
    slot ascending minor), shuffled by a Fisher-Yates seeded with *seed*, and
    truncated to ``min(max_variants, W*T)``. Distinct (term, slot) pairs only;
    variant texts may still collide as strings when adjacent tokens repeat.
    """
    terms = tuple(terms)
    if not terms:
        raise ValueError("terms must be non-empty")
    if max_variants < 1:
        raise ValueError("max_variants must be >= 1")
    if not sentence.tokens:
        raise ValueError("no insertion slots")
    slots = insertion_slots(sentence.tokens)
    candidates = [(term, slot) for term in terms for slot in slots]
    return list(_draw(sentence.tokens, candidates, max_variants, seed))


def fuzz(sentence: Sentence, table: TermTable, max_variants: int,
         seed: int) -> PerturbationSet:
    """Surface-level perturbation: article insertion."""
    variants = generate_variants(sentence, table.fuzz_terms, max_variants,
                                 derive_seed(seed, sentence.id, Mode.FUZZ))
    return PerturbationSet(original_id=sentence.id, mode=Mode.FUZZ,
                           variants=tuple(variants))


def negate(sentence: Sentence, table: TermTable, max_variants: int,
           seed: int) -> PerturbationSet:
    """Semantic perturbation: negation-particle insertion."""
    variants = generate_variants(sentence, table.negation_terms, max_variants,
                                 derive_seed(seed, sentence.id, Mode.NEGATE))
    return PerturbationSet(original_id=sentence.id, mode=Mode.NEGATE,
                           variants=tuple(variants))


def grammar_negate_en(sentence: Sentence, max_variants: int,
                      seed: int) -> PerturbationSet:
    """English negation restricted to positions directly after an auxiliary.

    If the sentence contains no auxiliary (or only a sentence-final one, which
    contributes no slot), the full ``negate()`` pool is used instead.
    """
    if sentence.language != Language.EN:
        raise ValueError("grammar-aware negation is English-only")
    if not sentence.tokens:
        raise ValueError("no insertion slots")

    aux_slots = [i + 1 for i, tok in enumerate(sentence.tokens[:-1])
                 if tok.lower() in EN_AUXILIARIES]
    table = TermTable.for_language(Language.EN)
    if not aux_slots:
        return negate(sentence, table, max_variants, seed)

    candidates = [(term, slot) for term in table.negation_terms for slot in aux_slots]
    variants = _draw(sentence.tokens, candidates, max_variants,
                     derive_seed(seed, sentence.id, Mode.NEGATE))
    return PerturbationSet(original_id=sentence.id, mode=Mode.NEGATE,
                           variants=variants)


TSV_COLUMNS = ("original_id", "mode", "inserted_term", "slot", "text")


def dump_tsv(sets: Iterable[PerturbationSet], out: IO[str]) -> int:
    """Write perturbation sets as TSV; returns the number of variant rows."""
    out.write("\t".join(TSV_COLUMNS) + "\n")
    rows = 0
    for pset in sets:
        for v in pset.variants:
            out.write(f"{pset.original_id}\t{pset.mode.value}\t"
                      f"{v.inserted_term}\t{v.slot}\t{v.text}\n")
            rows += 1
    return rows
