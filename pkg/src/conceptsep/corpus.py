"""Corpus loading, tokenization, length filtering and token-count statistics.

A corpus is a UTF-8 plain-text file with one sentence per line (LF or CRLF).
Blank lines are skipped. Tokenization is pure whitespace splitting; punctuation
stays attached to tokens.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class Language(str, Enum):
    NL = "nl"
    EN = "en"

    @classmethod
    def parse(cls, value: str) -> "Language":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown language {value!r}; expected one of: "
                             + ", ".join(m.value for m in cls)) from None


def tokenize(text: str) -> list[str]:
    """Split *text* into maximal runs of non-whitespace characters, in order."""
    return text.split()


@dataclass(frozen=True)
class Sentence:
    """One corpus entry with its whitespace token decomposition."""

    id: int
    text: str
    tokens: tuple[str, ...]
    language: Language

    def __post_init__(self):
        if self.id < 0:
            raise ValueError("sentence id must be non-negative")
        if list(self.tokens) != tokenize(self.text):
            raise ValueError("tokens do not match whitespace tokenization of text")

    @classmethod
    def make(cls, id: int, text: str, language: Language) -> "Sentence":
        return cls(id=id, text=text, tokens=tuple(tokenize(text)), language=language)


@dataclass(frozen=True)
class Corpus:
    """Ordered, immutable collection of sentences in one language."""

    sentences: tuple[Sentence, ...]
    language: Language

    def __post_init__(self):
        ids = [s.id for s in self.sentences]
        if len(set(ids)) != len(ids):
            raise ValueError("sentence ids must be unique within a corpus")

    @property
    def n(self) -> int:
        return len(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


def load_corpus(path: str | Path, language: Language) -> Corpus:
    """Load a one-sentence-per-line UTF-8 corpus.

    Blank (whitespace-only) lines are skipped; ids are assigned in file order
    starting at 0 over the retained sentences. Invalid UTF-8 is reported with
    the 1-based line number.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read corpus file {path}: {exc}") from exc

    sentences: list[Sentence] = []
    next_id = 0
    for lineno, line in enumerate(raw.split(b"\n"), start=1):
        line = line.rstrip(b"\r")
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValueError(f"{path}: invalid UTF-8 on line {lineno}: {exc}") from exc
        if not text.strip():
            continue
        sentences.append(Sentence.make(next_id, text, language))
        next_id += 1
    return Corpus(sentences=tuple(sentences), language=language)


def filter_by_length(corpus: Corpus, max_tokens: int) -> Corpus:
    """Retain sentences with token count strictly below *max_tokens*.

    Ids are preserved from the source corpus, so they may become
    non-contiguous.
    """
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    kept = tuple(s for s in corpus.sentences if len(s.tokens) < max_tokens)
    return Corpus(sentences=kept, language=corpus.language)


@dataclass(frozen=True)
class TokenBin:
    lower: int
    upper: int | None  # None marks the final open bin
    percentage: float

    @property
    def label(self) -> str:
        if self.upper is None:
            return f">={self.lower}"
        return f"{self.lower}-{self.upper}"


@dataclass(frozen=True)
class TokenBinTable:
    """Percentage of sentences per token-count range, plus the sentence total."""

    bins: tuple[TokenBin, ...] = field(default_factory=tuple)
    total_sentences: int = 0


def token_bin_stats(corpus: Corpus, bin_width: int = 10) -> TokenBinTable:
    """Histogram sentence lengths into five closed bins plus one open bin.

    With the default width of 10 the bins are [0,10), [10,20), ..., [40,50)
    and >=50. Percentages are relative to the corpus size and sum to 100.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    if corpus.n == 0:
        raise ValueError("no sentences")

    open_start = 5 * bin_width
    counts = [0] * 6
    for sentence in corpus:
        w = len(sentence.tokens)
        if w >= open_start:
            counts[5] += 1
        else:
            counts[w // bin_width] += 1

    bins = []
    for i, count in enumerate(counts):
        lower = i * bin_width
        upper = None if i == 5 else lower + bin_width
        bins.append(TokenBin(lower, upper, 100.0 * count / corpus.n))
    return TokenBinTable(bins=tuple(bins), total_sentences=corpus.n)


def format_token_bin_table(table: TokenBinTable, name: str = "corpus") -> str:
    """Render a TokenBinTable as an aligned plain-text table."""
    width = max(len(name), 10)
    lines = [f"{'# Tokens':<10} {name:>{width}}"]
    for b in table.bins:
        lines.append(f"{b.label:<10} {b.percentage:>{width - 1}.2f}%")
    lines.append(f"{'Sentences':<10} {table.total_sentences:>{width}}")
    return "\n".join(lines)


def demo_corpus_path(language: Language) -> Path:
    """Path to the bundled demo corpus for *language*."""
    resource = importlib.resources.files("conceptsep") / "data" / f"demo_{language.value}.txt"
    return Path(str(resource))
