"""Run configuration: documented flat key=value config files plus overrides.

Config file format: one ``key = value`` pair per line, ``#`` starts a
full-line comment, blank lines are ignored. ``embedder`` may repeat. Flags
given on the command line override file values.

Recognized keys::

    corpus             path to the corpus file (one sentence per line)
    language           nl | en
    embedder           tfidf | hash | wordavg:PATH | remote:MODEL[@URL]   (repeatable)
    x                  max variants per sentence per mode (default 3)
    seed               global RNG seed (default 0)
    resolution         grid points over [-1, 1] (default 512, minimum 16)
    filter_max_tokens  keep sentences with fewer tokens than this (optional)
    grammar_negation   true | false, English corpora only (default false)
    endpoint           default endpoint for remote embedders
    out                output directory (default out)
    jobs               worker threads (default: available parallelism)
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Language
from .embed import EmbedderSpec, parse_embedder_spec

_SCALAR_KEYS = ("corpus", "language", "x", "seed", "resolution",
                "filter_max_tokens", "grammar_negation", "endpoint", "out", "jobs")
KNOWN_KEYS = _SCALAR_KEYS + ("embedder",)

_BOOLEANS = {"true": True, "yes": True, "1": True,
             "false": False, "no": False, "0": False}


def default_jobs() -> int:
    return os.cpu_count() or 1


@dataclass
class RunConfig:
    """Everything one evaluation run depends on, besides the corpus bytes."""

    corpus: Path
    language: Language
    embedders: tuple[EmbedderSpec, ...]
    x: int = 3
    seed: int = 0
    resolution: int = 512
    filter_max_tokens: int | None = None
    grammar_negation: bool = False
    endpoint: str | None = None
    out_dir: Path = Path("out")
    jobs: int = field(default_factory=default_jobs)

    def validate(self) -> None:
        if self.x < 1:
            raise ValueError("x must be >= 1")
        if self.resolution < 16:
            raise ValueError("resolution must be >= 16")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.filter_max_tokens is not None and self.filter_max_tokens < 1:
            raise ValueError("filter_max_tokens must be >= 1")
        if self.grammar_negation and self.language is not Language.EN:
            raise ValueError("grammar_negation requires an English corpus")
        if not self.embedders:
            raise ValueError("at least one embedder is required")

    def to_dict(self) -> dict:
        return {
            "corpus": str(self.corpus),
            "language": self.language.value,
            "embedders": [spec.name for spec in self.embedders],
            "x": self.x,
            "seed": self.seed,
            "resolution": self.resolution,
            "filter_max_tokens": self.filter_max_tokens,
            "grammar_negation": self.grammar_negation,
            "endpoint": self.endpoint,
            "out": str(self.out_dir),
            "jobs": self.jobs,
        }


def parse_config_file(path: str | Path) -> dict:
    """Parse a key=value config file into {key: str} / {"embedder": [str]}."""
    path = Path(path)
    values: dict = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(),
                                 start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
        if key == "embedder":
            values.setdefault("embedder", []).append(value)
        elif key in values:
            raise ValueError(f"{path}: line {lineno}: duplicate key {key!r}")
        else:
            values[key] = value
    return values


def _to_bool(value: str) -> bool:
    try:
        return _BOOLEANS[value.strip().lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {value!r}") from None


def make_run_config(file_values: dict | None = None, **overrides) -> RunConfig:
    """Merge config-file values and flag overrides into a validated RunConfig.

    *overrides* use None for "not given"; any non-None override wins over the
    file value.
    """
    merged: dict = {}
    if file_values:
        for key, value in file_values.items():
            if key == "embedder":
                merged["embedder"] = list(value)
            elif key in ("x", "seed", "resolution", "filter_max_tokens", "jobs"):
                merged[key] = int(value)
            elif key == "grammar_negation":
                merged[key] = _to_bool(value)
            else:
                merged[key] = value
    for key, value in overrides.items():
        if key not in KNOWN_KEYS:
            raise ValueError(f"unknown config override {key!r}")
        if value is not None:
            merged[key] = value

    if "corpus" not in merged:
        raise ValueError("corpus is required (config key 'corpus' or --corpus)")
    if "language" not in merged:
        raise ValueError("language is required (config key 'language' or --language)")

    endpoint = merged.get("endpoint")
    spec_strings = merged.get("embedder") or []
    embedders = tuple(parse_embedder_spec(s, default_endpoint=endpoint)
                      for s in spec_strings)

    language = merged["language"]
    if not isinstance(language, Language):
        language = Language.parse(str(language))

    config = RunConfig(
        corpus=Path(merged["corpus"]),
        language=language,
        embedders=embedders,
        x=int(merged.get("x", 3)),
        seed=int(merged.get("seed", 0)),
        resolution=int(merged.get("resolution", 512)),
        filter_max_tokens=(int(merged["filter_max_tokens"])
                           if merged.get("filter_max_tokens") is not None else None),
        grammar_negation=bool(merged.get("grammar_negation", False)),
        endpoint=endpoint,
        out_dir=Path(merged.get("out", "out")),
        jobs=int(merged.get("jobs", default_jobs())),
    )
    config.validate()
    return config
