"""Run configuration: a key=value file plus command-line overrides.

The file format is one ``key = value`` pair per line; ``#`` starts a
comment; blank lines are skipped.  Relative paths are resolved against the
config file's directory, so a config can travel with its data.  Flags win
over file values, which keeps run manifests meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .prompts import PROMPT_STYLES, PromptTemplate
from .retrieval import Bm25Params
from .selection import MEASURES, ORDERS, RELEVANCE_NORMS, STRATEGIES, SelectionPlan

_PATH_KEYS = (
    "corpus_source",
    "corpus_target",
    "corpus_conllu",
    "test_source",
    "test_conllu",
    "out_dir",
)


@dataclass
class RunConfig:
    corpus_source: Path | None = None
    corpus_target: Path | None = None
    corpus_conllu: Path | None = None
    test_source: Path | None = None
    test_conllu: Path | None = None
    out_dir: Path = Path("out")
    strategy: str = "scoi"
    k: int = 4
    order: str = "syntax-first"
    measure: str = "normalized-manhattan"
    pool_size: int = 100
    dpp_lambda: float = 0.5
    relevance_norm: str = "reciprocal"
    seed: int = 0
    max_tokens: int = 120
    filter_target: bool = False
    fold_case: bool = False
    strip_punctuation: bool = False
    workers: int = 1
    prompt_style: str = "delimiter"
    source_language: str = "source"
    target_language: str = "target"
    bm25_k1: float = 1.5
    bm25_b: float = 0.75

    def validate(self) -> None:
        if self.strategy not in STRATEGIES + ("all",):
            raise ConfigError(f"strategy must be one of {STRATEGIES + ('all',)}, got {self.strategy!r}")
        if self.order not in ORDERS:
            raise ConfigError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.measure not in MEASURES:
            raise ConfigError(f"measure must be one of {MEASURES}, got {self.measure!r}")
        if self.relevance_norm not in RELEVANCE_NORMS:
            raise ConfigError(f"relevance_norm must be one of {RELEVANCE_NORMS}")
        if self.prompt_style not in PROMPT_STYLES:
            raise ConfigError(f"prompt_style must be one of {PROMPT_STYLES}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.pool_size < self.k:
            raise ConfigError("pool_size must be >= k")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.dpp_lambda <= 0:
            raise ConfigError("dpp_lambda must be positive")
        if not 0.0 <= self.bm25_b <= 1.0:
            raise ConfigError("bm25_b must lie in [0, 1]")
        if self.bm25_k1 <= 0:
            raise ConfigError("bm25_k1 must be positive")

    def plan(self, strategy: str | None = None) -> SelectionPlan:
        return SelectionPlan(
            strategy=strategy or self.strategy,
            k=self.k,
            order=self.order,
            measure=self.measure,
            pool_size=self.pool_size,
            dpp_lambda=self.dpp_lambda,
            relevance_norm=self.relevance_norm,
            rng_seed=self.seed,
        )

    def bm25_params(self) -> Bm25Params:
        return Bm25Params(k1=self.bm25_k1, b=self.bm25_b)

    def template(self) -> PromptTemplate:
        return PromptTemplate(
            style=self.prompt_style,
            source_language=self.source_language,
            target_language=self.target_language,
        )

    def snapshot(self) -> dict:
        """JSON-ready view for manifests; paths rendered as strings."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = str(value) if isinstance(value, Path) else value
        return out


def _coerce(name: str, kind: type, raw: str):
    if kind is bool:
        lowered = raw.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: expected {kind.__name__}, got {raw!r}") from exc


def parse_config_text(text: str, base_dir: Path) -> dict:
    """Parse key=value lines into typed values, resolving relative paths."""
    types = {
        "corpus_source": Path, "corpus_target": Path, "corpus_conllu": Path,
        "test_source": Path, "test_conllu": Path, "out_dir": Path,
        "strategy": str, "k": int, "order": str, "measure": str,
        "pool_size": int, "dpp_lambda": float, "relevance_norm": str,
        "seed": int, "max_tokens": int, "filter_target": bool, "workers": int,
        "fold_case": bool, "strip_punctuation": bool,
        "prompt_style": str, "source_language": str,
        "target_language": str, "bm25_k1": float, "bm25_b": float,
    }
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in types:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if types[key] is Path:
            path = Path(value)
            values[key] = path if path.is_absolute() else (base_dir / path)
        else:
            values[key] = _coerce(key, types[key], value)
    return values


def load_config(path: Path | str | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional file and override mapping."""
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        values.update(parse_config_text(path.read_text(encoding="utf-8"), path.parent.resolve()))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in _PATH_KEYS and not isinstance(value, Path):
            value = Path(value)
        values[key] = value
    config = RunConfig(**values)
    config.validate()
    return config
