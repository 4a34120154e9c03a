"""Pipeline configuration: one serializable bundle of every knob.

Values resolve as defaults < config file < command-line flags. The config
file is JSON; its default location can be set with the ENTSEARCH_CONFIG
environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import AnalyzerConfig
from .fusion import FusionConfig
from .index import BM25Params
from .linker import LinkerConfig, WindowConfig

CONFIG_ENV_VAR = "ENTSEARCH_CONFIG"


@dataclass
class PipelineConfig:
    analyzer: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    window: WindowConfig = field(default_factory=WindowConfig)
    linker: LinkerConfig = field(default_factory=LinkerConfig)
    bm25: BM25Params = field(default_factory=BM25Params)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    strategy: str | None = None  # expansion strategy spec, e.g. "explicit"
    k: int = 1000
    cutoffs: tuple[int, ...] = (10, 100, 1000)

    def to_dict(self) -> dict:
        return {
            "analyzer": self.analyzer.to_dict(),
            "window": self.window.to_dict(),
            "linker": self.linker.to_dict(),
            "bm25": self.bm25.to_dict(),
            "fusion": self.fusion.to_dict(),
            "strategy": self.strategy,
            "k": self.k,
            "cutoffs": list(self.cutoffs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        return cls(
            analyzer=AnalyzerConfig.from_dict(d.get("analyzer", {})),
            window=WindowConfig(**d.get("window", {})),
            linker=LinkerConfig(**d.get("linker", {})),
            bm25=BM25Params(**d.get("bm25", {})),
            fusion=FusionConfig(**d.get("fusion", {})),
            strategy=d.get("strategy"),
            k=int(d.get("k", 1000)),
            cutoffs=tuple(int(c) for c in d.get("cutoffs", (10, 100, 1000))),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_default_config(explicit_path: str | None = None) -> PipelineConfig:
    """Config from an explicit path, else $ENTSEARCH_CONFIG, else defaults."""
    path = explicit_path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        return PipelineConfig.load(path)
    return PipelineConfig()
