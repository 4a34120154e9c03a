"""Entity-expansion toolkit for sparse first-stage retrieval.

Pipeline: annotate queries and passages with linked entities through a
sliding-window scheme, expand the texts with explicit or hashed entity
names, retrieve with BM25 over an inverted index, fuse runs with reciprocal
rank fusion or a per-query oracle, and evaluate recall at cutoffs with
paired significance testing and hard-query mining.
"""

from .analysis import Analyzer, AnalyzerConfig, analyze
from .corpus import Passage, Qrels, Query, load_collection, load_qrels, load_queries
from .expansion import ExpandedText, ExpansionStrategy, expand, hash_entity
from .fusion import FusionConfig, Run, oracle, read_run, rrf, write_run
from .index import BM25Params, InvertedIndex, batch_search, build_index, search
from .linker import (
    EntityAnnotation,
    Gazetteer,
    GazetteerLinker,
    LinkerConfig,
    WindowConfig,
    link_mentions,
    link_text,
    load_annotations,
    load_gazetteer,
)

__version__ = "0.1.0"
