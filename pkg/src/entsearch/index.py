"""Inverted index construction and top-k BM25 search.

Scoring is the Lucene-style BM25 with ln(1 + (N - df + 0.5) / (df + 0.5))
IDF, so scores are always non-negative and a document scores > 0 exactly
when it contains at least one query term. Retrieval is exhaustive
term-at-a-time over postings; at the collection sizes this toolkit targets,
dynamic pruning buys nothing.
"""

from __future__ import annotations

import gzip
import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analysis import Analyzer, AnalyzerConfig
from .corpus import Passage, Query
from .fusion import Run

INDEX_FORMAT = "entsearch-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class BM25Params:
    k1: float = 0.82
    b: float = 0.68

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")

    def to_dict(self) -> dict:
        return {"k1": self.k1, "b": self.b}


@dataclass(frozen=True)
class ScoredHit:
    passage_id: str
    score: float
    rank: int


class InvertedIndex:
    """Immutable after build; safe to share across concurrent searches."""

    def __init__(
        self,
        postings: dict[str, list[tuple[int, int]]],
        doc_ids: list[str],
        doc_lengths: list[int],
        analyzer: Analyzer,
    ):
        self.postings = postings
        self.doc_ids = doc_ids
        self.doc_lengths = doc_lengths
        self.analyzer = analyzer
        self.avgdl = sum(doc_lengths) / len(doc_lengths) if doc_lengths else 0.0

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def term_frequency(self, term: str, ordinal: int) -> int:
        plist = self.postings.get(term)
        if not plist:
            return 0
        i = bisect_left(plist, (ordinal,))
        if i < len(plist) and plist[i][0] == ordinal:
            return plist[i][1]
        return 0


def build_index(
    passages: Iterable[Passage],
    analyzer: Analyzer | AnalyzerConfig | None = None,
) -> InvertedIndex:
    """Index a passage stream. Deterministic given input order."""
    if isinstance(analyzer, AnalyzerConfig):
        analyzer = Analyzer(analyzer)
    elif analyzer is None:
        analyzer = Analyzer()
    postings: dict[str, list[tuple[int, int]]] = {}
    doc_ids: list[str] = []
    doc_lengths: list[int] = []
    seen: set[str] = set()
    for ordinal, passage in enumerate(passages):
        if passage.id in seen:
            raise ValueError(f"duplicate passage id {passage.id!r}")
        seen.add(passage.id)
        doc_ids.append(passage.id)
        tokens = analyzer.tokens(passage.text)
        doc_lengths.append(len(tokens))
        freqs: dict[str, int] = {}
        for t in tokens:
            freqs[t] = freqs.get(t, 0) + 1
        for term, tf in freqs.items():
            postings.setdefault(term, []).append((ordinal, tf))
    return InvertedIndex(postings, doc_ids, doc_lengths, analyzer)


def idf(index: InvertedIndex, term: str) -> float:
    df = index.df(term)
    if df == 0:
        return 0.0
    return math.log(1.0 + (index.n_docs - df + 0.5) / (df + 0.5))


def _tf_part(tf: int, dl: int, avgdl: float, params: BM25Params) -> float:
    norm = params.k1 * (1.0 - params.b + params.b * dl / avgdl)
    return tf * (params.k1 + 1.0) / (tf + norm)


def bm25_score(
    index: InvertedIndex,
    params: BM25Params,
    query_terms: Sequence[str],
    ordinal: int,
) -> float:
    """BM25 score of one document against a term sequence.

    Repeated query terms contribute once per occurrence. Contributions are
    accumulated in query order, matching search() bit for bit.
    """
    if not 0 <= ordinal < index.n_docs:
        raise IndexError(f"document ordinal {ordinal} out of range")
    dl = index.doc_lengths[ordinal]
    score = 0.0
    for term in query_terms:
        tf = index.term_frequency(term, ordinal)
        if tf == 0:
            continue
        score += idf(index, term) * _tf_part(tf, dl, index.avgdl, params)
    return score


def search(
    index: InvertedIndex, params: BM25Params, query_text: str, k: int = 1000
) -> list[ScoredHit]:
    """Top-k documents by BM25, ties broken by ascending passage id.

    Only documents with score > 0 are returned, so the result can be shorter
    than k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = index.analyzer.tokens(query_text)
    scores: dict[int, float] = {}
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        w = idf(index, term)
        for ordinal, tf in plist:
            scores[ordinal] = scores.get(ordinal, 0.0) + w * _tf_part(
                tf, index.doc_lengths[ordinal], index.avgdl, params
            )
    ranked = sorted(scores.items(), key=lambda item: (-item[1], index.doc_ids[item[0]]))
    return [
        ScoredHit(index.doc_ids[ordinal], score, rank)
        for rank, (ordinal, score) in enumerate(ranked[:k], 1)
    ]


def batch_search(
    index: InvertedIndex,
    params: BM25Params,
    queries: Sequence[Query],
    k: int = 1000,
    tag: str = "bm25",
) -> Run:
    """Search every query and collect a tagged run."""
    rankings = {}
    for query in queries:
        hits = search(index, params, query.text, k)
        rankings[query.id] = [(h.passage_id, h.score) for h in hits]
    return Run(tag, rankings)


# --- on-disk layout ----------------------------------------------------------
# A directory holding meta.json (format marker, version, analyzer config) and
# postings.json.gz (ids, lengths, postings). Integers and strings only, so a
# save/load cycle reproduces search results exactly.


def save_index(index: InvertedIndex, path: str | Path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    meta = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "n_docs": index.n_docs,
        "analyzer": index.analyzer.config.to_dict(),
    }
    (path / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    payload = {
        "doc_ids": index.doc_ids,
        "doc_lengths": index.doc_lengths,
        "postings": {term: [list(p) for p in plist] for term, plist in index.postings.items()},
    }
    with gzip.open(path / "postings.json.gz", "wt", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_index(path: str | Path) -> InvertedIndex:
    path = Path(path)
    meta_path = path / "meta.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"no index at {path}: missing {meta_path}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("format") != INDEX_FORMAT:
        raise ValueError(f"{meta_path}: not an index directory")
    if meta.get("version") != INDEX_VERSION:
        raise ValueError(f"{meta_path}: unsupported index version {meta.get('version')}")
    with gzip.open(path / "postings.json.gz", "rt", encoding="utf-8") as fh:
        payload = json.load(fh)
    postings = {
        term: [(o, tf) for o, tf in plist] for term, plist in payload["postings"].items()
    }
    analyzer = Analyzer(AnalyzerConfig.from_dict(meta.get("analyzer", {})))
    return InvertedIndex(postings, payload["doc_ids"], payload["doc_lengths"], analyzer)
