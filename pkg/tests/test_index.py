import math
import random

import pytest

from entsearch.analysis import Analyzer, AnalyzerConfig, analyze
from entsearch.corpus import Passage, Query
from entsearch.index import (
    BM25Params,
    batch_search,
    bm25_score,
    build_index,
    load_index,
    save_index,
    search,
)

PARAMS = BM25Params()


def make_index(texts, ids=None):
    ids = ids or [str(i) for i in range(len(texts))]
    return build_index(Passage(i, t) for i, t in zip(ids, texts))


def brute_force_ranking(texts, ids, query_text, params=PARAMS):
    """Independent exhaustive BM25 scorer used as the ordering oracle."""
    docs = [analyze(t) for t in texts]
    n = len(docs)
    lengths = [len(d) for d in docs]
    avgdl = sum(lengths) / n if n else 0.0
    df = {}
    for d in docs:
        for term in set(d):
            df[term] = df.get(term, 0) + 1
    terms = analyze(query_text)
    scored = []
    for i, d in enumerate(docs):
        score = 0.0
        for t in terms:
            tf = d.count(t)
            if tf == 0 or t not in df:
                continue
            idf = math.log(1.0 + (n - df[t] + 0.5) / (df[t] + 0.5))
            norm = params.k1 * (1.0 - params.b + params.b * lengths[i] / avgdl)
            score += idf * (tf * (params.k1 + 1.0) / (tf + norm))
        if score > 0.0:
            scored.append((ids[i], score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


def test_build_stats():
    idx = make_index(["a", "b", "c"])
    assert idx.n_docs == 3
    assert idx.avgdl == 1.0


def test_build_df_counts():
    idx = make_index(["a b", "b c"])
    assert idx.df("b") == 2
    assert idx.df("a") == 1
    assert idx.df("c") == 1
    assert idx.df("zzz") == 0


def test_empty_collection_searches_empty():
    idx = make_index([])
    assert idx.n_docs == 0
    assert search(idx, PARAMS, "anything") == []


def test_duplicate_id_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        build_index([Passage("1", "a"), Passage("1", "b")])


def test_single_doc_closed_form():
    idx = make_index(["a"])
    assert bm25_score(idx, PARAMS, ["a"], 0) == pytest.approx(math.log(4 / 3), abs=1e-15)
    hits = search(idx, PARAMS, "a")
    assert hits[0].score == pytest.approx(math.log(4 / 3), abs=1e-15)


def test_absent_term_contributes_zero():
    idx = make_index(["a b", "a c"])
    assert bm25_score(idx, PARAMS, ["zzz"], 0) == 0.0
    assert bm25_score(idx, PARAMS, ["a", "zzz"], 0) == bm25_score(idx, PARAMS, ["a"], 0)


def test_repeated_query_term_counts_multiplicity():
    idx = make_index(["a b", "a c", "b c"])
    once = bm25_score(idx, PARAMS, ["a"], 0)
    twice = bm25_score(idx, PARAMS, ["a", "a"], 0)
    assert twice == pytest.approx(2 * once, rel=1e-12)


def test_no_indexed_terms_empty_result():
    idx = make_index(["alpha beta", "gamma delta"])
    assert search(idx, PARAMS, "zzz qqq") == []


def test_k_larger_than_corpus():
    idx = make_index(["a b", "a c", "a d"])
    hits = search(idx, PARAMS, "a", k=100)
    assert len(hits) == 3
    assert [h.rank for h in hits] == [1, 2, 3]


def test_tie_break_by_ascending_passage_id():
    idx = build_index([Passage(i, "same text") for i in ["30", "4", "11"]])
    hits = search(idx, PARAMS, "same", k=10)
    assert [h.passage_id for h in hits] == ["11", "30", "4"]
    assert hits[0].score == hits[1].score == hits[2].score


def test_ranks_contiguous_scores_non_increasing():
    idx = make_index(["a a a", "a a", "a", "b"])
    hits = search(idx, PARAMS, "a a b", k=10)
    assert [h.rank for h in hits] == list(range(1, len(hits) + 1))
    assert all(x.score >= y.score for x, y in zip(hits, hits[1:]))


def _random_corpus(rng, max_docs=60):
    vocab = ["w%d" % i for i in range(rng.randrange(3, 15))]
    n = rng.randrange(1, max_docs)
    texts = [
        " ".join(rng.choice(vocab) for _ in range(rng.randrange(0, 30))) for _ in range(n)
    ]
    ids = [str(i) for i in rng.sample(range(1000), n)]
    return texts, ids


def test_search_matches_brute_force_on_random_corpora():
    rng = random.Random(97)
    for _ in range(30):
        texts, ids = _random_corpus(rng)
        idx = build_index(Passage(i, t) for i, t in zip(ids, texts))
        query = " ".join(rng.choice(["w0", "w1", "w2", "w5", "zzz"]) for _ in range(rng.randrange(1, 6)))
        expected = brute_force_ranking(texts, ids, query)
        got = [(h.passage_id, h.score) for h in search(idx, PARAMS, query, k=len(texts) or 1)]
        assert got == expected
        assert all(score > 0.0 for _, score in got)  # ln(1 + x) IDF never negative


def test_score_monotone_in_tf():
    # adding one more occurrence of the query term to one document never
    # lowers that document's score, lengths re-derived
    rng = random.Random(3)
    for _ in range(50):
        texts, ids = _random_corpus(rng, max_docs=20)
        target = rng.randrange(len(texts))
        bumped = list(texts)
        bumped[target] = (bumped[target] + " w0").strip()
        before = brute_force_ranking(texts, ids, "w0")
        after = brute_force_ranking(bumped, ids, "w0")
        score_before = dict(before).get(ids[target], 0.0)
        score_after = dict(after).get(ids[target], 0.0)
        assert score_after >= score_before


def test_batch_search_and_determinism():
    idx = make_index(["a b", "b c", "c d"])
    queries = [Query("1", "a"), Query("2", "c d"), Query("3", "zzz")]
    run = batch_search(idx, PARAMS, queries, k=10, tag="test")
    assert run.tag == "test"
    assert set(run.rankings) == {"1", "2", "3"}
    assert run.rankings["3"] == []
    again = batch_search(idx, PARAMS, queries, k=10, tag="test")
    assert again.rankings == run.rankings


def test_save_load_round_trip(tmp_path):
    texts = ["the eagles rock band", "los angeles california", "eagles fly high"]
    idx = make_index(texts)
    save_index(idx, tmp_path / "idx")
    loaded = load_index(tmp_path / "idx")
    for query in ["eagles", "los angeles", "band eagles", "zzz"]:
        assert search(loaded, PARAMS, query, k=10) == search(idx, PARAMS, query, k=10)
    assert loaded.avgdl == idx.avgdl


def test_save_load_preserves_analyzer_config(tmp_path):
    cfg = AnalyzerConfig(stem=True, stopwords=frozenset({"the"}))
    idx = build_index([Passage("1", "the running dogs")], Analyzer(cfg))
    save_index(idx, tmp_path / "idx")
    loaded = load_index(tmp_path / "idx")
    assert loaded.analyzer.config == cfg
    assert search(loaded, PARAMS, "the runs", k=10) == search(idx, PARAMS, "the runs", k=10)


def test_load_rejects_non_index(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_index(tmp_path / "nope")


def test_params_validation():
    with pytest.raises(ValueError):
        BM25Params(k1=-1)
    with pytest.raises(ValueError):
        BM25Params(b=1.5)
