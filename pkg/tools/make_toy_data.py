#!/usr/bin/env python3
"""Generate the bundled toy corpus under src/entsearch/data/toy/.

The set is built so the end-to-end pipeline shows the expected ordering:

  recall@1000(no entities)  <  recall@1000(RRF of none/explicit/hashed)
                            <= recall@1000(oracle)

Three query groups force it:
  * lexical: query and relevant passage share plain words; every run finds them
  * bridge: query and passage share zero tokens but link the same entity via
    different aliases, so only the expanded runs (explicit and hashed) connect
  * explicit-only: the query links nothing but shares a token with the
    canonical name appended to the passage, so the explicit run connects and
    the hashed run cannot

Every structural assumption is asserted before the files are written.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

from entsearch.analysis import Analyzer
from entsearch.corpus import Passage, Query, Qrels
from entsearch.expansion import ExpansionStrategy, expand_collection
from entsearch.fusion import FusionConfig, oracle, rrf
from entsearch.index import BM25Params, batch_search, build_index
from entsearch.evaluation import recall_at
from entsearch.linker import (
    GazetteerLinker,
    Gazetteer,
    LinkerConfig,
    WindowConfig,
    link_text,
    link_spans,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "entsearch" / "data" / "toy"

GAZETTEER = [
    # alias, canonical entity, prior score (default linker threshold is 4.5)
    ("new york", "New York City", 6.5),
    ("big apple", "New York City", 6.0),
    ("gotham", "New York City", 5.5),
    ("paris", "Paris", 7.0),
    ("city of light", "Paris", 5.5),
    ("lutetia", "Paris", 5.0),
    ("detroit", "Detroit", 7.0),
    ("motor city", "Detroit", 6.0),
    ("motown", "Detroit", 5.5),
    ("chicago", "Chicago", 7.0),
    ("windy city", "Chicago", 6.0),
    ("chi town", "Chicago", 5.0),
    ("istanbul", "Istanbul", 7.0),
    ("constantinople", "Istanbul", 6.0),
    ("byzantium", "Istanbul", 5.5),
    ("tokyo", "Tokyo", 7.0),
    ("edo", "Tokyo", 5.0),
    ("albert einstein", "Albert Einstein", 8.0),
    ("einstein", "Albert Einstein", 7.5),
    ("father of relativity", "Albert Einstein", 5.0),
    ("elvis presley", "Elvis Presley", 8.0),
    ("elvis", "Elvis Presley", 7.0),
    ("the king of rock and roll", "Elvis Presley", 5.0),
    ("muhammad ali", "Muhammad Ali", 8.0),
    ("cassius clay", "Muhammad Ali", 6.5),
    ("ali", "Muhammad Ali", 5.0),
    ("rome", "Rome", 7.0),
    ("eternal city", "Rome", 5.5),
    ("the eagles", "Eagles (band)", 6.5),
    ("eagles", "Eagles (band)", 6.0),
    ("mississippi", "Mississippi River", 7.0),
    ("big muddy", "Mississippi River", 5.0),
    ("the amazon", "Amazon River", 6.6),
    ("amazon", "Amazon River", 6.5),
    ("south america", "South America", 6.0),
    ("eiffel tower", "Eiffel Tower", 8.0),
    ("la tour eiffel", "Eiffel Tower", 6.0),
    ("los angeles", "Los Angeles", 8.0),
    ("city of angels", "Los Angeles", 5.5),
    ("la", "Los Angeles", 2.0),  # below the default threshold: never fires
    ("california", "California", 7.0),
    ("graceland", "Graceland", 5.0),
]

# (query text, relevant passage text, entity expected on BOTH sides)
BRIDGE = [
    ("cheap hotels in the big apple area",
     "Gotham lodging deals cluster near Midtown, from boutique rooms up to budget hostels.",
     "New York City"),
    ("flights to the city of light",
     "Lutetia welcomes millions every season; landmarks include an iron tower and grand museums.",
     "Paris"),
    ("when was motown records founded",
     "Motor City gave rise a famous label during 1959.",
     "Detroit"),
    ("best pizza in the windy city",
     "Chi Town deep dish spots draw long lines downtown every weekend.",
     "Chicago"),
    ("ancient name of istanbul",
     "Byzantium stood where Europe meets Asia, guarding a strategic strait.",
     "Istanbul"),
    ("what was tokyo called before",
     "Edo grew from a fishing village into a mighty capital under shogunate rule.",
     "Tokyo"),
    ("when was einstein born",
     "Ulm, 1879: father of relativity arrived there, a quiet riverside town.",
     "Albert Einstein"),
    ("how did elvis die",
     "The King of Rock and Roll passed away at Graceland in August 1977.",
     "Elvis Presley"),
    ("cassius clay famous fights",
     "Ali defended his heavyweight title against Frazier and Foreman.",
     "Muhammad Ali"),
    ("visiting the eternal city on a budget",
     "Rome's seven hills surround forums, fountains, and piazzas.",
     "Rome"),
]

# (query text, relevant passage text, passage-side entity whose canonical
# name lends the query a token)
EXPLICIT_ONLY = [
    ("original lineup of that classic rock band",
     "The Eagles formed at Hollywood clubs during 1971, Frey plus Henley leading.",
     "Eagles (band)"),
    ("longest river cruise options",
     "Big Muddy rolls south past Memphis and New Orleans toward the gulf.",
     "Mississippi River"),
    ("widest river in south america",
     "The Amazon carries more water than any other waterway on earth.",
     "Amazon River"),
    ("how tall is the iron tower in france",
     "La Tour Eiffel rises 330 meters over Champ de Mars lawns.",
     "Eiffel Tower"),
]

LEXICAL = [
    ("manhattan project research",
     "The Manhattan Project was a secret research effort that produced the first nuclear weapons."),
    ("how do vaccines work",
     "Vaccines work by training the immune system to recognize dangerous pathogens."),
    ("photosynthesis in green plants",
     "Green plants use photosynthesis to convert sunlight into chemical energy."),
    ("great barrier reef location",
     "The Great Barrier Reef stretches along the coast of Queensland."),
    ("who wrote pride and prejudice",
     "Jane Austen wrote Pride and Prejudice, first published in 1813."),
    ("boiling point of water at altitude",
     "The boiling point of water drops as altitude increases."),
    ("history of the printing press",
     "Gutenberg introduced the movable type printing press around 1440."),
    ("deepest ocean trench depth",
     "The Mariana Trench is the deepest ocean trench, reaching nearly 11000 meters."),
    ("how are diamonds formed",
     "Diamonds are formed deep underground from carbon under extreme pressure."),
    ("speed of light in vacuum",
     "The speed of light in a vacuum is 299792458 meters per second."),
    ("largest desert on earth",
     "The Sahara is often called the largest hot desert on earth."),
    ("capital city of australia",
     "Canberra is the capital city of Australia, chosen over Sydney and Melbourne."),
    ("jazz origins new orleans",
     "Jazz music originated in New Orleans around the start of the twentieth century."),
    ("solar panels energy efficiency",
     "Modern solar panels convert sunlight to electricity with rising efficiency."),
    ("ancient pyramids of giza",
     "The pyramids of Giza were built as royal tombs in ancient Egypt."),
    ("migration patterns of monarch butterflies",
     "Monarch butterflies follow long migration routes between Canada and Mexico."),
]

DISTRACTOR_TEMPLATES = [
    "Travel writers recommend {a} tours with {b} guides for {c} visitors.",
    "A {a} restaurant near the {b} district serves {c} dishes nightly.",
    "Local {a} museums display {b} artifacts from {c} collections.",
    "The {a} festival features {b} music and {c} food stalls.",
    "Historians debate the {a} origins of {b} trade along {c} routes.",
    "Engineers tested a {a} bridge design under {b} loads and {c} winds.",
    "The {a} library archives {b} manuscripts about {c} science.",
    "Farmers in the {a} valley grow {b} crops using {c} irrigation.",
    "A {a} documentary explores {b} wildlife across {c} habitats.",
    "Students study {a} mathematics with {b} textbooks and {c} exercises.",
    "The {a} orchestra performed a {b} symphony before a {c} audience.",
    "Chefs prepare {a} recipes with {b} spices and {c} produce.",
    "The {a} stadium hosted a {b} match watched by {c} fans.",
    "Researchers published a {a} study on {b} climate and {c} oceans.",
    "The {a} market sells {b} textiles beside {c} pottery stalls.",
    "Gotham newspapers once covered {a} elections with {b} headlines.",
    "Motown session players recorded {a} hits in {b} studios.",
    "Windy city architects sketched {a} towers above {b} avenues.",
    "Cable cars rattle past {a} cafes toward {b} piers.",
    "Eagles tribute acts tour {a} theaters every {b} summer.",
]

FILLERS = [
    "coastal", "mountain", "vintage", "modern", "crowded", "quiet", "famous",
    "regional", "seasonal", "colorful", "historic", "massive", "tiny",
    "northern", "southern", "eastern", "western", "popular", "obscure",
    "elegant", "rustic", "bustling", "sleepy", "grand", "humble",
]


def build_texts():
    rng = random.Random(20240817)
    queries: list[Query] = []
    passages: list[Passage] = []
    qrels = Qrels()
    groups: dict[str, list[str]] = {"lexical": [], "bridge": [], "explicit_only": []}

    pid = 0

    def add_pair(group, qtext, ptext):
        nonlocal pid
        pid += 1
        qid = str(1000 + len(queries) + 1)
        queries.append(Query(qid, qtext))
        passages.append(Passage(str(pid), ptext))
        qrels.add(qid, str(pid), 1)
        groups[group].append(qid)

    for qtext, ptext in LEXICAL:
        add_pair("lexical", qtext, ptext)
    for qtext, ptext, _ in BRIDGE:
        add_pair("bridge", qtext, ptext)
    for qtext, ptext, _ in EXPLICIT_ONLY:
        add_pair("explicit_only", qtext, ptext)

    n_distractors = 200 - len(passages)
    seen = set()
    while len(seen) < n_distractors:
        template = rng.choice(DISTRACTOR_TEMPLATES)
        text = template.format(
            a=rng.choice(FILLERS), b=rng.choice(FILLERS), c=rng.choice(FILLERS)
        )
        if text in seen:
            continue
        seen.add(text)
        pid += 1
        passages.append(Passage(str(pid), text))

    return queries, passages, qrels, groups


def check(queries, passages, qrels, groups):
    analyzer = Analyzer()
    gaz = Gazetteer()
    for alias, name, score in GAZETTEER:
        gaz.add(analyzer.tokens(alias), name, score)
    linker = GazetteerLinker(gaz, analyzer)
    wcfg, lcfg = WindowConfig(), LinkerConfig()

    by_qid = {q.id: q for q in queries}
    by_pid = {p.id: p for p in passages}
    rel_pid = {qid: next(iter(qrels.relevant(qid))) for qid in qrels.query_ids()}

    def entities(text):
        return {a.entity_name for a in link_text(text, linker, wcfg, lcfg, analyzer)}

    for (qtext, ptext, entity), qid in zip(BRIDGE, groups["bridge"]):
        q, p = by_qid[qid], by_pid[rel_pid[qid]]
        assert q.text == qtext and p.text == ptext
        overlap = set(analyzer.tokens(q.text)) & set(analyzer.tokens(p.text))
        assert not overlap, f"bridge query {qid} overlaps its passage: {overlap}"
        assert entity in entities(q.text), f"query {qid} does not link {entity}"
        assert entity in entities(p.text), f"passage for {qid} does not link {entity}"

    for (qtext, ptext, entity), qid in zip(EXPLICIT_ONLY, groups["explicit_only"]):
        q, p = by_qid[qid], by_pid[rel_pid[qid]]
        overlap = set(analyzer.tokens(q.text)) & set(analyzer.tokens(p.text))
        assert not overlap, f"explicit-only query {qid} overlaps its passage: {overlap}"
        q_entities, p_entities = entities(q.text), entities(p.text)
        assert entity in p_entities
        assert not (q_entities & p_entities), f"query {qid} shares entities {q_entities & p_entities}"
        canonical_tokens = set(analyzer.tokens(entity))
        assert canonical_tokens & set(analyzer.tokens(q.text)), (
            f"query {qid} shares no token with canonical name {entity!r}"
        )

    for qid in groups["lexical"]:
        q, p = by_qid[qid], by_pid[rel_pid[qid]]
        assert set(analyzer.tokens(q.text)) & set(analyzer.tokens(p.text))

    # end-to-end ordering with the library pipeline
    annotations = {p.id: link_spans(p.text, linker, wcfg, lcfg, analyzer) for p in passages}
    q_annotations = {q.id: link_spans(q.text, linker, wcfg, lcfg, analyzer) for q in queries}
    params, k = BM25Params(), 1000
    runs = {}
    for kind in ("none", "explicit", "hashed"):
        strategy = ExpansionStrategy(kind)
        expanded_p = list(expand_collection(passages, annotations, strategy))
        expanded_q = [
            Query(q.id, next(iter(expand_collection([Passage(q.id, q.text)], q_annotations, strategy))).text)
            for q in queries
        ]
        idx = build_index(expanded_p, analyzer)
        runs[kind] = batch_search(idx, params, expanded_q, k, kind)

    fused = rrf([runs["none"], runs["explicit"], runs["hashed"]], FusionConfig(), tag="rrf3")
    best = oracle([runs["none"], runs["explicit"], runs["hashed"]], qrels)

    recalls = {
        tag: recall_at(run, qrels, k).means[0]
        for tag, run in [*runs.items(), ("rrf3", fused), ("oracle", best)]
    }
    print("recall@1000:", {t: round(v, 4) for t, v in recalls.items()})
    assert recalls["none"] < recalls["explicit"], "expansion must help"
    assert recalls["hashed"] < recalls["explicit"], "hashed misses explicit-only bridges"
    assert recalls["none"] < recalls["rrf3"] <= recalls["oracle"], "required ordering"
    assert recalls["explicit"] == 1.0


def main():
    queries, passages, qrels, groups = build_texts()
    assert len(passages) == 200 and len(queries) == 30
    check(queries, passages, qrels, groups)

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with open(OUT_DIR / "collection.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for p in passages:
            fh.write(f"{p.id}\t{p.text}\n")
    with open(OUT_DIR / "queries.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for q in queries:
            fh.write(f"{q.id}\t{q.text}\n")
    with open(OUT_DIR / "qrels.txt", "w", encoding="utf-8", newline="\n") as fh:
        for qid in qrels.query_ids():
            for pid, grade in qrels.judgments[qid].items():
                fh.write(f"{qid} 0 {pid} {grade}\n")
    with open(OUT_DIR / "gazetteer.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for alias, name, score in GAZETTEER:
            fh.write(f"{alias}\t{name}\t{score}\n")
    print(f"wrote toy dataset to {OUT_DIR}")


if __name__ == "__main__":
    sys.exit(main())
