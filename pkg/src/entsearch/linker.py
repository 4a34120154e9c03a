"""Entity annotation via a sliding window over a pluggable linker.

A linker is any callable `(window_text, LinkerConfig) -> [EntityAnnotation]`
returning window-local character offsets. The built-in GazetteerLinker does
deterministic longest-match dictionary tagging; annotations produced by an
external neural linker enter through `load_annotations` instead and skip
the window machinery entirely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .analysis import DEFAULT_ANALYZER, Analyzer
from .corpus import FormatError


class LinkError(RuntimeError):
    """The underlying linker failed on a window."""


@dataclass(frozen=True)
class EntityAnnotation:
    """One linked mention: surface span plus the canonical entity it names."""

    mention: str
    char_start: int
    char_end: int
    entity_name: str
    score: float

    def __post_init__(self):
        if self.char_start < 0 or self.char_end <= self.char_start:
            raise ValueError(
                f"bad mention span [{self.char_start}, {self.char_end}) for {self.mention!r}"
            )
        if not self.entity_name:
            raise ValueError(f"empty entity name for mention {self.mention!r}")


@dataclass(frozen=True)
class WindowConfig:
    window_tokens: int = 128
    overlap_tokens: int = 42

    def __post_init__(self):
        if self.window_tokens <= 0:
            raise ValueError("window_tokens must be positive")
        if not 0 <= self.overlap_tokens < self.window_tokens:
            raise ValueError("overlap_tokens must satisfy 0 <= overlap < window")

    @property
    def advance(self) -> int:
        return self.window_tokens - self.overlap_tokens

    def to_dict(self) -> dict:
        return {"window_tokens": self.window_tokens, "overlap_tokens": self.overlap_tokens}


@dataclass(frozen=True)
class LinkerConfig:
    """Linker settings, recorded with every annotation file.

    The candidate counts are pass-through values for neural linkers; the
    gazetteer linker ignores them and uses threshold as a minimum-score gate.
    """

    threshold: float = 4.5
    num_cand_mentions: int = 10
    num_cand_entities: int = 10

    def __post_init__(self):
        if self.num_cand_mentions < 1 or self.num_cand_entities < 1:
            raise ValueError("candidate counts must be >= 1")

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "num_cand_mentions": self.num_cand_mentions,
            "num_cand_entities": self.num_cand_entities,
        }


def token_windows(n_tokens: int, cfg: WindowConfig) -> list[tuple[int, int]]:
    """Token ranges [start, end) of the sliding windows over n_tokens tokens.

    Windows advance by window_tokens - overlap_tokens, so consecutive windows
    share exactly overlap_tokens tokens; the final window is truncated at
    n_tokens. A text that fits one window gets exactly one. Zero tokens yield
    no windows.
    """
    if n_tokens <= 0:
        return []
    out = []
    start = 0
    while True:
        end = min(start + cfg.window_tokens, n_tokens)
        out.append((start, end))
        if end >= n_tokens:
            return out
        start += cfg.advance


def windows(
    text: str, cfg: WindowConfig, analyzer: Analyzer = DEFAULT_ANALYZER
) -> list[tuple[int, int]]:
    """Character spans of the sliding windows, aligned to token boundaries.

    Interior boundaries fall on token edges; the first window starts at 0 and
    the last ends at len(text), so a single-window text spans the whole text.
    """
    spans = analyzer.token_spans(text)
    ranges = token_windows(len(spans), cfg)
    out = []
    for i, (ts, te) in enumerate(ranges):
        cs = 0 if i == 0 else spans[ts][0]
        ce = len(text) if i == len(ranges) - 1 else spans[te - 1][1]
        out.append((cs, ce))
    return out


Linker = Callable[[str, LinkerConfig], list[EntityAnnotation]]


def link_spans(
    text: str,
    linker: Linker,
    wcfg: WindowConfig,
    lcfg: LinkerConfig,
    analyzer: Analyzer = DEFAULT_ANALYZER,
) -> list[EntityAnnotation]:
    """All mentions found in any window, rebased to full-text offsets.

    Identical rebased spans (the same mention seen from two overlapping
    windows) are merged; distinct spans are kept even when they overlap.
    Sorted by position.
    """
    seen: dict[tuple[int, int, str], EntityAnnotation] = {}
    for ws, we in windows(text, wcfg, analyzer):
        try:
            found = linker(text[ws:we], lcfg)
        except Exception as exc:
            raise LinkError(f"linker failed on window [{ws}, {we})") from exc
        for ann in found:
            if ann.char_end > we - ws:
                raise LinkError(
                    f"linker returned span past window [{ws}, {we}): {ann}"
                )
            rebased = replace(
                ann, char_start=ann.char_start + ws, char_end=ann.char_end + ws
            )
            if text[rebased.char_start : rebased.char_end] != rebased.mention:
                raise LinkError(
                    f"mention {rebased.mention!r} does not match text at "
                    f"[{rebased.char_start}, {rebased.char_end})"
                )
            key = (rebased.char_start, rebased.char_end, rebased.entity_name)
            seen.setdefault(key, rebased)
    return sorted(seen.values(), key=lambda a: (a.char_start, a.char_end, a.entity_name))


def link_text(
    text: str,
    linker: Linker,
    wcfg: WindowConfig,
    lcfg: LinkerConfig,
    analyzer: Analyzer = DEFAULT_ANALYZER,
) -> list[EntityAnnotation]:
    """Deduplicated entity set of a text: one annotation per entity name.

    The representative annotation is the first occurrence; output is ordered
    by that position.
    """
    out: dict[str, EntityAnnotation] = {}
    for ann in link_spans(text, linker, wcfg, lcfg, analyzer):
        out.setdefault(ann.entity_name, ann)
    return sorted(out.values(), key=lambda a: (a.char_start, a.char_end, a.entity_name))


def entity_counts(annotations: Sequence[EntityAnnotation]) -> dict[str, int]:
    """Mention counts per entity, in first-occurrence order.

    Counts distinct non-overlapping spans: identical spans collapse to one,
    and of two overlapping mentions of the same entity only the first counts.
    """
    by_entity: dict[str, list[tuple[int, int]]] = {}
    for ann in sorted(annotations, key=lambda a: (a.char_start, a.char_end)):
        by_entity.setdefault(ann.entity_name, []).append((ann.char_start, ann.char_end))
    counts: dict[str, int] = {}
    for name, spans in by_entity.items():
        n = 0
        prev_end = -1
        for start, end in spans:
            if start >= prev_end:
                n += 1
                prev_end = end
        counts[name] = n
    return counts


def link_mentions(
    text: str,
    linker: Linker,
    wcfg: WindowConfig,
    lcfg: LinkerConfig,
    analyzer: Analyzer = DEFAULT_ANALYZER,
) -> dict[str, int]:
    """Per-entity mention counts for weighted expansion."""
    return entity_counts(link_spans(text, linker, wcfg, lcfg, analyzer))


# --- gazetteer linker --------------------------------------------------------


@dataclass
class Gazetteer:
    """Alias dictionary: analyzed token sequence -> (entity name, prior score)."""

    aliases: dict[tuple[str, ...], tuple[str, float]] = field(default_factory=dict)

    def add(self, alias_tokens: Sequence[str], entity_name: str, score: float) -> None:
        if not alias_tokens:
            raise ValueError(f"alias for {entity_name!r} has no tokens")
        key = tuple(alias_tokens)
        # duplicate aliases keep the higher-scored entry
        current = self.aliases.get(key)
        if current is None or score > current[1]:
            self.aliases[key] = (entity_name, score)

    @property
    def max_alias_tokens(self) -> int:
        return max((len(k) for k in self.aliases), default=0)

    def entity_names(self) -> set[str]:
        return {name for name, _ in self.aliases.values()}


def load_gazetteer(path: str | Path, analyzer: Analyzer = DEFAULT_ANALYZER) -> Gazetteer:
    """Load a gazetteer TSV: `alias<TAB>entity_name<TAB>score` per line.

    Aliases are analyzed with the same chain used for matching, so lookup is
    case-insensitive and punctuation-blind.
    """
    gaz = Gazetteer()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if line.endswith("\r"):
                line = line[:-1]
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            alias, entity_name, score_str = fields
            if not entity_name:
                raise FormatError(f"{path}:{lineno}: empty entity name")
            try:
                score = float(score_str)
            except ValueError:
                raise FormatError(
                    f"{path}:{lineno}: score {score_str!r} is not a number"
                ) from None
            tokens = analyzer.tokens(alias)
            if not tokens:
                raise FormatError(f"{path}:{lineno}: alias {alias!r} analyzes to no tokens")
            gaz.add(tokens, entity_name, score)
    return gaz


def gazetteer_link(
    window_text: str,
    gaz: Gazetteer,
    lcfg: LinkerConfig,
    analyzer: Analyzer = DEFAULT_ANALYZER,
) -> list[EntityAnnotation]:
    """Greedy longest-match tagging of one window, left to right.

    At each token the longest alias at or above lcfg.threshold wins; matches
    never overlap. Aliases below the threshold are invisible to matching.
    """
    scanned = analyzer.scan(window_text)
    terms = [t for t, _, _ in scanned]
    n = len(terms)
    max_len = gaz.max_alias_tokens
    out = []
    i = 0
    while i < n:
        hit = None
        for length in range(min(max_len, n - i), 0, -1):
            entry = gaz.aliases.get(tuple(terms[i : i + length]))
            if entry is not None and entry[1] >= lcfg.threshold:
                hit = (length, entry)
                break
        if hit is None:
            i += 1
            continue
        length, (entity_name, score) = hit
        cs = scanned[i][1]
        ce = scanned[i + length - 1][2]
        out.append(EntityAnnotation(window_text[cs:ce], cs, ce, entity_name, score))
        i += length
    return out


class GazetteerLinker:
    """Pluggable-linker adapter around a Gazetteer."""

    def __init__(self, gazetteer: Gazetteer, analyzer: Analyzer = DEFAULT_ANALYZER):
        self.gazetteer = gazetteer
        self.analyzer = analyzer

    def __call__(self, window_text: str, lcfg: LinkerConfig) -> list[EntityAnnotation]:
        return gazetteer_link(window_text, self.gazetteer, lcfg, self.analyzer)


# --- annotation files --------------------------------------------------------


def load_annotations(path: str | Path) -> dict[str, list[EntityAnnotation]]:
    """Load annotation JSONL, grouping by text id.

    Each line: {"id": str, "entities": [{"mention", "start", "end", "entity",
    "score"}, ...]}. Within-id deduplication is not applied here; dedup is
    link-time policy. Repeated ids merge their entity lists.
    """
    out: dict[str, list[EntityAnnotation]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            anns = out.setdefault(_record_id(record, path, lineno), [])
            entities = record.get("entities")
            if not isinstance(entities, list):
                raise FormatError(f"{path}:{lineno}: missing or non-list 'entities'")
            for ent in entities:
                anns.append(_parse_entity(ent, path, lineno))
    return out


def _record_id(record, path, lineno) -> str:
    if not isinstance(record, dict) or not isinstance(record.get("id"), str) or not record["id"]:
        raise FormatError(f"{path}:{lineno}: missing or non-string 'id'")
    return record["id"]


def _parse_entity(ent, path, lineno) -> EntityAnnotation:
    if not isinstance(ent, dict):
        raise FormatError(f"{path}:{lineno}: entity entry is not an object")
    try:
        mention = ent["mention"]
        start = ent["start"]
        end = ent["end"]
        entity = ent["entity"]
        score = ent["score"]
    except KeyError as exc:
        raise FormatError(f"{path}:{lineno}: entity entry missing key {exc}") from None
    if not isinstance(mention, str) or not isinstance(entity, str):
        raise FormatError(f"{path}:{lineno}: 'mention' and 'entity' must be strings")
    if not isinstance(start, int) or not isinstance(end, int) or isinstance(start, bool):
        raise FormatError(f"{path}:{lineno}: 'start' and 'end' must be integers")
    if not isinstance(score, (int, float)) or isinstance(score, bool):
        raise FormatError(f"{path}:{lineno}: 'score' must be a number")
    if end <= start or start < 0:
        raise FormatError(f"{path}:{lineno}: bad span [{start}, {end})")
    try:
        return EntityAnnotation(mention, start, end, entity, float(score))
    except ValueError as exc:
        raise FormatError(f"{path}:{lineno}: {exc}") from None


def write_annotations(
    annotations: Mapping[str, Sequence[EntityAnnotation]] | Iterable[tuple[str, Sequence[EntityAnnotation]]],
    path: str | Path,
) -> int:
    """Write annotation JSONL in iteration order. Returns lines written."""
    items = annotations.items() if isinstance(annotations, Mapping) else annotations
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for text_id, anns in items:
            record = {
                "id": text_id,
                "entities": [
                    {
                        "mention": a.mention,
                        "start": a.char_start,
                        "end": a.char_end,
                        "entity": a.entity_name,
                        "score": a.score,
                    }
                    for a in anns
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n
