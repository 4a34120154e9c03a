"""Query and passage expansion with linked entity names.

Entity terms are appended after the original text, space-separated, in
first-occurrence order. Explicit variants append the canonical name itself;
the hashed variant appends the MD5 hex digest of the name, one opaque token
per entity, so multi-word names match as a unit.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .corpus import Passage
from .linker import EntityAnnotation, entity_counts

log = logging.getLogger(__name__)

VARIANTS = ("none", "explicit", "hashed", "constant", "weighted")


@dataclass(frozen=True)
class ExpansionStrategy:
    """One of: none, explicit (single copy), hashed (single MD5 token),
    constant (fixed number of explicit copies), weighted (one explicit copy
    per mention occurrence)."""

    kind: str
    copies: int = 1

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ValueError(f"unknown expansion strategy {self.kind!r}")
        if self.copies < 1:
            raise ValueError("copies must be >= 1")

    @classmethod
    def parse(cls, spec: str) -> "ExpansionStrategy":
        """Parse a CLI-style spec: none|explicit|hashed|constant:<c>|weighted."""
        if spec.startswith("constant:"):
            return cls("constant", int(spec.split(":", 1)[1]))
        if spec == "constant":
            raise ValueError("constant strategy needs a copy count, e.g. constant:3")
        return cls(spec)

    def __str__(self) -> str:
        return f"constant:{self.copies}" if self.kind == "constant" else self.kind


@dataclass(frozen=True)
class ExpandedText:
    original: str
    appended_terms: tuple[str, ...]
    full_text: str


def hash_entity(entity_name: str) -> str:
    """MD5 of the UTF-8 bytes of the name, as 32 lowercase hex characters.

    The digest survives analysis as a single token, so it behaves as one
    indivisible term in the index.
    """
    if not entity_name:
        raise ValueError("cannot hash an empty entity name")
    return hashlib.md5(entity_name.encode("utf-8")).hexdigest()


def expand(
    text: str, entity_counts: Mapping[str, int], strategy: ExpansionStrategy
) -> ExpandedText:
    """Append entity terms to text according to the strategy.

    entity_counts maps entity name -> mention count; its iteration order is
    the append order (first-occurrence order when produced by the linker).
    """
    appended: list[str] = []
    if strategy.kind != "none":
        for name, count in entity_counts.items():
            if count < 1:
                raise ValueError(f"entity {name!r} has mention count {count} < 1")
            if strategy.kind == "explicit":
                appended.append(name)
            elif strategy.kind == "hashed":
                appended.append(hash_entity(name))
            elif strategy.kind == "constant":
                appended.extend([name] * strategy.copies)
            elif strategy.kind == "weighted":
                appended.extend([name] * count)
    if not appended:
        return ExpandedText(text, (), text)
    return ExpandedText(text, tuple(appended), text + " " + " ".join(appended))


def check_hash_collisions(entity_names: Iterable[str]) -> None:
    """Raise if two distinct names share an MD5 digest (never expected)."""
    seen: dict[str, str] = {}
    for name in entity_names:
        digest = hash_entity(name)
        other = seen.setdefault(digest, name)
        if other != name:
            raise ValueError(f"MD5 collision between {other!r} and {name!r}")


def expand_collection(
    passages: Iterable[Passage],
    annotations: Mapping[str, Sequence[EntityAnnotation]],
    strategy: ExpansionStrategy,
) -> Iterator[Passage]:
    """Expand each passage that has annotations; pass the rest through.

    Annotations that reference a passage id absent from the collection are
    reported with a warning after the stream is exhausted.
    """
    if strategy.kind == "hashed":
        check_hash_collisions(
            {a.entity_name for anns in annotations.values() for a in anns}
        )
    seen: set[str] = set()
    for passage in passages:
        seen.add(passage.id)
        anns = annotations.get(passage.id)
        if not anns or strategy.kind == "none":
            yield passage
            continue
        expanded = expand(passage.text, entity_counts(anns), strategy)
        yield Passage(passage.id, expanded.full_text)
    unknown = sorted(set(annotations) - seen)
    if unknown:
        shown = ", ".join(unknown[:5]) + ("..." if len(unknown) > 5 else "")
        log.warning(
            "%d annotation id(s) matched no passage and were skipped: %s",
            len(unknown),
            shown,
        )
