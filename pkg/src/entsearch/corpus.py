"""Collection, query, and qrels ingestion in MS MARCO / TREC formats."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


class FormatError(ValueError):
    """A line in an input file does not match its format contract."""


@dataclass(frozen=True)
class Passage:
    id: str
    text: str


@dataclass(frozen=True)
class Query:
    id: str
    text: str


@dataclass
class Qrels:
    """Relevance judgments: query id -> {passage id: grade}.

    A grade > 0 counts as relevant. Duplicate (qid, pid) pairs collapse
    keeping the maximum grade.
    """

    judgments: dict[str, dict[str, int]] = field(default_factory=dict)

    def add(self, qid: str, pid: str, grade: int) -> None:
        if grade < 0:
            raise ValueError(f"negative relevance grade {grade} for ({qid}, {pid})")
        per_query = self.judgments.setdefault(qid, {})
        per_query[pid] = max(grade, per_query.get(pid, 0))

    def relevant(self, qid: str) -> set[str]:
        return {pid for pid, grade in self.judgments.get(qid, {}).items() if grade > 0}

    def query_ids(self) -> list[str]:
        return list(self.judgments)

    def __len__(self) -> int:
        return len(self.judgments)


def _iter_tsv(path: str | Path) -> Iterator[tuple[int, str, str]]:
    """Yield (line number, id, text) from an `id<TAB>text` file."""
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if line.endswith("\r"):
                line = line[:-1]
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError(
                    f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            yield lineno, fields[0], fields[1]


def load_collection(path: str | Path, format: str = "tsv") -> Iterator[Passage]:
    """Stream passages from a TSV collection, in file order."""
    if format != "tsv":
        raise ValueError(f"unsupported collection format: {format!r}")
    seen: set[str] = set()
    for lineno, pid, text in _iter_tsv(path):
        if not pid:
            raise FormatError(f"{path}:{lineno}: empty passage id")
        if pid in seen:
            raise FormatError(f"{path}:{lineno}: duplicate passage id {pid!r}")
        seen.add(pid)
        yield Passage(pid, text)


def load_queries(path: str | Path) -> list[Query]:
    """Load a query set from a TSV file, one `id<TAB>text` line per query."""
    queries = []
    seen: set[str] = set()
    for lineno, qid, text in _iter_tsv(path):
        if not qid:
            raise FormatError(f"{path}:{lineno}: empty query id")
        if qid in seen:
            raise FormatError(f"{path}:{lineno}: duplicate query id {qid!r}")
        seen.add(qid)
        queries.append(Query(qid, text))
    return queries


def write_collection(passages: Iterable[Passage], path: str | Path) -> int:
    """Write passages as TSV (UTF-8, LF). Returns the number written.

    Tab or newline inside an id or text would corrupt the format, so they
    are rejected rather than escaped.
    """
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in passages:
            if any(c in p.id for c in "\t\n\r") or any(c in p.text for c in "\t\n\r"):
                raise ValueError(f"passage {p.id!r} contains a tab or newline")
            fh.write(f"{p.id}\t{p.text}\n")
            n += 1
    return n


def load_qrels(path: str | Path) -> Qrels:
    """Load TREC qrels: `qid 0 pid grade`, whitespace-separated."""
    qrels = Qrels()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            fields = raw.split()
            if not fields:
                continue
            if len(fields) != 4:
                raise FormatError(
                    f"{path}:{lineno}: expected 4 whitespace-separated fields, got {len(fields)}"
                )
            qid, _, pid, grade_str = fields
            try:
                grade = int(grade_str)
            except ValueError:
                raise FormatError(
                    f"{path}:{lineno}: relevance grade {grade_str!r} is not an integer"
                ) from None
            if grade < 0:
                raise FormatError(f"{path}:{lineno}: negative relevance grade {grade}")
            qrels.add(qid, pid, grade)
    return qrels
