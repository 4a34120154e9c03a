"""Run combination: Reciprocal Rank Fusion and the per-query oracle.

Runs are ranked lists of (passage id, score) per query, serializable in the
six-column TREC format `qid Q0 pid rank score tag`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import FormatError, Qrels


@dataclass
class Run:
    """tag plus, per query id, passages in rank order with scores."""

    tag: str
    rankings: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def query_ids(self) -> list[str]:
        return list(self.rankings)

    def validate(self) -> None:
        for qid, ranked in self.rankings.items():
            pids = [pid for pid, _ in ranked]
            if len(set(pids)) != len(pids):
                raise ValueError(f"run {self.tag!r}: duplicate passage in query {qid!r}")
            scores = [score for _, score in ranked]
            if any(a < b for a, b in zip(scores, scores[1:])):
                raise ValueError(f"run {self.tag!r}: scores increase within query {qid!r}")


@dataclass(frozen=True)
class FusionConfig:
    rrf_k: int = 60
    depth: int = 1000

    def __post_init__(self):
        if self.rrf_k < 0:
            raise ValueError("rrf_k must be >= 0")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    def to_dict(self) -> dict:
        return {"rrf_k": self.rrf_k, "depth": self.depth}


def rrf(runs: Sequence[Run], cfg: FusionConfig = FusionConfig(), tag: str = "rrf") -> Run:
    """Fuse runs by summing 1 / (rrf_k + rank) per passage.

    Inputs are considered to cfg.depth and the fused list is truncated to
    cfg.depth. Ties break by ascending passage id. Contributions are summed
    with math.fsum, so the result does not depend on run order.
    """
    if not runs:
        raise ValueError("rrf needs at least one run")
    qids = sorted({qid for run in runs for qid in run.rankings})
    fused: dict[str, list[tuple[str, float]]] = {}
    for qid in qids:
        contribs: dict[str, list[float]] = {}
        for run in runs:
            ranked = run.rankings.get(qid, ())
            for rank, (pid, _) in enumerate(ranked[: cfg.depth], 1):
                contribs.setdefault(pid, []).append(1.0 / (cfg.rrf_k + rank))
        scored = [(pid, math.fsum(parts)) for pid, parts in contribs.items()]
        scored.sort(key=lambda item: (-item[1], item[0]))
        fused[qid] = scored[: cfg.depth]
    return Run(tag, fused)


def oracle(runs: Sequence[Run], qrels: Qrels, tag: str = "oracle") -> Run:
    """Best-of-runs upper bound: per query, copy the run whose best-ranked
    judged-relevant passage sits highest.

    Ties between runs, and queries where no run retrieves any judged passage,
    resolve to the earliest run in argument order (among runs that returned
    anything for the query). A query present in qrels but missing from every
    run is emitted with an empty ranking.
    """
    if not runs:
        raise ValueError("oracle needs at least one run")
    qids = sorted({qid for run in runs for qid in run.rankings} | set(qrels.query_ids()))
    out: dict[str, list[tuple[str, float]]] = {}
    for qid in qids:
        relevant = qrels.relevant(qid)
        best_key = None
        selected = None
        for position, run in enumerate(runs):
            ranked = run.rankings.get(qid)
            if not ranked:
                continue
            best_rank = math.inf
            for rank, (pid, _) in enumerate(ranked, 1):
                if pid in relevant:
                    best_rank = rank
                    break
            key = (best_rank, position)
            if best_key is None or key < best_key:
                best_key = key
                selected = ranked
        out[qid] = list(selected) if selected is not None else []
    return Run(tag, out)


def best_judged_rank(run: Run, qid: str, qrels: Qrels) -> int | None:
    """Rank of the highest-placed judged-relevant passage, or None."""
    relevant = qrels.relevant(qid)
    for rank, (pid, _) in enumerate(run.rankings.get(qid, ()), 1):
        if pid in relevant:
            return rank
    return None


def read_run(path: str | Path) -> Run:
    """Read a TREC run file. The tag is taken from the first line."""
    rankings: dict[str, list[tuple[str, float]]] = {}
    seen: dict[str, set[str]] = {}
    tag = ""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            fields = raw.split()
            if not fields:
                continue
            if len(fields) != 6:
                raise FormatError(
                    f"{path}:{lineno}: expected 6 whitespace-separated fields, got {len(fields)}"
                )
            qid, _, pid, rank_str, score_str, line_tag = fields
            try:
                int(rank_str)
                score = float(score_str)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric rank or score") from None
            if not tag:
                tag = line_tag
            ranked = rankings.setdefault(qid, [])
            pids = seen.setdefault(qid, set())
            if pid in pids:
                raise FormatError(f"{path}:{lineno}: duplicate passage {pid!r} for query {qid!r}")
            pids.add(pid)
            if ranked and score > ranked[-1][1]:
                raise FormatError(
                    f"{path}:{lineno}: score increases within query {qid!r}"
                )
            ranked.append((pid, score))
    return Run(tag, rankings)


def write_run(run: Run, path: str | Path) -> int:
    """Write a run in TREC format; ranks renumbered from list order.

    Queries are written in sorted id order and scores with 6 significant
    digits, so rewriting a run read back from disk is byte-identical.
    Returns the number of lines written.
    """
    tag = run.tag or "run"
    if any(c.isspace() for c in tag):
        raise ValueError(f"run tag {tag!r} contains whitespace")
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for qid in sorted(run.rankings):
            if any(c.isspace() for c in qid):
                raise ValueError(f"query id {qid!r} contains whitespace")
            for rank, (pid, score) in enumerate(run.rankings[qid], 1):
                if any(c.isspace() for c in pid):
                    raise ValueError(f"passage id {pid!r} contains whitespace")
                fh.write(f"{qid} Q0 {pid} {rank} {score:.6g} {tag}\n")
                n += 1
    return n
