"""Recall@k, recall curves, paired significance tests, and hard-query mining.

Recall is macro-averaged: the mean of per-query recall over queries that have
at least one judged-relevant passage. Queries judged but absent from a run
score zero; queries without judgments are excluded.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean, stdev
from typing import Mapping, Sequence

from .corpus import FormatError, Qrels
from .fusion import Run


@dataclass
class RecallReport:
    cutoffs: list[int]
    per_query: dict[str, list[float]]  # qid -> recall per cutoff
    means: list[float]

    def mean_at(self, cutoff: int) -> float:
        return self.means[self.cutoffs.index(cutoff)]

    def query_values(self, cutoff: int) -> dict[str, float]:
        i = self.cutoffs.index(cutoff)
        return {qid: values[i] for qid, values in self.per_query.items()}


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_freedom: int
    p_value: float
    mean_difference: float


@dataclass(frozen=True)
class HardSetSpec:
    worst_fraction: float = 0.5
    min_rankers: int = 4

    def __post_init__(self):
        if not 0.0 < self.worst_fraction <= 1.0:
            raise ValueError("worst_fraction must be in (0, 1]")
        if self.min_rankers < 1:
            raise ValueError("min_rankers must be >= 1")


def recall_curve(run: Run, qrels: Qrels, cutoffs: Sequence[int]) -> RecallReport:
    """Per-query and mean recall at each cutoff (strictly increasing)."""
    cutoffs = list(cutoffs)
    if not cutoffs or any(c < 1 for c in cutoffs):
        raise ValueError("cutoffs must be positive")
    if any(a >= b for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    per_query: dict[str, list[float]] = {}
    for qid in sorted(qrels.query_ids()):
        relevant = qrels.relevant(qid)
        if not relevant:
            continue
        # 1-based ranks at which relevant passages appear, ascending
        hit_ranks = [
            rank
            for rank, (pid, _) in enumerate(run.rankings.get(qid, ()), 1)
            if pid in relevant
        ]
        per_query[qid] = [bisect_right(hit_ranks, c) / len(relevant) for c in cutoffs]
    if per_query:
        means = [fmean(values[i] for values in per_query.values()) for i in range(len(cutoffs))]
    else:
        means = [0.0] * len(cutoffs)
    return RecallReport(cutoffs, per_query, means)


def recall_at(run: Run, qrels: Qrels, cutoff: int) -> RecallReport:
    """Recall at a single cutoff."""
    return recall_curve(run, qrels, [cutoff])


def paired_ttest(a: Mapping[str, float], b: Mapping[str, float]) -> TTestResult:
    """Two-sided paired Student's t-test over matching query keys.

    p comes from the t-distribution CDF via the regularized incomplete beta
    function. Degenerate zero-variance differences use the documented
    conventions: p = 1 when the mean difference is also zero, p = 0 otherwise.
    """
    if set(a) != set(b):
        raise ValueError("paired t-test requires identical query key sets")
    qids = sorted(a)
    n = len(qids)
    if n < 2:
        raise ValueError("paired t-test requires at least 2 pairs")
    diffs = [a[qid] - b[qid] for qid in qids]
    mean_diff = fmean(diffs)
    sd = stdev(diffs)
    df = n - 1
    if sd == 0.0:
        if mean_diff == 0.0:
            return TTestResult(0.0, df, 1.0, 0.0)
        return TTestResult(math.copysign(math.inf, mean_diff), df, 0.0, mean_diff)
    t = mean_diff / (sd / math.sqrt(n))
    from scipy.special import betainc  # deferred: keeps CLI startup light

    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t, df, min(max(p, 0.0), 1.0), mean_diff)


def percent_improvement(new: float, base: float) -> float:
    """Relative improvement of new over base, in percent."""
    if base <= 0:
        raise ValueError("baseline must be positive")
    return 100.0 * (new - base) / base


def mine_hard_queries(
    per_run_metric: Sequence[tuple[str, Mapping[str, float]]],
    spec: HardSetSpec = HardSetSpec(),
) -> set[str]:
    """Queries falling in the worst fraction of at least min_rankers runs.

    Each run's worst set is the first floor(worst_fraction * n) queries by
    ascending (value, qid); qid ordering makes boundary ties deterministic.
    """
    if len(per_run_metric) < spec.min_rankers:
        raise ValueError(
            f"need at least min_rankers={spec.min_rankers} runs, got {len(per_run_metric)}"
        )
    membership: dict[str, int] = {}
    for _, values in per_run_metric:
        ordered = sorted(values.items(), key=lambda item: (item[1], item[0]))
        worst = ordered[: int(spec.worst_fraction * len(ordered))]
        for qid, _ in worst:
            membership[qid] = membership.get(qid, 0) + 1
    return {qid for qid, count in membership.items() if count >= spec.min_rankers}


# --- report files -------------------------------------------------------------
# Per-query CSV rows are `metric,cutoff,qid,value`; the aggregate mean for a
# cutoff is carried on a row with qid "all", which is what the plot command
# consumes.

AGGREGATE_QID = "all"


def write_report_csv(report: RecallReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "cutoff", "qid", "value"])
        for i, cutoff in enumerate(report.cutoffs):
            for qid in sorted(report.per_query):
                writer.writerow(["recall", cutoff, qid, repr(report.per_query[qid][i])])
            writer.writerow(["recall", cutoff, AGGREGATE_QID, repr(report.means[i])])


def read_report_csv(path: str | Path) -> RecallReport:
    cutoffs: list[int] = []
    per_query: dict[str, dict[int, float]] = {}
    means: dict[int, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["metric", "cutoff", "qid", "value"]:
            raise FormatError(f"{path}: not a report CSV (bad header {header})")
        for row in reader:
            if len(row) != 4:
                raise FormatError(f"{path}: malformed row {row}")
            _, cutoff_str, qid, value_str = row
            try:
                cutoff = int(cutoff_str)
                value = float(value_str)
            except ValueError:
                raise FormatError(f"{path}: non-numeric row {row}") from None
            if cutoff not in cutoffs:
                cutoffs.append(cutoff)
            if qid == AGGREGATE_QID:
                means[cutoff] = value
            else:
                per_query.setdefault(qid, {})[cutoff] = value
    cutoffs.sort()
    report = RecallReport(
        cutoffs,
        {qid: [values[c] for c in cutoffs] for qid, values in per_query.items()},
        [means.get(c, 0.0) for c in cutoffs],
    )
    return report


def write_summary_csv(entries: Sequence[tuple[str, RecallReport]], path: str | Path) -> None:
    """Summary table: one `tag,cutoff,mean` row per (run, cutoff)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tag", "cutoff", "mean"])
        for tag, report in entries:
            for cutoff, mean in zip(report.cutoffs, report.means):
                writer.writerow([tag, cutoff, repr(mean)])
