import math
import random

import pytest

from entsearch.corpus import Qrels
from entsearch.evaluation import (
    HardSetSpec,
    mine_hard_queries,
    paired_ttest,
    percent_improvement,
    read_report_csv,
    recall_at,
    recall_curve,
    write_report_csv,
    write_summary_csv,
)
from entsearch.fusion import Run


def run_of(tag, **rankings):
    return Run(
        tag,
        {qid: [(pid, float(len(pids) - i)) for i, pid in enumerate(pids)] for qid, pids in rankings.items()},
    )


def qrels_of(**pairs):
    qrels = Qrels()
    for qid, pids in pairs.items():
        for pid in pids:
            qrels.add(qid, pid, 1)
    return qrels


def test_recall_single_hit():
    run = run_of("t", q1=["a", "b", "rel"])
    report = recall_at(run, qrels_of(q1=["rel"]), 1000)
    assert report.per_query["q1"] == [1.0]
    assert report.means == [1.0]


def test_recall_missed_pid_is_zero():
    run = run_of("t", q1=["a", "b"])
    report = recall_at(run, qrels_of(q1=["rel"]), 1000)
    assert report.per_query["q1"] == [0.0]


def test_recall_query_absent_from_run_scores_zero():
    run = run_of("t", q1=["rel"])
    report = recall_at(run, qrels_of(q1=["rel"], q2=["x"]), 10)
    assert report.per_query["q2"] == [0.0]
    assert report.means == [0.5]


def test_recall_queries_without_judgments_excluded():
    run = run_of("t", q1=["rel"], q9=["a"])
    report = recall_at(run, qrels_of(q1=["rel"]), 10)
    assert set(report.per_query) == {"q1"}


def test_recall_five_query_hand_count():
    run = run_of(
        "t",
        q1=["x", "p1"],
        q2=["p2"] + [f"f{i}" for i in range(10)] + ["p3"],  # p3 at rank 12
        q3=["a", "b"],
        q4=["p5"],
    )
    qrels = qrels_of(q1=["p1"], q2=["p2", "p3"], q3=["p4"], q4=["p5"], q5=["p6"])
    report = recall_curve(run, qrels, [10, 100])
    assert report.per_query["q1"] == [1.0, 1.0]
    assert report.per_query["q2"] == [0.5, 1.0]
    assert report.per_query["q3"] == [0.0, 0.0]
    assert report.per_query["q4"] == [1.0, 1.0]
    assert report.per_query["q5"] == [0.0, 0.0]
    assert report.means == [pytest.approx(0.5), pytest.approx(0.6)]


def test_recall_curve_rank50():
    run = run_of("t", q1=[f"f{i}" for i in range(49)] + ["rel"])
    report = recall_curve(run, qrels_of(q1=["rel"]), [10, 100, 1000])
    assert report.per_query["q1"] == [0.0, 1.0, 1.0]


def test_recall_curve_single_cutoff_equals_recall_at():
    run = run_of("t", q1=["a", "rel"])
    qrels = qrels_of(q1=["rel"])
    assert recall_curve(run, qrels, [5]).per_query == recall_at(run, qrels, 5).per_query


def test_recall_curve_requires_increasing_cutoffs():
    run = run_of("t", q1=["a"])
    with pytest.raises(ValueError):
        recall_curve(run, qrels_of(q1=["a"]), [10, 10])


def brute_force_recall(run, qrels, qid, cutoff):
    relevant = qrels.relevant(qid)
    top = {pid for pid, _ in run.rankings.get(qid, [])[:cutoff]}
    return len(top & relevant) / len(relevant)


def test_recall_curve_monotone_and_matches_brute_force():
    rng = random.Random(59)
    for _ in range(50):
        n_q = rng.randrange(1, 6)
        rankings = {}
        qrels = Qrels()
        for q in range(n_q):
            qid = f"q{q}"
            pids = [str(p) for p in rng.sample(range(60), rng.randrange(1, 40))]
            rankings[qid] = pids
            for pid in rng.sample(range(60), rng.randrange(1, 4)):
                qrels.add(qid, str(pid), 1)
        run = run_of("t", **rankings)
        cutoffs = [1, 5, 20, 60]
        report = recall_curve(run, qrels, cutoffs)
        for qid, values in report.per_query.items():
            assert all(a <= b for a, b in zip(values, values[1:]))
            for c, v in zip(cutoffs, values):
                assert v == pytest.approx(brute_force_recall(run, qrels, qid, c))


def test_paired_ttest_fixture():
    # d = [1,2,3,4,5]: t = 3 / (1.5811.../sqrt(5)); oracle values pinned from
    # an independent statistics implementation
    a = {f"q{i}": float(v) for i, v in enumerate([2, 4, 6, 8, 10])}
    b = {f"q{i}": float(v) for i, v in enumerate([1, 2, 3, 4, 5])}
    res = paired_ttest(a, b)
    assert res.t_statistic == pytest.approx(4.242640687119285, abs=1e-9)
    assert res.p_value == pytest.approx(0.013235599563682690, abs=1e-9)
    assert res.degrees_freedom == 4
    assert res.mean_difference == pytest.approx(3.0)


def test_paired_ttest_identical_inputs():
    a = {"q1": 0.5, "q2": 0.25, "q3": 0.75}
    res = paired_ttest(a, dict(a))
    assert res.mean_difference == 0.0
    assert res.p_value == 1.0


def test_paired_ttest_swap_negates_t_preserves_p():
    a = {"q1": 0.9, "q2": 0.7, "q3": 0.4, "q4": 0.85}
    b = {"q1": 0.6, "q2": 0.75, "q3": 0.3, "q4": 0.5}
    ab = paired_ttest(a, b)
    ba = paired_ttest(b, a)
    assert ab.t_statistic == pytest.approx(-ba.t_statistic, rel=1e-12)
    assert ab.p_value == pytest.approx(ba.p_value, rel=1e-12)


def test_paired_ttest_zero_variance_nonzero_mean():
    a = {"q1": 1.0, "q2": 2.0}
    b = {"q1": 0.5, "q2": 1.5}
    res = paired_ttest(a, b)
    assert res.p_value == 0.0
    assert math.isinf(res.t_statistic)


def test_paired_ttest_key_mismatch():
    with pytest.raises(ValueError):
        paired_ttest({"q1": 1.0, "q2": 2.0}, {"q1": 1.0, "q3": 2.0})


def test_percent_improvement_identity_and_errors():
    assert percent_improvement(0.7, 0.7) == 0.0
    with pytest.raises(ValueError):
        percent_improvement(0.5, 0.0)
    with pytest.raises(ValueError):
        percent_improvement(0.5, -1.0)


def test_percent_improvement_reference_pairs():
    assert percent_improvement(0.8868, 0.8573) == pytest.approx(3.44, abs=0.01)
    assert percent_improvement(0.9087, 0.8868) == pytest.approx(2.47, abs=0.01)


def test_mine_hard_common_query():
    # qid "7" sits in every worst half of four rankers
    runs = []
    for r in range(4):
        values = {f"q{i}": 1.0 for i in range(9)}
        values["7"] = 0.0
        runs.append((f"run{r}", values))
    hard = mine_hard_queries(runs, HardSetSpec(0.5, 4))
    assert "7" in hard


def test_mine_hard_too_few_runs():
    with pytest.raises(ValueError, match="min_rankers"):
        mine_hard_queries([("a", {"q": 1.0})], HardSetSpec(0.5, 4))


def test_mine_hard_min_rankers_monotone_subsets():
    rng = random.Random(67)
    for _ in range(20):
        runs = []
        for r in range(5):
            runs.append((f"r{r}", {f"q{i}": rng.random() for i in range(10)}))
        sets = [mine_hard_queries(runs, HardSetSpec(0.5, m)) for m in range(1, 6)]
        for smaller, larger in zip(sets[1:], sets):
            assert smaller <= larger


def brute_force_hard(per_run, worst_fraction, min_rankers):
    worst_sets = []
    for _, values in per_run:
        ordered = sorted(values, key=lambda qid: (values[qid], qid))
        worst_sets.append(set(ordered[: int(worst_fraction * len(ordered))]))
    all_qids = set().union(*worst_sets)
    return {qid for qid in all_qids if sum(qid in w for w in worst_sets) >= min_rankers}


def test_mine_hard_matches_brute_force():
    rng = random.Random(71)
    for _ in range(30):
        runs = [
            (f"r{r}", {f"q{i}": rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for i in range(10)})
            for r in range(5)
        ]
        spec = HardSetSpec(0.5, rng.randrange(1, 6))
        assert mine_hard_queries(runs, spec) == brute_force_hard(runs, 0.5, spec.min_rankers)


def test_report_csv_round_trip(tmp_path):
    run = run_of("t", q1=["rel", "x"], q2=["y"])
    qrels = qrels_of(q1=["rel"], q2=["z"])
    report = recall_curve(run, qrels, [10, 100])
    path = tmp_path / "report.csv"
    write_report_csv(report, path)
    again = read_report_csv(path)
    assert again.cutoffs == report.cutoffs
    assert again.per_query == report.per_query
    assert again.means == report.means


def test_summary_csv(tmp_path):
    run = run_of("t", q1=["rel"])
    report = recall_at(run, qrels_of(q1=["rel"]), 10)
    path = tmp_path / "summary.csv"
    write_summary_csv([("t", report)], path)
    assert path.read_text().splitlines() == ["tag,cutoff,mean", "t,10,1.0"]
