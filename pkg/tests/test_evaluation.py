import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import trec_reference
from metric_fixtures import all_fixtures
from tableqa.errors import NoRelevantError, ParseError
from tableqa.evaluation import (
    MetricReport,
    Qrels,
    RunEntry,
    average_precision,
    cell_docid,
    evaluate_run,
    hit_at_1,
    ndcg_at_k,
    parse_cell_docid,
    parse_qrels,
    parse_run,
    precision_at_k,
    reciprocal_rank,
    write_qrels,
    write_run,
)
from tableqa.tables import CellRef

# frozen from hand computation: DCG = 1 + 0 + 1/2; IDCG = 1 + 1/log2(3)
WORKED_NDCG = 1.5 / (1.0 + 1.0 / math.log2(3.0))
# relevant at ranks 1 and 3 with R = 2: (1 + 2/3) / 2
WORKED_AP = 5.0 / 6.0


class TestPrecision:
    def test_three_of_five(self):
        grades = {f"d{i}": 1 for i in range(3)}
        ranking = ["d0", "d1", "d2", "x", "y"]
        assert precision_at_k(ranking, grades, 5) == pytest.approx(0.6)

    def test_padding_rule(self):
        grades = {"d0": 1, "d1": 1}
        assert precision_at_k(["d0", "d1"], grades, 5) == pytest.approx(0.4)

    def test_none_relevant(self):
        assert precision_at_k(["x", "y"], {"gold": 1}, 5) == 0.0

    def test_k_validation(self):
        with pytest.raises(ValueError):
            precision_at_k(["d0"], {"d0": 1}, 0)


class TestNdcg:
    def test_worked_example(self):
        grades = {"d1": 1, "d2": 0, "d3": 1}
        value = ndcg_at_k(["d1", "d2", "d3"], grades, 3)
        assert value == pytest.approx(WORKED_NDCG, abs=1e-12)
        assert value == pytest.approx(0.9197, abs=1e-4)

    def test_perfect_ranking(self):
        grades = {"d1": 1, "d2": 1}
        assert ndcg_at_k(["d1", "d2"], grades, 5) == pytest.approx(1.0)

    def test_relevant_past_cutoff(self):
        grades = {"d9": 1}
        assert ndcg_at_k(["a", "b", "c", "d9"], grades, 3) == 0.0

    def test_no_relevant_raises(self):
        with pytest.raises(NoRelevantError):
            ndcg_at_k(["a"], {"a": 0}, 5)

    def test_graded_gains(self):
        grades = {"hi": 3, "lo": 1}
        ideal = ndcg_at_k(["hi", "lo"], grades, 2)
        swapped = ndcg_at_k(["lo", "hi"], grades, 2)
        assert ideal == pytest.approx(1.0)
        assert swapped < ideal


class TestAveragePrecision:
    def test_worked_example(self):
        grades = {"da": 1, "dc": 1}
        value = average_precision(["da", "db", "dc"], grades)
        assert value == pytest.approx(WORKED_AP, abs=1e-12)
        assert value == pytest.approx(0.8333, abs=1e-4)

    def test_single_relevant_at_rank_1(self):
        assert average_precision(["d0"], {"d0": 1}) == pytest.approx(1.0)

    def test_relevant_never_retrieved(self):
        assert average_precision(["x", "y"], {"gold": 1}) == 0.0

    def test_unretrieved_relevant_counts_in_denominator(self):
        grades = {"d0": 1, "gone": 1}
        assert average_precision(["d0"], grades) == pytest.approx(0.5)

    def test_no_relevant_raises(self):
        with pytest.raises(NoRelevantError):
            average_precision(["a"], {})


class TestRankMetrics:
    def test_first_correct_at_rank_2(self):
        assert reciprocal_rank(["x", "gold"], {"gold"}) == pytest.approx(0.5)

    def test_never_retrieved(self):
        assert reciprocal_rank(["x", "y"], {"gold"}) == 0.0
        assert hit_at_1(["x", "y"], {"gold"}) == 0.0

    def test_hit_at_1(self):
        assert hit_at_1(["gold", "x"], {"gold"}) == 1.0
        assert hit_at_1([], {"gold"}) == 0.0


class TestFiles:
    def test_parse_qrels_line(self, tmp_path):
        p = tmp_path / "q.qrels"
        p.write_text("q1 0 t7 1\n")
        qrels = parse_qrels(p)
        assert qrels.grades == {"q1": {"t7": 1}}

    def test_run_line_format(self, tmp_path):
        p = tmp_path / "r.run"
        write_run(p, {"q1": [("t7", 1.234567)]}, tag="sysrun")
        assert p.read_text() == "q1 Q0 t7 1 1.234567 sysrun\n"

    def test_malformed_qrels_line(self, tmp_path):
        p = tmp_path / "q.qrels"
        p.write_text("q1 0 t7 1\nq2 t9 1\n")
        with pytest.raises(ParseError) as err:
            parse_qrels(p)
        assert err.value.line_number == 2

    def test_qrels_roundtrip(self, tmp_path):
        qrels = Qrels({"q1": {"t1": 1, "t2": 0}, "q2": {"t9": 2}})
        p = tmp_path / "q.qrels"
        write_qrels(p, qrels)
        assert parse_qrels(p) == qrels

    def test_run_roundtrip(self, tmp_path):
        run = {"q1": [("a", 2.5), ("b", 1.25)], "q2": [("c", 0.5)]}
        p = tmp_path / "r.run"
        write_run(p, run)
        parsed = parse_run(p)
        assert [(e.docid, e.score) for e in parsed["q1"]] == run["q1"]
        assert [e.rank for e in parsed["q1"]] == [1, 2]

    def test_parse_run_rejects_gapped_ranks(self, tmp_path):
        p = tmp_path / "r.run"
        p.write_text("q1 Q0 a 1 2.0 t\nq1 Q0 b 3 1.0 t\n")
        with pytest.raises(ParseError):
            parse_run(p)

    def test_parse_run_rejects_increasing_scores(self, tmp_path):
        p = tmp_path / "r.run"
        p.write_text("q1 Q0 a 1 1.0 t\nq1 Q0 b 2 2.0 t\n")
        with pytest.raises(ParseError):
            parse_run(p)

    def test_cell_docid_roundtrip(self):
        docid = cell_docid("t12", CellRef(3, 4))
        assert docid == "t12#r3c4"
        assert parse_cell_docid(docid) == ("t12", CellRef(3, 4))
        with pytest.raises(ValueError):
            parse_cell_docid("plain-table-id")


class TestEvaluateRun:
    def run_of(self, run):
        return {
            qid: [RunEntry(d, i + 1, s) for i, (d, s) in enumerate(entries)]
            for qid, entries in run.items()
        }

    def test_skip_and_report(self):
        qrels = Qrels({"q1": {"d1": 1}, "q2": {"d1": 0}, "q4": {"d9": 1}})
        run = self.run_of({"q1": [("d1", 1.0)], "q2": [("d1", 1.0)], "q3": [("d1", 1.0)]})
        report = evaluate_run(run, qrels)
        assert report.evaluated == ["q1"]
        assert ("q2", "no relevant documents") in report.skipped
        assert ("q3", "no qrels entry") in report.skipped
        assert ("q4", "not in run") in report.skipped
        assert report.averages["P@5"] == pytest.approx(0.2)

    def test_all_metrics_in_unit_interval(self):
        qrels = Qrels({"q1": {"d1": 1, "d3": 1}})
        run = self.run_of({"q1": [("d1", 3.0), ("d2", 2.0), ("d3", 1.0)]})
        report = evaluate_run(run, qrels)
        for metric, per_q in report.per_query.items():
            for value in per_q.values():
                assert 0.0 <= value <= 1.0, metric

    def test_report_serialization(self):
        qrels = Qrels({"q1": {"d1": 1}})
        run = self.run_of({"q1": [("d1", 1.0)]})
        report = evaluate_run(run, qrels)
        d = report.to_dict()
        assert d["averages"]["MRR"] == 1.0
        text = report.format_table()
        assert "MAP" in text and "queries evaluated: 1" in text

    def test_score_rewriting_invariance(self):
        # metrics depend on rank order only
        qrels = Qrels({"q1": {"d2": 1}})
        a = self.run_of({"q1": [("d1", 9.0), ("d2", 3.0)]})
        b = self.run_of({"q1": [("d1", 0.002), ("d2", 0.001)]})
        assert evaluate_run(a, qrels).averages == evaluate_run(b, qrels).averages


class TestOracleEquivalence:
    @pytest.mark.parametrize("name,qrels_grades,run", all_fixtures())
    def test_matches_reference_evaluator(self, name, qrels_grades, run):
        run_entries = {
            qid: [RunEntry(d, i + 1, s) for i, (d, s) in enumerate(entries)]
            for qid, entries in run.items()
        }
        report = evaluate_run(run_entries, Qrels(qrels_grades))
        ref_per_query, ref_averages = trec_reference.evaluate(qrels_grades, run)
        for metric in report.metrics:
            assert report.averages[metric] == pytest.approx(
                ref_averages[metric], abs=1e-4
            ), f"{name}: {metric}"
            for qid, value in report.per_query[metric].items():
                assert value == pytest.approx(
                    ref_per_query[metric][qid], abs=1e-4
                ), f"{name}: {metric} {qid}"

    def test_fixture_count(self):
        assert len(all_fixtures()) >= 25


@given(
    st.dictionaries(
        st.sampled_from([f"d{i}" for i in range(12)]),
        st.integers(0, 3),
        min_size=1,
        max_size=12,
    ),
    st.permutations([f"d{i}" for i in range(12)]),
)
@settings(max_examples=100, deadline=None)
def test_metrics_against_reference_on_random_binary_and_graded(grades, order):
    if not any(g > 0 for g in grades.values()):
        return
    ranking = [d for d in order if d in grades]
    run_q = [(d, float(len(ranking) - i)) for i, d in enumerate(ranking)]
    assert precision_at_k(ranking, grades, 5) == pytest.approx(
        trec_reference.precision_at(run_q, grades, 5)
    )
    assert ndcg_at_k(ranking, grades, 10) == pytest.approx(
        trec_reference.ndcg_cut(run_q, grades, 10)
    )
    assert average_precision(ranking, grades) == pytest.approx(
        trec_reference.average_precision(run_q, grades)
    )
    relevant = {d for d, g in grades.items() if g > 0}
    assert reciprocal_rank(ranking, relevant) == pytest.approx(
        trec_reference.recip_rank(run_q, grades)
    )
