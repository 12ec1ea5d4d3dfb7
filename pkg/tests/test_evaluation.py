import json

import pytest

from proplab.evaluation import (
    BehaviorClass,
    IndexGap,
    LengthMismatch,
    PredictionRecord,
    Score,
    aggregate_pattern_accuracies,
    behavior_summary,
    classify_behavior,
    emit_report,
    evaluate_records,
    overlap,
    parse_prediction,
    records_from_token_lists,
    score,
)
from proplab.formulas import parse_polish
from proplab.generate import Datapoint
from proplab.semantics import pick_target
from proplab.templates import BehaviorPair


def _dp(formula_text, target):
    return Datapoint(formula=parse_polish(formula_text), target=target)


TABLE_DP = _dp("& ! a | b c", {"a": 0, "b": 1})


class TestScore:
    @pytest.mark.parametrize(
        "pred,expected",
        [
            ("a 1 b 0", Score.INCORRECT),
            ("a 0 b 0 c 1", Score.SEMANTIC),
            ("a 0 c 1", Score.SEMANTIC),
            ("a 0 b 1", Score.SYNTACTIC),
        ],
    )
    def test_reference_rows(self, pred, expected):
        assert score(TABLE_DP, pred.split()) is expected

    @pytest.mark.parametrize("pred", ["a 0 a 1", "a", "a 2", "0 a", "z 1", ""])
    def test_malformed(self, pred):
        assert score(TABLE_DP, pred.split()) is Score.MALFORMED

    def test_unsorted_but_valid_is_semantic(self):
        assert score(TABLE_DP, "b 1 a 0".split()) is Score.SEMANTIC

    def test_foreign_variable_is_incorrect(self):
        assert score(_dp("a", {"a": 1}), "b 1".split()) is Score.INCORRECT

    def test_complete_valid_extension_is_semantic(self):
        assert score(TABLE_DP, "a 0 b 1 c 0".split()) is Score.SEMANTIC


class TestParsePrediction:
    def test_valid(self):
        assert parse_prediction("a 0 e 1".split()) == {"a": 0, "e": 1}

    def test_unsorted_still_parses(self):
        assert parse_prediction("e 1 a 0".split()) == {"a": 0, "e": 1}

    def test_empty_is_malformed(self):
        assert parse_prediction([]) is None


class TestEvaluateRecords:
    def _dataset(self):
        return [
            TABLE_DP,
            _dp("! & a b", pick_target(parse_polish("! & a b"))),
            _dp("| d e", pick_target(parse_polish("| d e"))),
        ]

    def test_all_targets_scores_one(self):
        dataset = self._dataset()
        from proplab.semantics import assignment_tokens

        records = records_from_token_lists(
            [assignment_tokens(dp.target) for dp in dataset]
        )
        report = evaluate_records(dataset, records)
        assert report.syntactic_acc == report.semantic_acc == 1.0
        assert report.malformed_rate == 0.0

    def test_semantic_exceeds_syntactic(self):
        dataset = [TABLE_DP, TABLE_DP]
        records = records_from_token_lists([["a", "0", "b", "1"], ["a", "0", "c", "1"]])
        report = evaluate_records(dataset, records)
        assert report.syntactic_acc == 0.5
        assert report.semantic_acc == 1.0

    def test_pattern_slices(self):
        dataset = self._dataset()
        records = records_from_token_lists([["a", "0", "b", "1"], ["a", "0"], ["d", "1"]])
        report = evaluate_records(dataset, records)
        p1 = report.pattern_slices["P1"]
        assert p1["contains"].n == 1
        assert p1["not_contains"].n == 2
        assert p1["contains"].semantic_acc == 1.0
        assert sum(side.n for side in p1.values()) == report.n

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            evaluate_records(self._dataset(), records_from_token_lists([["a", "1"]]))

    def test_index_gap(self):
        dataset = self._dataset()
        records = [
            PredictionRecord(0, ("a", "0", "b", "1")),
            PredictionRecord(2, ("a", "0")),
            PredictionRecord(3, ("d", "1")),
        ]
        with pytest.raises(IndexGap):
            evaluate_records(dataset, records)

    def test_empty_dataset(self):
        report = evaluate_records([], [])
        assert report.n == 0
        assert report.syntactic_acc == 0.0


NEG_AND = BehaviorPair(
    original=parse_polish("! & e b"), modified=parse_polish("& e b")
)


class TestBehavior:
    def test_correct_prediction(self):
        # b=0 e=1 satisfies the negated conjunction
        assert classify_behavior(NEG_AND, "b 0 e 1".split(), "b 1 e 1".split()) is BehaviorClass.A

    def test_unchanged_prediction(self):
        assert classify_behavior(NEG_AND, "b 1 e 1".split(), "b 1 e 1".split()) is BehaviorClass.B

    def test_alternative_prediction(self):
        # b=1 e=1 falsifies the original but satisfies the unnegated version
        assert classify_behavior(NEG_AND, "b 1 e 1".split(), "a 1".split()) is BehaviorClass.C

    def test_other_prediction(self):
        assert classify_behavior(NEG_AND, "b 1".split(), "e 1".split()) is BehaviorClass.D

    def test_malformed_unchanged_is_b(self):
        assert classify_behavior(NEG_AND, [], []) is BehaviorClass.B

    def test_correct_beats_unchanged(self):
        # worlds of the two formulas can overlap; identical correct output is A
        pair = BehaviorPair(original=parse_polish("! & e b"), modified=parse_polish("| e b"))
        assert classify_behavior(pair, "e 1 b 0".split(), "e 1 b 0".split()) is BehaviorClass.A

    def test_summary_fractions_sum_to_one(self):
        pairs = [NEG_AND] * 4
        po = ["b 0 e 1".split(), "b 1 e 1".split(), "b 1 e 1".split(), ["b", "1"]]
        pm = ["b 1 e 1".split(), "b 1 e 1".split(), ["a", "1"], ["e", "1"]]
        summary = behavior_summary(pairs, po, pm)
        assert summary["counts"] == {"A": 1, "B": 1, "C": 1, "D": 1}
        assert abs(sum(summary["fractions"].values()) - 1.0) < 1e-9

    def test_summary_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            behavior_summary([NEG_AND], [], [])


class TestOverlap:
    def test_identical(self):
        preds = [["a", "1"], ["b", "0"]]
        assert overlap(preds, preds) == 1.0

    def test_disjoint(self):
        assert overlap([["a", "1"]], [["a", "0"]]) == 0.0

    def test_mixed(self):
        assert overlap([["a", "1"], ["b", "0"]], [["a", "1"], ["b", "1"]]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            overlap([["a", "1"]], [])

    def test_matrix(self):
        from proplab.evaluation import overlap_matrix

        preds = {
            "s1": [["a", "1"], ["b", "0"]],
            "s2": [["a", "1"], ["b", "1"]],
        }
        matrix = overlap_matrix(preds)
        assert matrix["s1"]["s1"] == 1.0
        assert matrix["s1"]["s2"] == matrix["s2"]["s1"] == 0.5


class TestEmitReport:
    def test_files_and_determinism(self, tmp_path):
        dataset = [TABLE_DP]
        records = records_from_token_lists([["a", "0", "b", "1"]])
        report = evaluate_records(dataset, records)
        files1 = emit_report(report, tmp_path / "one")
        payload = json.loads(open(files1["report"]).read())
        assert payload["syntactic_acc"] == 1.0
        first = open(files1["report"], "rb").read()
        emit_report(report, tmp_path / "one")
        assert open(files1["report"], "rb").read() == first

    def test_empty_report(self, tmp_path):
        report = evaluate_records([], [])
        files = emit_report(report, tmp_path)
        payload = json.loads(open(files["report"]).read())
        assert payload["n"] == 0
        assert all(v == 0 for v in payload["counts"].values())

    def test_behavior_table(self, tmp_path):
        report = evaluate_records([TABLE_DP], records_from_token_lists([["a", "0"]]))
        report.behavior = behavior_summary([NEG_AND], [["b", "0", "e", "1"]], [["b", "1"]])
        files = emit_report(report, tmp_path)
        lines = open(files["behavior"]).read().splitlines()
        assert lines[0] == "class\tcount\tfraction"
        assert len(lines) == 5


class TestAggregate:
    def test_mean_and_stderr(self, tmp_path):
        def fake(acc):
            dataset = [TABLE_DP] * 2
            records = records_from_token_lists(
                [["a", "0", "b", "1"], ["a", "0", "b", "1"] if acc else ["a", "1"]]
            )
            return evaluate_records(dataset, records)

        rows = aggregate_pattern_accuracies({"base": [fake(True), fake(False)]})
        # the example datapoint contains P5 (and-node with negated left child)
        row = next(
            r for r in rows if r["pattern"] == "P5" and r["slice"] == "contains"
        )
        assert row["n_seeds"] == 2
        assert row["mean_semantic_acc"] == pytest.approx(0.75)
        # sample std of {1.0, 0.5} is sqrt(0.125); stderr divides by sqrt(2)
        assert row["stderr"] == pytest.approx((0.125 / 2) ** 0.5)
