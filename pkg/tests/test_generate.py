import random

import pytest

from proplab.formulas import Not, Var, contains_double_negation, size, vars_of
from proplab.generate import (
    BudgetInfeasible,
    DatasetSpec,
    Datapoint,
    balance_trees,
    dataset_stats,
    generate_dataset,
    sample_formula,
)
from proplab.semantics import is_satisfiable, models_equal, satisfies_partial


class TestSampleFormula:
    def test_length_one_is_variable(self):
        assert isinstance(sample_formula(1, random.Random(0)), Var)

    def test_length_two_is_negated_variable(self):
        f = sample_formula(2, random.Random(0))
        assert isinstance(f, Not) and isinstance(f.child, Var)

    @pytest.mark.parametrize("length", [1, 2, 3, 4, 5, 9, 20, 35, 50])
    def test_constraints_hold(self, length):
        rng = random.Random(length)
        for _ in range(50):
            f = sample_formula(length, rng)
            assert size(f) == length
            assert not contains_double_negation(f)
            assert is_satisfiable(f)
            assert len(vars_of(f)) <= 5

    def test_zero_budget(self):
        with pytest.raises(BudgetInfeasible):
            sample_formula(0, random.Random(0))


class TestDatasetSpec:
    def test_profile_pins_long_lengths(self):
        profile = DatasetSpec(n_examples=1000, seed=0).length_profile()
        for length in range(8, 36):
            assert profile[length] == pytest.approx(0.03)
        assert sum(profile.values()) == pytest.approx(1.0)
        assert profile[5] == profile[6] == profile[7] == pytest.approx(0.16 / 3)

    def test_counts_are_exact(self):
        spec = DatasetSpec(n_examples=100_000, seed=0)
        counts = spec.length_counts()
        assert sum(counts.values()) == 100_000
        for length in range(8, 36):
            assert abs(counts[length] / 100_000 - 0.03) <= 0.005

    def test_profile_without_short_lengths_goes_uniform(self):
        profile = DatasetSpec(n_examples=10, seed=0, min_len=36, max_len=50).length_profile()
        assert all(v == pytest.approx(1 / 15) for v in profile.values())

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            DatasetSpec(n_examples=1, seed=0, min_len=10, max_len=5)


class TestGenerateDataset:
    def test_small_dataset_valid(self):
        dataset = generate_dataset(DatasetSpec(n_examples=60, seed=5, min_len=5, max_len=12))
        assert len(dataset) == 60
        for dp in dataset:
            assert satisfies_partial(dp.formula, dp.target)
            assert not contains_double_negation(dp.formula)

    def test_single_example(self):
        dataset = generate_dataset(DatasetSpec(n_examples=1, seed=5))
        assert len(dataset) == 1
        assert satisfies_partial(dataset[0].formula, dataset[0].target)

    def test_deterministic(self):
        spec = DatasetSpec(n_examples=40, seed=11, min_len=5, max_len=10)
        assert generate_dataset(spec) == generate_dataset(spec)

    def test_seed_changes_output(self):
        a = generate_dataset(DatasetSpec(n_examples=40, seed=1, min_len=5, max_len=10))
        b = generate_dataset(DatasetSpec(n_examples=40, seed=2, min_len=5, max_len=10))
        assert a != b

    def test_out_of_distribution_lengths(self):
        dataset = generate_dataset(DatasetSpec(n_examples=12, seed=3, min_len=36, max_len=50))
        assert all(36 <= size(dp.formula) <= 50 for dp in dataset)


class TestBalanceTrees:
    def _dataset(self, n=150):
        return generate_dataset(DatasetSpec(n_examples=n, seed=21, min_len=5, max_len=20))

    def test_deterministic(self):
        dataset = self._dataset()
        assert balance_trees(dataset, seed=4) == balance_trees(dataset, seed=4)

    def test_targets_unchanged_and_valid(self):
        dataset = self._dataset()
        balanced = balance_trees(dataset, seed=4)
        for before, after in zip(dataset, balanced):
            assert after.target == before.target
            assert satisfies_partial(after.formula, after.target)

    def test_world_sets_preserved(self):
        dataset = self._dataset(60)
        balanced = balance_trees(dataset, seed=4)
        for before, after in zip(dataset, balanced):
            assert models_equal(before.formula, after.formula)

    def test_actually_flips_something(self):
        dataset = self._dataset()
        balanced = balance_trees(dataset, seed=4)
        assert any(a.formula != b.formula for a, b in zip(dataset, balanced))


class TestDatasetStats:
    def test_single_pattern_rate(self):
        from proplab.formulas import parse_polish

        dp = Datapoint(formula=parse_polish("! & a b"), target={"a": 0})
        stats = dataset_stats([dp])
        assert stats["pattern_rates"]["P1"] == 1.0
        assert stats["pattern_rates"]["P2"] == 0.0
        assert stats["n_examples"] == 1

    def test_fields_present(self):
        dataset = generate_dataset(DatasetSpec(n_examples=50, seed=2, min_len=5, max_len=10))
        stats = dataset_stats(dataset, difficulty_sample=20)
        assert stats["difficulty"]["n_sampled"] == 20
        assert 0.0 < stats["difficulty"]["mean_world_ratio"] <= 1.0
        assert set(stats["length_histogram"]) <= set(range(5, 11))
        assert stats["subtree_sizes"]["all_left_mean"] > 0

    def test_difficulty_distribution(self):
        dataset = generate_dataset(DatasetSpec(n_examples=60, seed=9, min_len=5, max_len=8))
        stats = dataset_stats(dataset)
        hist = stats["difficulty"]["world_ratio_histogram"]
        assert len(hist) == 10 and sum(hist) == 60
        by_length = stats["difficulty"]["world_ratio_by_length"]
        assert all(0 < v <= 1 for v in by_length.values())
        assert set(by_length) <= set(range(5, 9))
