import json

import numpy as np
import pytest

from perfmap.maps import (
    HpProfile,
    MapEntry,
    PerformanceMap,
    UndefinedHpError,
    compare_profiles,
    dominates,
    from_json_obj,
    load_json,
    project_for_plot,
    save_csv,
    save_json,
    to_json_obj,
)
from perfmap.paramspace import builtin_space


def simple_map(means, name="toy"):
    space = [{"name": "p", "values": list(range(len(means)))}]
    entries = [
        MapEntry(settings={"p": i}, mean=float(m), std=0.0)
        for i, m in enumerate(means)
    ]
    return PerformanceMap(
        context={
            "learner": "stub",
            "optimizer": "grid",
            "dataset": name,
            "folds": 10,
            "seed": 0,
            "timeout": 40.0,
            "subsample": None,
            "space": space,
        },
        entries=entries,
        evaluated_points=len(entries),
        wall_time_seconds=1.0,
    )


class TestBest:
    def test_maximum_wins(self):
        pmap = simple_map([0.9, 0.8, 0.5])
        assert pmap.best().mean == 0.9
        assert pmap.best().settings == {"p": 0}

    def test_tie_goes_to_earliest(self):
        pmap = simple_map([0.7, 0.9, 0.9])
        assert pmap.best().settings == {"p": 1}

    def test_singleton(self):
        pmap = simple_map([0.42])
        assert pmap.best().mean == 0.42

    def test_empty_map_rejected(self):
        pmap = simple_map([0.5])
        pmap.entries = []
        with pytest.raises(ValueError):
            pmap.best()


class TestHp:
    def test_uniform_map_is_one_for_every_k(self):
        pmap = simple_map([0.6] * 8)
        for k in (0.01, 0.05, 0.5, 0.99):
            assert pmap.hp(k) == 1.0

    def test_hand_example_k005(self):
        pmap = simple_map([0.9, 0.8, 0.5])
        # threshold 0.9 * 0.95 = 0.855 -> only 0.9 qualifies
        assert pmap.hp(0.05) == pytest.approx(1 / 3)

    def test_hand_example_k020(self):
        pmap = simple_map([0.9, 0.8, 0.5])
        # threshold 0.72 -> 0.9 and 0.8 qualify
        assert pmap.hp(0.20) == pytest.approx(2 / 3)

    def test_profile_hand_example(self):
        values = simple_map([0.9, 0.8, 0.5]).hp_profile().values
        assert values == pytest.approx((1 / 3, 1 / 3, 2 / 3))

    def test_k_domain(self):
        pmap = simple_map([0.5])
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                pmap.hp(bad)

    def test_undefined_for_non_positive_best(self):
        with pytest.raises(UndefinedHpError):
            simple_map([-0.2, -0.2]).hp(0.05)

    def test_oracle_equivalence_on_random_maps(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(1, 120))
            means = rng.uniform(0.001, 1.0, size=n)
            pmap = simple_map(means)
            k = float(rng.uniform(0.01, 0.99))
            best = max(means)
            brute = sum(1 for m in means if m >= best * (1 - k)) / n
            assert pmap.hp(k) == brute

    def test_profile_monotone_on_random_maps(self):
        rng = np.random.default_rng(2)
        ks = (0.03, 0.1, 0.25, 0.6, 0.9)
        for _ in range(200):
            n = int(rng.integers(1, 60))
            pmap = simple_map(rng.uniform(0.01, 1.0, size=n))
            vals = pmap.hp_profile(ks).values
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_hp_at_least_one_over_n(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 80))
            pmap = simple_map(rng.uniform(0.01, 1.0, size=n))
            assert pmap.hp(0.01) >= 1 / n

    def test_limit_toward_one_counts_positive_means(self):
        pmap = simple_map([0.9, 0.5, 0.0, 0.2])
        assert pmap.hp(0.999999) == pytest.approx(3 / 4)

    def test_complement_estimates_cdf(self):
        # 1 - hp(k) recounts the fraction strictly below best*(1-k).
        rng = np.random.default_rng(4)
        means = rng.uniform(0.05, 1.0, size=50)
        pmap = simple_map(means)
        for k in (0.05, 0.2, 0.5):
            threshold = max(means) * (1 - k)
            below = sum(1 for m in means if m < threshold) / len(means)
            assert 1.0 - pmap.hp(k) == pytest.approx(below)


class TestDominance:
    def test_weak_dominance(self):
        a = HpProfile((0.05, 0.1, 0.2), (0.3, 0.5, 0.9))
        b = HpProfile((0.05, 0.1, 0.2), (0.2, 0.5, 0.8))
        assert dominates(a, b)
        assert not dominates(b, a)
        assert compare_profiles(a, b) == "a"

    def test_identical_profiles_dominate_both_ways(self):
        a = HpProfile((0.05, 0.1), (0.4, 0.6))
        b = HpProfile((0.05, 0.1), (0.4, 0.6))
        assert dominates(a, b) and dominates(b, a)
        assert compare_profiles(a, b) == "equivalent"

    def test_crossing_profiles_incomparable(self):
        a = HpProfile((0.05, 0.1), (0.3, 0.4))
        b = HpProfile((0.05, 0.1), (0.4, 0.3))
        assert not dominates(a, b) and not dominates(b, a)
        assert compare_profiles(a, b) == "incomparable"

    def test_mismatched_ks_rejected(self):
        a = HpProfile((0.05,), (0.3,))
        b = HpProfile((0.1,), (0.3,))
        with pytest.raises(ValueError):
            dominates(a, b)


def dt_grid_map(fill=1.0):
    space = builtin_space("dt")
    entries = [
        MapEntry(settings=space.as_dict(s), mean=fill, std=0.0)
        for s in space.enumerate()
    ]
    return PerformanceMap(
        context={
            "learner": "dt",
            "optimizer": "grid",
            "dataset": "toy",
            "folds": 10,
            "seed": 0,
            "timeout": 40.0,
            "subsample": None,
            "space": space.to_json_obj(),
        },
        entries=entries,
        evaluated_points=len(entries),
        wall_time_seconds=0.5,
    )


class TestProjection:
    def test_cell_label_format(self):
        pmap = dt_grid_map()
        proj = project_for_plot(pmap, ("min_impurity", "min_samples"), "max_depth")
        assert "0.1 - 22" in proj.x_labels
        entry_label_idx = proj.x_labels.index("0.1 - 22")
        assert entry_label_idx == 1 * 15 + 2  # impurity index 1, min_samples index 2

    def test_full_grid_has_no_absent_cells(self):
        proj = project_for_plot(dt_grid_map(), ("min_impurity", "min_samples"), "max_depth")
        assert len(proj.x_labels) == 7 * 15 == 105
        assert len(proj.y_labels) == 16
        assert not np.isnan(proj.values).any()

    def test_partial_map_marks_exactly_the_missing_cells(self):
        pmap = dt_grid_map()
        removed = pmap.entries[37]
        pmap.entries = pmap.entries[:37] + pmap.entries[38:]
        pmap.evaluated_points -= 1
        proj = project_for_plot(pmap, ("min_impurity", "min_samples"), "max_depth")
        assert np.isnan(proj.values).sum() == 1

    def test_timeout_cells_carry_flag(self):
        pmap = dt_grid_map()
        pmap.entries[3] = MapEntry(
            settings=pmap.entries[3].settings, mean=-0.2, std=0.0, timed_out=True
        )
        proj = project_for_plot(pmap, ("min_impurity", "min_samples"), "max_depth")
        assert proj.timed_out.sum() == 1

    def test_unknown_parameter_rejected(self):
        with pytest.raises(KeyError):
            project_for_plot(dt_grid_map(), ("min_impurity", "bogus"), "max_depth")


class TestSerialization:
    def test_json_roundtrip_160_entry_map(self, tmp_path):
        space = builtin_space("svm")
        rng = np.random.default_rng(5)
        entries = [
            MapEntry(settings=space.as_dict(s), mean=float(m), std=float(sd))
            for s, m, sd in zip(
                space.enumerate(),
                rng.uniform(0, 1, 160),
                rng.uniform(0, 0.1, 160),
            )
        ]
        pmap = PerformanceMap(
            context={
                "learner": "svm",
                "optimizer": "grid",
                "dataset": "toy",
                "folds": 10,
                "seed": 3,
                "timeout": 40.0,
                "subsample": None,
                "space": space.to_json_obj(),
            },
            entries=entries,
            evaluated_points=160,
            wall_time_seconds=12.5,
        )
        path = tmp_path / "map.json"
        save_json(pmap, path)
        again = load_json(path)
        assert again == pmap

    def test_flags_survive_roundtrip(self):
        pmap = simple_map([0.9, -0.2])
        pmap.entries[1] = MapEntry(
            settings={"p": 1}, mean=-0.2, std=0.0, timed_out=True
        )
        again = from_json_obj(json.loads(json.dumps(to_json_obj(pmap))))
        assert again.entries[1].timed_out
        assert not again.entries[0].timed_out

    def test_csv_row_count(self, tmp_path):
        pmap = simple_map([0.9, 0.8, 0.5])
        path = tmp_path / "map.csv"
        save_csv(pmap, path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 1 + 3
        assert lines[0] == "p,mean,std"

    def test_duplicate_entries_rejected(self):
        pmap = simple_map([0.9, 0.8])
        pmap.entries[1] = MapEntry(settings={"p": 0}, mean=0.8, std=0.0)
        with pytest.raises(ValueError, match="duplicate"):
            pmap.check()

    def test_evaluated_points_consistency_enforced(self):
        pmap = simple_map([0.9, 0.8])
        pmap.evaluated_points = 3
        with pytest.raises(ValueError, match="evaluated_points"):
            pmap.check()
