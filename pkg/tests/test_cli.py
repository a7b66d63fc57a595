import json

import numpy as np
import pytest

from perfmap.cli import main
from perfmap.maps import MapEntry, PerformanceMap, save_json

TOY_SPACE = [
    {"name": "min_impurity", "values": [0.0, 0.3]},
    {"name": "min_samples", "values": [2, 12]},
    {"name": "max_depth", "values": [1, 11, 21, 31, 41]},
]


@pytest.fixture
def workdir(tmp_path):
    rng = np.random.default_rng(0)
    x = np.concatenate([rng.uniform(-2, -0.5, 30), rng.uniform(0.5, 2, 30)])
    lines = ["x,cls"] + [f"{v:.4f},{'pos' if v > 0 else 'neg'}" for v in x]
    (tmp_path / "toy.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    config = {
        "dataset": {
            "name": "toy",
            "path": "toy.csv",
            "task": "classification",
            "schema": {"target": "cls", "columns": {"x": "real"}},
        },
        "learner": "dt",
        "optimizer": "grid",
        "space": TOY_SPACE,
        "folds": 5,
        "seed": 0,
        "timeout": 40.0,
        "out": "map.json",
    }
    (tmp_path / "run.json").write_text(json.dumps(config), encoding="utf-8")
    return tmp_path


def read_map(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestRun:
    def test_toy_grid_reports_twenty_points(self, workdir, capsys):
        rc = main(["run", "--config", str(workdir / "run.json"),
                   "--out", str(workdir / "map.json")])
        out = capsys.readouterr().out
        assert rc == 0
        assert "points=20" in out
        assert "best=" in out and "std=" in out and "time=" in out
        obj = read_map(workdir / "map.json")
        assert obj["evaluated_points"] == 20
        assert len(obj["entries"]) == 20

    def test_invalid_learner_exits_one_without_map(self, workdir, capsys):
        config = json.loads((workdir / "run.json").read_text())
        config["learner"] = "perceptron"
        del config["space"]
        bad = workdir / "bad.json"
        bad.write_text(json.dumps(config), encoding="utf-8")
        rc = main(["run", "--config", str(bad), "--out", str(workdir / "nope.json")])
        assert rc == 1
        assert not (workdir / "nope.json").exists()
        assert "unknown learner" in capsys.readouterr().err

    def test_byte_identical_reruns_with_jobs_one(self, workdir, capsys):
        a, b = workdir / "a.json", workdir / "b.json"
        assert main(["run", "--config", str(workdir / "run.json"), "--out", str(a)]) == 0
        assert main(["run", "--config", str(workdir / "run.json"), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_config_is_config_error(self, tmp_path, capsys):
        rc = main(["run", "--config", str(tmp_path / "absent.json")])
        assert rc == 1

    def test_unwritable_output_is_runtime_failure(self, workdir, capsys):
        rc = main([
            "run", "--config", str(workdir / "run.json"),
            "--out", str(workdir / "no-such-dir" / "map.json"),
        ])
        assert rc == 2

    def test_usage_error_exits_one(self, capsys):
        assert main(["run"]) == 1  # --config is required

    def test_subsample_flag_recorded(self, workdir, capsys):
        out_path = workdir / "sub.json"
        rc = main([
            "run", "--config", str(workdir / "run.json"),
            "--out", str(out_path), "--subsample", "30",
        ])
        assert rc == 0
        assert "note: subsampled to 30 of 60 rows" in capsys.readouterr().out
        assert read_map(out_path)["context"]["subsample"] == 30


def write_simple_map(path, means, timed_out=False):
    entries = []
    for i, m in enumerate(means):
        entries.append(
            MapEntry(settings={"p": i}, mean=float(m), std=0.0, timed_out=timed_out)
        )
    pmap = PerformanceMap(
        context={
            "learner": "stub",
            "optimizer": "grid",
            "dataset": "toy",
            "folds": 10,
            "seed": 0,
            "timeout": 40.0,
            "subsample": None,
            "space": [{"name": "p", "values": list(range(len(means)))}],
        },
        entries=entries,
        evaluated_points=len(entries),
        wall_time_seconds=0.0,
    )
    save_json(pmap, path)


class TestHp:
    def test_uniform_map_row(self, tmp_path, capsys):
        path = tmp_path / "u.json"
        write_simple_map(path, [0.8] * 5)
        assert main(["hp", str(path)]) == 0
        assert "1.00 1.00 1.00" in capsys.readouterr().out

    def test_hand_example_row(self, tmp_path, capsys):
        path = tmp_path / "m.json"
        write_simple_map(path, [0.9, 0.8, 0.5])
        assert main(["hp", str(path)]) == 0
        assert "0.33 0.33 0.67" in capsys.readouterr().out

    def test_all_timeout_map_reports_undefined(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        write_simple_map(path, [-0.2, -0.2], timed_out=True)
        assert main(["hp", str(path)]) == 0
        assert "HP undefined (best <= 0)" in capsys.readouterr().out

    def test_custom_ks(self, tmp_path, capsys):
        path = tmp_path / "m.json"
        write_simple_map(path, [0.9, 0.8, 0.5])
        assert main(["hp", str(path), "--ks", "0.5"]) == 0
        assert "1.00" in capsys.readouterr().out

    def test_bad_ks_rejected(self, tmp_path, capsys):
        path = tmp_path / "m.json"
        write_simple_map(path, [0.9])
        assert main(["hp", str(path), "--ks", "1.5"]) == 1


class TestCompare:
    def test_identical_maps_equivalent(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_simple_map(a, [0.9, 0.8])
        write_simple_map(b, [0.9, 0.8])
        assert main(["compare", str(a), str(b)]) == 0
        assert "equivalent" in capsys.readouterr().out

    def test_strictly_better_profile_dominates(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_simple_map(a, [0.9, 0.89, 0.88])
        write_simple_map(b, [0.9, 0.5, 0.3])
        assert main(["compare", str(a), str(b)]) == 0
        assert "A dominates B" in capsys.readouterr().out

    def test_crossing_profiles_incomparable(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        # A tighter at 5%, B tighter at 20%.
        write_simple_map(a, [1.0, 0.96, 0.5, 0.5])
        write_simple_map(b, [1.0, 0.7, 0.85, 0.85])
        assert main(["compare", str(a), str(b)]) == 0
        assert "incomparable" in capsys.readouterr().out


class TestPlot:
    def make_map(self, workdir):
        out = workdir / "map.json"
        assert main(["run", "--config", str(workdir / "run.json"), "--out", str(out)]) == 0
        return out

    def test_default_dt_projection(self, workdir, capsys):
        map_path = self.make_map(workdir)
        svg = workdir / "map.svg"
        assert main(["plot", str(map_path), "--out", str(svg)]) == 0
        assert svg.exists()
        assert "4 x-labels x 5 y-values" in capsys.readouterr().out

    def test_explicit_projection(self, workdir, capsys):
        map_path = self.make_map(workdir)
        svg = workdir / "map2.svg"
        rc = main([
            "plot", str(map_path), "--x", "min_impurity,max_depth",
            "--y", "min_samples", "--out", str(svg),
        ])
        assert rc == 0
        assert svg.exists()

    def test_unknown_parameter_names_rejected(self, workdir, capsys):
        map_path = self.make_map(workdir)
        rc = main([
            "plot", str(map_path), "--x", "nope,min_samples",
            "--y", "max_depth", "--out", str(workdir / "x.svg"),
        ])
        assert rc == 1


def test_spaces_lists_builtin_sizes(capsys):
    assert main(["spaces"]) == 0
    out = capsys.readouterr().out
    assert "dt: 1680 points" in out
    assert "svm: 160 points" in out
