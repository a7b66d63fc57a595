import numpy as np

from perfmap.datasets import CLASSIFICATION, REGRESSION, load_from_manifest
from perfmap.learners import DtParams, train_tree
from perfmap.synth import GENERATORS, generate


def test_corpus_shapes(manifest_path):
    mush = load_from_manifest(manifest_path, "mushrooms-like")
    assert mush.n_rows == 8124 and mush.n_features == 22
    assert mush.task == CLASSIFICATION and mush.n_classes == 2
    votes = load_from_manifest(manifest_path, "votes-like")
    assert votes.n_rows == 435 and votes.n_features == 16
    diab = load_from_manifest(manifest_path, "diabetes-like")
    assert diab.n_rows == 769 and diab.n_features == 8
    ab = load_from_manifest(manifest_path, "abalone-like")
    assert ab.n_rows == 4177 and ab.n_features == 8
    assert ab.task == REGRESSION
    assert ab.feature_meta[0].kind == "categorical"


def test_generators_deterministic():
    for name in GENERATORS:
        a, b = generate(name), generate(name)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.target, b.target)


def test_mushrooms_rule_is_exactly_learnable():
    ds = generate("mushrooms-like")
    model = train_tree(
        ds.features, ds.target, ds.task, DtParams(0.0, 2, 31)
    )
    assert (model.predict(ds.features) == ds.target).mean() == 1.0
    assert model.depth() <= 6


def test_manifest_load_matches_in_memory_generation(manifest_path):
    from_disk = load_from_manifest(manifest_path, "votes-like")
    in_memory = generate("votes-like")
    assert np.array_equal(from_disk.features, in_memory.features)
    assert np.array_equal(from_disk.target, in_memory.target)
