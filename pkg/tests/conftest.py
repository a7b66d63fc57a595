import numpy as np
import pytest

from perfmap.datasets import CLASSIFICATION, REGRESSION, Dataset, FeatureMeta
from perfmap.synth import write_corpus


def make_dataset(X, y, task=CLASSIFICATION, name="toy", class_names=None) -> Dataset:
    """Wrap plain arrays as a Dataset with real-kind feature metadata."""
    X = np.asarray(X, dtype=np.float64)
    meta = tuple(FeatureMeta(f"f{i}", "real") for i in range(X.shape[1]))
    if task == CLASSIFICATION:
        y = np.asarray(y, dtype=np.int64)
        if class_names is None:
            class_names = tuple(f"c{i}" for i in range(int(y.max()) + 1))
    else:
        y = np.asarray(y, dtype=np.float64)
        class_names = ()
    return Dataset(
        name=name,
        features=X,
        target=y,
        task=task,
        feature_meta=meta,
        class_names=class_names,
    )


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("replica-corpus")
    write_corpus(directory)
    return directory


@pytest.fixture(scope="session")
def manifest_path(corpus_dir):
    return corpus_dir / "manifest.json"
