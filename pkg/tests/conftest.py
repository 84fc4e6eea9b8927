"""Shared fixtures: the default collection corpus and classifiers trained on
it are expensive (about a minute together), so they are built once per
session and shared by the prediction, harness and acceptance tests."""

from __future__ import annotations

import pytest

from gripsim.collection import collect_training_data
from gripsim.config import RunConfig
from gripsim.prediction import TrainConfig, build_dataset, split_records, train

CORPUS_SEED = 7


@pytest.fixture(scope="session")
def run_cfg() -> RunConfig:
    return RunConfig()


@pytest.fixture(scope="session")
def corpus(run_cfg):
    """Full default collection run: (trials, finger records)."""
    return collect_training_data(run_cfg, CORPUS_SEED)


@pytest.fixture(scope="session")
def split(corpus):
    _, records = corpus
    return split_records(records, seed=CORPUS_SEED)


@pytest.fixture(scope="session")
def train_dataset(run_cfg, split):
    train_recs, _ = split
    return build_dataset(train_recs, run_cfg.protocol.horizon)


@pytest.fixture(scope="session")
def linear_model(train_dataset):
    return train(train_dataset, TrainConfig(kind="multinomial-linear", seed=CORPUS_SEED))


@pytest.fixture(scope="session")
def knn_model(train_dataset):
    return train(train_dataset, TrainConfig(kind="k-nearest-neighbor", seed=CORPUS_SEED))
