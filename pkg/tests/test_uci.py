from clients.dataset_client import load_manifest, manifest_from_dict, read_dataset
from dataclass.dataset import DatasetManifest
from dataclass.run_config import UciConfig
from uci.binarize import binarize, load_binarized, numeric_feature
from uci.splits import cv_split, support_rows
from uci.zero_shot import FOLDS_CSV, RESULTS_CSV, RULES_DIR, write_uci_outputs, zero_shot_eval
from util.enums import ColumnType
from util.exceptions import (ConfigError, EmptyColumnError, ManifestError, SingleClassEpisodeError,
                             StratificationError, UnparseableCellError)
from util.rng import FOLDS, stream
import json
import numpy as np
import pandas as pd
import pytest


ROWS = [
    # id, age, colour, size, label
    (1, 30, 'red', 'S', 'yes'), (2, 45, 'blue', 'M', 'no'), (3, 22, 'red', 'L', 'yes'),
    (4, 51, 'green', 'S', 'no'), (5, 38, '?', 'M', 'yes'), (6, 60, 'blue', 'L', 'no'),
    (7, 27, 'red', 'S', 'yes'), (8, 44, 'green', 'M', 'no'), (9, 33, 'red', 'L', 'yes'),
    (10, 58, 'blue', 'S', 'no'), (11, 25, 'green', 'M', 'maybe'), (12, 49, 'red', 'L', 'maybe'),
    (13, 31, 'blue', 'S', 'yes'), (14, 62, 'green', 'M', 'no'), (15, 29, 'red', 'L', 'maybe'),
    (16, 40, 'blue', 'S', 'maybe'), (17, 35, 'red', 'M', 'maybe'), (18, 55, 'green', 'L', 'no'),
    (19, 23, 'red', 'S', 'yes'), (20, 47, 'blue', 'M', 'no'), (21, 36, '?', 'L', 'yes'),
    (22, 53, 'green', 'S', 'no'), (23, 26, 'red', 'M', 'yes'), (24, 59, 'blue', 'L', 'no'),
    (25, 42, 'green', 'S', 'maybe'),
]


@pytest.fixture
def manifest_path(tmp_path):
    lines = ['id,age,colour,size,label'] + [','.join(str(v) for v in row) for row in ROWS]
    (tmp_path / 'data.csv').write_text('\n'.join(lines) + '\n')
    manifest = {
        'name': 'toy shop',
        'path': 'data.csv',
        'label_column': 'label',
        'positive_label': ['yes', 'no', 'maybe'],
        'headline_class': 'yes',
        'columns': {'size': 'categorical'},
        'ignore_columns': ['id'],
        'expected_n': 7
    }
    path = tmp_path / 'toy.json'
    path.write_text(json.dumps(manifest))
    return path


def _manifest(**extra) -> DatasetManifest:
    return manifest_from_dict({'name': 'frame', 'path': 'unused.csv', 'label_column': 'label',
                               'positive_label': 'a', **extra})


def test_manifest_resolves_relative_path(manifest_path):
    manifest = load_manifest(manifest_path)
    assert manifest.path == str(manifest_path.parent / 'data.csv')
    assert manifest.classes == ['yes', 'no', 'maybe']
    assert manifest.headline == 'yes'
    assert manifest.columns == {'size': ColumnType.CATEGORICAL}


@pytest.mark.parametrize('data', [
    {'name': 'x', 'path': 'a.csv', 'label_column': 'y'},
    {'name': 'x', 'path': 'a.csv', 'label_column': 'y', 'positive_label': []},
    {'name': 'x', 'path': 'a.csv', 'label_column': 'y', 'positive_label': 'a', 'columns': {'c': 'ordinal'}},
    {'name': 'x', 'path': 'a.csv', 'label_column': 'y', 'positive_label': ['a'], 'headline_class': 'b'},
])
def test_bad_manifests(data):
    with pytest.raises(ManifestError):
        manifest_from_dict(data)


def test_missing_files(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / 'absent.json')
    with pytest.raises(ManifestError):
        read_dataset(manifest_from_dict({'name': 'x', 'path': str(tmp_path / 'absent.csv'),
                                         'label_column': 'y', 'positive_label': 'a'}))


def test_binarize_feature_names_and_unknowns(manifest_path):
    _, dataset = load_binarized(manifest_path)
    assert dataset.feature_names == [
        'age_gt_median', 'colour_blue', 'colour_green', 'colour_red', 'size_L', 'size_M', 'size_S'
    ]
    assert dataset.m == len(ROWS)
    assert dataset.medians == {'age': 40.0}
    # The two '?' colour cells stay unknown in every colour indicator
    unknown = np.isnan(dataset.X)
    assert unknown.sum() == 6
    assert np.all(unknown[[4, 20], 1:4])
    observed = dataset.X[~np.isnan(dataset.X[:, 1]), 1:4]
    np.testing.assert_array_equal(observed.sum(axis=1), 1.0)


def test_median_ties_and_constant_columns():
    feature, median = numeric_feature('v', pd.Series(['1', '2', '2', '3']))
    assert median == 2.0
    np.testing.assert_array_equal(feature, [0.0, 0.0, 0.0, 1.0])
    constant, _ = numeric_feature('c', pd.Series(['5', '5', None]))
    np.testing.assert_array_equal(constant[:2], 0.0)
    assert np.isnan(constant[2])


def test_unparseable_numeric_cell():
    frame = pd.DataFrame({'v': ['1', 'two', '3', '4'], 'label': ['a', 'b', 'a', 'b']})
    with pytest.raises(UnparseableCellError):
        binarize(frame, _manifest(columns={'v': 'numeric'}))


def test_empty_column_and_missing_classes():
    frame = pd.DataFrame({'v': [None, None], 'w': ['1', '2'], 'label': ['a', 'b']})
    with pytest.raises(EmptyColumnError):
        binarize(frame, _manifest())
    with pytest.raises(ManifestError):
        binarize(frame.drop(columns='v').assign(label=['a', 'a']), _manifest())
    with pytest.raises(ManifestError):
        binarize(frame.drop(columns='v'), _manifest(positive_label='c'))


def test_rows_without_label_are_dropped():
    frame = pd.DataFrame({'w': ['1', '2', '3'], 'label': ['a', None, 'b']})
    dataset = binarize(frame, _manifest())
    assert dataset.m == 2
    assert list(dataset.labels) == ['a', 'b']


def test_features_ignore_the_labels(manifest_path):
    manifest = load_manifest(manifest_path)
    frame = read_dataset(manifest)
    shuffled = frame.assign(label=np.random.default_rng(0).permutation(frame['label'].to_numpy()))
    np.testing.assert_array_equal(binarize(frame, manifest).X, binarize(shuffled, manifest).X)


def test_cv_split_is_stratified_and_disjoint():
    labels = np.array(['a'] * 12 + ['b'] * 8)
    assignment = cv_split(labels, folds=4, seed=2)
    np.testing.assert_array_equal(assignment, cv_split(labels, folds=4, seed=2))
    for fold in range(4):
        members = labels[assignment == fold]
        assert (members == 'a').sum() == 3
        assert (members == 'b').sum() == 2


def test_cv_split_errors():
    with pytest.raises(StratificationError):
        cv_split(np.array(['a'] * 10 + ['b'] * 3), folds=5)
    with pytest.raises(SingleClassEpisodeError):
        cv_split(np.array(['a'] * 10), folds=5)


def test_support_rows():
    labels = np.array(['a'] * 20 + ['b'] * 20)
    assignment = cv_split(labels, folds=4, seed=0)
    support, evaluation = support_rows(assignment, 1, labels, 0.25, stream(0, FOLDS, 2))
    np.testing.assert_array_equal(support, np.flatnonzero(assignment == 1))
    assert np.intersect1d(support, evaluation).size == 0
    assert support.size + evaluation.size == labels.size

    smaller, rest = support_rows(assignment, 1, labels, 0.1, stream(0, FOLDS, 2))
    assert smaller.size == 4
    assert set(smaller) <= set(support)
    assert (labels[smaller] == 'a').sum() == 2
    assert rest.size == 36

    with pytest.raises(ConfigError):
        support_rows(assignment, 0, labels, 0.5, stream(0, FOLDS, 1))


def test_zero_shot_eval_writes_outputs(tiny_checkpoint, manifest_path, tmp_path):
    manifest, dataset = load_binarized(manifest_path)
    result = zero_shot_eval(tiny_checkpoint, dataset, manifest, UciConfig(folds=5, support_fraction=0.2, seed=1))
    assert list(result.classes) == ['yes', 'no', 'maybe']
    assert result.headline.target_class == 'yes'
    for class_result in result.classes.values():
        assert len(class_result.folds) == 5
        for fold in class_result.used:
            assert 0.0 <= fold.accuracy <= 1.0
            assert fold.support_rows + fold.eval_rows == len(ROWS)

    again = zero_shot_eval(tiny_checkpoint, dataset, manifest, UciConfig(folds=5, support_fraction=0.2, seed=1), threads=2)
    assert [f.rule for f in again.headline.folds] == [f.rule for f in result.headline.folds]

    out = tmp_path / 'uci'
    summary = write_uci_outputs([result], out)
    assert [row['headline'] for row in summary] == [True, False, False]
    assert len(pd.read_csv(out / FOLDS_CSV)) == 15
    assert set(pd.read_csv(out / RESULTS_CSV)['class']) == {'yes', 'no', 'maybe'}
    assert (out / RULES_DIR / 'toy_shop.txt').read_text().startswith('# yes fold 0')
