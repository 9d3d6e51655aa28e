from clients.dataset_client import load_manifest, read_dataset
from dataclass.dataset import BinarizedDataset, DatasetManifest
from typing import Dict, List, Tuple
from util.enums import ColumnType
from util.exceptions import EmptyColumnError, ManifestError, UnparseableCellError
from util.string_util import sanitize_feature_name
import logging
import numpy as np
import pandas as pd


logger = logging.getLogger(__name__)


def resolve_type(values: pd.Series, declared: ColumnType) -> ColumnType:
    if declared != ColumnType.AUTO:
        return declared
    parsed = pd.to_numeric(values.dropna(), errors='coerce')
    return ColumnType.NUMERIC if parsed.notna().all() else ColumnType.CATEGORICAL


def numeric_feature(column: str, values: pd.Series) -> Tuple[np.ndarray, float]:
    """
    1 iff value > median of the observed values; ties and constants give 0
    """
    parsed = pd.to_numeric(values, errors='coerce')
    bad = parsed.isna() & values.notna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise UnparseableCellError(column, row, values.iloc[row])
    median = float(parsed.median())
    observed = parsed.notna().to_numpy()
    feature = np.full(len(values), np.nan)
    feature[observed] = (parsed.to_numpy(dtype=np.float64)[observed] > median).astype(np.float64)
    return feature, median


def categorical_features(values: pd.Series) -> Dict[str, np.ndarray]:
    """
    One indicator per observed category, in sorted order
    """
    observed = values.notna().to_numpy()
    features = {}
    for category in sorted(values.dropna().unique()):
        feature = np.full(len(values), np.nan)
        feature[observed] = (values[observed] == category).to_numpy(dtype=np.float64)
        features[category] = feature
    return features


def binarize(frame: pd.DataFrame, manifest: DatasetManifest) -> BinarizedDataset:
    """
    Median-threshold numeric columns and one-hot categorical columns.
    Only the label column is dropped; the features never look at it.
    """
    if manifest.label_column not in frame.columns:
        raise ManifestError(manifest.name, f'label column "{manifest.label_column}" not found')

    labelled = frame[manifest.label_column].notna()
    if not labelled.all():
        logger.warning(f'{manifest.name}: dropping {int((~labelled).sum())} rows with a missing label')
        frame = frame[labelled].reset_index(drop=True)

    labels = frame[manifest.label_column].astype(str).to_numpy()
    observed_classes = set(labels)
    if len(observed_classes) < 2:
        raise ManifestError(manifest.name, f'needs at least two classes, found {sorted(observed_classes)}')
    for cls in manifest.classes:
        if cls not in observed_classes:
            raise ManifestError(manifest.name, f'positive label "{cls}" never occurs in {manifest.label_column}')

    names: List[str] = []
    columns: List[np.ndarray] = []
    medians: Dict[str, float] = {}
    for column in frame.columns:
        if column == manifest.label_column or column in manifest.ignore_columns:
            continue
        values = frame[column]
        if values.notna().sum() == 0:
            raise EmptyColumnError(column)

        kind = resolve_type(values, manifest.columns.get(column, ColumnType.AUTO))
        base = sanitize_feature_name(column)
        if kind == ColumnType.NUMERIC:
            feature, median = numeric_feature(column, values)
            names.append(f'{base}_gt_median')
            columns.append(feature)
            medians[column] = median
        else:
            for category, feature in categorical_features(values).items():
                names.append(f'{base}_{sanitize_feature_name(category)}')
                columns.append(feature)

    if len(set(names)) != len(names):
        duplicates = sorted({n for n in names if names.count(n) > 1})
        raise ManifestError(manifest.name, f'feature names collide after sanitizing: {", ".join(duplicates)}')
    if manifest.expected_n is not None and len(names) != manifest.expected_n:
        logger.warning(f'{manifest.name}: {len(names)} boolean features, manifest expects {manifest.expected_n}')

    X = np.stack(columns, axis=1) if columns else np.zeros((len(labels), 0))
    logger.info(f'Binarized {manifest.name}: M={X.shape[0]}, N={X.shape[1]}, '
                f'{int(np.isnan(X).sum())} unknown cells')
    return BinarizedDataset(
        name=manifest.name,
        feature_names=names,
        X=X,
        labels=labels,
        positive_label=manifest.headline,
        medians=medians
    )


def load_binarized(manifest_path) -> Tuple[DatasetManifest, BinarizedDataset]:
    manifest = load_manifest(manifest_path)
    return manifest, binarize(read_dataset(manifest), manifest)
