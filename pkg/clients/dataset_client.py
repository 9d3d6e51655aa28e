"""
Tabular datasets on disk: a JSON manifest per dataset naming a header-row CSV
(path relative to the manifest) with `?` or empty cells as missing.
"""
from dataclass.dataset import DatasetManifest
from pathlib import Path
from typing import Any, Dict, Union
from util.enums import ColumnType
from util.exceptions import ManifestError
import json
import logging
import pandas as pd


logger = logging.getLogger(__name__)

MISSING_MARKERS = ['?', '']
REQUIRED_KEYS = ('name', 'path', 'label_column', 'positive_label')


def manifest_from_dict(data: Dict[str, Any], base_dir: Union[str, Path] = '.') -> DatasetManifest:
    name = str(data.get('name', '<unnamed>'))
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise ManifestError(name, f'missing keys {", ".join(missing)}')

    columns = {}
    for column, kind in (data.get('columns') or {}).items():
        try:
            columns[str(column)] = ColumnType(str(kind).lower())
        except ValueError:
            raise ManifestError(name, f'column "{column}" has unknown type "{kind}"')

    positive = data['positive_label']
    positive = [str(p) for p in positive] if isinstance(positive, list) else str(positive)
    if isinstance(positive, list) and not positive:
        raise ManifestError(name, 'positive_label list is empty')

    path = Path(data['path'])
    if not path.is_absolute():
        path = Path(base_dir) / path

    manifest = DatasetManifest(
        name=name,
        path=str(path),
        label_column=str(data['label_column']),
        positive_label=positive,
        columns=columns,
        expected_n=data.get('expected_n'),
        headline_class=str(data['headline_class']) if data.get('headline_class') is not None else None,
        ignore_columns=[str(c) for c in data.get('ignore_columns') or []]
    )
    if manifest.headline not in manifest.classes:
        raise ManifestError(name, f'headline class "{manifest.headline}" is not one of {manifest.classes}')
    return manifest


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ManifestError(path.name, f'{path} not found')
    except json.JSONDecodeError as e:
        raise ManifestError(path.name, f'malformed JSON: {e}')
    if not isinstance(data, dict):
        raise ManifestError(path.name, 'top level must be an object')
    return manifest_from_dict(data, path.parent)


def read_dataset(manifest: DatasetManifest) -> pd.DataFrame:
    """
    Raw table with every cell as a stripped string and missing cells as NA
    """
    try:
        frame = pd.read_csv(manifest.path, dtype=str, na_values=MISSING_MARKERS,
                            keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError:
        raise ManifestError(manifest.name, f'data file {manifest.path} not found')
    except pd.errors.ParserError as e:
        raise ManifestError(manifest.name, f'cannot parse {manifest.path}: {e}')

    frame.columns = [str(c).strip() for c in frame.columns]
    for column in frame.columns:
        frame[column] = frame[column].str.strip()
    frame = frame.replace({marker: pd.NA for marker in MISSING_MARKERS})
    if manifest.label_column not in frame.columns:
        raise ManifestError(manifest.name, f'label column "{manifest.label_column}" not in {list(frame.columns)}')
    logger.debug(f'Read {len(frame)} rows x {len(frame.columns)} columns from {manifest.path}')
    return frame
