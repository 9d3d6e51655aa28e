from pathlib import Path
from typing import Any, Dict, List, Sequence, Union
import csv
import json
import pandas as pd


class CsvLog:
    """
    Row-at-a-time CSV writer for per-step logs; reopening in append mode
    continues an existing file without repeating the header
    """

    def __init__(self, path: Union[str, Path], columns: Sequence[str], append: bool = False):
        self.path = Path(path)
        self.columns = list(columns)
        exists = append and self.path.exists() and self.path.stat().st_size > 0
        self._file = open(self.path, 'a' if append else 'w', newline='')
        self._writer = csv.writer(self._file)
        if not exists:
            self._writer.writerow(self.columns)

    def write(self, row: Sequence[Any]):
        self._writer.writerow(list(row))
        self._file.flush()

    def close(self):
        self._file.close()

    def __enter__(self) -> 'CsvLog':
        return self

    def __exit__(self, *exc):
        self.close()


def write_table(path: Union[str, Path], rows: List[Dict[str, Any]], columns: Sequence[str] = None) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=list(columns) if columns else None)
    frame.to_csv(path, index=False)
    return frame


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)


def write_json(path: Union[str, Path], data: Dict[str, Any]):
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(value: Any) -> Any:
    if hasattr(value, 'tolist'):
        return value.tolist()
    if hasattr(value, 'value'):
        return value.value
    return str(value)


def write_rules(path: Union[str, Path], sections: Dict[str, List[str]]):
    """
    Rule listing: one "# <heading>" line per section followed by its rules
    """
    with open(path, 'w') as f:
        for heading, rules in sections.items():
            f.write(f'# {heading}\n')
            for rule in rules:
                f.write(f'{rule}\n')
            f.write('\n')


def write_report(report, out_dir: Union[str, Path]) -> Path:
    """
    <family>.json with the full report and <family>.csv with one row per cell
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / f'{report.family}.json', report.to_dict())
    flat = [{k: v for k, v in cell.items() if not isinstance(v, (dict, list))} for cell in report.cells]
    write_table(out_dir / f'{report.family}.csv', flat)
    return out_dir / f'{report.family}.json'
