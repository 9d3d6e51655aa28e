from dataclass.episode import Episode
from dnf.rule_text import parse_rule, print_rule
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union
import json
import numpy as np


def episode_to_json(episode: Episode) -> Dict[str, Any]:
    cells = [[None if np.isnan(v) else int(v) for v in row] for row in episode.X]
    return {
        'n': episode.n,
        's': episode.s,
        'm': episode.m,
        'x': cells,
        'y': [int(v) for v in episode.y],
        'rule': print_rule(episode.rule) if episode.rule is not None else None,
        'seed': episode.meta.get('seed'),
        'index': episode.meta.get('index')
    }


def episode_from_json(data: Dict[str, Any]) -> Episode:
    X = np.array([[np.nan if v is None else float(v) for v in row] for row in data['x']], dtype=np.float64)
    width = int(data['n']) + int(data.get('s', 0))
    if X.size == 0:
        X = X.reshape(0, width)
    rule = parse_rule(data['rule']).with_num_variables(int(data['n'])) if data.get('rule') else None
    return Episode(
        X=X,
        y=np.array(data['y'], dtype=bool),
        rule=rule,
        n=int(data['n']),
        s=int(data.get('s', 0)),
        meta={'seed': data.get('seed'), 'index': data.get('index')}
    )


def write_episodes(path: Union[str, Path], episodes: Iterable[Episode]) -> int:
    """
    Write one JSON object per line; returns the number written
    """
    count = 0
    with open(path, 'w') as f:
        for episode in episodes:
            f.write(json.dumps(episode_to_json(episode), separators=(',', ':')) + '\n')
            count += 1
    return count


def read_episodes(path: Union[str, Path]) -> List[Episode]:
    with open(path, 'r') as f:
        return [episode_from_json(json.loads(line)) for line in f if line.strip()]
