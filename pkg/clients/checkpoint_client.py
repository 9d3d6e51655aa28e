"""
Checkpoint directories: manifest.json (names, shapes, byte offsets, configs,
seed, payload hash) next to weights.bin, a contiguous little-endian float32
payload holding parameters followed by the optimizer moments.
"""
from autograd.param_store import ParamStore
from dataclass.checkpoint import Checkpoint
from dataclass.model_config import ModelConfig
from pathlib import Path
from typing import Any, Dict, List, Union
from util.exceptions import CheckpointError
import hashlib
import json
import logging
import numpy as np


logger = logging.getLogger(__name__)

FORMAT = 'ruleforge-checkpoint'
VERSION = 1
MANIFEST = 'manifest.json'
PAYLOAD = 'weights.bin'
PAYLOAD_DTYPE = np.dtype('<f4')


def _entries(store: ParamStore) -> List[Dict[str, Any]]:
    entries = []
    for name in store:
        shape = list(store[name].shape)
        entries.append({'name': name, 'kind': 'param', 'shape': shape})
        if name in store.moments:
            entries.append({'name': name, 'kind': 'm', 'shape': shape})
            entries.append({'name': name, 'kind': 'v', 'shape': shape})
    return entries


def save_checkpoint(checkpoint: Checkpoint, directory: Union[str, Path]) -> str:
    """
    Write the checkpoint and return the sha256 of its payload
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    store: ParamStore = checkpoint.store

    entries = _entries(store)
    chunks = []
    offset = 0
    for entry in entries:
        if entry['kind'] == 'param':
            values = store[entry['name']].data
        else:
            m, v = store.moments[entry['name']]
            values = m if entry['kind'] == 'm' else v
        chunk = np.ascontiguousarray(values, dtype=PAYLOAD_DTYPE).tobytes()
        entry['dtype'] = PAYLOAD_DTYPE.str
        entry['offset'] = offset
        entry['nbytes'] = len(chunk)
        offset += len(chunk)
        chunks.append(chunk)

    payload = b''.join(chunks)
    digest = hashlib.sha256(payload).hexdigest()
    manifest = {
        'format': FORMAT,
        'version': VERSION,
        'seed': checkpoint.seed,
        'step': checkpoint.step,
        'model': checkpoint.model.to_dict(),
        'train': checkpoint.train,
        'sha256': digest,
        'entries': entries
    }

    with open(directory / PAYLOAD, 'wb') as f:
        f.write(payload)
    with open(directory / MANIFEST, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True)

    checkpoint.sha256 = digest
    checkpoint.path = str(directory)
    logger.info(f'Saved checkpoint at step {checkpoint.step} to {directory} ({digest[:12]})')
    return digest


def load_checkpoint(directory: Union[str, Path], verify: bool = True) -> Checkpoint:
    directory = Path(directory)
    try:
        with open(directory / MANIFEST, 'r') as f:
            manifest = json.load(f)
        with open(directory / PAYLOAD, 'rb') as f:
            payload = f.read()
    except FileNotFoundError as e:
        raise CheckpointError(directory, f'missing {Path(e.filename).name}')
    except json.JSONDecodeError as e:
        raise CheckpointError(directory, f'malformed manifest: {e}')

    if manifest.get('format') != FORMAT:
        raise CheckpointError(directory, 'not a ruleforge checkpoint')
    digest = hashlib.sha256(payload).hexdigest()
    if verify and digest != manifest.get('sha256'):
        raise CheckpointError(directory, 'payload hash does not match manifest')

    store = ParamStore()
    moments: Dict[str, Dict[str, np.ndarray]] = {}
    for entry in manifest['entries']:
        end = entry['offset'] + entry['nbytes']
        if end > len(payload):
            raise CheckpointError(directory, f'payload truncated at {entry["name"]}')
        values = np.frombuffer(payload[entry['offset']:end], dtype=np.dtype(entry['dtype'])).reshape(entry['shape'])
        if entry['kind'] == 'param':
            store.add(entry['name'], values)
        else:
            moments.setdefault(entry['name'], {})[entry['kind']] = values.astype(store.dtype)
    store.moments = {name: (pair['m'], pair['v']) for name, pair in moments.items()}
    store.step = int(manifest.get('step', 0))

    return Checkpoint(
        store=store,
        model=ModelConfig(**manifest['model']),
        seed=int(manifest.get('seed', 0)),
        step=store.step,
        train=manifest.get('train', {}),
        sha256=digest,
        path=str(directory)
    )
