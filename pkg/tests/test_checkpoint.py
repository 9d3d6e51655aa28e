from clients.checkpoint_client import MANIFEST, PAYLOAD, load_checkpoint, save_checkpoint
from dataclass.checkpoint import Checkpoint
from util.exceptions import CheckpointError
import json
import numpy as np
import pytest


def test_round_trip_is_exact(tiny_checkpoint, tmp_path):
    loaded = load_checkpoint(tmp_path / 'checkpoint')
    assert loaded.sha256 == tiny_checkpoint.sha256
    assert loaded.model == tiny_checkpoint.model
    assert loaded.seed == 3
    assert loaded.store.names == tiny_checkpoint.store.names
    for name in loaded.store:
        np.testing.assert_array_equal(loaded.store[name].data, tiny_checkpoint.store[name].data)


def test_moments_and_step_survive(tiny_model, tiny_store, tmp_path):
    tiny_store.moments = {name: (np.full(p.shape, 0.1, dtype=np.float32), np.full(p.shape, 0.2, dtype=np.float32))
                          for name, p in tiny_store.items()}
    tiny_store.step = 7
    save_checkpoint(Checkpoint(store=tiny_store, model=tiny_model, step=7), tmp_path / 'ckpt')
    loaded = load_checkpoint(tmp_path / 'ckpt')
    assert loaded.step == loaded.store.step == 7
    m, v = loaded.store.moments['gate.bias']
    np.testing.assert_array_equal(m, np.float32(0.1))
    np.testing.assert_array_equal(v, np.float32(0.2))


def test_saving_is_deterministic(tiny_checkpoint, tmp_path):
    again = save_checkpoint(tiny_checkpoint, tmp_path / 'again')
    assert again == tiny_checkpoint.sha256
    assert (tmp_path / 'again' / PAYLOAD).read_bytes() == (tmp_path / 'checkpoint' / PAYLOAD).read_bytes()


def test_tampered_payload_is_rejected(tiny_checkpoint, tmp_path):
    path = tmp_path / 'checkpoint' / PAYLOAD
    data = bytearray(path.read_bytes())
    data[0] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'checkpoint')
    assert load_checkpoint(tmp_path / 'checkpoint', verify=False).sha256 != tiny_checkpoint.sha256


def test_truncated_payload_is_rejected(tiny_checkpoint, tmp_path):
    path = tmp_path / 'checkpoint' / PAYLOAD
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'checkpoint', verify=False)


def test_missing_or_foreign_checkpoint(tiny_checkpoint, tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'nowhere')
    manifest = tmp_path / 'checkpoint' / MANIFEST
    data = json.loads(manifest.read_text())
    data['format'] = 'something-else'
    manifest.write_text(json.dumps(data))
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'checkpoint')
