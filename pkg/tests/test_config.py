from util.config import THREADS_ENV, apply_overrides, build_cli_config, get_config, get_threads, override_targets
from util.exceptions import ConfigError
import pytest


CONFIG = """
gen:
  n_range: [4, 8]
  s_spurious: 1
model:
  d: 32
  T: 4
train:
  steps: 10
  batch_episodes: 8
  min_keep: 2
eval:
  seeds: [1, 2]
runtime:
  threads: 3
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / 'config.yml'
    path.write_text(CONFIG)
    return str(path)


def test_loads_sections(config_file):
    cfg = build_cli_config('train', 'out', config_file)
    assert cfg.train.gen.n_range == (4, 8)
    assert cfg.train.model.d == 32
    assert cfg.train.steps == 10
    assert cfg.harness.seeds == [1, 2]
    assert cfg.threads == 3


def test_flags_override_file(config_file):
    cfg = build_cli_config('train', 'out', config_file, {'steps': 20, 'd': 64, 'seed': 9}, threads=1)
    assert cfg.train.steps == 20
    assert cfg.train.model.d == 64
    assert cfg.train.seed == cfg.train.gen.seed == cfg.uci.seed == 9
    assert cfg.threads == 1
    assert cfg.overrides == {'steps': 20, 'd': 64, 'seed': 9}


def test_none_overrides_are_ignored():
    merged = apply_overrides({'train': {'steps': 4}}, {'steps': None})
    assert merged['train']['steps'] == 4


def test_every_field_has_one_override():
    targets = override_targets()
    assert targets['lambda_cf'] == ('loss', 'lambda_cf')
    assert targets['T'] == ('model', 'T')
    assert 'gen' not in targets


def test_unknown_keys_fail(tmp_path):
    path = tmp_path / 'bad.yml'
    path.write_text('model:\n  width: 3\n')
    with pytest.raises(ConfigError):
        build_cli_config('train', 'out', str(path))
    path.write_text('modle:\n  d: 3\n')
    with pytest.raises(ConfigError):
        build_cli_config('train', 'out', str(path))
    with pytest.raises(ConfigError):
        apply_overrides({}, {'no_such_flag': 1})


def test_invalid_values_fail():
    with pytest.raises(ConfigError):
        build_cli_config('train', 'out', overrides={'heads': 3, 'd': 32})
    with pytest.raises(ConfigError):
        build_cli_config('train', 'out', overrides={'min_keep': 9})


def test_missing_or_malformed_file(tmp_path):
    with pytest.raises(ConfigError):
        get_config(str(tmp_path / 'absent.yml'))
    path = tmp_path / 'list.yml'
    path.write_text('- 1\n- 2\n')
    with pytest.raises(ConfigError):
        get_config(str(path))
    assert get_config(None) == {}


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '5')
    assert get_threads() == 5
    assert get_threads(2) == 2
    monkeypatch.setenv(THREADS_ENV, 'many')
    with pytest.raises(ConfigError):
        get_threads()
