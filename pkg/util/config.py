from dataclasses import fields, is_dataclass
from dataclass.episode import GenConfig
from dataclass.loss_weights import LossWeights
from dataclass.model_config import ModelConfig
from dataclass.report import HarnessConfig
from dataclass.run_config import CliConfig, UciConfig
from dataclass.train_config import TrainConfig
from typing import Any, Dict, Optional, Tuple, Type
from yaml import safe_load
from .exceptions import ConfigError
import os


THREADS_ENV = 'RULEFORGE_THREADS'

# Config section name -> record type
SECTIONS: Dict[str, Type] = {
    'gen': GenConfig,
    'model': ModelConfig,
    'loss': LossWeights,
    'train': TrainConfig,
    'eval': HarnessConfig,
    'uci': UciConfig,
}


def get_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load a YAML (or JSON) config file; no path means an empty config
    """
    if path is None:
        return {}
    try:
        with open(path, 'r') as f:
            data = safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f'{path} not found')
    except Exception as e:
        raise ConfigError(f'Error parsing {path}: {e}')

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f'{path} must contain a mapping at the top level')
    return data


def section_from_dict(cls: Type, data: Optional[Dict[str, Any]], section: str) -> Any:
    """
    Build a config record, rejecting keys the record does not declare
    """
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f'Unknown keys in section "{section}": {", ".join(sorted(unknown))}')
    return cls(**data)


def override_targets() -> Dict[str, Tuple[str, str]]:
    """
    Map every flat override name to its (section, field)
    """
    targets = {}
    for section, cls in SECTIONS.items():
        for f in fields(cls):
            if is_dataclass(f.default_factory() if callable(f.default_factory) else None):
                continue
            targets.setdefault(f.name, (section, f.name))
    return targets


def apply_overrides(config: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """
    Apply flat flag overrides on top of file values
    """
    targets = override_targets()
    unknown = set(config) - set(SECTIONS) - {'runtime'}
    if unknown:
        raise ConfigError(f'Unknown config sections: {", ".join(sorted(unknown))}')
    merged = {section: dict(config.get(section) or {}) for section in SECTIONS}
    for key in ('runtime',):
        merged[key] = dict(config.get(key) or {})

    for name, value in overrides.items():
        if value is None:
            continue
        if name == 'seed':
            # One seed drives both the generator and the trainer
            merged['train']['seed'] = value
            merged['gen']['seed'] = value
            merged['uci']['seed'] = value
            continue
        if name not in targets:
            raise ConfigError(f'Unknown override "{name}"')
        section, key = targets[name]
        merged[section][key] = value
    return merged


def build_cli_config(subcommand: str, out_dir: str, config_path: Optional[str] = None,
                     overrides: Optional[Dict[str, Any]] = None, threads: Optional[int] = None,
                     verbosity: Optional[int] = None) -> CliConfig:
    overrides = overrides or {}
    merged = apply_overrides(get_config(config_path), overrides)

    try:
        gen = section_from_dict(GenConfig, merged['gen'], 'gen')
        model = section_from_dict(ModelConfig, merged['model'], 'model')
        loss = section_from_dict(LossWeights, merged['loss'], 'loss')
        train_data = dict(merged['train'])
        for nested in ('gen', 'model', 'loss'):
            if nested in train_data:
                raise ConfigError(f'Put "{nested}" at the top level, not under "train"')
        train = section_from_dict(TrainConfig, {**train_data, 'gen': gen, 'model': model, 'loss': loss}, 'train')
        harness = section_from_dict(HarnessConfig, merged['eval'], 'eval')
        uci = section_from_dict(UciConfig, merged['uci'], 'uci')
    except TypeError as e:
        raise ConfigError(str(e))

    runtime = merged['runtime']
    return CliConfig(
        subcommand=subcommand,
        out_dir=out_dir,
        config_path=config_path,
        overrides={k: v for k, v in overrides.items() if v is not None},
        verbosity=verbosity if verbosity is not None else int(runtime.get('verbosity', 1)),
        threads=get_threads(threads if threads is not None else runtime.get('threads')),
        train=train,
        harness=harness,
        uci=uci
    )


def get_threads(flag: Optional[int] = None) -> int:
    if flag is not None:
        return max(1, int(flag))
    try:
        return max(1, int(os.environ[THREADS_ENV]))
    except KeyError:
        return os.cpu_count() or 1
    except ValueError:
        raise ConfigError(f'{THREADS_ENV} must be an integer')
