from argparse import ArgumentParser, Namespace
from autograd.tensor import set_debug_checks
from dataclass.run_config import CliConfig
from dataclasses import fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
from uuid6 import uuid7
from views.csv_views import write_json
from .config import SECTIONS, build_cli_config, override_targets
from .exceptions import RuleForgeError, UsageError
from .logging_util import setup_logging
import logging
import numpy as np
import pandas as pd
import pendulum
import platform
import scipy
import sys


logger = logging.getLogger(__name__)

RUN_JSON = 'run.json'
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

Handler = Callable[[Namespace, CliConfig], None]


class CliParser(ArgumentParser):
    def error(self, message: str):
        raise UsageError(f'{self.prog}: {message}')


def _bool(value: str) -> bool:
    return str(value).lower() in ('1', 'true', 'yes', 'on')


def _override_spec() -> Dict[str, Dict[str, Any]]:
    """
    argparse keyword arguments for every flat config override, typed after the field default
    """
    defaults = {}
    for section, cls in SECTIONS.items():
        record = cls()
        for f in fields(cls):
            defaults.setdefault(f.name, getattr(record, f.name))

    specs = {}
    for name in override_targets():
        default = defaults[name]
        if isinstance(default, bool):
            specs[name] = {'type': _bool}
        elif isinstance(default, (list, tuple)):
            element = type(default[0]) if len(default) else str
            specs[name] = {'type': element, 'nargs': '+'}
        elif isinstance(default, (int, float)):
            specs[name] = {'type': type(default)}
        else:
            specs[name] = {'type': str}
    return specs


class RuleForgeCli:
    """
    Subcommand dispatcher. Command groups (cogs) register their subcommands
    through add_command when the app is built.
    """

    def __init__(self):
        self.parser = CliParser(prog='ruleforge', allow_abbrev=False, description='Zero-shot DNF rule induction toolchain')
        self._subparsers = self.parser.add_subparsers(dest='subcommand', parser_class=CliParser)
        self._handlers: Dict[str, Handler] = {}
        self._overrides = _override_spec()

        # Add cogs
        from cogs import setup
        setup(self)

    @property
    def commands(self) -> List[str]:
        return sorted(self._handlers)

    def add_command(self, name: str, help_text: str, handler: Handler) -> ArgumentParser:
        """
        Register a subcommand; the returned parser already carries the common
        flags and every config override
        """
        parser = self._subparsers.add_parser(name, help=help_text, description=help_text, allow_abbrev=False)
        common = parser.add_argument_group('run')
        common.add_argument('--out', required=True, help='Output directory for every artifact')
        common.add_argument('--config', default=None, help='YAML or JSON config file')
        common.add_argument('--seed', type=int, default=None, help='Seed for generation, training and folds')
        common.add_argument('--threads', type=int, default=None, help='Worker threads (default: RULEFORGE_THREADS or all cores)')
        common.add_argument('-v', '--verbose', action='count', default=None, help='More logging (-vv for debug)')

        overrides = parser.add_argument_group('config overrides')
        for field_name, spec in self._overrides.items():
            if field_name == 'seed':
                continue
            flag = '--' + field_name.replace('_', '-')
            overrides.add_argument(flag, dest=f'override_{field_name}', default=None, **spec)

        self._handlers[name] = handler
        return parser

    def _collect_overrides(self, args: Namespace) -> Dict[str, Any]:
        overrides = {'seed': args.seed}
        for field_name in self._overrides:
            value = getattr(args, f'override_{field_name}', None)
            if value is not None:
                overrides[field_name] = value
        return overrides

    def write_run_json(self, cfg: CliConfig, argv: Sequence[str]) -> Dict[str, Any]:
        run = {
            'run_id': str(uuid7()),
            'started_at': pendulum.now('UTC').to_iso8601_string(),
            'argv': list(argv),
            'seed': cfg.train.seed,
            'config': cfg.to_dict(),
            'versions': {
                'python': platform.python_version(),
                'numpy': np.__version__,
                'pandas': pd.__version__,
                'scipy': scipy.__version__
            }
        }
        write_json(Path(cfg.out_dir) / RUN_JSON, run)
        return run

    def dispatch(self, argv: Optional[Sequence[str]] = None) -> int:
        argv = list(sys.argv[1:] if argv is None else argv)
        try:
            try:
                args = self.parser.parse_args(argv)
            except SystemExit as e:
                # --help
                return int(e.code or 0)
            if args.subcommand is None:
                raise UsageError(f'choose a subcommand: {", ".join(self.commands)}')

            cfg = build_cli_config(
                subcommand=args.subcommand,
                out_dir=args.out,
                config_path=args.config,
                overrides=self._collect_overrides(args),
                threads=args.threads,
                verbosity=None if args.verbose is None else 1 + args.verbose
            )
            Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
            setup_logging(cfg.verbosity, cfg.out_dir)
            # Debug verbosity also checks every tensor op for NaN/Inf
            set_debug_checks(cfg.verbosity >= 2)
            run = self.write_run_json(cfg, argv)
            logger.info(f'Run {run["run_id"]}: {cfg.subcommand} -> {cfg.out_dir} ({cfg.threads} threads)')

            self._handlers[args.subcommand](args, cfg)
            return EXIT_OK
        except UsageError as e:
            logger.error(e.message)
            return EXIT_USAGE
        except RuleForgeError as e:
            logger.error(e.message)
            return EXIT_FAILURE
        except OSError as e:
            logger.error(f'I/O failure: {e}')
            return EXIT_FAILURE
