from argparse import Namespace
from clients.checkpoint_client import load_checkpoint
from dataclass.run_config import CliConfig
from harness.ablation import ablation_suite
from pathlib import Path
from training.grad_suite import gradient_suite
from training.trainer import train
from typing import TYPE_CHECKING
from uci.binarize import load_binarized
from util.enums import AblationTarget
from util.exceptions import GradientCheckError
from views.csv_views import write_json, write_report
import logging

if TYPE_CHECKING:
    from util.ruleforge_cli import RuleForgeCli


logger = logging.getLogger(__name__)


class TrainingCog:
    def __init__(self, app: 'RuleForgeCli'):
        self._app = app

        parser = app.add_command('train', 'Meta-train a rule inducer on synthetic episodes', self.train)
        parser.add_argument('--resume', default=None, help='Checkpoint directory to continue from')

        parser = app.add_command('check-grad', 'Finite-difference check of the full model gradient', self.check_grad)
        parser.add_argument('--samples', type=int, default=100, help='Parameter entries to check')

        parser = app.add_command('ablate', 'Train and score loss ablations', self.ablate)
        parser.add_argument('--variants', nargs='+', choices=[t.value for t in AblationTarget], default=None,
                            help='Ablations to run besides the full objective (default: all)')
        parser.add_argument('--manifest', nargs='+', default=None, help='Dataset manifests for the real-data score')
        logger.debug(f'Loaded cog: {self.__class__.__name__}')

    def train(self, args: Namespace, cfg: CliConfig):
        resume = load_checkpoint(args.resume) if args.resume else None
        checkpoint = train(cfg.train, cfg.out_dir, cfg.threads, resume)
        logger.info(f'Final checkpoint at step {checkpoint.step}: {checkpoint.path} ({checkpoint.short_hash})')

    def check_grad(self, args: Namespace, cfg: CliConfig):
        ops, result = gradient_suite(seed=cfg.train.seed, samples=args.samples)
        write_json(Path(cfg.out_dir) / 'grad_check.json', {
            'ops': {name: op.max_error for name, op in ops.items()},
            'checked': result.checked,
            'max_error': result.max_error,
            'median_error': result.median_error,
            'passed': result.passed,
            'errors': result.errors
        })
        if not result.passed:
            raise GradientCheckError(result.max_error, result.median_error)
        print(f'Gradient check passed ({len(ops)} ops, {result.checked} model entries)')

    def ablate(self, args: Namespace, cfg: CliConfig):
        manifests = args.manifest if args.manifest is not None else cfg.uci.manifests
        datasets = [load_binarized(path) for path in manifests]
        targets = [AblationTarget(v) for v in args.variants] if args.variants else None
        report = ablation_suite(cfg.train, cfg.out_dir, cfg.harness, cfg.uci, datasets, targets, cfg.threads)
        path = write_report(report, cfg.out_dir)
        logger.info(f'Ablation report written to {path}')
