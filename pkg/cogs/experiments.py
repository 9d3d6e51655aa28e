from argparse import Namespace
from clients.checkpoint_client import load_checkpoint
from dataclass.report import ExperimentReport
from dataclass.run_config import CliConfig
from harness.scaling import scaling_bench
from harness.synthetic import complexity_grid, noise_sweep, spurious_sweep
from typing import TYPE_CHECKING
from views.csv_views import write_report
import logging

if TYPE_CHECKING:
    from util.ruleforge_cli import RuleForgeCli


logger = logging.getLogger(__name__)


class ExperimentsCog:
    def __init__(self, app: 'RuleForgeCli'):
        self._app = app
        commands = {
            'eval-grid': ('Logical match and accuracy over rule complexity', self.eval_grid),
            'eval-noise': ('Accuracy under support-label noise', self.eval_noise),
            'eval-spurious': ('Accuracy with label-correlated distractor columns', self.eval_spurious),
            'bench-scaling': ('Latency and memory over N and M', self.bench_scaling),
        }
        for name, (help_text, handler) in commands.items():
            parser = app.add_command(name, help_text, handler)
            parser.add_argument('--checkpoint', required=True, help='Checkpoint directory')
        logger.debug(f'Loaded cog: {self.__class__.__name__}')

    @staticmethod
    def _publish(report: ExperimentReport, cfg: CliConfig):
        path = write_report(report, cfg.out_dir)
        for key, value in report.summary.items():
            logger.info(f'{report.family}: {key} = {value}')
        logger.info(f'Report written to {path}')

    def eval_grid(self, args: Namespace, cfg: CliConfig):
        self._publish(complexity_grid(load_checkpoint(args.checkpoint), cfg.harness, cfg.threads), cfg)

    def eval_noise(self, args: Namespace, cfg: CliConfig):
        self._publish(noise_sweep(load_checkpoint(args.checkpoint), cfg.harness, cfg.threads), cfg)

    def eval_spurious(self, args: Namespace, cfg: CliConfig):
        self._publish(spurious_sweep(load_checkpoint(args.checkpoint), cfg.harness, cfg.threads), cfg)

    def bench_scaling(self, args: Namespace, cfg: CliConfig):
        self._publish(scaling_bench(load_checkpoint(args.checkpoint), cfg.harness), cfg)
