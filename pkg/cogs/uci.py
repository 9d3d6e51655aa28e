from argparse import Namespace
from clients.checkpoint_client import load_checkpoint
from dataclass.run_config import CliConfig
from typing import TYPE_CHECKING
from uci.binarize import load_binarized
from uci.zero_shot import write_uci_outputs, zero_shot_eval
from util.exceptions import UsageError
import logging

if TYPE_CHECKING:
    from util.ruleforge_cli import RuleForgeCli


logger = logging.getLogger(__name__)


class UciCog:
    def __init__(self, app: 'RuleForgeCli'):
        self._app = app
        parser = app.add_command('eval-uci', 'Zero-shot k-fold evaluation on tabular datasets', self.eval_uci)
        parser.add_argument('--checkpoint', required=True, help='Checkpoint directory')
        parser.add_argument('--manifest', nargs='+', default=None, help='Dataset manifests (default: uci.manifests)')
        logger.debug(f'Loaded cog: {self.__class__.__name__}')

    def eval_uci(self, args: Namespace, cfg: CliConfig):
        manifests = args.manifest if args.manifest is not None else cfg.uci.manifests
        if not manifests:
            raise UsageError('eval-uci needs --manifest or uci.manifests in the config')
        checkpoint = load_checkpoint(args.checkpoint)

        results = []
        for path in manifests:
            manifest, dataset = load_binarized(path)
            results.append(zero_shot_eval(checkpoint, dataset, manifest, cfg.uci, cfg.threads, cfg.harness.top_k))
        summary = write_uci_outputs(results, cfg.out_dir)
        for row in summary:
            if row['headline']:
                print(f'{row["dataset"]}: {100 * row["mean_accuracy"]:.1f} +/- {100 * row["std_accuracy"]:.1f}')
