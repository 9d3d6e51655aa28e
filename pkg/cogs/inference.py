from argparse import Namespace
from clients.checkpoint_client import load_checkpoint
from clients.dataset_client import load_manifest, read_dataset
from clients.episode_client import read_episodes
from dataclass.episode import Episode
from dataclass.run_config import CliConfig
from dataclasses import replace
from dnf.equivalence import logically_equivalent
from dnf.rule_text import print_rule
from model.inference import RuleInducer
from pathlib import Path
from typing import TYPE_CHECKING
from uci.binarize import binarize
from util.exceptions import SingleClassEpisodeError, UsageError
from views.csv_views import write_rules
import logging

if TYPE_CHECKING:
    from util.ruleforge_cli import RuleForgeCli


logger = logging.getLogger(__name__)

RULES_TXT = 'rules.txt'


class InferenceCog:
    def __init__(self, app: 'RuleForgeCli'):
        self._app = app
        parser = app.add_command('induce', 'Induce a rule zero-shot from a checkpoint', self.induce)
        parser.add_argument('--checkpoint', required=True, help='Checkpoint directory')
        parser.add_argument('--episodes', default=None, help='Episode JSONL file')
        parser.add_argument('--manifest', default=None, help='Dataset manifest (JSON)')
        parser.add_argument('--dataset', default=None, help='CSV file, overriding the manifest path')
        logger.debug(f'Loaded cog: {self.__class__.__name__}')

    def induce(self, args: Namespace, cfg: CliConfig):
        if (args.episodes is None) == (args.manifest is None):
            raise UsageError('induce needs exactly one of --episodes or --manifest')
        inducer = RuleInducer(load_checkpoint(args.checkpoint))
        top_k = cfg.harness.top_k
        sections = {}

        if args.episodes is not None:
            episodes = read_episodes(args.episodes)
            rules = inducer.induce_many(episodes, cfg.threads, top_k)
            for i, (episode, rule) in enumerate(zip(episodes, rules)):
                text = print_rule(rule)
                heading = f'episode {episode.meta.get("index", i)}'
                if episode.rule is not None:
                    heading += f' (logical match: {bool(logically_equivalent(rule, episode.rule))})'
                sections[heading] = [text]
                print(text)
        else:
            manifest = load_manifest(args.manifest)
            if args.dataset is not None:
                manifest = replace(manifest, path=args.dataset)
            dataset = binarize(read_dataset(manifest), manifest)
            for cls in manifest.classes:
                y = dataset.target(cls)
                episode = Episode(X=dataset.X, y=y, rule=None, n=dataset.n)
                if not episode.has_both_classes:
                    raise SingleClassEpisodeError(y[0])
                text = print_rule(inducer.induce(episode, top_k), dataset.feature_names)
                sections[f'{dataset.name}: {cls}'] = [text]
                print(text)

        write_rules(Path(cfg.out_dir) / RULES_TXT, sections)
