from argparse import Namespace
from clients.episode_client import write_episodes
from dataclass.run_config import CliConfig
from episodes.generator import generate_episodes
from pathlib import Path
from stats.literal_stats import compute_stats, dump_stats_csv
from typing import TYPE_CHECKING
import logging

if TYPE_CHECKING:
    from util.ruleforge_cli import RuleForgeCli


logger = logging.getLogger(__name__)

EPISODES_JSONL = 'episodes.jsonl'


class DataCog:
    def __init__(self, app: 'RuleForgeCli'):
        self._app = app
        parser = app.add_command('gen', 'Generate synthetic episodes as JSONL', self.gen)
        parser.add_argument('--episodes', type=int, default=10, help='Number of episodes')
        parser.add_argument('--start', type=int, default=0, help='Index of the first episode')
        parser.add_argument('--dump-stats', action='store_true', help='Also write per-episode literal statistics')
        logger.debug(f'Loaded cog: {self.__class__.__name__}')

    def gen(self, args: Namespace, cfg: CliConfig):
        """
        Episodes start..start+episodes-1; identical for the same seed and config
        """
        out = Path(cfg.out_dir)
        episodes = generate_episodes(cfg.train.gen, args.start, args.episodes, cfg.threads)
        count = write_episodes(out / EPISODES_JSONL, episodes)
        logger.info(f'Wrote {count} episodes to {out / EPISODES_JSONL}')

        if args.dump_stats:
            stats_dir = out / 'stats'
            stats_dir.mkdir(exist_ok=True)
            for episode in episodes:
                dump_stats_csv(compute_stats(episode), stats_dir / f'episode-{episode.meta["index"]:06d}.csv')
            logger.info(f'Wrote literal statistics to {stats_dir}')
