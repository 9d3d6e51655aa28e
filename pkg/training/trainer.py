from autograd.optim import AdamW, clip_grad_norm
from clients.checkpoint_client import save_checkpoint
from concurrent.futures import Future, ThreadPoolExecutor
from dataclass.checkpoint import Checkpoint
from dataclass.episode import Episode
from dataclass.loss_weights import LossBreakdown
from dataclass.train_config import TrainConfig
from dataclasses import replace
from episodes.generator import gen_episode
from losses.objective import slot_usage, total_loss, usage_variance
from model.batch import EpisodeBatch, make_batch
from model.nri import NriModel, init_params
from pathlib import Path
from stats.literal_stats import compute_phi
from tqdm import tqdm
from typing import Optional, Tuple, Union
from util.exceptions import TrainingDivergedError
from util.rng import DROPOUT, episode_rng, stream
from views.csv_views import CsvLog, write_json
from .dropout import batch_dropout
import logging
import numpy as np


logger = logging.getLogger(__name__)

LOSSES_CSV = 'losses.csv'
SLOTS_CSV = 'slots.csv'
DIVERGED_JSON = 'diverged_batch.json'


def effective_model_config(cfg: TrainConfig) -> TrainConfig:
    """
    Training episodes carry spurious columns, so the example-key input width must
    cover n_max + s_spurious variables
    """
    needed = cfg.gen.max_width
    if cfg.model.n_train >= needed:
        return cfg
    logger.info(f'Raising model.n_train from {cfg.model.n_train} to {needed} to fit training episodes')
    return replace(cfg, model=replace(cfg.model, n_train=needed))


def _build(cfg: TrainConfig, index: int) -> Tuple[Episode, np.ndarray]:
    episode = gen_episode(cfg.gen, episode_rng(cfg.gen.seed, index), index)
    return episode, compute_phi(episode.X, episode.y)


class Trainer:
    """
    Single consumer owning the parameters; a producer pool prepares the next
    batch of episodes and statistics while the current step runs
    """

    def __init__(self, cfg: TrainConfig, out_dir: Union[str, Path], threads: int = 1,
                 resume: Optional[Checkpoint] = None):
        if resume is not None:
            cfg = replace(cfg, model=resume.model)
        self.cfg = effective_model_config(cfg)
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.threads = max(1, threads)

        store = resume.store if resume is not None else init_params(self.cfg.model, self.cfg.seed)
        self.model = NriModel(self.cfg.model, store, self.cfg.seed)
        self.optimizer = AdamW(store, self.cfg.lr, self.cfg.weight_decay, self.cfg.beta1, self.cfg.beta2, self.cfg.adam_eps)
        self.resumed = resume is not None
        if self.resumed:
            logger.info(f'Resuming from step {store.step}')

    @property
    def step(self) -> int:
        return self.model.store.step

    def batch_indices(self, step: int) -> range:
        start = step * self.cfg.batch_episodes
        return range(start, start + self.cfg.batch_episodes)

    def prepare(self, step: int, pool: Optional[ThreadPoolExecutor] = None) -> EpisodeBatch:
        """
        Episodes and statistics for one step; depends only on (gen seed, step)
        """
        indices = self.batch_indices(step)
        if pool is None:
            built = [_build(self.cfg, i) for i in indices]
        else:
            built = list(pool.map(lambda i: _build(self.cfg, i), indices))
        episodes = [e for e, _ in built]
        phis = [phi for _, phi in built]
        return make_batch(episodes, phis)

    def slot_mask(self, step: int) -> np.ndarray:
        rng = stream(self.cfg.seed, DROPOUT, step)
        return batch_dropout(rng, self.cfg.batch_episodes, self.cfg.model.T, self.cfg.clause_dropout, self.cfg.min_keep)

    def train_step(self, batch: EpisodeBatch, step: int) -> Tuple[LossBreakdown, np.ndarray]:
        gates = self.model.forward(batch, self.slot_mask(step))
        loss, breakdown = total_loss(gates, batch, self.cfg.loss)
        usage = slot_usage(gates.w.data)

        if not np.isfinite(breakdown.total):
            dump = self.out_dir / DIVERGED_JSON
            indices = self.batch_indices(step)
            write_json(dump, {
                'step': step,
                'gen_seed': self.cfg.gen.seed,
                'train_seed': self.cfg.seed,
                'episode_indices': [indices.start, indices.stop - 1],
                'losses': dict(zip(LossBreakdown.columns()[1:], breakdown.as_row(step)[1:]))
            })
            raise TrainingDivergedError(step, self.cfg.gen.seed, dump)

        self.optimizer.zero_grad()
        loss.backward()
        clip_grad_norm(self.model.store, self.cfg.grad_clip)
        self.optimizer.step()
        return breakdown, usage

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            store=self.model.store,
            model=self.cfg.model,
            seed=self.cfg.seed,
            step=self.step,
            train=self.cfg.to_dict()
        )

    def run(self) -> Checkpoint:
        cfg = self.cfg
        slot_columns = ['step'] + [f'w{k}' for k in range(cfg.model.T)] + ['usage_variance']
        losses = CsvLog(self.out_dir / LOSSES_CSV, LossBreakdown.columns(), append=self.resumed)
        slots = CsvLog(self.out_dir / SLOTS_CSV, slot_columns, append=self.resumed)

        pool = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None
        prefetcher = ThreadPoolExecutor(max_workers=1, thread_name_prefix='prefetch') if pool is not None else None
        try:
            pending: Optional[Future] = None
            progress = tqdm(range(self.step, cfg.steps), desc='train', unit='step', initial=self.step, total=cfg.steps)
            for step in progress:
                batch = pending.result() if pending is not None else self.prepare(step, pool)
                pending = None
                if pool is not None and step + 1 < cfg.steps:
                    # The next batch is assembled while this step runs
                    pending = prefetcher.submit(self.prepare, step + 1, pool)

                breakdown, usage = self.train_step(batch, step)
                losses.write(breakdown.as_row(step + 1))
                slots.write([step + 1] + [float(u) for u in usage] + [usage_variance(usage)])
                progress.set_postfix(cov=f'{breakdown.cov:.4f}', total=f'{breakdown.total:.4f}')

                if cfg.checkpoint_every and self.step % cfg.checkpoint_every == 0 and self.step < cfg.steps:
                    save_checkpoint(self.checkpoint(), self.out_dir / f'checkpoint-{self.step:06d}')
        finally:
            losses.close()
            slots.close()
            if pool is not None:
                prefetcher.shutdown(wait=True)
                pool.shutdown(wait=True)

        final = self.checkpoint()
        save_checkpoint(final, self.out_dir / 'checkpoint')
        return final


def train(cfg: TrainConfig, out_dir: Union[str, Path], threads: int = 1, resume: Optional[Checkpoint] = None) -> Checkpoint:
    """
    Train from scratch (or resume) and return the final checkpoint
    """
    return Trainer(cfg, out_dir, threads, resume).run()
