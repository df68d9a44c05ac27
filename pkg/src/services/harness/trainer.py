"""Training loop: seeded batches, weighted BCE on four heads, SGD, checkpoints."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
from loguru import logger

from src.configs.settings import RunConfig
from src.core.exceptions import DegenerateBatchError, NumericError
from src.models.train_log import EpochRecord, TrainLog
from src.services.datapipe.sampler import ClipBatchSampler
from src.services.datapipe.taxonomy import TripletTaxonomy
from src.services.datapipe.types import HEADS, TripletDataset
from src.services.harness.optim import SGD
from src.services.harness.schedule import lr_schedule
from src.services.model_service.recognizer import TripletRecognizer
from src.services.objective.objective import TripletObjective
from src.services.tensor_engine.checkpoint import save_checkpoint

FINAL_CHECKPOINT = "model.ckpt"
TRAIN_LOG = "train_log.json"


class Trainer:
    """Runs one training job and owns its output directory.

    Layout of ``out_dir``::

        model.ckpt                 final weights
        checkpoints/epoch_NNN.ckpt every ``checkpoint_every`` epochs
        train_log.json             TrainLog
    """

    def __init__(
        self,
        config: RunConfig,
        dataset: TripletDataset,
        out_dir: str | Path,
        taxonomy: TripletTaxonomy | None = None,
    ):
        self.config = config
        self.dataset = dataset
        self.out_dir = Path(out_dir)
        self.taxonomy = taxonomy or dataset.taxonomy
        self.model = TripletRecognizer(config.model, seed=config.seed)
        self.objective = TripletObjective.from_dataset(dataset, balanced=config.class_weighting)
        self.optimizer = SGD(self.model.parameters(), weight_decay=config.weight_decay)
        self.sampler = ClipBatchSampler(
            dataset,
            m=self.model.clip_size,
            batch_size=config.batch_size,
            seed=config.seed,
            augmentation=config.data.augmentation,
            prefetch=config.data.prefetch and not config.deterministic,
        )

    def _save(self, path: Path) -> str:
        save_checkpoint(
            path,
            self.model,
            self.config.model_dump(mode="json"),
            self.taxonomy.fingerprint(),
        )
        return str(path)

    def _epoch(self, epoch: int, first_step: int, total_steps: int) -> EpochRecord:
        started = time.perf_counter()
        self.model.train()
        totals: list[float] = []
        heads: dict[str, list[float]] = {head: [] for head in HEADS}
        skipped, lr = 0, 0.0

        for k, batch in enumerate(self.sampler.epoch(epoch)):
            step = first_step + k
            lr = lr_schedule(step, total_steps, self.config)
            # a failed forward pass may already have moved the running moments
            moments = self.model.buffer_snapshot()
            try:
                output = self.model(batch.images)
            except DegenerateBatchError as exc:
                self.model.restore_buffers(moments)
                logger.warning(f"epoch {epoch} step {step}: skipped batch of {len(batch)} clips ({exc})")
                skipped += 1
                continue
            try:
                loss = self.objective(output, batch.labels)
            except NumericError as exc:
                raise NumericError(f"epoch {epoch} step {step}: {exc}") from exc

            self.optimizer.zero_grad()
            loss.total.backward()
            self.optimizer.step(lr)

            totals.append(loss.total.item())
            for head, value in loss.heads.items():
                heads[head].append(value)
            logger.debug(f"epoch {epoch} step {step}: loss {totals[-1]:.5f} lr {lr:.3g}")

        return EpochRecord(
            epoch=epoch,
            loss=float(np.mean(totals)) if totals else float("nan"),
            head_losses={h: float(np.mean(v)) for h, v in heads.items() if v},
            lr=lr,
            steps=len(totals),
            skipped_batches=skipped,
            seconds=time.perf_counter() - started,
        )

    def train(self) -> TrainLog:
        config = self.config
        self.out_dir.mkdir(parents=True, exist_ok=True)
        log = TrainLog()
        steps_per_epoch = len(self.sampler)
        total_steps = config.epochs * steps_per_epoch
        logger.info(
            f"Training {self.model.num_parameters()} parameters: {config.epochs} epochs x "
            f"{steps_per_epoch} steps, m={self.model.clip_size}, batch {config.batch_size}"
        )

        for epoch in range(config.epochs):
            record = self._epoch(epoch, epoch * steps_per_epoch, total_steps)
            if record.steps == 0:
                raise NumericError(f"epoch {epoch}: every batch was skipped, nothing to train on")
            log.epochs.append(record)
            heads = " ".join(f"{h}={v:.4f}" for h, v in record.head_losses.items())
            logger.info(
                f"epoch {epoch + 1}/{config.epochs} loss {record.loss:.4f} ({heads}) "
                f"lr {record.lr:.3g} {record.seconds:.1f}s"
            )
            if (epoch + 1) % config.checkpoint_every == 0 and epoch + 1 < config.epochs:
                path = self.out_dir / "checkpoints" / f"epoch_{epoch + 1:03d}.ckpt"
                log.checkpoints.append(self._save(path))

        log.checkpoint = self._save(self.out_dir / FINAL_CHECKPOINT)
        log.checkpoints.append(log.checkpoint)
        (self.out_dir / TRAIN_LOG).write_text(log.model_dump_json(indent=2), encoding="utf-8")
        return log


def train(
    config: RunConfig,
    dataset: TripletDataset,
    out_dir: str | Path,
    taxonomy: TripletTaxonomy | None = None,
) -> TrainLog:
    return Trainer(config, dataset, out_dir, taxonomy).train()
