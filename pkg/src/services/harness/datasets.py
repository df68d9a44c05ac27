"""Training and evaluation datasets for a run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from loguru import logger

from src.configs.data import DatasetSource
from src.configs.settings import RunConfig
from src.core.exceptions import ConfigurationError
from src.services.datapipe.loader import load_dataset
from src.services.datapipe.splits import SplitSpec
from src.services.datapipe.synthetic import synth_generate
from src.services.datapipe.taxonomy import TripletTaxonomy
from src.services.datapipe.types import TripletDataset

HELDOUT_STREAM = 1


@dataclass(eq=False)
class RunDatasets:
    train: TripletDataset
    evaluation: TripletDataset


def _synthetic(config: RunConfig, taxonomy: TripletTaxonomy, role: str) -> TripletDataset:
    data, model = config.data, config.model
    if role == "train":
        return synth_generate(data.synthetic, config.seed, model.height, model.width, taxonomy)
    if data.heldout_videos < 1:
        raise ConfigurationError(
            f"synthetic split {role!r} needs heldout_videos >= 1 (or use 'train')"
        )
    spec = data.synthetic.model_copy(update={"videos": data.heldout_videos})
    return synth_generate(
        spec, config.seed, model.height, model.width, taxonomy, stream=HELDOUT_STREAM
    )


def _recorded(config: RunConfig, taxonomy: TripletTaxonomy, selection: str) -> TripletDataset:
    data = config.data
    if data.root is None:
        raise ConfigurationError("data.root is required for the cholect45 source")
    video_ids = SplitSpec.load(data.split_file).select(selection, data.test_fold)
    if not video_ids:
        raise ConfigurationError(f"split {selection!r} selects no videos")
    return load_dataset(data.root, video_ids, config.model.height, config.model.width, taxonomy)


def build_dataset(config: RunConfig, selection: str, taxonomy: TripletTaxonomy | None = None) -> TripletDataset:
    """One dataset for a split selection (``train``, ``test``, ``all`` or a split name).

    Synthetic runs map ``train`` to generator stream 0 and every other
    selection to the independent held-out stream.
    """
    taxonomy = taxonomy or TripletTaxonomy.default()
    if config.data.source == DatasetSource.SYNTHETIC:
        return _synthetic(config, taxonomy, selection)
    return _recorded(config, taxonomy, selection)


def build_datasets(config: RunConfig, taxonomy: TripletTaxonomy | None = None) -> RunDatasets:
    taxonomy = taxonomy or TripletTaxonomy.default()
    train = build_dataset(config, config.data.train_split, taxonomy)
    if config.data.eval_split == config.data.train_split:
        evaluation = train
    else:
        evaluation = build_dataset(config, config.data.eval_split, taxonomy)
    logger.info(
        f"Datasets ({config.data.source}): train {len(train.videos)} videos / {len(train)} frames, "
        f"eval {len(evaluation.videos)} videos / {len(evaluation)} frames"
    )
    return RunDatasets(train=train, evaluation=evaluation)
