"""Data pipeline: taxonomy, causal clips, loading, synthesis, augmentation, sampling."""

from src.services.datapipe.augment import AugmentDraw, augment
from src.services.datapipe.clips import clip_window, make_clips
from src.services.datapipe.loader import load_dataset, write_dataset
from src.services.datapipe.sampler import ClipBatch, ClipBatchSampler, batch_sampler, video_batches
from src.services.datapipe.splits import SplitSpec
from src.services.datapipe.synthetic import ProbeResult, probe_temporal_coding, synth_generate
from src.services.datapipe.taxonomy import TripletTaxonomy
from src.services.datapipe.types import (
    HEADS,
    Frame,
    LabelVector,
    TripletDataset,
    VideoClip,
    VideoData,
    project_labels,
)

__all__ = [
    "HEADS",
    "AugmentDraw",
    "ClipBatch",
    "ClipBatchSampler",
    "Frame",
    "LabelVector",
    "ProbeResult",
    "SplitSpec",
    "TripletDataset",
    "TripletTaxonomy",
    "VideoClip",
    "VideoData",
    "augment",
    "batch_sampler",
    "clip_window",
    "load_dataset",
    "make_clips",
    "probe_temporal_coding",
    "project_labels",
    "synth_generate",
    "video_batches",
    "write_dataset",
]
