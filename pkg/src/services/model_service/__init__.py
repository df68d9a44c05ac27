"""Model: per-frame backbone and CAM head, guided temporal attention, triplet decoder."""

from src.services.model_service.backbone_wsl import BackboneWSL, InstrumentCAM
from src.services.model_service.cagtam import Cagtam, CagtamOutput, GuidedAttention, guided_attention
from src.services.model_service.recognizer import TripletRecognizer
from src.services.model_service.tam import (
    FusedVerb,
    TemporalAttention,
    TemporalAttentionStack,
    tam_apply,
    tam_fuse,
    tam_gate,
)
from src.services.model_service.temporal_head import TemporalHead, TemporalHeadFactory
from src.services.model_service.triplet_decoder import DecoderOutput, TripletDecoder

__all__ = [
    "BackboneWSL",
    "Cagtam",
    "CagtamOutput",
    "DecoderOutput",
    "FusedVerb",
    "GuidedAttention",
    "InstrumentCAM",
    "TemporalAttention",
    "TemporalAttentionStack",
    "TemporalHead",
    "TemporalHeadFactory",
    "TripletDecoder",
    "TripletRecognizer",
    "guided_attention",
    "tam_apply",
    "tam_fuse",
    "tam_gate",
]
