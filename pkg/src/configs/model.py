"""Model architecture configuration."""

from enum import StrEnum
from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

Branch = Literal["verb", "instrument", "target"]


class FusionPosition(StrEnum):
    """Where the temporal module sits relative to class-activation guidance."""

    EARLY = "early"
    LATE = "late"
    BOTH = "both"


class TemporalHeadKind(StrEnum):
    TAM = "tam"
    LAST_FRAME = "last_frame"


class TamConfig(BaseModel):
    """Temporal attention module configuration."""

    position: FusionPosition = Field(
        default=FusionPosition.LATE,
        description="early: before guidance, late: after guidance, both: early and late",
    )
    layers: int = Field(default=1, ge=1, le=2, description="Stacked TAM layers")
    tam_targets: list[Branch] = Field(
        default_factory=lambda: ["verb"],
        description="Branches that fuse over the clip; others use the current frame",
    )
    kernel: int = Field(default=3, ge=1, description="Temporal conv kernel (odd)")
    temporal_head: TemporalHeadKind = Field(
        default=TemporalHeadKind.TAM,
        description="tam, or last_frame for the single-frame baseline",
    )

    @field_validator("kernel")
    @classmethod
    def _odd_kernel(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError(f"temporal kernel must be odd for same padding, got {v}")
        return v

    @field_validator("tam_targets")
    @classmethod
    def _unique_targets(cls, v: list[str]) -> list[str]:
        if len(set(v)) != len(v):
            raise ValueError(f"tam_targets has duplicates: {v}")
        return v


class ModelConfig(BaseModel):
    """Architecture and input geometry."""

    clip_size: int = Field(default=6, ge=1, description="Frames per causal clip (m)")
    height: int = Field(default=64, ge=16, description="Input height, multiple of 16")
    width: int = Field(default=112, ge=16, description="Input width, multiple of 16")
    backbone_channels: list[int] = Field(
        default_factory=lambda: [16, 32, 64, 128],
        description="Output channels of the four stride-2 stages",
    )
    wsl_channels: int = Field(default=64, ge=1, description="Hidden width of the CAM head")
    scene_channels: int = Field(default=64, ge=1, description="Bottleneck scene width (d')")
    guidance_dim: int = Field(default=16, ge=1, description="Query/key width of guided attention")
    decoder_width: int = Field(default=64, ge=1, description="Token embedding width")
    decoder_heads: int = Field(default=4, ge=1)
    decoder_layers: int = Field(default=2, ge=1)
    tam: TamConfig = Field(default_factory=TamConfig)

    @field_validator("backbone_channels")
    @classmethod
    def _four_stages(cls, v: list[int]) -> list[int]:
        if len(v) != 4 or any(c < 1 for c in v):
            raise ValueError(f"backbone_channels needs four positive widths, got {v}")
        return v

    @model_validator(mode="after")
    def _geometry(self) -> "ModelConfig":
        if self.height % 16 or self.width % 16:
            raise ValueError(
                f"resolution {self.height}x{self.width} must be divisible by 16"
            )
        if self.decoder_width % self.decoder_heads:
            raise ValueError(
                f"decoder_width {self.decoder_width} not divisible by {self.decoder_heads} heads"
            )
        return self

    @property
    def feature_size(self) -> tuple[int, int]:
        """Spatial size of the backbone output."""
        return self.height // 16, self.width // 16

    @property
    def effective_clip_size(self) -> int:
        """Frames the model actually consumes (1 for the single-frame head)."""
        if self.tam.temporal_head == TemporalHeadKind.LAST_FRAME:
            return 1
        return self.clip_size
