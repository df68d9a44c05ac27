"""Dataset, split and augmentation configuration."""

from enum import StrEnum

from pydantic import BaseModel, Field, field_validator

from src.configs.synthetic import SyntheticSpec


class DatasetSource(StrEnum):
    SYNTHETIC = "synthetic"
    CHOLECT45 = "cholect45"


class AugmentationConfig(BaseModel):
    """Photometric / flip augmentation applied per clip during training."""

    enabled: bool = Field(default=True)
    flip_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    brightness: tuple[float, float] = Field(
        default=(0.8, 1.2), description="Uniform range of the brightness factor"
    )
    contrast: tuple[float, float] = Field(
        default=(0.8, 1.2), description="Uniform range of the contrast factor"
    )

    @field_validator("brightness", "contrast")
    @classmethod
    def _ordered_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        low, high = v
        if not 0.0 <= low <= high:
            raise ValueError(f"factor range must satisfy 0 <= low <= high, got {v}")
        return v


class DataConfig(BaseModel):
    """Where clips come from and which videos train / evaluate."""

    source: DatasetSource = Field(default=DatasetSource.SYNTHETIC)
    root: str | None = Field(
        default=None, description="Dataset root with labels/ and frames/ (cholect45 layout)"
    )
    split_file: str = Field(
        default="resources/cholect45/splits.yml",
        description="YAML with folds and/or named splits",
    )
    test_fold: int | None = Field(
        default=1, description="Held-out fold; train uses the remaining folds"
    )
    train_split: str = Field(default="train", description="Role (train/test/all) or split name")
    eval_split: str = Field(default="test", description="Role (train/test/all) or split name")
    synthetic: SyntheticSpec = Field(default_factory=SyntheticSpec)
    heldout_videos: int = Field(
        default=2, ge=0, description="Synthetic held-out videos drawn from an independent seed"
    )
    augmentation: AugmentationConfig = Field(default_factory=AugmentationConfig)
    prefetch: bool = Field(default=False, description="Assemble batches on a background thread")
