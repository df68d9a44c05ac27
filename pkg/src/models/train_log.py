"""Training history models."""

from pydantic import BaseModel, Field


class EpochRecord(BaseModel):
    epoch: int = Field(..., ge=0)
    loss: float = Field(..., description="Mean total loss over the epoch's batches")
    head_losses: dict[str, float] = Field(default_factory=dict)
    lr: float = Field(..., description="Learning rate of the epoch's last step")
    steps: int = Field(..., ge=0)
    skipped_batches: int = Field(default=0, ge=0)
    seconds: float = Field(..., ge=0.0)


class TrainLog(BaseModel):
    """One record per completed epoch plus the final checkpoint."""

    epochs: list[EpochRecord] = Field(default_factory=list)
    checkpoint: str | None = None
    checkpoints: list[str] = Field(default_factory=list, description="Every checkpoint written")

    def losses(self) -> list[float]:
        return [record.loss for record in self.epochs]
