"""Evaluation report models."""

from pydantic import BaseModel, ConfigDict, Field

AP_COLUMNS = ("ap_i", "ap_v", "ap_t", "ap_iv", "ap_it", "ap_ivt")


class VideoScores(BaseModel):
    """Class-mean AP of one video per head (None when no class was defined)."""

    video_id: str
    frames: int = Field(..., ge=1)
    ap: dict[str, float | None] = Field(..., description="Keyed by i, v, t, iv, it, ivt")


class EvalReport(BaseModel):
    """Video-specific AP for components, pairs and triplets.

    Aggregates are means over videos of per-video class means; classes with
    no positive frame in a video are left out of that video's mean.
    """

    ap_i: float | None = Field(None, description="Instrument AP")
    ap_v: float | None = Field(None, description="Verb AP")
    ap_t: float | None = Field(None, description="Target AP")
    ap_iv: float | None = Field(None, description="Instrument-verb pair AP")
    ap_it: float | None = Field(None, description="Instrument-target pair AP")
    ap_ivt: float | None = Field(None, description="Triplet AP")
    per_class: dict[str, list[float | None]] = Field(
        default_factory=dict,
        description="Per head, the class AP averaged over videos where it is defined",
    )
    class_names: dict[str, list[str]] = Field(default_factory=dict)
    per_video: list[VideoScores] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "ap_i": 0.91,
                "ap_v": 0.64,
                "ap_t": 0.45,
                "ap_iv": 0.38,
                "ap_it": 0.36,
                "ap_ivt": 0.30,
            }
        }
    )

    def aggregates(self) -> dict[str, float | None]:
        return {column: getattr(self, column) for column in AP_COLUMNS}


class AblationRow(BaseModel):
    """One variant of an ablation grid."""

    variant: str = Field(..., description="Readable summary of the config delta")
    delta: dict[str, object] = Field(default_factory=dict)
    report: EvalReport
