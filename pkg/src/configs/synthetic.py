"""Synthetic dataset description."""

from enum import StrEnum

from pydantic import BaseModel, Field, model_validator


class Motion(StrEnum):
    """How a verb's marker bar moves across its lane."""

    STATIC = "static"
    FORWARD = "forward"
    BACKWARD = "backward"


class VerbPattern(BaseModel):
    """Rendering rule for one verb.

    Moving verbs step the bar one slot per frame through ``period`` slots of
    their lane, starting at a random phase. A forward and a backward pattern
    on the same lane and period therefore show the same single-frame
    appearances and differ only in their order.
    """

    verb: str
    motion: Motion = Motion.STATIC
    lane: int = Field(default=0, ge=0)
    period: int = Field(default=3, ge=3)
    slot: int = Field(default=0, ge=0, description="Fixed slot for static verbs")

    @model_validator(mode="after")
    def _slot_in_range(self) -> "VerbPattern":
        if self.slot >= self.period:
            raise ValueError(f"verb {self.verb}: slot {self.slot} outside period {self.period}")
        return self


class SyntheticSpec(BaseModel):
    """Parameters of the synthetic triplet video generator."""

    videos: int = Field(default=2, ge=1)
    frames_per_video: int = Field(default=100, ge=1)
    segment_min: int = Field(default=8, ge=1, description="Shortest activity segment")
    segment_max: int = Field(default=20, ge=1, description="Longest activity segment")
    idle_probability: float = Field(default=0.1, ge=0.0, le=1.0)
    noise: float = Field(default=0.05, ge=0.0, description="Gaussian pixel noise std")
    lanes: int = Field(default=2, ge=1, description="Horizontal bands available to verb bars")
    triplets: list[str] = Field(
        default_factory=lambda: [
            "hook,dissect,gallbladder",
            "hook,coagulate,gallbladder",
            "grasper,retract,gallbladder",
            "clipper,clip,cystic_duct",
        ],
        description="Triplets drawn per segment, as 'instrument,verb,target'",
    )
    verb_patterns: list[VerbPattern] = Field(
        default_factory=lambda: [
            VerbPattern(verb="dissect", motion=Motion.FORWARD, lane=0, period=3),
            VerbPattern(verb="coagulate", motion=Motion.BACKWARD, lane=0, period=3),
            VerbPattern(verb="retract", motion=Motion.STATIC, lane=1, slot=0),
            VerbPattern(verb="clip", motion=Motion.STATIC, lane=1, slot=2),
        ]
    )

    @model_validator(mode="after")
    def _segments(self) -> "SyntheticSpec":
        if self.segment_min > self.segment_max:
            raise ValueError(
                f"segment_min {self.segment_min} exceeds segment_max {self.segment_max}"
            )
        for pattern in self.verb_patterns:
            if pattern.lane >= self.lanes:
                raise ValueError(f"verb {pattern.verb} uses lane {pattern.lane} of {self.lanes}")
        return self

    def pattern_for(self, verb: str) -> VerbPattern | None:
        return next((p for p in self.verb_patterns if p.verb == verb), None)
