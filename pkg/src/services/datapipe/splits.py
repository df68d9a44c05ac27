"""Cross-validation folds and named splits."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from src.core.exceptions import ConfigurationError, DataError

ROLES = ("train", "test", "all")


@dataclass(frozen=True)
class SplitSpec:
    """Video id lists keyed by fold number and/or split name.

    Folds are pairwise disjoint. ``select("train", test_fold=k)`` returns
    every fold except ``k``; ``select("test", k)`` returns fold ``k``;
    ``select("all")`` returns every fold. Any other selection names a split.
    """

    folds: dict[int, list[str]] = field(default_factory=dict)
    splits: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        owner: dict[str, int] = {}
        for fold, videos in sorted(self.folds.items()):
            for vid in videos:
                if vid in owner:
                    raise DataError(f"video {vid} appears in folds {owner[vid]} and {fold}")
                owner[vid] = fold

    @classmethod
    def load(cls, path: str | Path) -> SplitSpec:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Split file not found: {path}")
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
        try:
            folds = {int(k): [str(v) for v in vids] for k, vids in (raw.get("folds") or {}).items()}
            splits = {str(k): [str(v) for v in vids] for k, vids in (raw.get("splits") or {}).items()}
        except (TypeError, ValueError, AttributeError) as exc:
            raise DataError(f"{path}: malformed split file: {exc}") from exc
        return cls(folds=folds, splits=splits)

    def select(self, selection: str, test_fold: int | None = None) -> list[str]:
        if selection in self.splits:
            return list(self.splits[selection])
        if selection not in ROLES:
            raise ConfigurationError(
                f"unknown split {selection!r}; use one of {ROLES} or {sorted(self.splits)}"
            )
        if selection == "all":
            return [vid for fold in sorted(self.folds) for vid in self.folds[fold]]
        if test_fold not in self.folds:
            raise ConfigurationError(
                f"role {selection!r} needs a test fold from {sorted(self.folds)}, got {test_fold}"
            )
        if selection == "test":
            return list(self.folds[test_fold])
        return [vid for fold in sorted(self.folds) if fold != test_fold for vid in self.folds[fold]]
