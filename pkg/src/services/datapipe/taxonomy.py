"""Triplet taxonomy: the map from 100 triplet ids to (instrument, verb, target)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cache
from pathlib import Path

import numpy as np
import yaml

from src.core.exceptions import DataError

RESOURCES_DIR = Path(__file__).resolve().parents[3] / "resources" / "cholect45"

NUM_TRIPLETS = 100
NUM_INSTRUMENTS = 6
NUM_VERBS = 10
NUM_TARGETS = 15


@dataclass(frozen=True)
class TripletTaxonomy:
    """Total, injective map ``triplet -> (instrument, verb, target)`` plus class names.

    Component pair ids used by the metrics are ``iv = i * 10 + v`` (60 pairs)
    and ``it = i * 15 + t`` (90 pairs).
    """

    triplets: tuple[tuple[int, int, int], ...]
    instruments: tuple[str, ...]
    verbs: tuple[str, ...]
    targets: tuple[str, ...]
    _lookup: dict[tuple[int, int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.triplets) != NUM_TRIPLETS:
            raise DataError(f"taxonomy needs {NUM_TRIPLETS} triplets, got {len(self.triplets)}")
        sizes = (len(self.instruments), len(self.verbs), len(self.targets))
        if sizes != (NUM_INSTRUMENTS, NUM_VERBS, NUM_TARGETS):
            raise DataError(f"vocabulary sizes {sizes} != (6, 10, 15)")
        for k, (i, v, t) in enumerate(self.triplets):
            if not (0 <= i < NUM_INSTRUMENTS and 0 <= v < NUM_VERBS and 0 <= t < NUM_TARGETS):
                raise DataError(f"triplet {k} maps outside the vocabularies: {(i, v, t)}")
        lookup = {ivt: k for k, ivt in enumerate(self.triplets)}
        if len(lookup) != NUM_TRIPLETS:
            raise DataError("taxonomy map is not injective")
        object.__setattr__(self, "_lookup", lookup)

    # ── loading ─────────────────────────────────────────────────────────

    @classmethod
    def load(
        cls,
        map_file: str | Path = RESOURCES_DIR / "triplet_maps.txt",
        vocabulary_file: str | Path = RESOURCES_DIR / "vocabulary.yml",
    ) -> TripletTaxonomy:
        map_path, vocab_path = Path(map_file), Path(vocabulary_file)
        for path in (map_path, vocab_path):
            if not path.exists():
                raise FileNotFoundError(f"Taxonomy file not found: {path}")

        rows: dict[int, tuple[int, int, int]] = {}
        for lineno, line in enumerate(map_path.read_text(encoding="ascii").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                k, i, v, t = (int(x) for x in line.split(","))
            except ValueError as exc:
                raise DataError(f"{map_path}:{lineno}: expected 'ivt,i,v,t', got {line!r}") from exc
            if k in rows:
                raise DataError(f"{map_path}:{lineno}: duplicate triplet id {k}")
            rows[k] = (i, v, t)
        if sorted(rows) != list(range(len(rows))):
            raise DataError(f"{map_path}: triplet ids are not contiguous from 0")

        with open(vocab_path, encoding="utf-8") as f:
            vocab = yaml.safe_load(f)
        return cls(
            triplets=tuple(rows[k] for k in range(len(rows))),
            instruments=tuple(vocab["instruments"]),
            verbs=tuple(vocab["verbs"]),
            targets=tuple(vocab["targets"]),
        )

    @staticmethod
    @cache
    def default() -> TripletTaxonomy:
        """The CholecT45 taxonomy shipped in ``resources/``."""
        return TripletTaxonomy.load()

    # ── queries ─────────────────────────────────────────────────────────

    def components(self, triplet: int) -> tuple[int, int, int]:
        return self.triplets[triplet]

    def triplet_id(self, instrument: int, verb: int, target: int) -> int | None:
        return self._lookup.get((instrument, verb, target))

    def triplet_name(self, triplet: int) -> str:
        i, v, t = self.triplets[triplet]
        return f"{self.instruments[i]},{self.verbs[v]},{self.targets[t]}"

    @property
    def triplet_names(self) -> list[str]:
        return [self.triplet_name(k) for k in range(NUM_TRIPLETS)]

    def id_of(self, name: str) -> int:
        """Triplet id for ``'instrument,verb,target'``."""
        parts = [p.strip() for p in name.split(",")]
        if len(parts) != 3:
            raise DataError(f"triplet name must be 'instrument,verb,target', got {name!r}")
        try:
            ivt = (
                self.instruments.index(parts[0]),
                self.verbs.index(parts[1]),
                self.targets.index(parts[2]),
            )
        except ValueError as exc:
            raise DataError(f"unknown class name in triplet {name!r}") from exc
        triplet = self.triplet_id(*ivt)
        if triplet is None:
            raise DataError(f"{name!r} is not one of the {NUM_TRIPLETS} valid triplets")
        return triplet

    @property
    def instrument_of(self) -> np.ndarray:
        return np.array([ivt[0] for ivt in self.triplets])

    @property
    def verb_of(self) -> np.ndarray:
        return np.array([ivt[1] for ivt in self.triplets])

    @property
    def target_of(self) -> np.ndarray:
        return np.array([ivt[2] for ivt in self.triplets])

    @property
    def iv_of(self) -> np.ndarray:
        return self.instrument_of * NUM_VERBS + self.verb_of

    @property
    def it_of(self) -> np.ndarray:
        return self.instrument_of * NUM_TARGETS + self.target_of

    def fingerprint(self) -> str:
        """Stable hash of the map and all class names."""
        payload = yaml.safe_dump(
            {
                "triplets": [list(ivt) for ivt in self.triplets],
                "instruments": list(self.instruments),
                "verbs": list(self.verbs),
                "targets": list(self.targets),
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
