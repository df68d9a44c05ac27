"""Average precision and projection of triplet scores onto components."""

from __future__ import annotations

import numpy as np

from src.core.exceptions import DataError
from src.services.datapipe.taxonomy import NUM_INSTRUMENTS, NUM_TARGETS, NUM_VERBS, TripletTaxonomy

# Result name → (vocabulary size, taxonomy attribute mapping each triplet into it)
COMPONENTS: dict[str, tuple[int, str]] = {
    "i": (NUM_INSTRUMENTS, "instrument_of"),
    "v": (NUM_VERBS, "verb_of"),
    "t": (NUM_TARGETS, "target_of"),
    "iv": (NUM_INSTRUMENTS * NUM_VERBS, "iv_of"),
    "it": (NUM_INSTRUMENTS * NUM_TARGETS, "it_of"),
}
AP_KEYS = ("i", "v", "t", "iv", "it", "ivt")


def average_precision(scores: np.ndarray, labels: np.ndarray) -> float | None:
    """Uninterpolated AP: mean of precision@k over the ranks k holding positives.

    Ranking is by descending score; equal scores keep their original order.
    Returns None when there is no positive.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise DataError(f"{scores.size} scores for {labels.size} labels")
    positives = labels == 1
    n_pos = int(positives.sum())
    if n_pos == 0:
        return None

    order = np.argsort(-scores, kind="stable")
    hits = positives[order]
    precision_at_k = np.cumsum(hits) / np.arange(1, len(hits) + 1)
    return float(precision_at_k[hits].sum() / n_pos)


def project_components(triplet_scores: np.ndarray, taxonomy: TripletTaxonomy) -> dict[str, np.ndarray]:
    """Component and pair scores as the max over triplets that contain them.

    Works on a single ``[100]`` vector or row-wise on ``[N, 100]``. Entries no
    triplet maps to score 0. The result also carries the triplet scores
    under ``"ivt"``.
    """
    scores = np.asarray(triplet_scores, dtype=np.float64)
    out: dict[str, np.ndarray] = {}
    for key, (size, attribute) in COMPONENTS.items():
        mapping = getattr(taxonomy, attribute)
        projected = np.zeros((*scores.shape[:-1], size))
        for k in np.unique(mapping):
            projected[..., k] = scores[..., mapping == k].max(axis=-1)
        out[key] = projected
    out["ivt"] = scores
    return out
