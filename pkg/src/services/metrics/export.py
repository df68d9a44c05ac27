"""Prediction log files, report tables and timeline CSVs."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from loguru import logger

from src.core.exceptions import DataError
from src.models.report import AP_COLUMNS, AblationRow, EvalReport
from src.services.datapipe.loader import read_label_file
from src.services.datapipe.taxonomy import NUM_TRIPLETS, TripletTaxonomy
from src.services.metrics.video_ap import PredictionLog

HEAD_TITLES = {
    "ap_i": "AP_I",
    "ap_v": "AP_V",
    "ap_t": "AP_T",
    "ap_iv": "AP_IV",
    "ap_it": "AP_IT",
    "ap_ivt": "AP_IVT",
}


def _fmt(value: float | None, blank: str = "") -> str:
    return blank if value is None else f"{value:.4f}"


# ── prediction log ──────────────────────────────────────────────────────


def write_prediction_log(path: str | Path, log: PredictionLog) -> Path:
    """One line per frame: ``video_id,frame,<100 scores>``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        for video_id in sorted(log.videos):
            video = log.videos[video_id]
            for frame, scores in zip(video.frames, video.scores, strict=True):
                f.write(f"{video_id},{frame}," + ",".join(f"{s:.9g}" for s in scores) + "\n")
    return path


def write_ground_truth(root: str | Path, log: PredictionLog) -> Path:
    """Label files for the logged frames under ``<root>/labels/``, loader format."""
    label_dir = Path(root) / "labels"
    label_dir.mkdir(parents=True, exist_ok=True)
    for video_id, video in log.videos.items():
        lines = [
            f"{frame}," + ",".join(str(int(v)) for v in row)
            for frame, row in zip(video.frames, video.labels, strict=True)
        ]
        (label_dir / f"{video_id}.txt").write_text("\n".join(lines) + "\n", encoding="ascii")
    return label_dir


def read_prediction_log(path: str | Path, label_root: str | Path) -> PredictionLog:
    """Read a prediction file and pair it with ``<label_root>/labels/<video_id>.txt``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Prediction log not found: {path}")

    grouped: dict[str, tuple[list[int], list[list[float]]]] = {}
    for lineno, line in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        if not line.strip():
            continue
        fields = line.strip().split(",")
        if len(fields) != NUM_TRIPLETS + 2:
            raise DataError(f"{path}:{lineno}: expected {NUM_TRIPLETS + 2} fields, got {len(fields)}")
        try:
            frame = int(fields[1])
            scores = [float(x) for x in fields[2:]]
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: malformed frame index or score") from exc
        frames, rows = grouped.setdefault(fields[0], ([], []))
        frames.append(frame)
        rows.append(scores)

    log = PredictionLog()
    for video_id, (frames, rows) in grouped.items():
        label_frames, labels = read_label_file(Path(label_root) / "labels" / f"{video_id}.txt")
        position = {int(f): k for k, f in enumerate(label_frames)}
        missing = [f for f in frames if f not in position]
        if missing:
            raise DataError(f"{video_id}: frames {missing[:5]} have no ground truth")
        log.add(video_id, frames, rows, labels[[position[f] for f in frames]])
    return log


# ── reports ─────────────────────────────────────────────────────────────


def render_report(report: EvalReport) -> str:
    """Aligned text table: the aggregate row, then one row per video."""
    header = f"{'scope':<16}" + "".join(f"{HEAD_TITLES[c]:>9}" for c in AP_COLUMNS)
    rows = [header, "-" * len(header)]
    rows.append(f"{'all videos':<16}" + "".join(f"{_fmt(v, '-'):>9}" for v in report.aggregates().values()))
    for video in report.per_video:
        values = [video.ap[c.removeprefix("ap_")] for c in AP_COLUMNS]
        rows.append(f"{video.video_id:<16}" + "".join(f"{_fmt(v, '-'):>9}" for v in values))
    return "\n".join(rows) + "\n"


def write_report(out_dir: str | Path, report: EvalReport) -> dict[str, Path]:
    """Write ``report.txt``, ``report.csv``, ``per_video.csv`` and ``per_class.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "text": out / "report.txt",
        "csv": out / "report.csv",
        "per_video": out / "per_video.csv",
        "per_class": out / "per_class.csv",
    }
    paths["text"].write_text(render_report(report), encoding="utf-8")

    with open(paths["csv"], "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(AP_COLUMNS)
        writer.writerow([_fmt(v) for v in report.aggregates().values()])

    with open(paths["per_video"], "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["video_id", "frames", *AP_COLUMNS])
        for video in report.per_video:
            writer.writerow(
                [video.video_id, video.frames, *(_fmt(video.ap[c.removeprefix("ap_")]) for c in AP_COLUMNS)]
            )

    with open(paths["per_class"], "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["head", "class_id", "class_name", "ap"])
        for head, values in report.per_class.items():
            names = report.class_names.get(head, [])
            for k, value in enumerate(values):
                name = names[k] if k < len(names) else ""
                writer.writerow([head, k, name, _fmt(value)])

    logger.info(f"Report written to {out}")
    return paths


def write_timelines(
    out_dir: str | Path,
    log: PredictionLog,
    taxonomy: TripletTaxonomy,
    threshold: float = 0.5,
) -> list[Path]:
    """One ``timeline_<video_id>.csv`` per video: frame, triplet, score, ground truth.

    Only triplets present in the video's ground truth or scored at or above
    ``threshold`` on some frame are listed.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for video_id in sorted(log.videos):
        video = log.videos[video_id]
        relevant = np.flatnonzero((video.labels.max(axis=0) > 0) | (video.scores.max(axis=0) >= threshold))
        path = out / f"timeline_{video_id}.csv"
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["frame", "triplet_id", "triplet", "score", "ground_truth"])
            for row, frame in enumerate(video.frames):
                for k in relevant:
                    writer.writerow(
                        [
                            int(frame),
                            int(k),
                            taxonomy.triplet_name(int(k)),
                            f"{video.scores[row, k]:.6f}",
                            int(video.labels[row, k]),
                        ]
                    )
        paths.append(path)
    return paths


def render_ablation(rows: list[AblationRow]) -> str:
    width = max([len("variant"), *(len(r.variant) for r in rows)]) + 2
    header = f"{'variant':<{width}}" + "".join(f"{HEAD_TITLES[c]:>9}" for c in AP_COLUMNS)
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.variant:<{width}}" + "".join(f"{_fmt(v, '-'):>9}" for v in row.report.aggregates().values())
        )
    return "\n".join(lines) + "\n"


def write_ablation_table(out_dir: str | Path, rows: list[AblationRow]) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"text": out / "ablation.txt", "csv": out / "ablation.csv"}
    paths["text"].write_text(render_ablation(rows), encoding="utf-8")
    with open(paths["csv"], "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["variant", *AP_COLUMNS])
        for row in rows:
            writer.writerow([row.variant, *(_fmt(v) for v in row.report.aggregates().values())])
    return paths
