"""Ablation grids: train and evaluate one variant per config delta."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from loguru import logger

from src.configs.settings import RunConfig, apply_overrides
from src.models.report import AblationRow
from src.services.datapipe.taxonomy import TripletTaxonomy
from src.services.harness.datasets import RunDatasets, build_datasets
from src.services.harness.evaluator import evaluate
from src.services.harness.trainer import train
from src.services.metrics.export import write_ablation_table


def variant_name(delta: dict[str, Any]) -> str:
    if not delta:
        return "base"
    return " ".join(f"{key}={value}" for key, value in delta.items())


def ablate(
    base: RunConfig,
    deltas: list[dict[str, Any]],
    out_dir: str | Path,
    taxonomy: TripletTaxonomy | None = None,
) -> list[AblationRow]:
    """Run every delta on top of ``base`` with the base seed.

    An empty delta list runs the base configuration alone. Variants that
    share data settings and resolution reuse the same datasets.
    """
    taxonomy = taxonomy or TripletTaxonomy.default()
    out = Path(out_dir)
    deltas = deltas or [{}]
    cache: dict[str, RunDatasets] = {}
    rows: list[AblationRow] = []

    for k, delta in enumerate(deltas):
        config = apply_overrides(base, delta)
        name = variant_name(delta)
        key = f"{config.seed}|{config.model.height}x{config.model.width}|{config.data.model_dump_json()}"
        if key not in cache:
            cache[key] = build_datasets(config, taxonomy)
        datasets = cache[key]

        logger.info(f"Ablation variant {k + 1}/{len(deltas)}: {name}")
        variant_dir = out / f"variant_{k:02d}"
        log = train(config, datasets.train, variant_dir, taxonomy)
        result = evaluate(log.checkpoint, datasets.evaluation, taxonomy, variant_dir / "eval")
        rows.append(AblationRow(variant=name, delta=delta, report=result.report))

    write_ablation_table(out, rows)
    return rows
