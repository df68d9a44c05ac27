"""Command-line entry point: train, evaluate, ablate and synthesize datasets."""

import argparse
import os
import sys
import uuid
from pathlib import Path

import yaml
from dotenv import load_dotenv
from loguru import logger

from src.configs.settings import RunConfig, load_grid, load_run_config
from src.core.error_classifier import ErrorClassifier
from src.core.logger import setup_logging

DEFAULT_YAML_FILE = "yaml_files/main.yml"


def configure_logging(args: argparse.Namespace, config: RunConfig | None = None) -> None:
    """Install the log sinks: ``--log-level``, then ``run.log_level``, then LOG_LEVEL."""
    setup_logging(
        level=args.log_level
        or (config.log_level if config else None)
        or os.getenv("LOG_LEVEL", "INFO"),
        log_dir=os.getenv("LOG_DIR"),
        retention=os.getenv("LOG_RETENTION", "30 days"),
    )


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Load ``--config``, apply the command-line overrides and its log level."""
    config = load_run_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.deterministic:
        updates["deterministic"] = True
    if updates:
        config = RunConfig(**{**config.model_dump(mode="json"), **updates})
    if config.log_level:
        configure_logging(args, config)
    logger.debug(f"Resolved {args.config}: seed={config.seed} deterministic={config.deterministic}")
    return config


def _write_config(config: RunConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "run_config.yml", "w", encoding="utf-8") as f:
        yaml.safe_dump({"run": config.model_dump(mode="json")}, f, sort_keys=False)


def cmd_train(args: argparse.Namespace) -> None:
    from src.services.harness import build_datasets, evaluate, train

    config = resolve_config(args)
    out = Path(args.out)
    _write_config(config, out)
    datasets = build_datasets(config)
    log = train(config, datasets.train, out)
    logger.info(f"Final checkpoint: {log.checkpoint}")
    if args.evaluate:
        evaluate(log.checkpoint, datasets.evaluation, out_dir=out / "eval")


def cmd_eval(args: argparse.Namespace) -> None:
    from src.services.datapipe import TripletTaxonomy
    from src.services.harness import build_dataset, evaluate
    from src.services.tensor_engine import read_manifest

    if args.config:
        config = resolve_config(args)
    else:
        config = RunConfig(**read_manifest(args.checkpoint)["run_config"])
        if config.log_level:
            configure_logging(args, config)
    taxonomy = TripletTaxonomy.default()
    dataset = build_dataset(config, args.split or config.data.eval_split, taxonomy)
    result = evaluate(args.checkpoint, dataset, taxonomy, out_dir=args.out, batch_size=config.batch_size)
    logger.info(f"Report written to {args.out}: AP_IVT {result.report.ap_ivt}")


def cmd_ablate(args: argparse.Namespace) -> None:
    from src.services.harness import ablate

    config = resolve_config(args)
    deltas = load_grid(args.grid) if args.grid else []
    out = Path(args.out)
    _write_config(config, out)
    rows = ablate(config, deltas, out)
    logger.info(f"Ablation table with {len(rows)} rows written to {out}")


def cmd_synth(args: argparse.Namespace) -> None:
    from src.configs.data import DatasetSource
    from src.core.exceptions import DataError
    from src.services.datapipe import probe_temporal_coding, write_dataset
    from src.services.datapipe.synthetic import temporally_coded_pairs
    from src.services.harness import build_dataset

    config = resolve_config(args)
    selection = args.split or config.data.train_split
    dataset = build_dataset(config, selection)
    write_dataset(dataset, args.out)
    if config.data.source != DatasetSource.SYNTHETIC:
        return

    for pair in temporally_coded_pairs(config.data.synthetic):
        try:
            probe_temporal_coding(dataset, pair, config.model.clip_size, seed=config.seed)
        except DataError as exc:
            logger.warning(f"Skipped probe of {pair}: {exc}")


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triplets",
        description="Temporal surgical action triplet recognition",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Example usage:
  # Train on the synthetic dataset and evaluate on its held-out videos
  python -m src.main train --config yaml_files/main.yml --out runs/base --evaluate

  # Evaluate a checkpoint with the configuration stored inside it
  python -m src.main eval --checkpoint runs/base/model.ckpt --out runs/base/eval

  # Early vs late fusion over three clip sizes
  python -m src.main ablate --config yaml_files/main.yml --grid yaml_files/ablation.yml --out runs/ablation

  # Write the synthetic videos in the recorded-dataset layout
  python -m src.main synth --config yaml_files/main.yml --out data/synthetic
        """,
    )
    parser.add_argument(
        "--log-level", default=None, help="Overrides run.log_level and LOG_LEVEL"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument(
            "--config",
            default=None if name == "eval" else DEFAULT_YAML_FILE,
            help=f"Run configuration YAML (default: {DEFAULT_YAML_FILE})",
        )
        cmd.add_argument("--seed", type=int, default=None, help="Overrides run.seed")
        cmd.add_argument("--out", required=True, help="Output directory")
        cmd.add_argument(
            "--deterministic", action="store_true", help="Disable background prefetch"
        )
        if name == "train":
            cmd.add_argument(
                "--evaluate", action="store_true", help="Evaluate the final checkpoint"
            )
        if name == "eval":
            cmd.add_argument("--checkpoint", required=True, help="Checkpoint to evaluate")
        if name in ("eval", "synth"):
            cmd.add_argument("--split", default=None, help="Split selection to use")
        if name == "ablate":
            cmd.add_argument("--grid", default=None, help="Grid YAML (deltas and/or axes)")
    return parser


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args)

    run_id = f"{args.command}-{uuid.uuid4().hex[:8]}"
    with logger.contextualize(run_id=run_id):
        try:
            COMMANDS[args.command](args)
        except Exception as exc:
            logger.opt(exception=exc).debug(f"{args.command} failed")
            sys.stderr.write(ErrorClassifier.error_line(exc) + "\n")
            return ErrorClassifier.exit_code(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
