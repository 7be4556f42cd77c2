"""Command-line entry point: regenerate figure data and run single experiments."""

import argparse
import logging
import sys
from typing import Dict, List, Optional

import pandas as pd

from ..exceptions import CdmaGameError, InvalidInputError
from ..settings import get_settings
from .config import FIGURE_IDS, ExperimentConfig
from .export import DatasetWriter
from .figures import code_game_dataset, ee_game_dataset, lsa_dataset, run_figure

logger = logging.getLogger(__name__)

COMMANDS = ("figure", "code-game", "ee-game", "lsa")


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment config file")
    parser.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    parser.add_argument("--out", help="Output directory (overrides the config)")
    parser.add_argument("--trials", type=int, help="Monte-Carlo trials (overrides the config)")
    parser.add_argument("--workers", type=int, help="Worker processes (overrides the config)")
    parser.add_argument("--full-scale", action="store_true", help="Use the full trial count")
    parser.add_argument("--log-level", help="Logging level (default from WL_CDMA_LOG_LEVEL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wl-cdma-games",
        description="Transceiver games with widely-linear receivers: figure data and experiments",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    figure = subparsers.add_parser("figure", help="Regenerate one figure's dataset")
    figure.add_argument("figure_id", choices=FIGURE_IDS)
    _add_common_arguments(figure)

    for name, text in (
        ("code-game", "Run both code iterations on one random scenario"),
        ("ee-game", "Play the energy-efficiency games on random scenarios"),
        ("lsa", "Compare large-system predictions with the PR games"),
    ):
        _add_common_arguments(subparsers.add_parser(name, help=text))
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge environment defaults, the config file and command-line overrides."""
    settings = get_settings()
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig(trials=settings.trials, workers=settings.workers)

    update = {}
    if args.seed is not None:
        update["master_seed"] = args.seed
    if args.trials is not None:
        update["trials"] = args.trials
    if args.workers is not None:
        update["workers"] = args.workers
    if args.full_scale:
        update["full_scale"] = True
    update["output_dir"] = args.out or config.output_dir or settings.output_dir
    if args.command == "figure":
        update["figure"] = args.figure_id
    # re-validate so command-line values get the same checks as file values
    return ExperimentConfig.model_validate({**config.model_dump(), **update})


def _datasets(command: str, config: ExperimentConfig) -> Dict[str, pd.DataFrame]:
    if command == "figure":
        return {config.figure: run_figure(config.figure, config).frame}
    if command == "code-game":
        return code_game_dataset(config)
    if command == "ee-game":
        return ee_game_dataset(config)
    return lsa_dataset(config)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = (args.log_level or get_settings().log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(args)
        writer = DatasetWriter(config.output_dir)
        for name, frame in _datasets(args.command, config).items():
            writer.write(frame, name, config, command=args.command)
    except (InvalidInputError, OSError, ValueError) as e:
        logger.error("Invalid input for %s: %s", args.command, e)
        return 2
    except CdmaGameError as e:
        logger.error("%s failed: %s", args.command, e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
