import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

from loguru import logger

from ralab.errors import ConfigError
from ralab.cli.commands import cmd_bench_parse, cmd_oracle, cmd_profile, cmd_run
from ralab.cli.presets import PRESET_GROUPS
from ralab.cli.run_config import load_run_configs
from ralab.ralab_config import get_ralab_config

CONFIG = get_ralab_config()

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML or JSON run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--steps", type=int)
    common.add_argument("--clock", choices=("virtual", "real"))
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--format", dest="formats", action="append", choices=("csv", "json", "table"),
                        help="report format, repeat for several")
    common.add_argument("--tensorboard", dest="tensorboard_dir", type=Path,
                        help="also write tensorboard event files here")
    common.add_argument("--log-level", default="DEBUG" if CONFIG.DEBUG else "INFO",
                        choices=("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR"))
    return common


def build_app() -> argparse.ArgumentParser:
    common = _common_flags()
    app = argparse.ArgumentParser(prog=CONFIG.APP_TITLE,
                                  description="Stage-level delay lab for RL-based Wi-Fi rate adaptation")
    commands = app.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="run the loop, write a per-step CSV log")
    run.set_defaults(handler=lambda configs: [path for c in configs for path in cmd_run(c)])

    profile = commands.add_parser("profile", parents=[common], help="profile scenarios, write reports")
    profile.add_argument("--preset", choices=sorted(PRESET_GROUPS))
    profile.set_defaults(handler=cmd_profile)

    bench = commands.add_parser("bench-parse", parents=[common], help="benchmark the stat file parsers")
    bench.add_argument("--calls", type=int)
    bench.add_argument("--repeats", type=int)
    bench.add_argument("--corpus-size", dest="corpus_size", type=int)
    bench.set_defaults(handler=lambda configs: cmd_bench_parse(configs[0]))

    oracle = commands.add_parser("oracle", parents=[common], help="tabulate the best MCS per state bin")
    oracle.set_defaults(handler=lambda configs: cmd_oracle(configs[0]))
    return app


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for key in ("seed", "steps", "clock", "out", "formats", "tensorboard_dir", "preset"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value) if isinstance(value, Path) else value

    bench = {key: getattr(args, key) for key in ("calls", "repeats", "corpus_size")
             if getattr(args, key, None) is not None}
    if bench:
        overrides["bench"] = bench
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    args = build_app().parse_args(argv)

    logger.remove()
    logger.add(sys.stderr, level=args.log_level)

    try:
        configs = load_run_configs(args.config, overrides_from_args(args))
        for path in args.handler(configs):
            logger.debug(f"output {path}")
    except ConfigError as e:
        logger.error(f"configuration error at {e.key}: {e.message}")
        return EXIT_CONFIG
    except Exception:
        logger.opt(exception=sys.exc_info()).error(f"{args.command} failed")
        return EXIT_RUNTIME
    return EXIT_OK
