#!/usr/bin/env python3
import argparse
import sys
from argparse import RawTextHelpFormatter
from contextlib import nullcontext
from pathlib import Path
from typing import List, Optional, TextIO

from loguru import logger

from .__init__ import __version__
from .bench import parse_query_file, run_bench, write_csv
from .config import EngineConfig, WcoConfig, load_config
from .engine.ltj import iter_solutions
from .errors import IngestError, UnsupportedFeatureError, WcoError
from .indices import VARIANTS, build_index
from .indices.base import TripleIndex
from .ingest.container import load_index, save_index
from .ingest.parser import Dictionary, parse_triples
from .types import EvalStats

LOG_FORMAT = "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{message}</level>"


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_engine_options(parser: argparse.ArgumentParser, sweep: bool = False) -> None:
    lists = " (comma-separated list allowed)" if sweep else ""
    parser.add_argument("--index", required=True, help="Index container built with `build`")
    parser.add_argument(
        "--queries", required=True, help="Query file, one `<id>\\t<bgp>` per line"
    )
    parser.add_argument("--limit", type=int, help="Maximum results per query, 0 = unlimited [1000]")
    parser.add_argument("--timeout", type=float, help="Seconds per query, 0 = none [600]")
    parser.add_argument("--veo", help=f"global or adaptive [adaptive]{lists}")
    parser.add_argument(
        "--estimator",
        help=f"range, children, refined:K, random, random-nl or random-e [range]{lists}",
    )
    parser.add_argument("--seed", type=int, help="Seed for the random orders")


def parsing_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = CliParser(
        prog="wco-index",
        description="Worst-case optimal BGP evaluation over compact triple indices",
        formatter_class=RawTextHelpFormatter,
    )
    parser.add_argument(
        "--config",
        "-c",
        type=str,
        default=None,
        help="Path to the configuration file",
    )

    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        default=False,
        help="Debug logging, override if `verbose` set False in config",
    )
    group.add_argument(
        "--quiet",
        "-q",
        action="store_true",
        default=False,
        help="Only warnings and errors, no progress bars",
    )
    parser.add_argument(
        "--version",
        "-V",
        action="version",
        version=f"%(prog)s {__version__}",
    )

    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="Build an index container from a triple file")
    build.add_argument("--input", required=True, help="Triple file, `-` for stdin")
    build.add_argument("--format", choices=["ints", "terms"], default="ints")
    build.add_argument("--variant", choices=VARIANTS, required=True)
    build.add_argument("--out", required=True, help="Output container path")

    query = commands.add_parser("query", help="Evaluate a query file and print the results")
    _add_engine_options(query)

    bench = commands.add_parser("bench", help="Time a query file and write CSV records")
    _add_engine_options(bench, sweep=True)
    bench.add_argument("--csv", default="-", help="CSV output path, `-` for stdout")
    bench.add_argument(
        "--exhaustive-veo",
        action="store_true",
        help="Also time every admissible global order (up to 6 non-lonely variables)",
    )

    return parser.parse_args(argv)


def apply_cli_overrides(config: WcoConfig, args: argparse.Namespace) -> WcoConfig:
    """Flags win over the environment and the configuration file."""
    for name in ("limit", "timeout", "veo", "estimator", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    if args.verbose:
        config.verbose = True
    if args.quiet:
        config.verbose = False
    return config


def setup_logging(config: WcoConfig, quiet: bool = False) -> None:
    level = "WARNING" if quiet else ("DEBUG" if config.verbose else "INFO")
    logger.remove()
    logger.add(sys.stderr, colorize=True, format=LOG_FORMAT, level=level)


def _open_lines(path: str):
    if path == "-":
        return nullcontext(sys.stdin)
    try:
        return open(path, "r", encoding="utf-8")
    except OSError as e:
        raise IngestError(f"cannot read {path}: {e.strerror}") from None


def cmd_build(args: argparse.Namespace, config: WcoConfig, out: TextIO) -> None:
    with _open_lines(args.input) as f:
        triples, dictionary = parse_triples(f, args.format)
    U = max(len(dictionary), int(triples.max()))
    logger.info(f"Building {args.variant} over {triples.shape[0]} triples (U={U})")
    index = build_index(triples, U, args.variant, psi_sample_rate=config.psi_sample_rate)
    try:
        container = save_index(index, dictionary, args.out)
    except OSError as e:
        raise IngestError(f"cannot write {args.out}: {e.strerror}") from None
    out.write(
        f"n={container.n} U={container.U} bytes={container.nbytes} "
        f"bpt={container.bpt:.2f}\n"
    )


def _load_queries(path: str, dictionary: Dictionary):
    resolve = None if dictionary.is_identity else dictionary.lookup
    with _open_lines(path) as f:
        return parse_query_file(f, resolve)


def _check_strategy(index: TripleIndex, config: WcoConfig) -> None:
    for strategy in config.strategies():
        if strategy.estimator == "children" and not index.supports_children:
            raise UnsupportedFeatureError(
                f"estimator 'children' needs a vring index, got {index.variant}"
            )


def cmd_query(args: argparse.Namespace, config: WcoConfig, out: TextIO) -> None:
    index, dictionary = load_index(args.index)
    _check_strategy(index, config)
    entries = _load_queries(args.queries, dictionary)
    engine = EngineConfig.from_config(config)
    for entry in entries:
        names = entry.bgp.variables()
        out.write(f"# query {entry.query_id}\n")
        stats = EvalStats()
        for solution in iter_solutions(index, entry.bgp, engine, stats):
            out.write(
                "\t".join(f"{v}={dictionary.term_of(solution[v])}" for v in names) + "\n"
            )
        out.write(stats.line() + "\n")


def cmd_bench(args: argparse.Namespace, config: WcoConfig, out: TextIO, quiet: bool) -> None:
    index, dictionary = load_index(args.index)
    _check_strategy(index, config)
    entries = _load_queries(args.queries, dictionary)
    records = run_bench(
        index,
        entries,
        EngineConfig.from_config(config),
        config.strategies(),
        exhaustive=args.exhaustive_veo,
        progress=not quiet,
    )
    if args.csv == "-":
        write_csv(records, out, args.exhaustive_veo)
        return
    with open(args.csv, "w", newline="", encoding="utf-8") as f:
        write_csv(records, f, args.exhaustive_veo)
    logger.info(f"Wrote {len(records)} records to {Path(args.csv).absolute()}")


def main(argv: Optional[List[str]] = None) -> int:
    args = parsing_args(argv)

    try:
        config, _ = load_config(args.config)
        apply_cli_overrides(config, args)
        config.validate()
        setup_logging(config, args.quiet)
        if config.verbose:
            config.show()
        logger.debug(f"Running wco-index {__version__} {args.command}")
        out = sys.stdout
        if args.command == "build":
            cmd_build(args, config, out)
        elif args.command == "query":
            cmd_query(args, config, out)
        else:
            cmd_bench(args, config, out, args.quiet)
        out.flush()
    except WcoError as e:
        logger.error(str(e))
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
