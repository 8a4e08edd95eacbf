import argparse
import sys

import backend
import helpers.config_manager as config_manager
import helpers.report_writer as report_writer
from helpers.errors import ConfigError


def build_parser():
    parser = argparse.ArgumentParser(prog="mixmult", description="Exact mixed multiplicities of multigraded modules and ideal families.")
    parser.add_argument("--config", default=None, help="settings file (default: mixmult.toml or $MIXMULT_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every task of a problem file")
    run.add_argument("file")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--jobs", type=int, default=None)
    run.add_argument("--window", type=int, default=None)
    run.add_argument("--retries", type=int, default=None)

    corpus = sub.add_parser("verify-corpus", help="run .prob files against their .expected.json")
    corpus.add_argument("directory")
    corpus.add_argument("--jobs", type=int, default=None)

    oracle = sub.add_parser("oracle", help="compare associated lengths with lattice-point counts")
    oracle.add_argument("file")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        settings = config_manager.merge_settings(config_manager.load_settings(args.config))
    except ConfigError as e:
        print(f"Configuration error: {e.message}", file=sys.stderr)
        return backend.EXIT_PARSE_ERROR
    backend.setup_logging(settings["log_level"], settings["log_file"])

    overrides = {key: getattr(args, key, None) for key in ("seed", "jobs", "window", "retries")}
    try:
        if args.command == "run":
            report = backend.run_file(args.file, overrides, args.config)
        elif args.command == "verify-corpus":
            report = backend.verify_corpus(args.directory, overrides, args.config)
        else:
            report = backend.run_oracle(args.file, args.config)
    except ConfigError as e:
        print(f"Configuration error: {e.message}", file=sys.stderr)
        return backend.EXIT_PARSE_ERROR
    report_writer.emit_report(report)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
