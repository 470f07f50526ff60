"""
Command-Line Interface Module
Parses arguments, loads the signature and dispatches to TermManager.

Exit codes: 0 success, 1 invalid term/graph/signature content,
2 usage or I/O errors.
"""

import argparse
import sqlite3
import sys
from typing import Iterable, List, Optional, TextIO

from .config import EXIT_OK, EXIT_TYPE_ERROR, EXIT_USAGE_ERROR, ConfigManager
from .logger import LogManager
from .shape import EMPTY_CONTEXT, parse_context
from .signature import Direction, Signature, builtin_bintree, load_signature
from .storage import StorageManager
from .term import TermTypeError
from .term_manager import FOLD_ALGEBRAS, TermManager


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that prints help to `out` and usage errors to `err`."""

    out: Optional[TextIO] = None
    err: Optional[TextIO] = None

    def _print_message(self, message, file=None):
        if not message:
            return
        if file is sys.stdout:
            (self.out or sys.stdout).write(message)
        else:
            (self.err or sys.stderr).write(message)


def build_parser(stdout: TextIO = None, stderr: TextIO = None) -> argparse.ArgumentParser:
    """Create the argument parser with all subcommands; defaults come from ConfigManager."""
    config = ConfigManager()
    parser = _Parser(
        prog="csterm",
        description="Typed cyclic sharing terms: check, encode, decode, translate and fold.")
    parser.add_argument("--signature", metavar="PATH",
                        help="signature file (default: builtin binary trees)")
    parser.add_argument("--direction", choices=[d.value for d in Direction],
                        help="override the pointer direction of every symbol")
    parser.add_argument("--indirect", action=argparse.BooleanOptionalAction, default=None,
                        help="allow pointers to pointer nodes")
    parser.add_argument("--inner", action=argparse.BooleanOptionalAction, default=None,
                        help="allow inner pointer slots")
    parser.add_argument("--log-db", metavar="PATH", help="audit log database")
    parser.add_argument("--user", default=config.get_config('default_user'),
                        help="name recorded in the audit log")
    parser.add_argument("-o", "--output", default="-", metavar="PATH",
                        help="output file ('-' for stdout)")

    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="type-check a term and print its shape")
    check.add_argument("term", help="term text, @file or '-' for stdin")
    check.add_argument("--ctx", default="", help="context shapes separated by ';'")

    encode = commands.add_parser("encode", help="encode a graph file as a term")
    encode.add_argument("graph", help="graph file or '-' for stdin")

    decode = commands.add_parser("decode", help="decode a term into a graph file")
    decode.add_argument("term")
    decode.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")

    etg = commands.add_parser("etg", help="print the equational term graph of a term")
    etg.add_argument("term")

    letrec = commands.add_parser("letrec", help="print a term as a letrec expression")
    letrec.add_argument("term")

    unfold = commands.add_parser("unfold", help="print the expansion cut at a depth")
    unfold.add_argument("term")
    unfold.add_argument("--depth", type=int, default=config.get_config('default_unfold_depth'))

    fold = commands.add_parser("fold", help="run a named fold on a term")
    fold.add_argument("term")
    fold.add_argument("--alg", choices=FOLD_ALGEBRAS, required=True)

    enumerate_cmd = commands.add_parser("enumerate", help="list well-typed terms")
    enumerate_cmd.add_argument("--max", type=int, default=config.get_config('default_max_nodes'),
                               dest="max_nodes")
    enumerate_cmd.add_argument("--ctx", default="", help="context shapes separated by ';'")

    for each in (parser, *commands.choices.values()):
        each.out, each.err = stdout, stderr
    return parser


def _read_input(argument: str, stdin: TextIO, literal: bool = True) -> str:
    """'-' reads stdin, '@path' reads a file, anything else is literal text."""
    if argument == "-":
        return stdin.read()
    if argument.startswith("@"):
        with open(argument[1:], encoding="utf-8") as handle:
            return handle.read()
    if literal:
        return argument
    with open(argument, encoding="utf-8") as handle:
        return handle.read()


def _load_signature(args) -> Signature:
    if args.signature:
        with open(args.signature, encoding="utf-8") as handle:
            sig = load_signature(handle.read())
    else:
        sig = builtin_bintree()
    direction = Direction.parse(args.direction) if args.direction else None
    if direction is None and args.indirect is None and args.inner is None:
        return sig
    return sig.with_policy_override(direction, args.indirect, args.inner)


def _dispatch(manager: TermManager, args, stdin: TextIO) -> Iterable[str]:
    sig = manager.signature
    if args.command == "check":
        ctx = parse_context(args.ctx, sig) if args.ctx else EMPTY_CONTEXT
        return [manager.check(_read_input(args.term, stdin).strip(), ctx)]
    if args.command == "encode":
        return [manager.encode(_read_input(args.graph, stdin, literal=False))]
    if args.command == "enumerate":
        ctx = parse_context(args.ctx, sig) if args.ctx else EMPTY_CONTEXT
        return manager.enumerate(args.max_nodes, ctx)
    text = _read_input(args.term, stdin).strip()
    if args.command == "decode":
        return [manager.decode(text, dot=args.dot)]
    if args.command == "etg":
        return [manager.etg(text)]
    if args.command == "letrec":
        return [manager.letrec(text)]
    if args.command == "unfold":
        return [manager.unfold(text, args.depth)]
    return [manager.fold(text, args.alg)]


def _write_lines(lines: Iterable[str], stream: TextIO):
    for line in lines:
        stream.write(line if line.endswith("\n") else line + "\n")


def _write(lines: Iterable[str], output: str, stdout: TextIO):
    """Write each line as soon as it is produced."""
    if output == "-":
        _write_lines(lines, stdout)
        return
    with open(output, "w", encoding="utf-8") as handle:
        _write_lines(lines, handle)


def run(argv: Optional[List[str]] = None, stdin: TextIO = None, stdout: TextIO = None,
        stderr: TextIO = None) -> int:
    """
    Run one CLI invocation.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])
        stdin, stdout, stderr: Streams (default to the process streams)

    Returns:
        Exit status
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser(stdout, stderr)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE_ERROR

    try:
        signature = _load_signature(args)
        storage = StorageManager(args.log_db)
        manager = TermManager(signature, storage, LogManager(storage), args.user)
        lines = _dispatch(manager, args, stdin)
        _write(lines, args.output, stdout)
    except TermTypeError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_TYPE_ERROR
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_TYPE_ERROR
    except (OSError, sqlite3.Error) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE_ERROR
    except RecursionError:
        stderr.write("error: input is nested too deeply to process\n")
        return EXIT_TYPE_ERROR
    return EXIT_OK


def main():
    """Main entry point for the CLI application."""
    sys.exit(run())


if __name__ == "__main__":
    main()
