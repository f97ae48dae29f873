from __future__ import annotations

import argparse
import secrets
import sys
from typing import List, Optional, Sequence, Tuple

from config.settings import AppConfig
from harness.equivalence import Counterexample, SchemaMismatchError, check_equiv, empty_database
from relations.kbag import Relation, Value
from semantics.evaluator import run_query
from semantics.logic import LOGICS, get_logic
from semantics.translate import ttquery
from store.database import DatabaseFormatError, dump_database, load_database, load_schemas
from syntax.ast import Const, Null, Query
from syntax.parser import ParseError, parse_query, render, render_term
from syntax.wf import WfError, wf_query
from utils.logger import AppLogger
from utils.query_loader import resolve_query_path


# Centralized config and logger
config = AppConfig()
logger = AppLogger(config.log_file_path)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_WF = 2
EXIT_COUNTEREXAMPLE = 3


def log(message: str) -> None:
    """Append a short human-readable message to the application log."""
    logger.log(message)


def log_kv(event: str, **fields: object) -> None:
    """Log a structured event with key/value pairs.

    The event name is a short UPPER_SNAKE identifier (e.g. "RUN_DONE");
    keyword arguments are rendered as ``k=v`` tokens on the same line.
    """
    logger.log_kv(event, **fields)


class InputError(Exception):
    """A file could not be read, parsed or decoded. Maps to exit code 1."""

    def __init__(self, kind: str, message: str, where: Optional[str] = None) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.where = where

    def format(self) -> str:
        if self.where:
            return f"{self.kind} at {self.where}: {self.message}"
        return f"{self.kind}: {self.message}"


def _error(line: str) -> None:
    print(f"error: {line}", file=sys.stderr)


# ---- loading ----


def load_query_file(path: str) -> Tuple[str, Query]:
    """Read and parse a query file (path or name under queries/). Fresh names are allowed."""
    try:
        qpath = resolve_query_path(path, config)
        text = qpath.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as ex:
        log_kv("IO_ERROR", path=path, error=ex)
        raise InputError("IOError", f"Cannot read {path}: {ex}") from ex
    try:
        return text, parse_query(text, allow_fresh=True)
    except ParseError as ex:
        log_kv("PARSE_ERROR", path=path, error=ex.format(text))
        line, col = ex.line_col(text)
        raise InputError("ParseError", ex.message, f"{line}:{col}") from ex


def _load_database(path: str):
    try:
        return load_database(path)
    except DatabaseFormatError as ex:
        log_kv("IO_ERROR", path=path, error=ex)
        raise InputError("DatabaseFormatError", str(ex)) from ex


def _check(db, text: str, q: Query, path: str):
    try:
        schema = wf_query((), db, q)
    except WfError as ex:
        log_kv("WF_REJECT", path=path, kind=ex.kind.value, error=ex.message)
        _error(ex.format(text))
        return None
    log_kv("WF_OK", path=path, schema="(" + ", ".join(schema) + ")")
    return schema


# ---- printing ----


def format_value(v: Value) -> str:
    """NULL, decimal integers, single-quoted strings."""
    return render_term(Null() if v is None else Const(v))


def format_relation(schema: Sequence[str], rel: Relation) -> str:
    """Header line of schema names, then one tab-separated line per row in canonical order."""
    lines = ["\t".join(schema)]
    lines.extend("\t".join(format_value(v) for v in row) for row in rel.rows)
    return "\n".join(lines)


def _resolve_seed(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    if config.seed is not None:
        return config.seed
    seed = secrets.randbits(63)
    print(f"seed: {seed}", file=sys.stderr)
    log_kv("SEED_CHOSEN", seed=seed)
    return seed


# ---- commands ----


def cmd_wf(args: argparse.Namespace) -> int:
    db = _load_database(args.db)
    text, q = load_query_file(args.query)
    schema = _check(db, text, q, args.query)
    if schema is None:
        return EXIT_WF
    print("schema: (" + ", ".join(schema) + ")")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    db = _load_database(args.db)
    text, q = load_query_file(args.query)
    schema = _check(db, text, q, args.query)
    if schema is None:
        return EXIT_WF
    logic = get_logic(args.logic)
    rel = run_query(db, q, logic)
    print(format_relation(schema, rel))
    log_kv("RUN_DONE", path=args.query, logic=logic.name, rows=rel.card())
    return EXIT_OK


def cmd_translate(args: argparse.Namespace) -> int:
    _, q = load_query_file(args.query)
    out = render(ttquery(q))
    print(out)
    log_kv("TRANSLATE_DONE", path=args.query, chars=len(out))
    return EXIT_OK


def cmd_equiv(args: argparse.Namespace) -> int:
    try:
        schemas = load_schemas(args.schemas)
    except DatabaseFormatError as ex:
        log_kv("IO_ERROR", path=args.schemas, error=ex)
        raise InputError("DatabaseFormatError", str(ex)) from ex
    text1, q1 = load_query_file(args.query1)
    text2, q2 = load_query_file(args.query2)
    logic1, logic2 = get_logic(args.logic1), get_logic(args.logic2)
    cfg = config.gen_config(seed=_resolve_seed(args.seed), trials=args.trials)

    def on_trial(trial: int, equal: bool) -> None:
        if not equal:
            log_kv("EQUIV_TRIAL_FAIL", seed=cfg.seed, trial=trial)

    schema_db = empty_database(schemas)
    for text, q, path in ((text1, q1, args.query1), (text2, q2, args.query2)):
        if _check(schema_db, text, q, path) is None:
            return EXIT_WF
    try:
        result = check_equiv(
            q1, q2, logic1, logic2, cfg, schemas,
            shrink=config.shrink_counterexamples, on_trial=on_trial,
        )
    except SchemaMismatchError as ex:
        log_kv("WF_REJECT", kind="SchemaMismatch", error=ex)
        _error(f"SchemaMismatch: {ex}")
        return EXIT_WF

    if isinstance(result, Counterexample):
        print(dump_database(result.db))
        print(f"seed: {result.seed}")
        print(f"trial: {result.trial}")
        schema = wf_query((), result.db, q1)
        print(f"left ({logic1.name}):\n{format_relation(schema, result.r1)}", file=sys.stderr)
        print(f"right ({logic2.name}):\n{format_relation(schema, result.r2)}", file=sys.stderr)
        log_kv("EQUIV_DONE", equivalent=False, seed=result.seed, trial=result.trial, shrunk=result.shrunk)
        return EXIT_COUNTEREXAMPLE
    print(f"equivalent over {result.trials} trials")
    log_kv("EQUIV_DONE", equivalent=True, seed=cfg.seed, trials=result.trials)
    return EXIT_OK


# ---- argument parsing ----


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with code 1 (exit code 2 is reserved for ill-formed queries)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        _error(message)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    logics = sorted(LOGICS)
    parser = _ArgumentParser(prog="nullsql", description="Reference interpreter for SQL with NULLs")
    parser.add_argument("-v", "--verbose", action="store_true", help="mirror log lines to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wf", help="check well-formedness and print the output schema")
    p.add_argument("db", help="database document (.yaml/.json), CSV file or CSV folder")
    p.add_argument("query", help="query file, or the name of a .sql file under queries/")
    p.set_defaults(func=cmd_wf)

    p = sub.add_parser("run", help="evaluate a query and print its result")
    p.add_argument("db")
    p.add_argument("query")
    p.add_argument("--logic", choices=logics, default="3vl")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("translate", help="print the two-valued translation of a query")
    p.add_argument("query")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("equiv", help="compare two queries on random databases")
    p.add_argument("query1")
    p.add_argument("query2")
    p.add_argument("schemas", help="database document or name -> [attrs] mapping")
    p.add_argument("--logic1", choices=logics, default="3vl")
    p.add_argument("--logic2", choices=logics, default="3vl")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_equiv)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    logger.echo = args.verbose
    log_kv("CLI_START", command=args.command)
    try:
        return args.func(args)
    except InputError as ex:
        _error(ex.format())
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
