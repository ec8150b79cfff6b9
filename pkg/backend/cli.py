"""Command-line driver for convlint.

    convlint check <paths...> [--config FILE] [--format text|json] [--output FILE]
    convlint simulate <trace.json> [--catalog FILE] [--format text|json]
    convlint rules [--format text|json]
    convlint catalog <paths...> [--config FILE]

Exit codes: 0 clean, 1 error findings (PARSE included), 2 usage or configuration error.
"""

import argparse
import json
import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from config import config
from diagnostics import (
    BUILTIN_CATALOG,
    ExcValue,
    MessageCatalog,
    check_null_args,
    check_null_return,
    propagate,
    render_chain,
    render_message,
)
from exceptions import ConfigError, ConvlintError, TraceError, UsageError
from lint_system import LintSystem
from models import CatalogFile, RuleConfig, TraceFile
from pydantic import ValidationError
from rules import default_rule_manager

logger = logging.getLogger(__name__)

FORMATS = ("text", "json")


class ExitCode(IntEnum):
    CLEAN = 0
    FINDINGS = 1
    USAGE = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as UsageError instead of exiting"""

    def error(self, message: str):
        raise UsageError(message)


def _read_json(path: str, on_error) -> Any:
    try:
        text = Path(path).read_text(encoding=config.TEXT_ENCODING)
    except OSError as e:
        raise on_error(f"cannot read {path}: {e.strerror or e}", e)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise on_error(f"invalid JSON in {path}: {e.msg} at line {e.lineno}", e)


def _first_error(error: ValidationError) -> Dict[str, Any]:
    return error.errors()[0]


def load_config(path: str) -> RuleConfig:
    """
    Load and validate a rule configuration file.

    Missing fields take their defaults; unknown fields are rejected.

    Raises:
        ConfigError: naming the first offending field (`<file>` for unreadable or invalid JSON)
    """
    data = _read_json(path, lambda reason, cause: ConfigError("<file>", reason, cause))
    if not isinstance(data, dict):
        raise ConfigError("<file>", f"{path} must contain a JSON object")
    try:
        return RuleConfig.model_validate(data)
    except ValidationError as e:
        first = _first_error(e)
        location = [str(part) for part in first["loc"]]
        field = location[0] if location else "<file>"
        detail = ".".join(location[1:])
        reason = f"{detail}: {first['msg']}" if detail else first["msg"]
        raise ConfigError(field, reason, e)


def load_trace(path: str) -> TraceFile:
    """Load a trace file for `simulate`; any problem raises TraceError"""
    data = _read_json(path, lambda reason, cause: TraceError(path, reason, cause))
    try:
        trace_file = TraceFile.model_validate(data)
    except ValidationError as e:
        first = _first_error(e)
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise TraceError(path, f"{location}: {first['msg']}", e)
    try:
        trace_file.to_call_trace()
    except ValueError as e:
        raise TraceError(path, str(e), e)
    return trace_file


def load_catalog(path: str) -> MessageCatalog:
    data = _read_json(path, lambda reason, cause: ConfigError("catalog", reason, cause))
    try:
        return MessageCatalog(CatalogFile.model_validate(data).root)
    except ValidationError as e:
        raise ConfigError("catalog", f"{path} must map keys to template strings", e)


def _rule_config(path: Optional[str]) -> RuleConfig:
    path = path or config.RULE_CONFIG_PATH
    if not path:
        return RuleConfig()
    logger.info("Loading rule configuration from %s", path)
    return load_config(path)


def _emit(lines: List[str], output: Optional[str] = None):
    text = "".join(line + "\n" for line in lines)
    if output is None:
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text, encoding=config.TEXT_ENCODING)
    except OSError as e:
        raise UsageError(f"cannot write {output}: {e.strerror or e}")


def _json_line(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False)


# Subcommands


def run_check(args: argparse.Namespace) -> int:
    system = LintSystem(config, _rule_config(args.config))
    report = system.check(args.inputs)

    if args.format == "json":
        lines = [_json_line(finding.to_json_dict()) for finding in report.findings]
    else:
        lines = [finding.format_text() for finding in report.findings]
        lines.append(report.summary())
    _emit(lines, args.output)

    return ExitCode.FINDINGS if report.has_errors else ExitCode.CLEAN


def _exc_json(catalog: MessageCatalog, e: ExcValue) -> Dict[str, Any]:
    return {"key": e.key, "params": list(e.params), "message": render_message(catalog, e)}


def run_simulate(args: argparse.Namespace) -> int:
    trace_file = load_trace(args.trace)
    trace = trace_file.to_call_trace()
    catalog = BUILTIN_CATALOG
    if args.catalog:
        catalog = BUILTIN_CATALOG.merged(load_catalog(args.catalog).entries)

    null_failures: List[ExcValue] = []
    for frame, source in zip(trace.frames, trace_file.frames):
        null_failures.extend(check_null_args(frame))
        returned = check_null_return(frame, source.returns_null)
        if returned is not None:
            null_failures.append(returned)

    result = propagate(trace)

    if args.format == "json":
        payload = {
            "null_failures": [_exc_json(catalog, failure) for failure in null_failures],
            "chain": [_exc_json(catalog, element) for element in result.chain()],
        }
        _emit([_json_line(payload)])
    else:
        lines = [render_message(catalog, failure) for failure in null_failures]
        lines.extend(render_chain(catalog, result).split("\n"))
        _emit(lines)
    return ExitCode.CLEAN


def run_rules(args: argparse.Namespace) -> int:
    definitions = default_rule_manager().get_rule_definitions()
    if args.format == "json":
        lines = [
            _json_line(
                {
                    "rule": d.rule_id,
                    "severity": d.default_severity.value,
                    "title": d.title,
                    "template": d.template,
                }
            )
            for d in definitions
        ]
    else:
        lines = [
            f"{d.rule_id:<7} {d.default_severity.value:<8} {d.template}" for d in definitions
        ]
    _emit(lines)
    return ExitCode.CLEAN


def run_catalog(args: argparse.Namespace) -> int:
    system = LintSystem(config, _rule_config(args.config))
    templates = system.build_catalog(args.inputs)
    _emit([json.dumps(templates, indent=2, sort_keys=True, ensure_ascii=False)])
    return ExitCode.CLEAN


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="log progress (-vv for debug output)"
    )

    parser = _ArgumentParser(prog="convlint", description="Convention and architecture linter")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="lint MiniJ sources")
    check.add_argument("inputs", nargs="+", help="files or directories to check")
    check.add_argument("--config", help="rule configuration file (JSON)")
    check.add_argument("--format", default=config.OUTPUT_FORMAT, help="text or json")
    check.add_argument("--output", help="write the report to this file")
    check.set_defaults(handler=run_check)

    simulate = commands.add_parser(
        "simulate", parents=[common], help="propagate an exception through a recorded trace"
    )
    simulate.add_argument("trace", help="trace file (JSON)")
    simulate.add_argument("--catalog", help="message catalog file (JSON)")
    simulate.add_argument("--format", default=config.OUTPUT_FORMAT, help="text or json")
    simulate.set_defaults(handler=run_simulate)

    rules = commands.add_parser("rules", parents=[common], help="list the built-in rules")
    rules.add_argument("--format", default=config.OUTPUT_FORMAT, help="text or json")
    rules.set_defaults(handler=run_rules)

    catalog = commands.add_parser(
        "catalog", parents=[common], help="print exception message templates as JSON"
    )
    catalog.add_argument("inputs", nargs="+", help="files or directories to scan")
    catalog.add_argument("--config", help="rule configuration file (JSON)")
    catalog.set_defaults(handler=run_catalog, format="json")

    return parser


def configure_logging(verbosity: int):
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run convlint and return the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format not in FORMATS:
            raise UsageError(f"unknown format '{args.format}' (choose from text, json)")
        configure_logging(args.verbose)
        return int(args.handler(args))
    except ConvlintError as e:
        print(f"convlint: error: {e.message}", file=sys.stderr)
        return ExitCode.USAGE
