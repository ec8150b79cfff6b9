import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from exceptions import MiniJSyntaxError, UsageError
from facts import Facts, extract_facts
from models import Finding, Report, RuleConfig
from parser import parse_unit
from rules import PARSE, default_rule_manager, make_finding, parse_finding, run_all
from syntax_tree import CompilationUnit, SourceLocation

logger = logging.getLogger(__name__)

ParseResult = Tuple[Optional[CompilationUnit], Optional[Finding]]


class LintSystem:
    """Main orchestrator: collect sources, parse them, extract facts and run the rules"""

    def __init__(self, config, rule_config: Optional[RuleConfig] = None):
        self.config = config
        self.rule_config = rule_config or RuleConfig()
        self.rule_manager = default_rule_manager()

    def collect_sources(self, inputs: Sequence[str]) -> List[str]:
        """
        Expand input paths into the list of source files to check.

        Args:
            inputs: Files and directories; directories are searched recursively

        Returns:
            Unique paths in lexicographic order
        """
        found = set()
        for raw in inputs:
            path = Path(raw)
            if path.is_file():
                found.add(path.as_posix())
            elif path.is_dir():
                for candidate in path.rglob(f"*{self.config.SOURCE_SUFFIX}"):
                    if candidate.is_file():
                        found.add(candidate.as_posix())
            else:
                raise UsageError(f"No such file or directory: {raw}")
        return sorted(found)

    def read_file(self, file_path: str) -> str:
        """Read content from file with the configured encoding"""
        encoding = self.config.TEXT_ENCODING
        try:
            with open(file_path, "r", encoding=encoding) as file:
                return file.read()
        except UnicodeDecodeError:
            # If decoding fails, drop the undecodable bytes
            logger.warning("%s is not valid %s, ignoring undecodable bytes", file_path, encoding)
            with open(file_path, "r", encoding=encoding, errors="ignore") as file:
                return file.read()

    def parse_file(self, file_path: str) -> ParseResult:
        """Parse one file; failures come back as a PARSE finding instead of an exception"""
        try:
            source_text = self.read_file(file_path)
        except OSError as e:
            logger.error("Error reading %s: %s", file_path, e)
            location = SourceLocation(file_path, 1, 1)
            return None, make_finding(PARSE, location, ("a readable file", e.strerror or str(e)))

        try:
            return parse_unit(source_text, file_path), None
        except MiniJSyntaxError as e:
            logger.info("Syntax error in %s: %s", file_path, e)
            return None, parse_finding(e)

    def parse_sources(self, paths: Sequence[str]) -> Tuple[List[CompilationUnit], List[Finding]]:
        """Parse files, in parallel when configured; results keep the order of paths"""
        workers = max(1, self.config.MAX_WORKERS)
        if workers == 1 or len(paths) < 2:
            results = [self.parse_file(path) for path in paths]
        else:
            with ThreadPoolExecutor(max_workers=min(workers, len(paths))) as pool:
                results = list(pool.map(self.parse_file, paths))

        units = [unit for unit, _ in results if unit is not None]
        findings = [finding for _, finding in results if finding is not None]
        logger.info("Parsed %d of %d files", len(units), len(paths))
        return units, findings

    def extract(self, inputs: Sequence[str]) -> Tuple[Facts, List[Finding]]:
        units, parse_findings = self.parse_sources(self.collect_sources(inputs))
        return extract_facts(units, self.rule_config), parse_findings

    def check(self, inputs: Sequence[str]) -> Report:
        """Run every rule over the sources under inputs"""
        facts, parse_findings = self.extract(inputs)
        return run_all(facts, self.rule_config, parse_findings, self.rule_manager)

    def build_catalog(self, inputs: Sequence[str]) -> Dict[str, str]:
        """Exception message templates (type qname -> doc template) declared under inputs"""
        facts, parse_findings = self.extract(inputs)
        for finding in parse_findings:
            logger.warning("Skipping %s: %s", finding.file, finding.message)
        return {key: facts.templates[key] for key in sorted(facts.templates)}
