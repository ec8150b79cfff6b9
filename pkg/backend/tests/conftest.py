"""Shared pytest fixtures for testing convlint"""

import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import pytest

# Add backend directory to path for imports
backend_dir = Path(__file__).parent.parent
sys.path.insert(0, str(backend_dir))

from config import Config
from diagnostics import ExcValue, Frame, FrameArg
from facts import Facts, extract_facts
from models import RuleConfig
from parser import parse_unit
from syntax_tree import CompilationUnit

CORPUS_DIR = Path(__file__).parent / "corpus"


@pytest.fixture
def corpus_dir() -> Path:
    """Root of the MiniJ sample corpus"""
    return CORPUS_DIR


@pytest.fixture
def fb6_config_path() -> str:
    return str(CORPUS_DIR / "fb6.json")


@pytest.fixture
def rule_config() -> RuleConfig:
    """Default rule configuration (the fb6 package scheme)"""
    return RuleConfig()


@pytest.fixture
def lint_config() -> Config:
    """Process settings with sequential parsing, independent of the environment"""
    return Config(
        RULE_CONFIG_PATH="",
        OUTPUT_FORMAT="text",
        LOG_LEVEL="WARNING",
        MAX_WORKERS=1,
    )


@pytest.fixture
def parse_source() -> Callable[..., CompilationUnit]:
    """Parse MiniJ text, dedenting nothing; the file name defaults to Test.minij"""

    def parse(source_text: str, file: str = "Test.minij") -> CompilationUnit:
        return parse_unit(source_text, file)

    return parse


@pytest.fixture
def facts_for() -> Callable[..., Facts]:
    """Extract facts from one or more MiniJ sources (named Test0.minij, Test1.minij, ...)"""

    def build(*sources: str, cfg: Optional[RuleConfig] = None) -> Facts:
        units = [parse_unit(text, f"Test{index}.minij") for index, text in enumerate(sources)]
        return extract_facts(units, cfg)

    return build


@pytest.fixture
def make_frame() -> Callable[..., Frame]:
    """Build a trace frame; args are (name, value) pairs, value None meaning NULL"""

    def build(
        sig: str,
        args: Sequence = (),
        wrap: bool = True,
        throws: Sequence[str] = (),
        nullable_args: Sequence[str] = (),
        method_nullable: bool = False,
    ) -> Frame:
        return Frame(
            method_qname=f"fb6.test.{sig.split('(')[0]}",
            simple_sig=sig,
            args=tuple(
                FrameArg(name, "Object", value, name in nullable_args) for name, value in args
            ),
            method_nullable=method_nullable,
            declared_throws=tuple(throws),
            wrap_enabled=wrap,
        )

    return build


@pytest.fixture
def io_failure() -> ExcValue:
    return ExcValue("java.io.IOException", ("disk full",))
