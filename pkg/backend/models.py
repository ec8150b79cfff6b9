from enum import Enum
from fnmatch import fnmatchcase
from typing import Dict, FrozenSet, List, Optional

from diagnostics import CallTrace, ExcValue, Frame, FrameArg
from pydantic import BaseModel, ConfigDict, Field, RootModel, field_validator, model_validator
from syntax_tree import SourceLocation


class Severity(str, Enum):
    """Severity of a rule; OFF drops the rule's findings"""

    ERROR = "error"
    WARNING = "warning"
    OFF = "off"


def _is_segment(text: str) -> bool:
    return text.isidentifier()


class RuleConfig(BaseModel):
    """Rule configuration, usually loaded from a JSON file"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    root_package: str = "fb6"  # First package segment of every layered package
    layers: List[str] = ["ui", "lg", "db"]  # Top to bottom
    service_components: FrozenSet[str] = frozenset({"service"})
    mutable_suffix: str = "Mut"
    mutator_method_patterns: List[str] = ["*Mut", "set*"]
    exc_base_types: FrozenSet[str] = frozenset({"multex.Exc"})
    failure_base_types: FrozenSet[str] = frozenset({"multex.Failure"})
    throw_helper_names: FrozenSet[str] = frozenset({"throwNew", "create"})
    severities: Dict[str, Severity] = {}

    @field_validator("root_package")
    @classmethod
    def _check_root_package(cls, value: str) -> str:
        if not _is_segment(value):
            raise ValueError("must be a single package segment")
        return value

    @field_validator("layers")
    @classmethod
    def _check_layers(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("must name at least one layer")
        if len(set(value)) != len(value):
            raise ValueError("must not contain duplicates")
        for layer in value:
            if not _is_segment(layer):
                raise ValueError(f"'{layer}' is not a package segment")
        return value

    @field_validator("mutable_suffix")
    @classmethod
    def _check_mutable_suffix(cls, value: str) -> str:
        if not value:
            raise ValueError("must not be empty")
        return value

    @field_validator("mutator_method_patterns")
    @classmethod
    def _check_mutator_patterns(cls, value: List[str]) -> List[str]:
        for pattern in value:
            core = pattern.strip("*")
            if not pattern or (core and not core.isidentifier()):
                raise ValueError(
                    f"'{pattern}' must be an identifier with an optional leading or trailing '*'"
                )
        return value

    def is_mutator_name(self, name: str) -> bool:
        return any(fnmatchcase(name, pattern) for pattern in self.mutator_method_patterns)

    def is_mutable_name(self, name: str) -> bool:
        return name.endswith(self.mutable_suffix)

    def severity_for(self, rule_id: str, default: Severity) -> Severity:
        return self.severities.get(rule_id, default)


class Finding(BaseModel):
    """A located, keyed, parameterized diagnostic produced by a rule"""

    model_config = ConfigDict(frozen=True)

    rule_id: str
    severity: Severity
    file: str
    line: int
    column: int
    message_key: str
    params: List[str] = []
    message: str

    @property
    def location(self) -> SourceLocation:
        return SourceLocation(self.file, self.line, self.column)

    def sort_key(self):
        return (self.file, self.line, self.column, self.rule_id)

    def format_text(self) -> str:
        location = f"{self.file}:{self.line}:{self.column}"
        return f"{location}: {self.severity.value} [{self.rule_id}] {self.message}"

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "file": self.file,
            "line": self.line,
            "col": self.column,
            "rule": self.rule_id,
            "severity": self.severity.value,
            "key": self.message_key,
            "params": list(self.params),
            "message": self.message,
        }


def _plural(count: int, word: str) -> str:
    return f"{count} {word}" if count == 1 else f"{count} {word}s"


class Report(BaseModel):
    """Findings in (file, line, column, rule_id) order"""

    findings: List[Finding] = []

    @classmethod
    def from_findings(cls, findings: List[Finding]) -> "Report":
        # Chained calls share the location of their first token; report each line once
        unique: Dict[str, Finding] = {}
        for finding in findings:
            unique.setdefault(finding.model_dump_json(), finding)
        return cls(findings=sorted(unique.values(), key=Finding.sort_key))

    @property
    def counts(self) -> Dict[Severity, int]:
        counts = {Severity.ERROR: 0, Severity.WARNING: 0}
        for finding in self.findings:
            counts[finding.severity] += 1
        return counts

    @property
    def has_errors(self) -> bool:
        return self.counts[Severity.ERROR] > 0

    def summary(self) -> str:
        if not self.findings:
            return "0 findings"
        counts = self.counts
        return (
            f"{_plural(len(self.findings), 'finding')} "
            f"({_plural(counts[Severity.ERROR], 'error')}, "
            f"{_plural(counts[Severity.WARNING], 'warning')})"
        )


# Trace file schema used by `convlint simulate`


def _render_scalar(value):
    """Trace values may be written as JSON scalars; they are kept as text"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return str(value)
    return value


class TraceArg(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str
    type_text: str = Field("", alias="type")
    value: Optional[str] = None  # JSON null is the NULL marker
    nullable: bool = False

    @field_validator("value", mode="before")
    @classmethod
    def _render_value(cls, value):
        return _render_scalar(value)


class TraceFrame(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    method: str
    sig: str
    args: List[TraceArg] = []
    throws: List[str] = []
    wrap: bool = False
    nullable: bool = False  # The method may return null
    returns_null: bool = Field(False, alias="returnsNull")

    def to_frame(self) -> Frame:
        return Frame(
            method_qname=self.method,
            simple_sig=self.sig,
            args=tuple(
                FrameArg(arg.name, arg.type_text, arg.value, arg.nullable) for arg in self.args
            ),
            method_nullable=self.nullable,
            declared_throws=tuple(self.throws),
            wrap_enabled=self.wrap,
        )


class RaisedValue(BaseModel):
    model_config = ConfigDict(extra="forbid")

    key: str
    params: List[str] = []
    cause: Optional["RaisedValue"] = None

    @field_validator("params", mode="before")
    @classmethod
    def _render_params(cls, value):
        if isinstance(value, list):
            return [_render_scalar(item) for item in value]
        return value

    def to_exc_value(self) -> ExcValue:
        cause = self.cause.to_exc_value() if self.cause is not None else None
        return ExcValue(self.key, tuple(self.params), cause)


class TraceFile(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    hierarchy: Dict[str, str] = {}
    frames: List[TraceFrame] = Field(min_length=1)
    raise_frame: int = Field(alias="raiseFrame")
    raised: RaisedValue

    @model_validator(mode="after")
    def _check_raise_frame(self) -> "TraceFile":
        if not 0 <= self.raise_frame < len(self.frames):
            raise ValueError(f"raiseFrame must lie in 0..{len(self.frames) - 1}")
        return self

    def to_call_trace(self) -> CallTrace:
        return CallTrace(
            frames=tuple(frame.to_frame() for frame in self.frames),
            raise_frame_index=self.raise_frame,
            raised=self.raised.to_exc_value(),
            hierarchy=dict(self.hierarchy),
        )


class CatalogFile(RootModel[Dict[str, str]]):
    """A flat key to template map, as read by `simulate --catalog`"""


class RuleDefinition(BaseModel):
    """Describes one rule id for `convlint rules`"""

    model_config = ConfigDict(frozen=True)

    rule_id: str
    title: str
    template: str
    default_severity: Severity
