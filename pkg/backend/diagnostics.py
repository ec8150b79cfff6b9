"""Diagnostics core: keyed, parameterized, chained exception values.

An exception value is a message key plus positional parameters plus an
optional cause. Messages are rendered from a catalog of templates with `{i}`
placeholders. The module also simulates the wrap-unspecified-exceptions policy
over a recorded call trace and implements the @Nullable argument/return contract.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

PLACEHOLDER = re.compile(r"\{(\d+)\}")

OPERATION_FAILURE = "multex.OperationFailure"
ARGUMENT_NULL_FAILURE = "ArgumentNullFailure"
RETURN_NULL_FAILURE = "ReturnNullFailure"

NULL_TEMPLATES: Dict[str, str] = {
    ARGUMENT_NULL_FAILURE: (
        'Argument "{0}" of executable "{1}" is null, although not annotated as @Nullable'
    ),
    RETURN_NULL_FAILURE: 'Result of executable "{0}" is null, although not annotated as @Nullable',
}


@dataclass(frozen=True)
class ExcValue:
    """Represents one exception: message key, message parameters and optional cause"""

    key: str
    params: Tuple[str, ...] = ()
    cause: Optional["ExcValue"] = None

    def __post_init__(self):
        # Accept any sequence for params, store an immutable tuple
        object.__setattr__(self, "params", tuple(self.params))

    def chain(self) -> Tuple["ExcValue", ...]:
        """Return the cause chain, outermost first"""
        elements = []
        current: Optional[ExcValue] = self
        while current is not None:
            elements.append(current)
            current = current.cause
        return tuple(elements)

    def innermost(self) -> "ExcValue":
        return self.chain()[-1]


@dataclass(frozen=True)
class MessageCatalog:
    """Maps message keys to templates with positional `{i}` placeholders"""

    entries: Mapping[str, str] = field(default_factory=dict)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def get(self, key: str) -> Optional[str]:
        return self.entries.get(key)

    def merged(self, other: Mapping[str, str]) -> "MessageCatalog":
        """Return a new catalog where entries of `other` override this one"""
        return MessageCatalog({**self.entries, **other})

    def keys(self) -> List[str]:
        return sorted(self.entries)


BUILTIN_CATALOG = MessageCatalog(NULL_TEMPLATES)


def placeholder_indices(template: str) -> List[int]:
    """All placeholder indices used by a template, in order of appearance"""
    return [int(m.group(1)) for m in PLACEHOLDER.finditer(template)]


def required_arity(template: str) -> int:
    """Number of positional parameters a template needs: highest index + 1, or 0"""
    indices = placeholder_indices(template)
    return max(indices) + 1 if indices else 0


def render_message(catalog: MessageCatalog, e: ExcValue) -> str:
    """
    Render the message of a single exception value.

    Placeholders with an index beyond the parameter list stay verbatim. Keys
    without a catalog entry render as `key[p0, p1, ...]`. Never fails.
    """
    template = catalog.get(e.key)
    if template is None:
        return f"{e.key}[{', '.join(e.params)}]"

    def substitute(match: "re.Match[str]") -> str:
        index = int(match.group(1))
        if index < len(e.params):
            return e.params[index]
        return match.group(0)

    return PLACEHOLDER.sub(substitute, template)


def render_chain(catalog: MessageCatalog, e: ExcValue) -> str:
    """Render a whole cause chain, one line per element, outermost first"""
    lines = []
    for position, element in enumerate(e.chain()):
        message = render_message(catalog, element)
        lines.append(message if position == 0 else f"Caused by: {message}")
    return "\n".join(lines)


# Call trace simulation


@dataclass(frozen=True)
class FrameArg:
    """An actual argument of a simulated frame; value None is the NULL marker"""

    name: str
    type_text: str
    value: Optional[str]
    nullable: bool = False

    @property
    def rendered(self) -> str:
        return "null" if self.value is None else self.value


@dataclass(frozen=True)
class Frame:
    """One simulated method execution on the call stack"""

    method_qname: str
    simple_sig: str
    args: Tuple[FrameArg, ...] = ()
    method_nullable: bool = False
    declared_throws: Tuple[str, ...] = ()
    wrap_enabled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "declared_throws", tuple(self.declared_throws))


@dataclass(frozen=True)
class CallTrace:
    """A simulated call stack (index 0 = outermost) and the exception raised in one frame"""

    frames: Tuple[Frame, ...]
    raise_frame_index: int
    raised: ExcValue
    hierarchy: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if not 0 <= self.raise_frame_index < len(self.frames):
            raise ValueError(
                f"raise frame index {self.raise_frame_index} outside 0..{len(self.frames) - 1}"
            )
        for key in self.hierarchy:
            list(_ancestors(key, self.hierarchy))  # Raises on a cycle


def _ancestors(key: str, hierarchy: Mapping[str, str]) -> Iterator[str]:
    """Yield key and its transitive parents; raises ValueError on a cycle"""
    seen = set()
    current: Optional[str] = key
    while current is not None:
        if current in seen:
            raise ValueError(f"Exception hierarchy contains a cycle through {current}")
        seen.add(current)
        yield current
        current = hierarchy.get(current)


def is_declared(key: str, declared: Sequence[str], hierarchy: Mapping[str, str]) -> bool:
    """True iff key is one of the declared keys or a transitive descendant of one"""
    declared_set = set(declared)
    return any(ancestor in declared_set for ancestor in _ancestors(key, hierarchy))


def wrap_in_operation_failure(frame: Frame, cause: ExcValue) -> ExcValue:
    """Wrap an exception leaving `frame`, capturing the frame's signature and argument values"""
    params = [frame.simple_sig] + [arg.rendered for arg in frame.args]
    return ExcValue(OPERATION_FAILURE, params, cause)


def propagate(trace: CallTrace) -> ExcValue:
    """
    Propagate the raised exception outwards through the trace.

    Walking from the raising frame to the outermost one, every wrap-enabled
    frame that does not declare the current exception wraps it into an
    OperationFailure. Wrappers are themselves wrapped again further out unless
    declared, so each such frame adds one chain element.
    """
    current = trace.raised
    for index in range(trace.raise_frame_index, -1, -1):
        frame = trace.frames[index]
        if frame.wrap_enabled and not is_declared(
            current.key, frame.declared_throws, trace.hierarchy
        ):
            current = wrap_in_operation_failure(frame, current)
    return current


# Null contract


def check_null_args(frame: Frame) -> List[ExcValue]:
    """One ArgumentNullFailure per NULL argument of a parameter not annotated @Nullable"""
    return [
        ExcValue(ARGUMENT_NULL_FAILURE, (arg.name, frame.simple_sig))
        for arg in frame.args
        if arg.value is None and not arg.nullable
    ]


def check_null_return(frame: Frame, returned_is_null: bool) -> Optional[ExcValue]:
    """A ReturnNullFailure if a method not annotated @Nullable returned null"""
    if returned_is_null and not frame.method_nullable:
        return ExcValue(RETURN_NULL_FAILURE, (frame.simple_sig,))
    return None
