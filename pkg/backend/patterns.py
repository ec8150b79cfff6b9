"""Qualified-name and signature patterns with capture variables.

Pattern syntax (segments separated by `.`):

    literal   matches exactly that segment
    *         matches exactly one segment
    {v}       matches exactly one segment and binds it to capture variable v
    ..        matches zero or more segments

A variable bound once must match the same segment everywhere it appears,
including across the patterns of one directive. Constraints over the bound
variables (equal, not equal, in set, not in set) decide whether a directive
fires. The `{v}` capture syntax is convlint's own; AspectJ has no equivalent.
"""

import re
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from exceptions import PatternSyntaxError, UnboundVariable

_CAPTURE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
_TOKENS = re.compile(r"\.\.|\.|[^.]+")


@dataclass(frozen=True)
class LiteralSegment:
    segment: str

    def __str__(self) -> str:
        return self.segment


@dataclass(frozen=True)
class AnySegment:
    def __str__(self) -> str:
        return "*"


@dataclass(frozen=True)
class CaptureSegment:
    var: str

    def __str__(self) -> str:
        return "{" + self.var + "}"


@dataclass(frozen=True)
class EllipsisSegment:
    def __str__(self) -> str:
        return ".."


Element = Union[LiteralSegment, AnySegment, CaptureSegment, EllipsisSegment]
MemberElement = Union[LiteralSegment, AnySegment, CaptureSegment]

ANY = AnySegment()
ELLIPSIS = EllipsisSegment()


@dataclass(frozen=True, order=True)
class Binding:
    """Capture variable assignments, stored sorted by variable name"""

    assignments: Tuple[Tuple[str, str], ...] = ()

    @classmethod
    def of(cls, mapping: Optional[Mapping[str, str]] = None) -> "Binding":
        return cls(tuple(sorted((mapping or {}).items())))

    def get(self, var: str) -> Optional[str]:
        for name, value in self.assignments:
            if name == var:
                return value
        return None

    def __contains__(self, var: str) -> bool:
        return self.get(var) is not None

    def extend(self, var: str, value: str) -> "Binding":
        return Binding(tuple(sorted(self.assignments + ((var, value),))))

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}={v}" for k, v in self.assignments) + "}"


EMPTY_BINDING = Binding()


@dataclass(frozen=True)
class QNamePattern:
    elements: Tuple[Element, ...]

    def __post_init__(self):
        if not self.elements:
            raise PatternSyntaxError("", "a pattern needs at least one element")
        for left, right in zip(self.elements, self.elements[1:]):
            if isinstance(left, EllipsisSegment) and isinstance(right, EllipsisSegment):
                raise PatternSyntaxError(str(self), "adjacent '..'")

    @property
    def variables(self) -> FrozenSet[str]:
        return frozenset(e.var for e in self.elements if isinstance(e, CaptureSegment))

    def __str__(self) -> str:
        text = ""
        for index, element in enumerate(self.elements):
            if isinstance(element, EllipsisSegment):
                text += ".."
            else:
                previous = self.elements[index - 1] if index else None
                if index and not isinstance(previous, EllipsisSegment):
                    text += "."
                text += str(element)
        return text


@dataclass(frozen=True)
class SignaturePattern:
    """A call pattern `<type pattern>.<member>(..)`; only the `(..)` argument form exists"""

    type_pattern: QNamePattern
    member_pattern: MemberElement = ANY

    @property
    def variables(self) -> FrozenSet[str]:
        member = self.member_pattern
        extra = {member.var} if isinstance(member, CaptureSegment) else set()
        return self.type_pattern.variables | frozenset(extra)

    def __str__(self) -> str:
        return f"{self.type_pattern}.{self.member_pattern}(..)"


def _parse_segment(text: str, segment: str) -> MemberElement:
    if segment == "*":
        return ANY
    capture = _CAPTURE.fullmatch(segment)
    if capture:
        return CaptureSegment(capture.group(1))
    if "{" in segment or "}" in segment:
        raise PatternSyntaxError(text, f"malformed capture '{segment}'")
    if "*" in segment:
        raise PatternSyntaxError(text, f"'*' must stand for a whole segment, found '{segment}'")
    return LiteralSegment(segment)


def parse_qname_pattern(text: str) -> QNamePattern:
    """Parse a dotted name pattern such as `fb6.{c}..*`"""
    if not text:
        raise PatternSyntaxError(text, "empty pattern")

    elements: List[Element] = []
    previous = "start"  # start | segment | dot | ellipsis
    for token in _TOKENS.findall(text):
        if token == "..":
            if previous == "ellipsis":
                raise PatternSyntaxError(text, "adjacent '..'")
            if previous == "dot":
                raise PatternSyntaxError(text, "empty segment")
            elements.append(ELLIPSIS)
            previous = "ellipsis"
        elif token == ".":
            if previous != "segment":
                raise PatternSyntaxError(text, "empty segment")
            previous = "dot"
        else:
            elements.append(_parse_segment(text, token))
            previous = "segment"

    if previous == "dot":
        raise PatternSyntaxError(text, "empty segment")
    return QNamePattern(tuple(elements))


def parse_signature_pattern(text: str) -> SignaturePattern:
    """Parse `[* ]<type pattern>.<member>(..)`, e.g. `* fb6.*.db.*.*(..)`"""
    body = text.strip()
    if body.startswith("* "):
        body = body[2:].strip()
    if not body.endswith("(..)"):
        raise PatternSyntaxError(text, "signature patterns must end with '(..)'")
    body = body[: -len("(..)")]

    # The member is the last segment; the separator before it is '.' or '..'
    cut = body.rfind(".")
    if cut <= 0:
        raise PatternSyntaxError(text, "missing type pattern")
    member_text = body[cut + 1 :]
    type_text = body[:cut]
    if type_text.endswith("."):
        # `fb6..m(..)`: the '..' belongs to the type pattern
        type_text = type_text + "."
    if not member_text:
        raise PatternSyntaxError(text, "missing member pattern")
    return SignaturePattern(parse_qname_pattern(type_text), _parse_segment(text, member_text))


def _bind(element: MemberElement, segment: str, binding: Binding) -> Optional[Binding]:
    """Match one single-segment element, returning the (possibly extended) binding"""
    if isinstance(element, LiteralSegment):
        return binding if element.segment == segment else None
    if isinstance(element, AnySegment):
        return binding
    bound = binding.get(element.var)
    if bound is None:
        return binding.extend(element.var, segment)
    return binding if bound == segment else None


def _match(
    elements: Sequence[Element], segments: Sequence[str], binding: Binding, out: set
) -> None:
    if not elements:
        if not segments:
            out.add(binding)
        return

    head, rest = elements[0], elements[1:]
    if isinstance(head, EllipsisSegment):
        for skip in range(len(segments) + 1):
            _match(rest, segments[skip:], binding, out)
        return

    if not segments:
        return
    extended = _bind(head, segments[0], binding)
    if extended is not None:
        _match(rest, segments[1:], extended, out)


def _canonical(bindings: Iterable[Binding]) -> Tuple[Binding, ...]:
    return tuple(sorted(set(bindings)))


def match_qname(
    pattern: QNamePattern, name: str, seed: Binding = EMPTY_BINDING
) -> Tuple[Binding, ...]:
    """
    Every extension of `seed` under which `pattern` matches the whole dotted name.

    An empty result means no match. Results are deduplicated and sorted.
    """
    segments = name.split(".")
    out: set = set()
    _match(pattern.elements, segments, seed, out)
    return _canonical(out)


def match_signature(
    pattern: SignaturePattern,
    callee_type_qname: str,
    callee_method_name: str,
    seed: Binding = EMPTY_BINDING,
) -> Tuple[Binding, ...]:
    """Bindings of the type pattern against the callee type, composed with the member pattern"""
    results = []
    for binding in match_qname(pattern.type_pattern, callee_type_qname, seed):
        extended = _bind(pattern.member_pattern, callee_method_name, binding)
        if extended is not None:
            results.append(extended)
    return _canonical(results)


# Constraints


def _lookup(binding: Binding, var: str) -> str:
    value = binding.get(var)
    if value is None:
        raise UnboundVariable(var)
    return value


@dataclass(frozen=True)
class Equal:
    v1: str
    v2: str

    def holds(self, b: Binding) -> bool:
        return _lookup(b, self.v1) == _lookup(b, self.v2)


@dataclass(frozen=True)
class NotEqual:
    v1: str
    v2: str

    def holds(self, b: Binding) -> bool:
        return _lookup(b, self.v1) != _lookup(b, self.v2)


@dataclass(frozen=True)
class InSet:
    v: str
    values: FrozenSet[str]

    def holds(self, b: Binding) -> bool:
        return _lookup(b, self.v) in self.values


@dataclass(frozen=True)
class NotInSet:
    v: str
    values: FrozenSet[str]

    def holds(self, b: Binding) -> bool:
        return _lookup(b, self.v) not in self.values


Constraint = Union[Equal, NotEqual, InSet, NotInSet]


def satisfies(b: Binding, constraints: Sequence[Constraint]) -> bool:
    """Conjunction of all constraints under b; UnboundVariable if one is not bound"""
    # Every constraint is evaluated: an unbound variable raises even after a false one
    results = [constraint.holds(b) for constraint in constraints]
    return all(results)


@dataclass(frozen=True)
class CallDirective:
    """
    A "declare error" over calls: fires iff some combined binding of the
    `within` pattern (matched against the caller type) and the `call` pattern
    (matched against the callee) satisfies all constraints.
    """

    within: QNamePattern
    call: SignaturePattern
    constraints: Tuple[Constraint, ...] = ()

    def witness(
        self, caller_qname: str, callee_type_qname: str, callee_method_name: str
    ) -> Optional[Binding]:
        """The first satisfying binding in canonical order, or None"""
        for caller_binding in match_qname(self.within, caller_qname):
            for binding in match_signature(
                self.call, callee_type_qname, callee_method_name, caller_binding
            ):
                if satisfies(binding, self.constraints):
                    return binding
        return None
