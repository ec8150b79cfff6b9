"""Flat fact tables extracted from parsed MiniJ units.

Rules never look at syntax trees; they consume the call, assignment and throw
facts produced here. Receiver types are resolved from declared types only:
locals, parameters, fields, then type names (single imports, same package,
on-demand imports, qualified names). Anything else degrades to an unresolved
fact instead of failing.
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from models import RuleConfig
from syntax_tree import (
    Assign,
    Binary,
    Block,
    Call,
    ClassLiteral,
    CompilationUnit,
    Expr,
    ExprStmt,
    FieldAccess,
    FieldDecl,
    For,
    If,
    LocalVar,
    MethodDecl,
    Name,
    New,
    Return,
    SourceLocation,
    Stmt,
    This,
    Throw,
    Try,
    TypeDecl,
    Unary,
)

logger = logging.getLogger(__name__)

CONSTRUCTOR_NAME = "<init>"

_GENERIC_ARGS = re.compile(r"<.*>")
_FOR_EACH_VARIABLE = re.compile(r"^(?:final\s+)?([\w.]+(?:<.*>)?(?:\[\])*)\s+(\w+)\s*[:=]")


class ReceiverKind(str, Enum):
    THIS = "this"
    SIMPLE_NAME = "simple_name"
    FIELD_OF_THIS = "field_of_this"
    NEW_EXPR = "new_expr"
    STATIC_TYPE = "static_type"
    CALL_RESULT = "call_result"
    UNRESOLVED = "unresolved"


class TargetKind(str, Enum):
    OWN_FIELD = "own_field"
    LOCAL = "local"
    OTHER = "other"


class ThrowForm(str, Enum):
    CONSTRUCTOR = "constructor"
    HELPER = "helper"


@dataclass(frozen=True)
class TypeInfo:
    """A corpus type with its declaring package"""

    qname: str
    package: str
    decl: TypeDecl
    file: str


@dataclass(frozen=True)
class CallerContext:
    """The method a fact was extracted from"""

    package: str
    type_name: str
    method_name: str
    method_is_mutator: bool
    method_is_constructor: bool

    @property
    def type_qname(self) -> str:
        return f"{self.package}.{self.type_name}"


@dataclass(frozen=True)
class CallFact:
    caller: CallerContext
    receiver_kind: ReceiverKind
    receiver_name: Optional[str]
    callee_type_qname: Optional[str]
    callee_method_name: str
    arg_count: int
    location: SourceLocation


@dataclass(frozen=True)
class AssignFact:
    enclosing: CallerContext
    target_kind: TargetKind
    field_name: Optional[str]
    location: SourceLocation


@dataclass(frozen=True)
class ThrowFact:
    exc_type_qname: str
    form: ThrowForm
    helper_name: Optional[str]
    message_arg_count: int  # Leading class literal of the helper form excluded
    enclosing_throws: Tuple[str, ...]
    enclosing_method: str
    location: SourceLocation


@dataclass
class Facts:
    """Everything the rules know about a corpus"""

    type_index: Dict[str, TypeInfo] = field(default_factory=dict)
    call_facts: List[CallFact] = field(default_factory=list)
    assign_facts: List[AssignFact] = field(default_factory=list)
    throw_facts: List[ThrowFact] = field(default_factory=list)
    templates: Dict[str, str] = field(default_factory=dict)
    hierarchy: Dict[str, str] = field(default_factory=dict)  # type qname -> extends qname

    def supertypes(self, qname: str) -> Iterator[str]:
        """Yield qname and its transitive supertypes within the corpus"""
        seen: Set[str] = set()
        current: Optional[str] = qname
        while current is not None and current not in seen:
            seen.add(current)
            yield current
            current = self.hierarchy.get(current)

    def is_subtype(self, qname: str, bases: Iterable[str]) -> bool:
        base_set = set(bases)
        return any(ancestor in base_set for ancestor in self.supertypes(qname))


def base_type_name(type_text: str) -> str:
    """`java.util.List<String>[]` -> `java.util.List`"""
    return _GENERIC_ARGS.sub("", type_text).replace("[]", "").strip()


class TypeResolver:
    """Resolves type names the way one compilation unit sees them"""

    def __init__(self, unit: CompilationUnit, known: Set[str]):
        self.package = unit.package_name
        self.known = known
        self.single: Dict[str, str] = {}
        self.on_demand: List[str] = []
        self.static_members: Dict[str, str] = {}
        self.static_on_demand: List[str] = []

        for imp in unit.imports:
            if imp.is_static:
                if imp.is_wildcard:
                    self.static_on_demand.append(imp.qname)
                elif "." in imp.qname:
                    owner, _, member = imp.qname.rpartition(".")
                    self.static_members.setdefault(member, owner)
            elif imp.is_wildcard:
                self.on_demand.append(imp.qname)
            else:
                self.single.setdefault(imp.qname.rsplit(".", 1)[-1], imp.qname)

    def lookup(self, name: str) -> Optional[str]:
        """Resolve a type name used in an expression; only names known to exist resolve"""
        if "." in name:
            if name in self.known or name in self.single.values():
                return name
            return None
        if name in self.single:
            return self.single[name]
        same_package = f"{self.package}.{name}"
        if same_package in self.known:
            return same_package
        for package in self.on_demand:
            candidate = f"{package}.{name}"
            if candidate in self.known:
                return candidate
        return None

    def resolve(self, type_text: str) -> Optional[str]:
        """Resolve a declared type; qualified names outside the corpus are taken as written"""
        name = base_type_name(type_text)
        if not name:
            return None
        resolved = self.lookup(name)
        if resolved is None and "." in name:
            return name
        return resolved

    def resolve_or_keep(self, type_text: str) -> str:
        return self.resolve(type_text) or base_type_name(type_text)

    def static_owner(self, member: str) -> Optional[str]:
        if member in self.static_members:
            return self.static_members[member]
        if self.static_on_demand:
            return self.static_on_demand[0]
        return None


class _Scope:
    """Block-structured local variable scopes of one method"""

    def __init__(self, params: Dict[str, str]):
        self.frames: List[Dict[str, str]] = [dict(params)]

    def push(self):
        self.frames.append({})

    def pop(self):
        self.frames.pop()

    def declare(self, name: str, type_text: str):
        self.frames[-1][name] = type_text

    def lookup(self, name: str) -> Optional[str]:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        return None


def _qualified_text(expr: Expr) -> Optional[str]:
    if isinstance(expr, Name):
        return expr.identifier
    if isinstance(expr, FieldAccess):
        receiver = _qualified_text(expr.receiver)
        return None if receiver is None else f"{receiver}.{expr.name}"
    return None


class _UnitExtractor:
    """Walks one compilation unit in source order and collects its facts"""

    def __init__(self, unit: CompilationUnit, resolver: TypeResolver, cfg: RuleConfig):
        self.unit = unit
        self.resolver = resolver
        self.cfg = cfg
        self.call_facts: List[CallFact] = []
        self.assign_facts: List[AssignFact] = []
        self.throw_facts: List[ThrowFact] = []

        # Per-member state
        self.decl: Optional[TypeDecl] = None
        self.fields: Dict[str, str] = {}
        self.method_names: Set[str] = set()
        self.context: Optional[CallerContext] = None
        self.throws: Tuple[str, ...] = ()
        self.scope = _Scope({})

    def run(self):
        for decl in self.unit.types:
            self.decl = decl
            self.fields = {f.name: f.type_text for f in decl.fields}
            self.method_names = {m.name for m in decl.methods}
            members: List = sorted(
                list(decl.fields) + list(decl.methods),
                key=lambda member: (member.location.line, member.location.column),
            )
            for member in members:
                if isinstance(member, FieldDecl):
                    self.field_initializer(member)
                else:
                    self.method(member)

    def field_initializer(self, decl: FieldDecl):
        if decl.init is None:
            return
        self.enter(CONSTRUCTOR_NAME, is_constructor=True, throws=(), params={})
        self.expr(decl.init)

    def method(self, method: MethodDecl):
        if method.body is None:
            return
        params = {p.name: p.type_text for p in method.params}
        throws = tuple(self.resolver.resolve_or_keep(t) for t in method.throws_list)
        self.enter(method.name, method.is_constructor, throws, params)
        for stmt in method.body:
            self.stmt(stmt)

    def enter(self, method_name: str, is_constructor: bool, throws, params: Dict[str, str]):
        assert self.decl is not None
        self.context = CallerContext(
            package=self.unit.package_name,
            type_name=self.decl.name,
            method_name=method_name,
            method_is_mutator=not is_constructor and self.cfg.is_mutator_name(method_name),
            method_is_constructor=is_constructor,
        )
        self.throws = throws
        self.scope = _Scope(params)

    # Statements

    def block(self, stmts: Sequence[Stmt]):
        self.scope.push()
        for stmt in stmts:
            self.stmt(stmt)
        self.scope.pop()

    def stmt(self, stmt: Stmt):
        if isinstance(stmt, Block):
            self.block(stmt.stmts)
        elif isinstance(stmt, LocalVar):
            if stmt.init is not None:
                self.expr(stmt.init)
            self.scope.declare(stmt.name, stmt.type_text)
        elif isinstance(stmt, Assign):
            self.assignment(stmt)
        elif isinstance(stmt, ExprStmt):
            if isinstance(stmt.expr, Call):
                self.helper_throw(stmt.expr, stmt.expr.location)
            self.expr(stmt.expr)
        elif isinstance(stmt, Throw):
            self.throw(stmt)
            self.expr(stmt.expr)
        elif isinstance(stmt, Return):
            if stmt.expr is not None:
                self.expr(stmt.expr)
        elif isinstance(stmt, If):
            self.expr(stmt.cond)
            self.nested(stmt.then)
            if stmt.else_ is not None:
                self.nested(stmt.else_)
        elif isinstance(stmt, For):
            self.scope.push()
            loop_variable = _FOR_EACH_VARIABLE.match(stmt.header_raw)
            if loop_variable:
                self.scope.declare(loop_variable.group(2), loop_variable.group(1))
            self.nested(stmt.body)
            self.scope.pop()
        elif isinstance(stmt, Try):
            self.block(stmt.body.stmts)
            for clause in stmt.catches:
                self.scope.push()
                self.scope.declare(clause.var_name, clause.exc_type_text)
                self.block(clause.body.stmts)
                self.scope.pop()

    def nested(self, stmt: Stmt):
        # A single statement branch gets its own scope, like a block
        self.scope.push()
        self.stmt(stmt)
        self.scope.pop()

    def assignment(self, assign: Assign):
        assert self.context is not None
        lvalue = assign.lvalue
        kind, field_name = TargetKind.OTHER, None
        if isinstance(lvalue, FieldAccess) and isinstance(lvalue.receiver, This):
            kind, field_name = TargetKind.OWN_FIELD, lvalue.name
        elif isinstance(lvalue, Name):
            if self.scope.lookup(lvalue.identifier) is not None:
                kind = TargetKind.LOCAL
            elif lvalue.identifier in self.fields:
                kind, field_name = TargetKind.OWN_FIELD, lvalue.identifier

        self.assign_facts.append(AssignFact(self.context, kind, field_name, assign.location))
        self.expr(lvalue)
        self.expr(assign.rhs)

    def throw(self, stmt: Throw):
        expr = stmt.expr
        if isinstance(expr, New):
            self.throw_facts.append(
                ThrowFact(
                    exc_type_qname=self.resolver.resolve_or_keep(expr.type_text),
                    form=ThrowForm.CONSTRUCTOR,
                    helper_name=None,
                    message_arg_count=len(expr.args),
                    enclosing_throws=self.throws,
                    enclosing_method=self.context.method_name if self.context else "",
                    location=stmt.location,
                )
            )
        else:
            self.helper_throw(expr, stmt.location)

    def helper_throw(self, call: Call, location: SourceLocation):
        """`helper(X.class, ...)` with a configured helper name creates and throws an X"""
        if call.method_name not in self.cfg.throw_helper_names:
            return
        if not call.args or not isinstance(call.args[0], ClassLiteral):
            return
        self.throw_facts.append(
            ThrowFact(
                exc_type_qname=self.resolver.resolve_or_keep(call.args[0].type_text),
                form=ThrowForm.HELPER,
                helper_name=call.method_name,
                message_arg_count=len(call.args) - 1,
                enclosing_throws=self.throws,
                enclosing_method=self.context.method_name if self.context else "",
                location=location,
            )
        )

    # Expressions

    def expr(self, expr: Expr):
        if isinstance(expr, Assign):
            self.assignment(expr)
        elif isinstance(expr, Call):
            self.call(expr)
            if expr.receiver is not None:
                self.expr(expr.receiver)
            for arg in expr.args:
                self.expr(arg)
        elif isinstance(expr, New):
            self.constructor_call(expr)
            for arg in expr.args:
                self.expr(arg)
        elif isinstance(expr, FieldAccess):
            self.expr(expr.receiver)
        elif isinstance(expr, Unary):
            self.expr(expr.operand)
        elif isinstance(expr, Binary):
            self.expr(expr.left)
            if expr.op != "instanceof":
                self.expr(expr.right)

    def call(self, call: Call):
        assert self.context is not None
        kind, name, callee = self.receiver(call)
        self.call_facts.append(
            CallFact(
                caller=self.context,
                receiver_kind=kind,
                receiver_name=name,
                callee_type_qname=callee,
                callee_method_name=call.method_name,
                arg_count=len(call.args),
                location=call.location,
            )
        )

    def constructor_call(self, new: New):
        assert self.context is not None
        self.call_facts.append(
            CallFact(
                caller=self.context,
                receiver_kind=ReceiverKind.NEW_EXPR,
                receiver_name=None,
                callee_type_qname=self.resolver.resolve(new.type_text),
                callee_method_name=CONSTRUCTOR_NAME,
                arg_count=len(new.args),
                location=new.location,
            )
        )

    def receiver(self, call: Call) -> Tuple[ReceiverKind, Optional[str], Optional[str]]:
        """Classify the receiver of a call: (kind, receiver name, callee type qname)"""
        assert self.context is not None
        own_type = self.context.type_qname
        receiver = call.receiver

        if receiver is None:
            # `super(...)` in a constructor is a call on this
            if call.method_name not in self.method_names and call.method_name != "super":
                owner = self.resolver.static_owner(call.method_name)
                if owner is not None:
                    return ReceiverKind.STATIC_TYPE, None, owner
            return ReceiverKind.THIS, None, own_type
        if isinstance(receiver, This):
            return ReceiverKind.THIS, None, own_type
        if isinstance(receiver, New):
            return ReceiverKind.NEW_EXPR, None, self.resolver.resolve(receiver.type_text)
        if isinstance(receiver, Call):
            return ReceiverKind.CALL_RESULT, None, None

        if isinstance(receiver, Name):
            identifier = receiver.identifier
            declared = self.scope.lookup(identifier)
            if declared is not None:
                return ReceiverKind.SIMPLE_NAME, identifier, self.resolver.resolve(declared)
            if identifier in self.fields:
                field_type = self.resolver.resolve(self.fields[identifier])
                return ReceiverKind.FIELD_OF_THIS, identifier, field_type
            static_type = self.resolver.lookup(identifier)
            if static_type is not None:
                return ReceiverKind.STATIC_TYPE, None, static_type
            return ReceiverKind.UNRESOLVED, identifier, None

        if isinstance(receiver, FieldAccess):
            if isinstance(receiver.receiver, This):
                field_type = self.fields.get(receiver.name)
                resolved = self.resolver.resolve(field_type) if field_type else None
                return ReceiverKind.FIELD_OF_THIS, receiver.name, resolved
            qualified = _qualified_text(receiver)
            if qualified is not None:
                static_type = self.resolver.lookup(qualified)
                if static_type is not None:
                    return ReceiverKind.STATIC_TYPE, None, static_type
            return ReceiverKind.UNRESOLVED, receiver.name, None

        return ReceiverKind.UNRESOLVED, None, None


def build_type_index(units: Sequence[CompilationUnit]) -> Dict[str, TypeInfo]:
    """Index corpus types by qualified name and by simple name (first declaration wins)"""
    index: Dict[str, TypeInfo] = {}
    for unit in units:
        for decl in unit.types:
            info = TypeInfo(f"{unit.package_name}.{decl.name}", unit.package_name, decl, unit.file)
            if info.qname in index:
                logger.warning("Type %s declared more than once; keeping the first", info.qname)
                continue
            index[info.qname] = info
            index.setdefault(decl.name, info)
    return index


def extract_facts(units: Sequence[CompilationUnit], cfg: Optional[RuleConfig] = None) -> Facts:
    """
    Extract call, assignment and throw facts from parsed units.

    Args:
        units: Successfully parsed compilation units, in a deterministic order
        cfg: Rule configuration supplying mutator patterns, throw helper names
             and exception base types (defaults when omitted)

    Returns:
        Facts over the whole corpus; per file, facts keep source order
    """
    cfg = cfg or RuleConfig()
    facts = Facts(type_index=build_type_index(units))
    known = {info.qname for info in facts.type_index.values()}

    resolvers = {}
    for unit in units:
        resolver = TypeResolver(unit, known)
        resolvers[id(unit)] = resolver
        for decl in unit.types:
            if decl.extends_name:
                qname = f"{unit.package_name}.{decl.name}"
                facts.hierarchy.setdefault(qname, resolver.resolve_or_keep(decl.extends_name))

    for unit in units:
        extractor = _UnitExtractor(unit, resolvers[id(unit)], cfg)
        extractor.run()
        facts.call_facts.extend(extractor.call_facts)
        facts.assign_facts.extend(extractor.assign_facts)
        facts.throw_facts.extend(extractor.throw_facts)

    exception_bases = cfg.exc_base_types | cfg.failure_base_types
    for info in facts.type_index.values():
        if info.decl.doc_template is None or info.qname in facts.templates:
            continue
        if facts.is_subtype(info.qname, exception_bases):
            facts.templates[info.qname] = info.decl.doc_template

    logger.debug(
        "Extracted %d call, %d assign and %d throw facts from %d units",
        len(facts.call_facts),
        len(facts.assign_facts),
        len(facts.throw_facts),
        len(units),
    )
    return facts
