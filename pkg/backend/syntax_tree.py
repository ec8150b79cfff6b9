"""Abstract syntax tree for MiniJ, the Java-like input language of convlint.

Nodes are frozen dataclasses. Every node carries a SourceLocation that is
excluded from equality, so two trees compare equal when they have the same
structure regardless of layout.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


@dataclass(frozen=True, order=True)
class SourceLocation:
    """A position inside a source file (1-based line and column)"""

    file: str
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"Invalid source position {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NO_LOCATION = SourceLocation("<none>", 1, 1)


def _loc():
    return field(default=NO_LOCATION, compare=False, repr=False)


# Expressions


@dataclass(frozen=True)
class Name:
    identifier: str
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class This:
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class FieldAccess:
    receiver: "Expr"
    name: str
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Call:
    receiver: Optional["Expr"]
    method_name: str
    args: Tuple["Expr", ...] = ()
    type_args_raw: Optional[str] = None
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class New:
    type_text: str
    args: Tuple["Expr", ...] = ()
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Literal:
    raw: str
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class ClassLiteral:
    type_text: str
    location: SourceLocation = _loc()


# Left-hand side of an assignment
AccessPath = Union[Name, FieldAccess]


@dataclass(frozen=True)
class Assign:
    """`lvalue = rhs`, either a statement of its own or nested as the value of another"""

    lvalue: AccessPath
    rhs: "Expr"
    location: SourceLocation = _loc()


Expr = Union[Name, This, FieldAccess, Call, New, Literal, Unary, Binary, ClassLiteral, Assign]


# Statements


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Throw:
    expr: Union[New, Call]
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Return:
    expr: Optional[Expr] = None
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    else_: Optional["Stmt"] = None
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class CatchClause:
    exc_type_text: str
    var_name: str
    body: "Block"
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Try:
    body: "Block"
    catches: Tuple[CatchClause, ...]
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class LocalVar:
    name: str
    type_text: str
    init: Optional[Expr] = None
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class For:
    header_raw: str
    body: "Stmt"
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class Block:
    stmts: Tuple["Stmt", ...] = ()
    location: SourceLocation = _loc()


Stmt = Union[Assign, ExprStmt, Throw, Return, If, Try, LocalVar, For, Block]


# Declarations


@dataclass(frozen=True)
class Import:
    qname: str
    is_static: bool = False
    is_wildcard: bool = False

    def __post_init__(self):
        if not self.qname:
            raise ValueError("Import name must not be empty")


@dataclass(frozen=True)
class Param:
    name: str
    type_text: str
    is_variadic: bool = False
    annotations: Tuple[str, ...] = ()


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type_text: str
    init: Optional[Expr] = None
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class MethodDecl:
    name: str
    is_constructor: bool
    params: Tuple[Param, ...] = ()
    throws_list: Tuple[str, ...] = ()
    annotations: Tuple[str, ...] = ()
    doc_template: Optional[str] = None
    body: Optional[Tuple[Stmt, ...]] = None  # None for abstract declarations
    type_params_raw: Optional[str] = None
    return_type: Optional[str] = None  # None for void methods and constructors
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class TypeDecl:
    name: str
    doc_template: Optional[str] = None
    extends_name: Optional[str] = None
    annotations: Tuple[str, ...] = ()
    fields: Tuple[FieldDecl, ...] = ()
    methods: Tuple[MethodDecl, ...] = ()
    location: SourceLocation = _loc()


@dataclass(frozen=True)
class CompilationUnit:
    package_name: str
    imports: Tuple[Import, ...] = ()
    types: Tuple[TypeDecl, ...] = ()
    file: str = field(default="", compare=False)
    line_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.package_name:
            raise ValueError("Compilation unit must declare a package")
