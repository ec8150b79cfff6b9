"""Layout-normalizing MiniJ serializer.

`parse_unit(unparse(unit))` is structurally equal to `unit`. Binary, unary and
nested assignment expressions are always parenthesized, so the printed text
never relies on operator precedence. Modifiers and field doc comments are not
part of the tree and are not printed.
"""

from typing import List, Optional, Sequence

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
    For,
    If,
    Literal,
    LocalVar,
    MethodDecl,
    Name,
    New,
    Param,
    Return,
    Stmt,
    This,
    Throw,
    Try,
    TypeDecl,
    Unary,
)

INDENT = "    "


def unparse_expr(expr: Expr) -> str:
    if isinstance(expr, Name):
        return expr.identifier
    if isinstance(expr, This):
        return "this"
    if isinstance(expr, Literal):
        return expr.raw
    if isinstance(expr, ClassLiteral):
        return f"{expr.type_text}.class"
    if isinstance(expr, FieldAccess):
        return f"{unparse_expr(expr.receiver)}.{expr.name}"
    if isinstance(expr, New):
        return f"new {expr.type_text}({_args(expr.args)})"
    if isinstance(expr, Call):
        if expr.receiver is None:
            return f"{expr.method_name}({_args(expr.args)})"
        type_args = f"<{expr.type_args_raw}>" if expr.type_args_raw else ""
        return f"{unparse_expr(expr.receiver)}.{type_args}{expr.method_name}({_args(expr.args)})"
    if isinstance(expr, Unary):
        return f"({expr.op}{unparse_expr(expr.operand)})"
    if isinstance(expr, Binary):
        return f"({unparse_expr(expr.left)} {expr.op} {unparse_expr(expr.right)})"
    if isinstance(expr, Assign):
        return f"({unparse_expr(expr.lvalue)} = {unparse_expr(expr.rhs)})"
    raise TypeError(f"Unknown expression node {type(expr).__name__}")


def _args(args: Sequence[Expr]) -> str:
    return ", ".join(unparse_expr(arg) for arg in args)


def _nested(stmt: Stmt, depth: int) -> List[str]:
    return _stmt_lines(stmt, depth if isinstance(stmt, Block) else depth + 1)


def _stmt_lines(stmt: Stmt, depth: int) -> List[str]:
    pad = INDENT * depth
    if isinstance(stmt, Block):
        lines = [pad + "{"]
        for inner in stmt.stmts:
            lines.extend(_stmt_lines(inner, depth + 1))
        return lines + [pad + "}"]
    if isinstance(stmt, Assign):
        return [f"{pad}{unparse_expr(stmt.lvalue)} = {unparse_expr(stmt.rhs)};"]
    if isinstance(stmt, ExprStmt):
        return [f"{pad}{unparse_expr(stmt.expr)};"]
    if isinstance(stmt, Throw):
        return [f"{pad}throw {unparse_expr(stmt.expr)};"]
    if isinstance(stmt, Return):
        if stmt.expr is None:
            return [f"{pad}return;"]
        return [f"{pad}return {unparse_expr(stmt.expr)};"]
    if isinstance(stmt, LocalVar):
        init = "" if stmt.init is None else f" = {unparse_expr(stmt.init)}"
        return [f"{pad}{stmt.type_text} {stmt.name}{init};"]
    if isinstance(stmt, If):
        # The parser binds `else` to the nearest `if`, and so does this output
        lines = [f"{pad}if ({unparse_expr(stmt.cond)})"] + _nested(stmt.then, depth)
        if stmt.else_ is not None:
            lines.append(f"{pad}else")
            lines.extend(_nested(stmt.else_, depth))
        return lines
    if isinstance(stmt, For):
        return [f"{pad}for ({stmt.header_raw})"] + _nested(stmt.body, depth)
    if isinstance(stmt, Try):
        lines = [f"{pad}try"] + _stmt_lines(stmt.body, depth)
        for clause in stmt.catches:
            lines.append(f"{pad}catch ({clause.exc_type_text} {clause.var_name})")
            lines.extend(_stmt_lines(clause.body, depth))
        return lines
    raise TypeError(f"Unknown statement node {type(stmt).__name__}")


def _doc_lines(doc: Optional[str], pad: str) -> List[str]:
    if doc is None:
        return []
    # One gutter `*` per line: reading strips exactly one, even from a line starting with `*`
    body = [f"{pad} * {line}" if line else f"{pad} *" for line in doc.split("\n")]
    return [f"{pad}/**"] + body + [f"{pad} */"]


def _annotations(names: Sequence[str]) -> str:
    return "".join(f"@{name} " for name in names)


def _param(param: Param) -> str:
    dots = "..." if param.is_variadic else ""
    return f"{_annotations(param.annotations)}{param.type_text}{dots} {param.name}"


def _method_lines(method: MethodDecl) -> List[str]:
    head = _annotations(method.annotations)
    if method.type_params_raw is not None:
        head += f"<{method.type_params_raw}> "
    if not method.is_constructor:
        head += f"{method.return_type or 'void'} "
    head += f"{method.name}({', '.join(_param(p) for p in method.params)})"
    if method.throws_list:
        head += " throws " + ", ".join(method.throws_list)

    lines = _doc_lines(method.doc_template, INDENT)
    if method.body is None:
        return lines + [f"{INDENT}{head};"]
    return lines + [INDENT + head] + _stmt_lines(Block(method.body), 1)


def _type_lines(decl: TypeDecl) -> List[str]:
    head = f"{_annotations(decl.annotations)}class {decl.name}"
    if decl.extends_name:
        head += f" extends {decl.extends_name}"

    lines = _doc_lines(decl.doc_template, "") + [head + " {"]
    for field_decl in decl.fields:
        init = "" if field_decl.init is None else f" = {unparse_expr(field_decl.init)}"
        lines.append(f"{INDENT}{field_decl.type_text} {field_decl.name}{init};")
    for method in decl.methods:
        lines.extend(_method_lines(method))
    lines.append("}")
    return lines


def unparse(unit: CompilationUnit) -> str:
    """Serialize a compilation unit back to MiniJ source text"""
    lines = [f"package {unit.package_name};"]
    for imp in unit.imports:
        static = "static " if imp.is_static else ""
        wildcard = ".*" if imp.is_wildcard else ""
        lines.append(f"import {static}{imp.qname}{wildcard};")
    for decl in unit.types:
        lines.extend(_type_lines(decl))
    return "\n".join(lines) + "\n"
