"""Recursive descent parser for MiniJ.

Grammar summary (terminals quoted):

    unit      := 'package' qname ';' import* type*
    import    := 'import' ['static'] qname ['.' '*'] ';'
    type      := [DOC] ann* mod* 'class' IDENT ['extends' qname] '{' member* '}'
    member    := field | method
    method    := [DOC] ann* mod* ['<' typeargs '>'] (typeref | 'void')? IDENT
                 '(' params ')' ['throws' qname (',' qname)*] (block | ';')
    stmt      := block | localvar | if | for | try | return | throw | exprstmt
    expr      := or_expr ['=' expr]

A method without a return type is a constructor. `for` headers are kept as raw
text. Only names and field accesses can be assigned; an expression statement
that is an assignment is kept as an Assign statement.
"""

import dataclasses
from typing import Any, List, Optional, Tuple

from exceptions import MiniJSyntaxError
from lexer import CHAR, EOF, IDENT, NUMBER, STRING, Token, tokenize
from syntax_tree import (
    Assign,
    Binary,
    Block,
    Call,
    CatchClause,
    ClassLiteral,
    CompilationUnit,
    Expr,
    ExprStmt,
    FieldAccess,
    FieldDecl,
    For,
    If,
    Import,
    Literal,
    LocalVar,
    MethodDecl,
    Name,
    New,
    Param,
    Return,
    SourceLocation,
    Stmt,
    This,
    Throw,
    Try,
    TypeDecl,
    Unary,
)

MODIFIERS = ("public", "private", "protected", "static", "final", "abstract")
LITERAL_KEYWORDS = ("true", "false", "null")
# Deepest statement and expression tree accepted
MAX_NESTING = 200

_NO_SPACE_BEFORE = {".", ",", ")", "]", ">", "(", "[", "...", ";"}
_NO_SPACE_AFTER = {".", "(", "[", "<", "@", "!"}


def join_tokens(tokens: List[Token]) -> str:
    """Render a token run as normalized text (used for raw type arguments and for headers)"""
    parts: List[str] = []
    for index, token in enumerate(tokens):
        if index:
            previous = tokens[index - 1]
            glued = token.text in _NO_SPACE_BEFORE or previous.text in _NO_SPACE_AFTER
            if token.text == "<" and previous.kind == IDENT:
                glued = True
            if not glued:
                parts.append(" ")
        parts.append(token.text)
    return "".join(parts)


class Parser:
    """Parses the token stream of one file into a CompilationUnit"""

    def __init__(self, tokens: List[Token], file: str):
        self.tokens = tokens
        self.file = file
        self.pos = 0

    # Token stream helpers

    def peek(self, offset: int = 0) -> Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != EOF:
            self.pos += 1
        return token

    def location(self, token: Optional[Token] = None) -> SourceLocation:
        token = token or self.peek()
        return SourceLocation(self.file, token.line, token.column)

    def error(self, expected: str) -> MiniJSyntaxError:
        token = self.peek()
        return MiniJSyntaxError(self.location(token), expected, token.describe())

    def accept_op(self, text: str) -> bool:
        if self.peek().is_op(text):
            self.advance()
            return True
        return False

    def accept_keyword(self, text: str) -> bool:
        if self.peek().is_keyword(text):
            self.advance()
            return True
        return False

    def expect_op(self, text: str) -> Token:
        if not self.peek().is_op(text):
            raise self.error(f"'{text}'")
        return self.advance()

    def expect_keyword(self, text: str) -> Token:
        if not self.peek().is_keyword(text):
            raise self.error(f"'{text}'")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.peek().kind != IDENT:
            raise self.error("an identifier")
        return self.advance()

    # Declarations

    def parse_unit(self, line_count: int) -> CompilationUnit:
        self.expect_keyword("package")
        package_name = self.qname()
        self.expect_op(";")

        imports = []
        while self.peek().is_keyword("import"):
            imports.append(self.import_decl())

        types = []
        while self.peek().kind != EOF:
            types.append(self.type_decl())

        return CompilationUnit(
            package_name=package_name,
            imports=tuple(imports),
            types=tuple(types),
            file=self.file,
            line_count=line_count,
        )

    def qname(self) -> str:
        parts = [self.expect_ident().text]
        while self.peek().is_op(".") and self.peek(1).kind == IDENT:
            self.advance()
            parts.append(self.advance().text)
        return ".".join(parts)

    def import_decl(self) -> Import:
        self.expect_keyword("import")
        is_static = self.accept_keyword("static")
        name = self.qname()
        is_wildcard = False
        if self.accept_op("."):
            self.expect_op("*")
            is_wildcard = True
        self.expect_op(";")
        return Import(name, is_static, is_wildcard)

    def annotations(self) -> Tuple[str, ...]:
        names = []
        while self.accept_op("@"):
            names.append(self.expect_ident().text)
        return tuple(names)

    def modifiers(self) -> Tuple[str, ...]:
        found = []
        while self.peek().is_keyword(*MODIFIERS):
            found.append(self.advance().text)
        return tuple(found)

    def type_decl(self) -> TypeDecl:
        start = self.peek()
        annotations = self.annotations()
        self.modifiers()
        self.expect_keyword("class")
        name = self.expect_ident().text
        extends_name = self.qname() if self.accept_keyword("extends") else None

        self.expect_op("{")
        fields: List[FieldDecl] = []
        methods: List[MethodDecl] = []
        while not self.peek().is_op("}"):
            if self.peek().kind == EOF:
                raise self.error("'}'")
            member = self.member(name)
            if isinstance(member, FieldDecl):
                fields.append(member)
            else:
                methods.append(member)
        self.expect_op("}")

        return TypeDecl(
            name=name,
            doc_template=start.doc,
            extends_name=extends_name,
            annotations=annotations,
            fields=tuple(fields),
            methods=tuple(methods),
            location=self.location(start),
        )

    def member(self, type_name: str):
        start = self.peek()
        annotations = self.annotations()
        self.modifiers()

        type_params_raw = self.type_args() if self.peek().is_op("<") else None

        if self.peek().kind == IDENT and self.peek(1).is_op("("):
            name_token = self.advance()
            if name_token.text != type_name:
                raise MiniJSyntaxError(
                    self.location(name_token),
                    f"a return type or constructor '{type_name}'",
                    name_token.describe(),
                )
            return self.method_rest(start, name_token.text, True, annotations, type_params_raw)

        if self.accept_keyword("void"):
            name = self.expect_ident().text
            return self.method_rest(start, name, False, annotations, type_params_raw)

        type_text = self.typeref()
        name_token = self.expect_ident()
        if self.peek().is_op("(") or type_params_raw is not None:
            return self.method_rest(
                start, name_token.text, False, annotations, type_params_raw, type_text
            )

        init = self.expression() if self.accept_op("=") else None
        self.expect_op(";")
        return FieldDecl(name_token.text, type_text, init, self.location(name_token))

    def method_rest(
        self,
        start: Token,
        name: str,
        is_constructor: bool,
        annotations: Tuple[str, ...],
        type_params_raw: Optional[str],
        return_type: Optional[str] = None,
    ) -> MethodDecl:
        self.expect_op("(")
        params: List[Param] = []
        if not self.peek().is_op(")"):
            params.append(self.param())
            while self.accept_op(","):
                if params[-1].is_variadic:
                    raise self.error("')' after a variadic parameter")
                params.append(self.param())
        self.expect_op(")")

        throws_list = []
        if self.accept_keyword("throws"):
            throws_list.append(self.qname())
            while self.accept_op(","):
                throws_list.append(self.qname())

        body: Optional[Tuple[Stmt, ...]] = None
        if not self.accept_op(";"):
            body = self.block().stmts

        return MethodDecl(
            name=name,
            is_constructor=is_constructor,
            params=tuple(params),
            throws_list=tuple(throws_list),
            annotations=annotations,
            doc_template=start.doc,
            body=body,
            type_params_raw=type_params_raw,
            return_type=return_type,
            location=self.location(start),
        )

    def param(self) -> Param:
        annotations = list(self.annotations())
        self.accept_keyword("final")
        annotations.extend(self.annotations())
        type_text = self.typeref()
        is_variadic = self.accept_op("...")
        name = self.expect_ident().text
        return Param(name, type_text, is_variadic, tuple(annotations))

    def type_args(self) -> str:
        """Consume `< ... >` with nesting and return the raw text between the brackets"""
        self.expect_op("<")
        depth = 1
        collected: List[Token] = []
        while True:
            token = self.peek()
            if token.kind == EOF or token.is_op(";", "{", "}", "(", ")"):
                raise self.error("'>'")
            self.advance()
            if token.is_op("<"):
                depth += 1
            elif token.is_op(">"):
                depth -= 1
                if depth == 0:
                    break
            collected.append(token)
        if not collected:
            raise MiniJSyntaxError(self.location(token), "type arguments", "'>'")
        return join_tokens(collected)

    def typeref(self) -> str:
        text = self.qname()
        if self.peek().is_op("<"):
            text += "<" + self.type_args() + ">"
        while self.peek().is_op("[") and self.peek(1).is_op("]"):
            self.advance()
            self.advance()
            text += "[]"
        return text

    # Statements

    def block(self) -> Block:
        start = self.expect_op("{")
        stmts = []
        while not self.peek().is_op("}"):
            if self.peek().kind == EOF:
                raise self.error("'}'")
            stmts.append(self.statement())
        self.expect_op("}")
        return Block(tuple(stmts), self.location(start))

    def statement(self) -> Stmt:
        token = self.peek()
        if token.is_op("{"):
            return self.block()
        if token.is_keyword("final"):
            return self.local_var()
        if token.is_keyword("if"):
            return self.if_stmt()
        if token.is_keyword("for"):
            return self.for_stmt()
        if token.is_keyword("try"):
            return self.try_stmt()
        if token.is_keyword("return"):
            self.advance()
            expr = None if self.peek().is_op(";") else self.expression()
            self.expect_op(";")
            return Return(expr, self.location(token))
        if token.is_keyword("throw"):
            return self.throw_stmt()
        if token.kind == IDENT and self.looks_like_local_var():
            return self.local_var()
        return self.expression_statement()

    def looks_like_local_var(self) -> bool:
        """Speculatively read `typeref IDENT ('=' | ';')` and rewind"""
        saved = self.pos
        try:
            self.typeref()
            return self.peek().kind == IDENT and self.peek(1).is_op("=", ";")
        except MiniJSyntaxError:
            return False
        finally:
            self.pos = saved

    def local_var(self) -> LocalVar:
        start = self.peek()
        self.accept_keyword("final")
        type_text = self.typeref()
        name = self.expect_ident().text
        init = self.expression() if self.accept_op("=") else None
        self.expect_op(";")
        return LocalVar(name, type_text, init, self.location(start))

    def if_stmt(self) -> If:
        start = self.expect_keyword("if")
        self.expect_op("(")
        cond = self.expression()
        self.expect_op(")")
        then = self.statement()
        else_ = self.statement() if self.accept_keyword("else") else None
        return If(cond, then, else_, self.location(start))

    def for_stmt(self) -> For:
        start = self.expect_keyword("for")
        self.expect_op("(")
        depth = 1
        header: List[Token] = []
        while True:
            token = self.peek()
            if token.kind == EOF:
                raise self.error("')'")
            self.advance()
            if token.is_op("("):
                depth += 1
            elif token.is_op(")"):
                depth -= 1
                if depth == 0:
                    break
            header.append(token)
        body = self.statement()
        return For(join_tokens(header), body, self.location(start))

    def try_stmt(self) -> Try:
        start = self.expect_keyword("try")
        body = self.block()
        catches = []
        while self.peek().is_keyword("catch"):
            catch_token = self.advance()
            self.expect_op("(")
            self.accept_keyword("final")
            exc_type_text = self.typeref()
            var_name = self.expect_ident().text
            self.expect_op(")")
            catches.append(
                CatchClause(exc_type_text, var_name, self.block(), self.location(catch_token))
            )
        if not catches:
            raise self.error("'catch'")
        return Try(body, tuple(catches), self.location(start))

    def throw_stmt(self) -> Throw:
        start = self.expect_keyword("throw")
        expr_token = self.peek()
        expr = self.expression()
        if not isinstance(expr, (New, Call)):
            raise MiniJSyntaxError(
                self.location(expr_token), "a 'new' or call expression", expr_token.describe()
            )
        self.expect_op(";")
        return Throw(expr, self.location(start))

    def expression_statement(self) -> Stmt:
        start = self.peek()
        expr = self.expression()
        self.expect_op(";")
        if isinstance(expr, Assign):
            return expr
        return ExprStmt(expr, self.location(start))

    # Expressions

    def expression(self) -> Expr:
        start = self.peek()
        target = self.or_expr()
        if not self.peek().is_op("=") or not isinstance(target, (Name, FieldAccess)):
            return target
        self.advance()
        # Right associative: `a = b = c` assigns c to b, then b to a
        return Assign(target, self.expression(), self.location(start))

    def _binary_level(self, operators: Tuple[str, ...], operand) -> Expr:
        left = operand()
        while self.peek().is_op(*operators):
            op = self.advance().text
            right = operand()
            left = Binary(op, left, right, left.location)
        return left

    def or_expr(self) -> Expr:
        return self._binary_level(("||",), self.and_expr)

    def and_expr(self) -> Expr:
        return self._binary_level(("&&",), self.equality)

    def equality(self) -> Expr:
        return self._binary_level(("==", "!="), self.relational)

    def relational(self) -> Expr:
        left = self.additive()
        while True:
            if self.peek().is_op("<", ">", "<=", ">="):
                op = self.advance().text
                left = Binary(op, left, self.additive(), left.location)
            elif self.peek().is_keyword("instanceof"):
                self.advance()
                type_token = self.peek()
                type_name = Name(self.typeref(), self.location(type_token))
                left = Binary("instanceof", left, type_name, left.location)
            else:
                return left

    def additive(self) -> Expr:
        return self._binary_level(("+", "-"), self.unary)

    def unary(self) -> Expr:
        token = self.peek()
        if token.is_op("!", "-", "+"):
            self.advance()
            return Unary(token.text, self.unary(), self.location(token))
        return self.postfix()

    def call_args(self) -> Tuple[Expr, ...]:
        self.expect_op("(")
        args: List[Expr] = []
        if not self.peek().is_op(")"):
            args.append(self.expression())
            while self.accept_op(","):
                args.append(self.expression())
        self.expect_op(")")
        return tuple(args)

    def postfix(self) -> Expr:
        expr = self.primary()
        while self.peek().is_op("."):
            self.advance()
            type_args = self.type_args() if self.peek().is_op("<") else None
            if type_args is None and self.peek().is_keyword("class"):
                class_token = self.advance()
                type_text = _qualified_text(expr)
                if type_text is None:
                    raise MiniJSyntaxError(
                        self.location(class_token), "a type name before '.class'", "'class'"
                    )
                expr = ClassLiteral(type_text, expr.location)
                continue
            name = self.expect_ident().text
            if self.peek().is_op("("):
                expr = Call(expr, name, self.call_args(), type_args, expr.location)
            elif type_args is not None:
                raise self.error("'('")
            else:
                expr = FieldAccess(expr, name, expr.location)
        return expr

    def primary(self) -> Expr:
        token = self.peek()
        location = self.location(token)
        if token.kind in (NUMBER, STRING, CHAR) or token.is_keyword(*LITERAL_KEYWORDS):
            self.advance()
            return Literal(token.text, location)
        if token.is_keyword("this"):
            self.advance()
            return This(location)
        if token.is_keyword("new"):
            self.advance()
            type_text = self.typeref()
            return New(type_text, self.call_args(), location)
        if token.is_op("("):
            self.advance()
            inner = self.expression()
            self.expect_op(")")
            return inner
        if token.kind == IDENT:
            self.advance()
            if self.peek().is_op("("):
                return Call(None, token.text, self.call_args(), None, location)
            return Name(token.text, location)
        raise self.error("an expression")


def _qualified_text(expr: Expr) -> Optional[str]:
    """`a.b.C` written as nested names and field accesses, or None"""
    if isinstance(expr, Name):
        return expr.identifier
    if isinstance(expr, FieldAccess):
        receiver = _qualified_text(expr.receiver)
        return None if receiver is None else f"{receiver}.{expr.name}"
    return None


def _check_nesting(unit: CompilationUnit) -> None:
    """Reject trees nested deeper than MAX_NESTING; the tree walkers are recursive"""
    pending: List[Tuple[Any, int]] = [(unit, 0)]
    while pending:
        node, depth = pending.pop()
        if depth > MAX_NESTING:
            raise MiniJSyntaxError(
                node.location, f"at most {MAX_NESTING} levels of nesting", "more"
            )
        for item in dataclasses.fields(node):
            value = getattr(node, item.name)
            children = value if isinstance(value, tuple) else (value,)
            for child in children:
                if dataclasses.is_dataclass(child) and not isinstance(child, SourceLocation):
                    pending.append((child, depth + 1))


def parse_unit(source_text: str, file: str) -> CompilationUnit:
    """Parse one MiniJ file; raises MiniJSyntaxError at the first token outside the grammar"""
    tokens = tokenize(source_text, file)
    line_count = source_text.count("\n") + 1
    parser = Parser(tokens, file)
    try:
        unit = parser.parse_unit(line_count)
    except RecursionError:
        raise parser.error(f"at most {MAX_NESTING} levels of nesting") from None
    _check_nesting(unit)
    return unit
