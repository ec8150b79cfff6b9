"""Tests for lexer.py, parser.py and printer.py - the MiniJ frontend"""

import sys
from pathlib import Path

import pytest

# Add backend directory to path
backend_dir = Path(__file__).parent.parent
sys.path.insert(0, str(backend_dir))

from exceptions import MiniJSyntaxError
from lexer import EOF, IDENT, KEYWORD, clean_doc, tokenize
from parser import MAX_NESTING, parse_unit
from printer import unparse, unparse_expr
from syntax_tree import (
    Assign,
    Binary,
    Block,
    Call,
    ClassLiteral,
    ExprStmt,
    FieldAccess,
    If,
    Literal,
    Name,
    New,
    SourceLocation,
    This,
    TypeDecl,
    Unary,
)

MUTATOR_SNIPPET = """package user.lg;

class Person {
    String name;

    void setName(final String name) {
    }

    void promoteMut() {
    }

    void printSalary() {
        this.name = "Otto";
    }
}
"""

ACCESS_SNIPPET = """package files;

/**User {0} does not have the right to access file {1}.*/
class FileAccessRightExc extends multex.Exc {}

class FileGuard {
    void doAccess43() throws FileAccessRightExc {
        if(!fileAccessAllowed(username, file)){
            throwNew(FileAccessRightExc.class, username, file);
        }
    }
}
"""

# Exercises every statement and expression form of the grammar
KITCHEN_SINK = """package fb6.user.lg;

import java.util.List;
import fb6.user.db.*;
import static multex.MultexUtil.throwNew;
import static multex.MultexUtil.*;

/**
 * Failure loading {0}
 * with id {1}.
 */
@Entity
public class Loader extends multex.Failure {
    private int count = 0;
    static final String NAME = "a\\"b";
    Store store = new Store(1, 'x');

    Loader(final String name) {
        super(name);
    }

    /** Loads one object */
    @Override
    public <T extends DbObject> List<T> getObject(String oqlQuery, @Nullable Object... args);

    abstract void reset();

    Object load(final Class aClass, final Long id) throws LoadExc, fb6.IoExc {
        final List<String> names = find();
        int total;
        for (final String s : names) use(s);
        for (int i = 0; i < 10; i = i + 1) {
            total = total + i;
        }
        if (id == null) return null; else if (id instanceof Long) count = count - 1; else {
            this.count = -(-count);
        }
        try {
            return Exc.<FileAccessRightExc>init(aClass.getName(), id, 1.5, 10L);
        } catch (final IOException ex) {
            throwNew(LoadObjectFailure.class, ex, aClass.getName(), id);
        } catch (RuntimeException ex) {
            throw new LoadExc(ex);
        }
        new Store().promoteMut();
        find().getName();
        if (!(a && b || c != d) && e <= f + g - h) { }
        other.count = true;
        return;
    }
}

class Second {
}
"""

# A doc line that still starts with `*` once the gutter is stripped
STARRED_DOC = """package p;

/**
 * * item {0}
 *
 * second line
 */
class ListExc extends multex.Exc {
    int a;
    int b;

    ListExc() {
        a = b = 1;
        this.a = f(this.b = 2);
    }
}
"""


def _if_chain(branches: int) -> str:
    chain = " else ".join(f"if (x == {i}) f();" for i in range(branches))
    return f"package p;\nclass A {{ void m() {{ {chain} }} }}\n"


def _corpus_sources():
    corpus = Path(__file__).parent / "corpus"
    return sorted(p for p in corpus.rglob("*.minij") if "broken" not in p.parts)


class TestLexer:
    """Test suite for the tokenizer"""

    def test_keywords_and_identifiers(self):
        """Test that keywords are told apart from identifiers"""
        tokens = tokenize("class Person extends multex.Exc", "T.minij")

        assert [t.kind for t in tokens[:3]] == [KEYWORD, IDENT, KEYWORD]
        assert tokens[-1].kind == EOF

    def test_token_positions_are_one_based(self):
        """Test line and column of tokens after a newline"""
        tokens = tokenize("package p;\n  class A {}", "T.minij")

        class_token = tokens[3]
        assert class_token.text == "class"
        assert (class_token.line, class_token.column) == (2, 3)

    def test_ordinary_comments_are_dropped(self):
        """Test that // and /* */ comments produce no tokens"""
        tokens = tokenize("a // line\n/* block */ b", "T.minij")

        assert [t.text for t in tokens if t.kind != EOF] == ["a", "b"]

    def test_doc_comment_attaches_to_next_token(self):
        """Test that a doc comment is carried by the token that follows it"""
        tokens = tokenize("/** Hello {0} */ class", "T.minij")

        assert tokens[0].text == "class"
        assert tokens[0].doc == "Hello {0}"

    def test_clean_doc_strips_gutter(self):
        """Test that the leading * gutter of each doc line is removed"""
        raw = "/**\n * User {0} does not have\n * the right.\n */"

        assert clean_doc(raw) == "User {0} does not have\nthe right."

    def test_empty_block_comment_is_not_a_doc(self):
        """Test that /**/ is an ordinary comment"""
        tokens = tokenize("/**/ class", "T.minij")

        assert tokens[0].doc is None

    def test_unknown_character(self):
        """Test that a character outside the grammar is a syntax error"""
        with pytest.raises(MiniJSyntaxError) as error:
            tokenize("a # b", "T.minij")

        assert error.value.location == SourceLocation("T.minij", 1, 3)
        assert error.value.found == "'#'"

    def test_unterminated_comment(self):
        """Test that an unterminated comment is reported at its start"""
        with pytest.raises(MiniJSyntaxError) as error:
            tokenize("a\n  /* never closed", "T.minij")

        assert error.value.location == SourceLocation("T.minij", 2, 3)
        assert error.value.expected == "'*/'"


class TestParseUnit:
    """Test suite for parse_unit"""

    def test_mutator_snippet(self):
        """Test the mutator example: 1 type, 3 methods, 1 assignment"""
        unit = parse_unit(MUTATOR_SNIPPET, "Person.minij")

        assert unit.package_name == "user.lg"
        assert len(unit.types) == 1
        person = unit.types[0]
        assert [m.name for m in person.methods] == ["setName", "promoteMut", "printSalary"]
        assert [f.name for f in person.fields] == ["name"]

        print_salary = person.methods[2]
        assert print_salary.body == (
            Assign(FieldAccess(This(), "name"), Literal('"Otto"')),
        )
        assert print_salary.body[0].location == SourceLocation("Person.minij", 13, 9)

    def test_chained_assignment(self):
        """Test that assignment is right associative and may appear inside an expression"""
        unit = parse_unit(STARRED_DOC, "ListExc.minij")

        assert unit.types[0].methods[0].body == (
            Assign(Name("a"), Assign(Name("b"), Literal("1"))),
            Assign(
                FieldAccess(This(), "a"),
                Call(None, "f", (Assign(FieldAccess(This(), "b"), Literal("2")),)),
            ),
        )
        inner = unit.types[0].methods[0].body[1].rhs.args[0]
        assert inner.location == SourceLocation("ListExc.minij", 14, 20)

    def test_minimal_unit(self):
        """Test the smallest possible unit"""
        unit = parse_unit("package p; class A {}", "A.minij")

        assert unit.package_name == "p"
        assert unit.imports == ()
        assert unit.types == (TypeDecl("A"),)

    def test_do_access_method(self):
        """Test the create-and-throw example with its throws clause and if statement"""
        unit = parse_unit(ACCESS_SNIPPET, "FileGuard.minij")
        method = unit.types[1].methods[0]

        assert method.name == "doAccess43"
        assert method.throws_list == ("FileAccessRightExc",)
        assert method.return_type is None
        assert method.body == (
            If(
                Unary("!", Call(None, "fileAccessAllowed", (Name("username"), Name("file")))),
                Block(
                    (
                        ExprStmt(
                            Call(
                                None,
                                "throwNew",
                                (
                                    ClassLiteral("FileAccessRightExc"),
                                    Name("username"),
                                    Name("file"),
                                ),
                            )
                        ),
                    )
                ),
            ),
        )

    def test_doc_template_attached_to_type(self):
        """Test that the doc comment before a class becomes its template"""
        unit = parse_unit(ACCESS_SNIPPET, "FileGuard.minij")
        exc = unit.types[0]

        assert exc.doc_template == "User {0} does not have the right to access file {1}."
        assert exc.extends_name == "multex.Exc"
        assert unit.types[1].doc_template is None

    def test_imports(self):
        """Test single, on-demand and static imports"""
        unit = parse_unit(KITCHEN_SINK, "Loader.minij")

        assert [(i.qname, i.is_static, i.is_wildcard) for i in unit.imports] == [
            ("java.util.List", False, False),
            ("fb6.user.db", False, True),
            ("multex.MultexUtil.throwNew", True, False),
            ("multex.MultexUtil", True, True),
        ]

    def test_declarations(self):
        """Test constructors, generic methods, variadic params and annotations"""
        unit = parse_unit(KITCHEN_SINK, "Loader.minij")
        loader = unit.types[0]

        assert loader.annotations == ("Entity",)
        assert loader.doc_template == "Failure loading {0}\nwith id {1}."
        assert [f.name for f in loader.fields] == ["count", "NAME", "store"]
        assert loader.fields[2].init == New("Store", (Literal("1"), Literal("'x'")))

        constructor, get_object, reset, load = loader.methods
        assert constructor.is_constructor
        assert constructor.body == (ExprStmt(Call(None, "super", (Name("name"),))),)

        assert get_object.doc_template == "Loads one object"
        assert get_object.annotations == ("Override",)
        assert get_object.type_params_raw == "T extends DbObject"
        assert get_object.return_type == "List<T>"
        assert get_object.body is None
        query, args = get_object.params
        assert (query.name, query.type_text, query.is_variadic) == ("oqlQuery", "String", False)
        assert (args.name, args.type_text, args.is_variadic) == ("args", "Object", True)
        assert args.annotations == ("Nullable",)

        assert reset.return_type is None and reset.body is None
        assert load.throws_list == ("LoadExc", "fb6.IoExc")
        assert load.return_type == "Object"

    def test_generic_call_type_arguments(self):
        """Test that explicit call type arguments are kept as raw text"""
        unit = parse_unit(KITCHEN_SINK, "Loader.minij")
        try_stmt = unit.types[0].methods[3].body[5]
        returned = try_stmt.body.stmts[0].expr

        assert returned.method_name == "init"
        assert returned.type_args_raw == "FileAccessRightExc"
        assert returned.receiver == Name("Exc")

    def test_binary_precedence(self):
        """Test that && binds tighter than || and + tighter than <="""
        unit = parse_unit(
            "package p; class A { void m() { x(a || b && c, d <= e + f); } }", "A.minij"
        )
        call = unit.types[0].methods[0].body[0].expr

        assert call.args[0] == Binary("||", Name("a"), Binary("&&", Name("b"), Name("c")))
        assert call.args[1] == Binary("<=", Name("d"), Binary("+", Name("e"), Name("f")))

    def test_node_locations(self):
        """Test that nodes point at their first token"""
        unit = parse_unit(ACCESS_SNIPPET, "FileGuard.minij")
        guard = unit.types[1]
        if_stmt = guard.methods[0].body[0]
        throw_call = if_stmt.then.stmts[0].expr

        assert unit.types[0].location == SourceLocation("FileGuard.minij", 4, 1)
        assert guard.methods[0].location == SourceLocation("FileGuard.minij", 7, 5)
        assert if_stmt.location == SourceLocation("FileGuard.minij", 8, 9)
        assert throw_call.location == SourceLocation("FileGuard.minij", 9, 13)

    def test_locations_are_not_part_of_equality(self):
        """Test that layout does not change tree equality"""
        compact = parse_unit("package p; class A { void m() { a.b(); } }", "A.minij")
        spread = parse_unit(
            "package p;\n\nclass A {\n  void m() {\n    a.b();\n  }\n}\n", "B.minij"
        )

        assert compact == spread

    def test_line_count(self):
        unit = parse_unit(MUTATOR_SNIPPET, "Person.minij")

        assert unit.line_count == MUTATOR_SNIPPET.count("\n") + 1


class TestSyntaxErrors:
    """Test suite for syntax error reporting"""

    def test_missing_expression(self, corpus_dir):
        """Test the broken corpus file"""
        path = corpus_dir / "broken" / "Broken.minij"

        with pytest.raises(MiniJSyntaxError) as error:
            parse_unit(path.read_text(encoding="utf-8"), "Broken.minij")

        assert error.value.location == SourceLocation("Broken.minij", 5, 17)
        assert error.value.expected == "an expression"
        assert error.value.found == "';'"
        assert str(error.value) == "Syntax error: expected an expression but found ';'"

    @pytest.mark.parametrize(
        "source, expected, found",
        [
            ("package p; class A { void m() { a + b = c; } }", "';'", "'='"),
            ("package p; class A { void m() { throw e; } }", "a 'new' or call expression", "'e'"),
            ("package p; class A {", "'}'", "end of file"),
            ("package p; class A { B() {} }", "a return type or constructor 'A'", "'B'"),
            (
                "package p; class A { void m(Object... a, int b) {} }",
                "')' after a variadic parameter",
                "'int'",
            ),
            ("package p; class A { void m() { try { } } }", "'catch'", "'}'"),
            ("class A {}", "'package'", "'class'"),
            ("package p; class A { void m() { f(a).x = 1 + ; } }", "an expression", "';'"),
        ],
    )
    def test_rejected_sources(self, source, expected, found):
        """Test that token sequences outside the grammar are rejected"""
        with pytest.raises(MiniJSyntaxError) as error:
            parse_unit(source, "A.minij")

        assert error.value.expected == expected
        assert error.value.found == found

    def test_assignment_to_call_result_is_rejected(self):
        """Test that only names and field accesses can be assigned"""
        with pytest.raises(MiniJSyntaxError) as error:
            parse_unit("package p; class A { void m() { f() = 1; } }", "A.minij")

        assert error.value.expected == "';'"

    @pytest.mark.parametrize("branches", [250, 600])
    def test_deep_nesting(self, branches):
        """Test that an overly deep else-if chain is a syntax error, not a stack overflow"""
        with pytest.raises(MiniJSyntaxError) as error:
            parse_unit(_if_chain(branches), "A.minij")

        assert error.value.expected == f"at most {MAX_NESTING} levels of nesting"
        assert error.value.location.line == 2

    def test_nesting_within_the_limit(self):
        unit = parse_unit(_if_chain(150), "A.minij")

        assert isinstance(unit.types[0].methods[0].body[0], If)
        assert parse_unit(unparse(unit), "A.minij") == unit


class TestPrinter:
    """Test suite for the layout-normalizing printer"""

    def test_expressions_are_parenthesized(self):
        expr = Binary("-", Binary("+", Name("a"), Name("b")), Unary("-", Name("c")))

        assert unparse_expr(expr) == "((a + b) - (-c))"

    def test_calls_and_literals(self):
        expr = Call(
            Name("Exc"), "init", (ClassLiteral("X"), New("Y", (Literal('"s"'),))), "X"
        )

        assert unparse_expr(expr) == 'Exc.<X>init(X.class, new Y("s"))'

    @pytest.mark.parametrize(
        "source",
        [MUTATOR_SNIPPET, ACCESS_SNIPPET, KITCHEN_SINK, STARRED_DOC],
        ids=["mutator", "access", "all", "starred-doc"],
    )
    def test_reparse_stability(self, source):
        """Test that parsing printed output gives back the same tree"""
        unit = parse_unit(source, "T.minij")
        printed = unparse(unit)
        reparsed = parse_unit(printed, "T.minij")

        assert reparsed == unit
        # Printing is idempotent once the layout is normalized
        assert unparse(reparsed) == printed

    def test_doc_lines_keep_their_own_stars(self):
        """Test that printing strips no more than the gutter from a doc line"""
        unit = parse_unit(STARRED_DOC, "T.minij")
        printed = unparse(unit)

        assert unit.types[0].doc_template == "* item {0}\n\nsecond line"
        assert printed.startswith("package p;\n/**\n * * item {0}\n *\n * second line\n */\n")
        assert parse_unit(printed, "T.minij").types[0].doc_template == "* item {0}\n\nsecond line"

    @pytest.mark.parametrize("path", _corpus_sources(), ids=lambda p: p.name)
    def test_reparse_stability_on_corpus(self, path):
        """Test reparse stability over every corpus file"""
        unit = parse_unit(path.read_text(encoding="utf-8"), path.name)

        assert parse_unit(unparse(unit), path.name) == unit
