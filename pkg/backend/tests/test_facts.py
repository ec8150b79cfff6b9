"""Tests for facts.py - fact extraction and type resolution"""

import logging
import sys
from pathlib import Path

import pytest

# Add backend directory to path
backend_dir = Path(__file__).parent.parent
sys.path.insert(0, str(backend_dir))

from facts import (
    CONSTRUCTOR_NAME,
    Facts,
    ReceiverKind,
    TargetKind,
    ThrowForm,
    TypeResolver,
    base_type_name,
    extract_facts,
)
from lint_system import LintSystem
from models import RuleConfig
from parser import parse_unit
from syntax_tree import SourceLocation

STORE = """package app.db;

class Store {
    void save() {
    }
}
"""

SERVICE = """package app.lg;

import app.db.Store;

class Service {
    private Store store;

    void run(final Store param) {
        this.helper();
        helper();
        param.save();
        store.save();
        this.store.save();
        new Store().save();
        Store.open();
        find().save();
        unknown.save();
    }

    void helper() {
    }
}
"""


def _calls(facts: Facts):
    return [
        (f.receiver_kind, f.receiver_name, f.callee_type_qname, f.callee_method_name)
        for f in facts.call_facts
    ]


class TestCallFacts:
    """Test suite for call facts and receiver classification"""

    def test_local_receiver_resolves_to_same_package_type(self, facts_for):
        """Test `person.promoteMut()` on a local of type Person"""
        facts = facts_for(
            """package user.lg;

class Person {
    void promoteMut() {
    }
}

class Client {
    void run() {
        Person person = find();
        person.promoteMut();
    }
}
"""
        )
        promote = [f for f in facts.call_facts if f.callee_method_name == "promoteMut"]

        assert len(promote) == 1
        fact = promote[0]
        assert fact.receiver_kind == ReceiverKind.SIMPLE_NAME
        assert fact.receiver_name == "person"
        assert fact.callee_type_qname == "user.lg.Person"
        assert fact.caller.type_qname == "user.lg.Client"
        assert fact.caller.method_name == "run"
        assert fact.location == SourceLocation("Test0.minij", 11, 9)

    def test_receiver_kinds(self, facts_for):
        """Test every receiver kind in source order"""
        facts = facts_for(SERVICE, STORE)

        assert _calls(facts) == [
            (ReceiverKind.THIS, None, "app.lg.Service", "helper"),
            (ReceiverKind.THIS, None, "app.lg.Service", "helper"),
            (ReceiverKind.SIMPLE_NAME, "param", "app.db.Store", "save"),
            (ReceiverKind.FIELD_OF_THIS, "store", "app.db.Store", "save"),
            (ReceiverKind.FIELD_OF_THIS, "store", "app.db.Store", "save"),
            (ReceiverKind.NEW_EXPR, None, "app.db.Store", "save"),
            (ReceiverKind.NEW_EXPR, None, "app.db.Store", CONSTRUCTOR_NAME),
            (ReceiverKind.STATIC_TYPE, None, "app.db.Store", "open"),
            (ReceiverKind.CALL_RESULT, None, None, "save"),
            (ReceiverKind.THIS, None, "app.lg.Service", "find"),
            (ReceiverKind.UNRESOLVED, "unknown", None, "save"),
        ]

    def test_arg_count(self, facts_for):
        facts = facts_for("package p; class A { void m() { log(1, 2, f(3)); } }")

        assert [(f.callee_method_name, f.arg_count) for f in facts.call_facts] == [
            ("log", 3),
            ("f", 1),
        ]

    def test_local_shadows_field(self, facts_for):
        """Test that a local with the name of a field wins"""
        facts = facts_for(
            """package app.lg;

import app.db.Store;

class Service {
    private Other store;

    void run() {
        Store store = null;
        store.save();
    }
}
""",
            STORE,
        )

        assert _calls(facts) == [(ReceiverKind.SIMPLE_NAME, "store", "app.db.Store", "save")]

    def test_block_scoping(self, facts_for):
        """Test that a local is not visible after its block ends"""
        facts = facts_for(
            """package p;

class A {
    void m() {
        {
            Store inner = null;
            inner.save();
        }
        inner.save();
    }
}
"""
        )

        kinds = [f.receiver_kind for f in facts.call_facts]
        assert kinds == [ReceiverKind.SIMPLE_NAME, ReceiverKind.UNRESOLVED]

    def test_for_each_and_catch_variables(self, facts_for):
        """Test that loop and catch variables are in scope in their bodies"""
        facts = facts_for(
            """package app.lg;

import app.db.Store;

class Service {
    void run(final List<Store> stores) {
        for (final Store s : stores) s.save();
        try {
            stores.clear();
        } catch (IOException e) {
            e.printStackTrace();
        }
    }
}
""",
            STORE,
        )

        assert _calls(facts) == [
            (ReceiverKind.SIMPLE_NAME, "s", "app.db.Store", "save"),
            (ReceiverKind.SIMPLE_NAME, "stores", None, "clear"),
            (ReceiverKind.SIMPLE_NAME, "e", None, "printStackTrace"),
        ]

    def test_static_imports(self, facts_for):
        """Test that bare calls to statically imported names get the owner type"""
        facts = facts_for(
            """package files;

import static multex.MultexUtil.throwNew;
import static fb6.Checks.*;

class Guard {
    void run() {
        throwNew(A.class);
        allowed();
        run();
    }
}
"""
        )

        assert _calls(facts) == [
            (ReceiverKind.STATIC_TYPE, None, "multex.MultexUtil", "throwNew"),
            (ReceiverKind.STATIC_TYPE, None, "fb6.Checks", "allowed"),
            (ReceiverKind.THIS, None, "files.Guard", "run"),
        ]

    def test_super_call_is_on_this(self, facts_for):
        facts = facts_for(
            """package p;

import static q.Util.*;

class A extends B {
    A() {
        super();
    }
}
"""
        )

        assert _calls(facts) == [(ReceiverKind.THIS, None, "p.A", "super")]
        assert facts.call_facts[0].caller.method_is_constructor

    def test_qualified_static_receiver(self, facts_for):
        """Test `fb6.Util.run()` against a corpus type"""
        facts = facts_for(
            "package app; class A { void m() { fb6.Util.run(); x.y.run(); } }",
            "package fb6; class Util { }",
        )

        assert _calls(facts) == [
            (ReceiverKind.STATIC_TYPE, None, "fb6.Util", "run"),
            (ReceiverKind.UNRESOLVED, "y", None, "run"),
        ]

    def test_field_initializer_is_a_constructor_context(self, facts_for):
        facts = facts_for(STORE, "package app.db; class Pool { Store store = new Store(); }")

        fact = facts.call_facts[0]
        assert fact.callee_method_name == CONSTRUCTOR_NAME
        assert fact.callee_type_qname == "app.db.Store"
        assert fact.caller.method_name == CONSTRUCTOR_NAME
        assert fact.caller.method_is_constructor
        assert not fact.caller.method_is_mutator

    def test_mutator_caller_flag(self, facts_for):
        facts = facts_for(
            "package p; class A { void setX() { f(); } void promoteMut() { f(); }"
            " void g() { f(); } }"
        )

        assert [f.caller.method_is_mutator for f in facts.call_facts] == [True, True, False]

    def test_empty_unit(self, facts_for):
        """Test that a unit without statements yields no facts"""
        facts = facts_for("package p; class A {}")

        assert facts.call_facts == []
        assert facts.assign_facts == []
        assert facts.throw_facts == []
        assert facts.templates == {}


class TestAssignFacts:
    """Test suite for assignment facts"""

    def test_target_kinds(self, facts_for):
        facts = facts_for(
            """package p;

class Counter {
    int count;

    void bump(final int step) {
        int local = 0;
        this.count = step;
        count = step;
        local = step;
        step = 1;
        other.count = 1;
    }
}
"""
        )

        assert [(f.target_kind, f.field_name) for f in facts.assign_facts] == [
            (TargetKind.OWN_FIELD, "count"),
            (TargetKind.OWN_FIELD, "count"),
            (TargetKind.LOCAL, None),
            (TargetKind.LOCAL, None),
            (TargetKind.OTHER, None),
        ]
        assert facts.assign_facts[0].location == SourceLocation("Test0.minij", 8, 9)
        assert facts.assign_facts[0].enclosing.method_name == "bump"

    def test_local_shadowing_field_is_local(self, facts_for):
        facts = facts_for(
            "package p; class A { int count; void m() { int count = 0; count = 1; } }"
        )

        assert [f.target_kind for f in facts.assign_facts] == [TargetKind.LOCAL]

    def test_calls_inside_assignment(self, facts_for):
        """Test that both sides of an assignment are searched for calls"""
        facts = facts_for("package p; class A { void m() { find().x = compute(); } }")

        assert [f.callee_method_name for f in facts.call_facts] == ["find", "compute"]


class TestThrowFacts:
    """Test suite for throw facts"""

    def test_constructor_throw(self, corpus_dir):
        """Test `throw new UsernameNullExc();` inside getPersonByUsername"""
        path = corpus_dir / "exceptions" / "user" / "lg" / "PersonRepository.minij"
        unit = parse_unit(path.read_text(encoding="utf-8"), "PersonRepository.minij")
        facts = extract_facts([unit])

        assert len(facts.throw_facts) == 1
        fact = facts.throw_facts[0]
        assert fact.exc_type_qname == "user.lg.UsernameNullExc"
        assert fact.form == ThrowForm.CONSTRUCTOR
        assert fact.helper_name is None
        assert fact.message_arg_count == 0
        assert fact.enclosing_throws == (
            "user.lg.PersonNotFoundExc",
            "user.lg.PersonKeyNotUniqueExc",
        )
        assert fact.enclosing_method == "getPersonByUsername"
        assert fact.location == SourceLocation("PersonRepository.minij", 16, 13)

    def test_helper_forms(self, facts_for):
        """Test the throw, statement and qualified helper forms"""
        facts = facts_for(
            """package p;

class A {
    void m() throws q.X {
        throw create(X.class, a);
        throwNew(X.class, a, b);
        MultexUtil.throwNew(q.X.class);
        throwNew(x, a);
        log(X.class);
    }
}
"""
        )

        assert [
            (f.exc_type_qname, f.form, f.helper_name, f.message_arg_count, f.location.line)
            for f in facts.throw_facts
        ] == [
            ("X", ThrowForm.HELPER, "create", 1, 5),
            ("X", ThrowForm.HELPER, "throwNew", 2, 6),
            ("q.X", ThrowForm.HELPER, "throwNew", 0, 7),
        ]
        assert facts.throw_facts[0].location.column == 9
        assert all(f.enclosing_throws == ("q.X",) for f in facts.throw_facts)

    def test_configured_helper_names(self, facts_for):
        cfg = RuleConfig(throw_helper_names=frozenset({"raiseIt"}))
        facts = facts_for(
            "package p; class A { void m() { raiseIt(X.class); throwNew(X.class); } }", cfg=cfg
        )

        assert [f.helper_name for f in facts.throw_facts] == ["raiseIt"]


class TestTypesAndTemplates:
    """Test suite for the type index, hierarchy and message templates"""

    def test_templates_of_exception_types(self, corpus_dir, lint_config):
        facts, _ = LintSystem(lint_config).extract([str(corpus_dir / "messages")])

        assert facts.templates == {
            "db.LoadObjectFailure": "Failure loading object of class {0} with id {1}.",
            "files.FileAccessRightExc": "User {0} does not have the right to access file {1}.",
        }

    def test_templates_skip_non_exceptions(self, facts_for):
        facts = facts_for("package p; /** Not a message {0} */ class Plain {}")

        assert facts.templates == {}

    def test_transitive_subtypes(self, facts_for):
        facts = facts_for(
            """package p;

/** Base {0} */
class BaseExc extends multex.Exc {}

/** Sub {0} {1} */
class SubExc extends BaseExc {}
"""
        )

        assert facts.hierarchy == {"p.BaseExc": "multex.Exc", "p.SubExc": "p.BaseExc"}
        assert facts.is_subtype("p.SubExc", {"multex.Exc"})
        assert not facts.is_subtype("p.SubExc", {"multex.Failure"})
        assert facts.templates["p.SubExc"] == "Sub {0} {1}"

    def test_cyclic_hierarchy_terminates(self, facts_for):
        facts = facts_for("package p; class A extends B {} class B extends A {}")

        assert list(facts.supertypes("p.A")) == ["p.A", "p.B"]
        assert not facts.is_subtype("p.A", {"multex.Exc"})

    def test_duplicate_type_keeps_first(self, facts_for, caplog):
        with caplog.at_level(logging.WARNING, logger="facts"):
            facts = facts_for("package p; class A {}", "package p; class A {}")

        assert facts.type_index["p.A"].file == "Test0.minij"
        assert facts.type_index["A"].qname == "p.A"
        assert "declared more than once" in caplog.text

    def test_base_type_name(self):
        assert base_type_name("java.util.List<String>[]") == "java.util.List"
        assert base_type_name("Map<String, List<Long>>") == "Map"


class TestTypeResolver:
    """Test suite for name resolution order"""

    def _resolver(self, source, known):
        return TypeResolver(parse_unit(source, "T.minij"), set(known))

    def test_single_import_wins_over_same_package(self):
        resolver = self._resolver(
            "package a; import b.Person; class T {}", {"a.Person", "b.Person"}
        )

        assert resolver.lookup("Person") == "b.Person"

    def test_same_package_before_on_demand(self):
        resolver = self._resolver("package a; import b.*; class T {}", {"a.Person", "b.Person"})

        assert resolver.lookup("Person") == "a.Person"

    def test_on_demand_only_resolves_known_types(self):
        resolver = self._resolver("package a; import b.*; class T {}", {"b.Person"})

        assert resolver.lookup("Person") == "b.Person"
        assert resolver.lookup("Missing") is None

    def test_declared_qualified_types_are_kept(self):
        resolver = self._resolver("package a; class T {}", set())

        assert resolver.resolve("java.util.List<String>") == "java.util.List"
        assert resolver.lookup("java.util.List") is None
        assert resolver.resolve("String") is None
        assert resolver.resolve_or_keep("String") == "String"


@pytest.mark.integration
class TestCorpusFacts:
    """Properties of the facts extracted from the sample corpus"""

    def test_mutator_corpus_completeness(self, corpus_dir, lint_config):
        """Test 4 call facts on person* receivers and 1 own field assignment"""
        facts, _ = LintSystem(lint_config).extract([str(corpus_dir / "mutator")])

        person_calls = [
            f for f in facts.call_facts if (f.receiver_name or "").startswith("person")
        ]
        assert len(person_calls) == 4
        own_fields = [f for f in facts.assign_facts if f.target_kind == TargetKind.OWN_FIELD]
        assert len(own_fields) == 1
        assert own_fields[0].enclosing.method_name == "printSalary"

    def test_location_monotonicity(self, corpus_dir, lint_config):
        """Test that facts of one file come in non-decreasing (line, column) order"""
        facts, _ = LintSystem(lint_config).extract([str(corpus_dir)])

        for fact_list in (facts.call_facts, facts.assign_facts, facts.throw_facts):
            by_file = {}
            for fact in fact_list:
                by_file.setdefault(fact.location.file, []).append(
                    (fact.location.line, fact.location.column)
                )
            for positions in by_file.values():
                assert positions == sorted(positions)

    def test_locations_within_files(self, corpus_dir, lint_config):
        """Test that no fact points past the end of its file"""
        system = LintSystem(lint_config)
        units, _ = system.parse_sources(system.collect_sources([str(corpus_dir)]))
        line_counts = {unit.file: unit.line_count for unit in units}
        facts = extract_facts(units)

        for fact in facts.call_facts + facts.assign_facts + facts.throw_facts:
            assert 1 <= fact.location.line <= line_counts[fact.location.file]
