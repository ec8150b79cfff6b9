"""Built-in lint rules and the engine that runs them.

Every rule is a pure function of (facts, cfg). Findings use the diagnostics
message model: the rule id is the message key and the parameters are
positional, rendered through RULE_CATALOG.
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Sequence

from diagnostics import ExcValue, MessageCatalog, render_message, required_arity
from exceptions import ERROR_TEMPLATES, ConfigError, MiniJSyntaxError
from facts import AssignFact, CallFact, Facts, ReceiverKind, TargetKind
from models import Finding, Report, RuleConfig, RuleDefinition, Severity
from patterns import (
    ANY,
    CallDirective,
    InSet,
    NotEqual,
    NotInSet,
    SignaturePattern,
    match_qname,
    parse_qname_pattern,
)
from syntax_tree import SourceLocation

logger = logging.getLogger(__name__)

PARSE = "PARSE"

RULE_TEMPLATES: Dict[str, str] = {
    "MUT01": "Illegal mutator call on an immutable reference",
    "MUT02": "Field {0} replaced in non-mutator method {1}",
    "ARCH01": "Do not call the db-layer directly",
    "ARCH02": "Component {0} must not call component {1}",
    "ARCH03": "Do not call a product component from the service component",
    "EXC01": "Exception {0} thrown but not declared in the throws clause of {1}",
    "MSG01": "Throw site passes {0} message parameters but template of {1} requires {2}",
    "MSG02": "Throw site passes {0} message parameters but template of {1} requires only {2}",
}

RULE_CATALOG = MessageCatalog({**RULE_TEMPLATES, PARSE: ERROR_TEMPLATES[PARSE]})

DEFAULT_SEVERITIES: Dict[str, Severity] = {
    "MUT01": Severity.ERROR,
    "MUT02": Severity.ERROR,
    "ARCH01": Severity.ERROR,
    "ARCH02": Severity.ERROR,
    "ARCH03": Severity.ERROR,
    "EXC01": Severity.ERROR,
    "MSG01": Severity.ERROR,
    "MSG02": Severity.WARNING,
}


def make_finding(rule_id: str, location: SourceLocation, params: Sequence[object] = ()) -> Finding:
    """Build a finding with its default severity and rendered message"""
    rendered = tuple(str(p) for p in params)
    return Finding(
        rule_id=rule_id,
        severity=DEFAULT_SEVERITIES.get(rule_id, Severity.ERROR),
        file=location.file,
        line=location.line,
        column=location.column,
        message_key=rule_id,
        params=list(rendered),
        message=render_message(RULE_CATALOG, ExcValue(rule_id, rendered)),
    )


def parse_finding(error: MiniJSyntaxError) -> Finding:
    """A syntax error reported as a PARSE finding; PARSE is always an error"""
    return make_finding(PARSE, error.location, (error.expected, error.found))


def is_mutator_name(name: str, cfg: RuleConfig) -> bool:
    return cfg.is_mutator_name(name)


# MUT01 / MUT02


def _receiver_is_mutable(fact: CallFact, cfg: RuleConfig) -> Optional[bool]:
    """Mutability of a call receiver, or None when the receiver is exempt"""
    kind = fact.receiver_kind
    if kind == ReceiverKind.THIS:
        caller = fact.caller
        return caller.method_is_constructor or is_mutator_name(caller.method_name, cfg)
    if kind in (ReceiverKind.SIMPLE_NAME, ReceiverKind.FIELD_OF_THIS):
        return fact.receiver_name is not None and cfg.is_mutable_name(fact.receiver_name)
    if kind == ReceiverKind.NEW_EXPR:
        return True
    return None


def check_mutator_calls(facts: Facts, cfg: RuleConfig) -> List[Finding]:
    """MUT01: a mutator called on a reference not named as mutable"""
    findings = []
    for fact in facts.call_facts:
        if not is_mutator_name(fact.callee_method_name, cfg):
            continue
        if _receiver_is_mutable(fact, cfg) is False:
            findings.append(make_finding("MUT01", fact.location))
    return findings


def _replaces_field_illegally(fact: AssignFact, cfg: RuleConfig) -> bool:
    enclosing = fact.enclosing
    if fact.target_kind != TargetKind.OWN_FIELD:
        return False
    return not enclosing.method_is_constructor and not is_mutator_name(enclosing.method_name, cfg)


def check_field_assignments(facts: Facts, cfg: RuleConfig) -> List[Finding]:
    """MUT02: an own field assigned outside constructors and mutators"""
    return [
        make_finding("MUT02", fact.location, (fact.field_name, fact.enclosing.method_name))
        for fact in facts.assign_facts
        if _replaces_field_illegally(fact, cfg)
    ]


# ARCH01 / ARCH02 / ARCH03


def _package_of(type_qname: str) -> str:
    return type_qname.rpartition(".")[0]


def check_layering(facts: Facts, cfg: RuleConfig) -> List[Finding]:
    """ARCH01: calls may stay within a layer or go to the layer directly below"""
    shape = parse_qname_pattern(f"{cfg.root_package}.{{c}}.{{l}}..")
    rank = {layer: index for index, layer in enumerate(cfg.layers)}

    def layer_of(package: str) -> Optional[int]:
        for binding in match_qname(shape, package):
            layer = binding.get("l")
            if layer in rank:
                return rank[layer]
        return None

    findings = []
    for fact in facts.call_facts:
        if fact.callee_type_qname is None:
            continue
        caller_layer = layer_of(fact.caller.package)
        callee_layer = layer_of(_package_of(fact.callee_type_qname))
        if caller_layer is None or callee_layer is None:
            continue
        if callee_layer not in (caller_layer, caller_layer + 1):
            findings.append(make_finding("ARCH01", fact.location))
    return findings


def component_directives(cfg: RuleConfig) -> Dict[str, CallDirective]:
    """The component isolation rules as call directives over `root.{a}..*` and `root.{b}..*`"""
    within = parse_qname_pattern(f"{cfg.root_package}.{{a}}..*")
    call = SignaturePattern(parse_qname_pattern(f"{cfg.root_package}.{{b}}..*"), ANY)
    services = frozenset(cfg.service_components)
    return {
        "ARCH02": CallDirective(
            within, call, (NotInSet("a", services), NotEqual("a", "b"), NotInSet("b", services))
        ),
        "ARCH03": CallDirective(within, call, (InSet("a", services), NotInSet("b", services))),
    }


def check_component_isolation(facts: Facts, cfg: RuleConfig) -> List[Finding]:
    """ARCH02/ARCH03: product components use only themselves and service components"""
    directives = component_directives(cfg)
    findings = []
    for fact in facts.call_facts:
        if fact.callee_type_qname is None:
            continue
        for rule_id, directive in directives.items():
            witness = directive.witness(
                fact.caller.type_qname, fact.callee_type_qname, fact.callee_method_name
            )
            if witness is None:
                continue
            params = (witness.get("a"), witness.get("b")) if rule_id == "ARCH02" else ()
            findings.append(make_finding(rule_id, fact.location, params))
    return findings


# EXC01


def check_undeclared_exc_throws(facts: Facts, cfg: RuleConfig) -> List[Finding]:
    """EXC01: an Exc subtype thrown directly must appear in the throws clause"""
    findings = []
    for fact in facts.throw_facts:
        exc = fact.exc_type_qname
        if not facts.is_subtype(exc, cfg.exc_base_types):
            continue
        if facts.is_subtype(exc, cfg.failure_base_types):
            continue
        if exc not in fact.enclosing_throws:
            findings.append(make_finding("EXC01", fact.location, (exc, fact.enclosing_method)))
    return findings


# MSG01 / MSG02


def check_message_param_arity(facts: Facts, cfg: RuleConfig) -> List[Finding]:
    """MSG01/MSG02: message arguments of a throw site against its type's doc template"""
    findings = []
    for fact in facts.throw_facts:
        template = facts.templates.get(fact.exc_type_qname)
        if template is None:
            continue

        required = required_arity(template)
        provided = fact.message_arg_count
        if provided > 0 and facts.is_subtype(fact.exc_type_qname, cfg.failure_base_types):
            # The first remaining argument of a Failure is its cause
            provided -= 1

        params = (provided, fact.exc_type_qname, required)
        if provided < required:
            findings.append(make_finding("MSG01", fact.location, params))
        elif provided > required:
            findings.append(make_finding("MSG02", fact.location, params))
    return findings


class Rule(ABC):
    """Abstract base class for all rules"""

    @abstractmethod
    def get_rule_definitions(self) -> List[RuleDefinition]:
        """Return the rule ids this rule reports, with their templates"""
        pass

    @abstractmethod
    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        """Evaluate the rule over the facts"""
        pass

    def _definition(self, rule_id: str, title: str) -> RuleDefinition:
        return RuleDefinition(
            rule_id=rule_id,
            title=title,
            template=RULE_TEMPLATES[rule_id],
            default_severity=DEFAULT_SEVERITIES[rule_id],
        )


class MutatorCallRule(Rule):
    def get_rule_definitions(self) -> List[RuleDefinition]:
        return [self._definition("MUT01", "mutator call on an immutable reference")]

    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        return check_mutator_calls(facts, cfg)


class FieldAssignmentRule(Rule):
    def get_rule_definitions(self) -> List[RuleDefinition]:
        return [self._definition("MUT02", "field replaced in a non-mutator method")]

    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        return check_field_assignments(facts, cfg)


class LayeringRule(Rule):
    def get_rule_definitions(self) -> List[RuleDefinition]:
        return [self._definition("ARCH01", "strict layering")]

    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        return check_layering(facts, cfg)


class ComponentIsolationRule(Rule):
    def get_rule_definitions(self) -> List[RuleDefinition]:
        return [
            self._definition("ARCH02", "product component calls another product component"),
            self._definition("ARCH03", "service component calls a product component"),
        ]

    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        return check_component_isolation(facts, cfg)


class UndeclaredExcThrowRule(Rule):
    def get_rule_definitions(self) -> List[RuleDefinition]:
        return [self._definition("EXC01", "Exc thrown but not declared")]

    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        return check_undeclared_exc_throws(facts, cfg)


class MessageArityRule(Rule):
    def get_rule_definitions(self) -> List[RuleDefinition]:
        return [
            self._definition("MSG01", "too few message parameters"),
            self._definition("MSG02", "more message parameters than the template uses"),
        ]

    def check(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        return check_message_param_arity(facts, cfg)


class RuleManager:
    """Manages the registered rules"""

    def __init__(self):
        self.rules: Dict[str, Rule] = {}

    def register_rule(self, rule: Rule):
        """Register any rule that implements the Rule interface"""
        for definition in rule.get_rule_definitions():
            if definition.rule_id in self.rules:
                raise ValueError(f"Rule id {definition.rule_id} registered twice")
            self.rules[definition.rule_id] = rule

    def get_rule_definitions(self) -> List[RuleDefinition]:
        """All rule definitions, ordered by rule id"""
        definitions = {}
        for rule in self.rules.values():
            for definition in rule.get_rule_definitions():
                definitions[definition.rule_id] = definition
        return [definitions[rule_id] for rule_id in sorted(definitions)]

    def run(self, facts: Facts, cfg: RuleConfig) -> List[Finding]:
        """Run each distinct rule once and collect its findings"""
        findings: List[Finding] = []
        seen = set()
        for rule in self.rules.values():
            if id(rule) in seen:
                continue
            seen.add(id(rule))
            findings.extend(rule.check(facts, cfg))
        return findings


def default_rule_manager() -> RuleManager:
    manager = RuleManager()
    for rule in (
        MutatorCallRule(),
        FieldAssignmentRule(),
        LayeringRule(),
        ComponentIsolationRule(),
        UndeclaredExcThrowRule(),
        MessageArityRule(),
    ):
        manager.register_rule(rule)
    return manager


def apply_severities(findings: Sequence[Finding], cfg: RuleConfig) -> List[Finding]:
    """Apply configured severities; findings of rules turned off are dropped"""
    result = []
    for finding in findings:
        if finding.rule_id == PARSE:
            result.append(finding)
            continue
        severity = cfg.severity_for(finding.rule_id, DEFAULT_SEVERITIES[finding.rule_id])
        if severity == Severity.OFF:
            continue
        if severity != finding.severity:
            finding = finding.model_copy(update={"severity": severity})
        result.append(finding)
    return result


def validate_severities(cfg: RuleConfig):
    for rule_id in sorted(cfg.severities):
        if rule_id not in RULE_TEMPLATES:
            raise ConfigError("severities", f"unknown rule id '{rule_id}'")


def run_all(
    facts: Facts,
    cfg: RuleConfig,
    extra_findings: Sequence[Finding] = (),
    manager: Optional[RuleManager] = None,
) -> Report:
    """
    Run every registered rule and assemble the report.

    Args:
        facts: Facts of the whole corpus
        cfg: Rule configuration; severities override the defaults
        extra_findings: Findings produced outside the rules (PARSE)
        manager: Rules to run (the built-in set when omitted)

    Returns:
        Report sorted by (file, line, column, rule_id)
    """
    validate_severities(cfg)
    manager = manager or default_rule_manager()
    findings = manager.run(facts, cfg)
    logger.debug("Rules produced %d findings before severities", len(findings))
    return Report.from_findings(apply_severities(list(findings) + list(extra_findings), cfg))
