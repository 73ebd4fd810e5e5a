"""Parse, serialize and validate policy documents.

The document format is an XML-like dialect with a closed element vocabulary:

    <PolicySet>
      <Policy PolicyId="cardiac-access">
        <Target>
          <SubjectAttributes>
            <Attribute Name="role" Value="cardiologist"/>
          </SubjectAttributes>
          <ResourceAttributes>
            <Attribute Name="sensitivity" Value="s<=2"/>
          </ResourceAttributes>
          <Action>Read</Action>
        </Target>
        <Condition>
          <EnvironmentAttribute Name="time" Value="8<=t<=18"/>
        </Condition>
        <Obligations>
          <Obligation>log_access</Obligation>
        </Obligations>
      </Policy>
    </PolicySet>

It is deliberately not XML: `<` and `>` are legal inside quoted attribute
values so comparison expressions can be written verbatim. Unknown elements
are hard errors — silently misreading a security policy is worse than
rejecting it. A JSON mirror of the same model is used for `.json` files.

Value expressions inside ``Value="..."``:

    literal              equality with the named attribute
    x<=5  /  x>=5 ...    numeric comparison (the symbol name is ignored)
    8<=t<=18             range; hour literals and HH:MM are minutes of day
    x in {a, b}          set membership

Literal values that themselves look like one of the comparison forms are
reserved and cannot round-trip; keep attribute text free of `<`, `=`, `{`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .model import (
    AllOf,
    AttributeValue,
    Compare,
    Effect,
    Equals,
    InRange,
    MemberOf,
    Obligation,
    Policy,
    PolicySet,
    Predicate,
    Target,
    TimeOfDay,
    value_kind,
)


class PolicyDocumentError(Exception):
    """Base class for policy document failures."""


class MalformedDocument(PolicyDocumentError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownElement(PolicyDocumentError):
    def __init__(self, name: str, line: int = 0):
        super().__init__(f"line {line}: unknown element <{name}>")
        self.name = name
        self.line = line


class InvalidValue(PolicyDocumentError):
    def __init__(self, attribute: str, text: str, line: int = 0):
        super().__init__(f"line {line}: attribute {attribute!r}: cannot type value {text!r}")
        self.attribute = attribute
        self.text = text
        self.line = line


# Attribute names with a non-text domain in value expressions.
_TIME_ATTRIBUTES = frozenset({"time"})
_INT_ATTRIBUTES = frozenset({"sensitivity", "clearance", "phi_access_count", "risk_score"})
_BOOL_ATTRIBUTES = frozenset({"baa_valid"})


# --- Lexer -------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")


@dataclass(frozen=True)
class _Tag:
    kind: str  # "open" | "close" | "empty" | "text"
    name: str
    attrs: dict
    line: int


def _decode_entities(text: str) -> str:
    return (
        text.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", '"')
        .replace("&apos;", "'")
        .replace("&amp;", "&")
    )


def _lex(doc: str) -> list[_Tag]:
    tokens: list[_Tag] = []
    i, line, n = 0, 1, len(doc)
    while i < n:
        ch = doc[i]
        if ch == "<":
            if doc.startswith("<!--", i):
                end = doc.find("-->", i)
                if end < 0:
                    raise MalformedDocument(line, "unterminated comment")
                line += doc.count("\n", i, end)
                i = end + 3
                continue
            if doc.startswith("<?", i):
                end = doc.find("?>", i)
                if end < 0:
                    raise MalformedDocument(line, "unterminated processing instruction")
                line += doc.count("\n", i, end)
                i = end + 2
                continue
            closing = doc.startswith("</", i)
            j = i + (2 if closing else 1)
            m = _NAME_RE.match(doc, j)
            if not m:
                raise MalformedDocument(line, "expected element name after '<'")
            name = m.group(0)
            j = m.end()
            attrs: dict = {}
            while True:
                while j < n and doc[j] in " \t\r\n":
                    if doc[j] == "\n":
                        line += 1
                    j += 1
                if j >= n:
                    raise MalformedDocument(line, f"unterminated tag <{name}>")
                if doc[j] == ">":
                    j += 1
                    tokens.append(_Tag("close" if closing else "open", name, attrs, line))
                    break
                if doc.startswith("/>", j):
                    if closing:
                        raise MalformedDocument(line, "'/>' in closing tag")
                    j += 2
                    tokens.append(_Tag("empty", name, attrs, line))
                    break
                m = _NAME_RE.match(doc, j)
                if not m or closing:
                    raise MalformedDocument(line, f"unexpected character {doc[j]!r} in tag <{name}>")
                attr_name = m.group(0)
                j = m.end()
                if j >= n or doc[j] != "=":
                    raise MalformedDocument(line, f"attribute {attr_name!r} missing '='")
                j += 1
                if j >= n or doc[j] not in "\"'":
                    raise MalformedDocument(line, f"attribute {attr_name!r} value must be quoted")
                quote = doc[j]
                end = doc.find(quote, j + 1)
                if end < 0:
                    raise MalformedDocument(line, f"unterminated value for attribute {attr_name!r}")
                raw = doc[j + 1 : end]
                line += raw.count("\n")
                if attr_name in attrs:
                    raise MalformedDocument(line, f"duplicate attribute {attr_name!r}")
                attrs[attr_name] = _decode_entities(raw)
                j = end + 1
            i = j
        else:
            j = doc.find("<", i)
            if j < 0:
                j = n
            text = doc[i:j]
            stripped = text.strip()
            if stripped:
                tokens.append(_Tag("text", _decode_entities(stripped), {}, line))
            line += text.count("\n")
            i = j
    return tokens


# --- Value expressions --------------------------------------------------------

_SYM = r"[A-Za-z_][A-Za-z0-9_]*"
_RANGE_RE = re.compile(rf"^(?P<lo>[^<>=]+?)\s*(?P<op1><=|<)\s*(?P<sym>{_SYM})\s*(?P<op2><=|<)\s*(?P<hi>[^<>=]+?)$")
_CMP_RE = re.compile(rf"^(?P<sym>{_SYM})\s*(?P<op><=|>=|=|<|>)\s*(?P<val>.+)$")
_MEMBER_RE = re.compile(rf"^(?P<sym>{_SYM})\s+in\s*\{{(?P<vals>.*)\}}$")
_INT_RE = re.compile(r"^-?\d+$")
_CLOCK_RE = re.compile(r"^\d{1,2}:\d{2}$")


def _typed_literal(name: str, text: str, line: int) -> AttributeValue:
    """Type a bare literal for equality against attribute `name`."""
    text = text.strip()
    if not text:
        raise InvalidValue(name, text, line)
    if name in _TIME_ATTRIBUTES:
        return _time_literal(name, text, line)
    if name in _INT_ATTRIBUTES:
        if not _INT_RE.match(text):
            raise InvalidValue(name, text, line)
        return int(text)
    if name in _BOOL_ATTRIBUTES:
        lowered = text.lower()
        if lowered not in ("true", "false"):
            raise InvalidValue(name, text, line)
        return lowered == "true"
    return text


def _time_literal(name: str, text: str, line: int) -> TimeOfDay:
    try:
        return TimeOfDay.parse(text)
    except ValueError:
        raise InvalidValue(name, text, line) from None


def _ordered_literal(name: str, text: str, line: int):
    """Type a literal used in a comparison or range (needs an ordered kind)."""
    text = text.strip()
    if name in _TIME_ATTRIBUTES or _CLOCK_RE.match(text):
        return _time_literal(name, text, line)
    if _INT_RE.match(text):
        return int(text)
    raise InvalidValue(name, text, line)


def parse_value_expression(name: str, text: str, line: int = 0) -> Predicate:
    """Turn a Value="..." expression into a predicate over attribute `name`."""
    text = text.strip()
    m = _MEMBER_RE.match(text)
    if m:
        members = [v.strip() for v in m.group("vals").split(",") if v.strip()]
        if not members:
            raise InvalidValue(name, text, line)
        return MemberOf(name, frozenset(members))
    m = _RANGE_RE.match(text)
    if m:
        if m.group("op1") != m.group("op2"):
            raise InvalidValue(name, text, line)
        lo = _ordered_literal(name, m.group("lo"), line)
        hi = _ordered_literal(name, m.group("hi"), line)
        if value_kind(lo) != value_kind(hi) or hi < lo:
            raise InvalidValue(name, text, line)
        return InRange(name, lo, hi, inclusive=m.group("op1") == "<=")
    m = _CMP_RE.match(text)
    if m:
        op, raw = m.group("op"), m.group("val")
        if op == "=":
            return Equals(name, _typed_literal(name, raw, line))
        return Compare(name, op, _ordered_literal(name, raw, line))
    return Equals(name, _typed_literal(name, text, line))


# --- Parser -------------------------------------------------------------------


class _TokenStream:
    def __init__(self, tokens: list[_Tag]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Tag | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Tag | None:
        tag = self.peek()
        if tag is not None:
            self.pos += 1
        return tag


def parse_policy_document(doc: str) -> PolicySet:
    """Parse the XML-like policy dialect into a PolicySet (document order)."""
    stream = _TokenStream(_lex(doc))
    first = stream.next()
    if first is None:
        raise MalformedDocument(1, "empty document")
    if first.kind == "text":
        raise MalformedDocument(first.line, "expected <PolicySet> or <Policy>")
    policies: list[Policy] = []
    if first.name == "PolicySet":
        _reject_attrs(first)
        if first.kind == "open":
            while True:
                tag = stream.next()
                if tag is None:
                    raise MalformedDocument(first.line, "<PolicySet> never closed")
                if tag.kind == "close" and tag.name == "PolicySet":
                    break
                policies.append(_parse_policy(tag, stream, len(policies)))
        elif first.kind == "close":
            raise MalformedDocument(first.line, "document starts with a closing tag")
    elif first.name == "Policy":
        policies.append(_parse_policy(first, stream, 0))
    else:
        raise UnknownElement(first.name, first.line)
    trailing = stream.next()
    if trailing is not None:
        raise MalformedDocument(trailing.line, "content after document root")
    try:
        return PolicySet(tuple(policies))
    except ValueError as exc:
        raise MalformedDocument(first.line, str(exc)) from None


def _reject_attrs(tag: _Tag, allowed: frozenset = frozenset()) -> None:
    for attr in tag.attrs:
        if attr not in allowed:
            raise MalformedDocument(tag.line, f"unexpected attribute {attr!r} on <{tag.name}>")


def _expect_open(tag: _Tag, stream: _TokenStream, name: str) -> bool:
    """True if the element has children (open), False for an empty element."""
    if tag.kind == "empty":
        return False
    if tag.kind == "open":
        return True
    raise MalformedDocument(tag.line, f"unexpected closing tag </{tag.name}> (expected <{name}>)")


def _parse_policy(tag: _Tag, stream: _TokenStream, index: int) -> Policy:
    if tag.kind == "text":
        raise MalformedDocument(tag.line, f"unexpected text {tag.name!r}")
    if tag.name != "Policy":
        raise UnknownElement(tag.name, tag.line)
    _reject_attrs(tag, frozenset({"PolicyId", "Effect"}))
    policy_id = tag.attrs.get("PolicyId", f"policy-{index + 1}")
    if not policy_id.strip():
        raise MalformedDocument(tag.line, "PolicyId must be non-empty")
    effect_text = tag.attrs.get("Effect", "ALLOW")
    try:
        effect = Effect(effect_text)
    except ValueError:
        raise InvalidValue("Effect", effect_text, tag.line) from None

    target = Target()
    condition: list[Predicate] = []
    obligations: list[Obligation] = []
    if _expect_open(tag, stream, "Policy"):
        seen: set[str] = set()
        while True:
            child = stream.next()
            if child is None:
                raise MalformedDocument(tag.line, "<Policy> never closed")
            if child.kind == "close" and child.name == "Policy":
                break
            if child.kind == "text":
                raise MalformedDocument(child.line, f"unexpected text {child.name!r} in <Policy>")
            if child.name in seen:
                raise MalformedDocument(child.line, f"duplicate <{child.name}> in <Policy>")
            seen.add(child.name)
            if child.name == "Target":
                target = _parse_target(child, stream)
            elif child.name == "Condition":
                condition = _parse_condition(child, stream)
            elif child.name == "Obligations":
                obligations = _parse_obligations(child, stream)
            else:
                raise UnknownElement(child.name, child.line)
    return Policy(
        id=policy_id,
        target=target,
        condition=tuple(condition),
        effect=effect,
        obligations=tuple(obligations),
    )


def _parse_target(tag: _Tag, stream: _TokenStream) -> Target:
    _reject_attrs(tag)
    subject: list[Predicate] = []
    resource: list[Predicate] = []
    actions: list[str] = []
    if not _expect_open(tag, stream, "Target"):
        return Target()
    while True:
        child = stream.next()
        if child is None:
            raise MalformedDocument(tag.line, "<Target> never closed")
        if child.kind == "close" and child.name == "Target":
            break
        if child.kind == "text":
            raise MalformedDocument(child.line, f"unexpected text {child.name!r} in <Target>")
        if child.name == "SubjectAttributes":
            subject.extend(_parse_attribute_block(child, stream))
        elif child.name == "ResourceAttributes":
            resource.extend(_parse_attribute_block(child, stream))
        elif child.name == "Action":
            actions.append(_parse_text_element(child, stream))
        else:
            raise UnknownElement(child.name, child.line)
    return Target(subject=tuple(subject), resource=tuple(resource), actions=tuple(actions))


def _parse_attribute_block(tag: _Tag, stream: _TokenStream) -> list[Predicate]:
    _reject_attrs(tag)
    predicates: list[Predicate] = []
    if not _expect_open(tag, stream, tag.name):
        return predicates
    while True:
        child = stream.next()
        if child is None:
            raise MalformedDocument(tag.line, f"<{tag.name}> never closed")
        if child.kind == "close" and child.name == tag.name:
            break
        if child.kind != "empty" or child.name != "Attribute":
            if child.kind == "text":
                raise MalformedDocument(child.line, f"unexpected text {child.name!r}")
            if child.name != "Attribute":
                raise UnknownElement(child.name, child.line)
            raise MalformedDocument(child.line, "<Attribute> must be self-closing")
        predicates.append(_predicate_from_attrs(child))
    return predicates


def _predicate_from_attrs(tag: _Tag, name_attr: str = "Name") -> Predicate:
    _reject_attrs(tag, frozenset({name_attr, "Value"}))
    if name_attr not in tag.attrs:
        raise MalformedDocument(tag.line, f"<{tag.name}> missing {name_attr}")
    if "Value" not in tag.attrs:
        raise MalformedDocument(tag.line, f"<{tag.name}> missing Value")
    name = tag.attrs[name_attr].strip()
    if not name:
        raise MalformedDocument(tag.line, f"<{tag.name}> {name_attr} must be non-empty")
    return parse_value_expression(name, tag.attrs["Value"], tag.line)


def _parse_condition(tag: _Tag, stream: _TokenStream) -> list[Predicate]:
    _reject_attrs(tag)
    predicates: list[Predicate] = []
    if not _expect_open(tag, stream, "Condition"):
        return predicates
    while True:
        child = stream.next()
        if child is None:
            raise MalformedDocument(tag.line, "<Condition> never closed")
        if child.kind == "close" and child.name == "Condition":
            break
        if child.kind == "text":
            raise MalformedDocument(child.line, f"unexpected text {child.name!r} in <Condition>")
        if child.name == "EnvironmentAttribute":
            if child.kind != "empty":
                raise MalformedDocument(child.line, "<EnvironmentAttribute> must be self-closing")
            predicates.append(_predicate_from_attrs(child))
        elif child.name == "AttributeMatch":
            # Alias used by consent policies: AttributeId instead of Name.
            if child.kind != "empty":
                raise MalformedDocument(child.line, "<AttributeMatch> must be self-closing")
            predicates.append(_predicate_from_attrs(child, name_attr="AttributeId"))
        else:
            raise UnknownElement(child.name, child.line)
    return predicates


def _parse_obligations(tag: _Tag, stream: _TokenStream) -> list[Obligation]:
    _reject_attrs(tag)
    obligations: list[Obligation] = []
    if not _expect_open(tag, stream, "Obligations"):
        return obligations
    while True:
        child = stream.next()
        if child is None:
            raise MalformedDocument(tag.line, "<Obligations> never closed")
        if child.kind == "close" and child.name == "Obligations":
            break
        if child.kind == "text":
            raise MalformedDocument(child.line, f"unexpected text {child.name!r} in <Obligations>")
        if child.name != "Obligation":
            raise UnknownElement(child.name, child.line)
        obligations.append(Obligation(_parse_text_element(child, stream)))
    return obligations


def _parse_text_element(tag: _Tag, stream: _TokenStream) -> str:
    if tag.kind == "empty":
        raise MalformedDocument(tag.line, f"<{tag.name}> must contain a token")
    _reject_attrs(tag)
    text_tag = stream.next()
    if text_tag is None or text_tag.kind != "text":
        raise MalformedDocument(tag.line, f"<{tag.name}> must contain a token")
    closer = stream.next()
    if closer is None or closer.kind != "close" or closer.name != tag.name:
        raise MalformedDocument(tag.line, f"<{tag.name}> never closed")
    return text_tag.name


# --- Serializer ---------------------------------------------------------------


def _escape_attr(text: str) -> str:
    return text.replace("&", "&amp;").replace('"', "&quot;")


def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;")


def _value_expression(pred: Predicate) -> tuple[str, str]:
    """(attribute name, Value text) for one predicate leaf."""
    if isinstance(pred, Equals):
        return pred.name, _literal_text(pred.value)
    if isinstance(pred, Compare):
        return pred.name, f"{pred.name}{pred.op}{_literal_text(pred.value)}"
    if isinstance(pred, InRange):
        op = "<=" if pred.inclusive else "<"
        return pred.name, f"{_literal_text(pred.lo)}{op}{pred.name}{op}{_literal_text(pred.hi)}"
    if isinstance(pred, MemberOf):
        return pred.name, f"{pred.name} in {{{', '.join(sorted(pred.values))}}}"
    raise TypeError(f"cannot serialize predicate {type(pred).__name__}")


def _literal_text(value: AttributeValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, TimeOfDay):
        return str(value)
    return str(value)


def serialize_policy_set(ps: PolicySet) -> str:
    """Canonical document text; parsing it back yields a structurally equal set."""
    if not ps.policies:
        return "<PolicySet/>\n"
    lines = ["<PolicySet>"]
    for policy in ps.policies:
        effect = f' Effect="DENY"' if policy.effect is Effect.DENY else ""
        lines.append(f'  <Policy PolicyId="{_escape_attr(policy.id)}"{effect}>')
        if policy.target.subject or policy.target.resource or policy.target.actions:
            lines.append("    <Target>")
            for block, preds in (("SubjectAttributes", policy.target.subject), ("ResourceAttributes", policy.target.resource)):
                if preds:
                    lines.append(f"      <{block}>")
                    for pred in preds:
                        name, value = _value_expression(pred)
                        lines.append(f'        <Attribute Name="{_escape_attr(name)}" Value="{_escape_attr(value)}"/>')
                    lines.append(f"      </{block}>")
            for action in policy.target.actions:
                lines.append(f"      <Action>{_escape_text(action)}</Action>")
            lines.append("    </Target>")
        if policy.condition:
            lines.append("    <Condition>")
            for pred in policy.condition:
                name, value = _value_expression(pred)
                lines.append(f'      <EnvironmentAttribute Name="{_escape_attr(name)}" Value="{_escape_attr(value)}"/>')
            lines.append("    </Condition>")
        if policy.obligations:
            lines.append("    <Obligations>")
            for obligation in policy.obligations:
                lines.append(f"      <Obligation>{_escape_text(obligation.kind)}</Obligation>")
            lines.append("    </Obligations>")
        lines.append("  </Policy>")
    lines.append("</PolicySet>")
    return "\n".join(lines) + "\n"


# --- JSON mirror ----------------------------------------------------------------


def _value_to_json(value: AttributeValue) -> dict:
    kind = value_kind(value)
    if kind == "time":
        return {"kind": "time", "value": value.minutes}
    if kind == "set":
        return {"kind": "set", "value": sorted(value)}
    return {"kind": kind, "value": value}


def _value_from_json(obj: dict) -> AttributeValue:
    kind, value = obj["kind"], obj["value"]
    if kind == "time":
        return TimeOfDay(int(value))
    if kind == "set":
        return frozenset(value)
    if kind == "int":
        return int(value)
    if kind == "bool":
        return bool(value)
    return str(value)


def _predicate_to_json(pred: Predicate) -> dict:
    if isinstance(pred, Equals):
        return {"op": "eq", "name": pred.name, "value": _value_to_json(pred.value)}
    if isinstance(pred, Compare):
        return {"op": "cmp", "name": pred.name, "cmp": pred.op, "value": _value_to_json(pred.value)}
    if isinstance(pred, InRange):
        return {
            "op": "range",
            "name": pred.name,
            "lo": _value_to_json(pred.lo),
            "hi": _value_to_json(pred.hi),
            "inclusive": pred.inclusive,
        }
    if isinstance(pred, MemberOf):
        return {"op": "member", "name": pred.name, "values": sorted(pred.values)}
    if isinstance(pred, AllOf):
        return {"op": "all", "children": [_predicate_to_json(c) for c in pred.children]}
    raise TypeError(f"cannot serialize predicate {type(pred).__name__}")


def _predicate_from_json(obj: dict) -> Predicate:
    op = obj["op"]
    if op == "eq":
        return Equals(obj["name"], _value_from_json(obj["value"]))
    if op == "cmp":
        return Compare(obj["name"], obj["cmp"], _value_from_json(obj["value"]))
    if op == "range":
        return InRange(obj["name"], _value_from_json(obj["lo"]), _value_from_json(obj["hi"]), obj.get("inclusive", True))
    if op == "member":
        return MemberOf(obj["name"], frozenset(obj["values"]))
    if op == "all":
        return AllOf(tuple(_predicate_from_json(c) for c in obj["children"]))
    raise ValueError(f"unknown predicate op {op!r}")


def policy_set_to_json(ps: PolicySet) -> str:
    doc = {
        "policies": [
            {
                "id": p.id,
                "effect": p.effect.value,
                "target": {
                    "subject": [_predicate_to_json(x) for x in p.target.subject],
                    "resource": [_predicate_to_json(x) for x in p.target.resource],
                    "actions": list(p.target.actions),
                },
                "condition": [_predicate_to_json(x) for x in p.condition],
                "obligations": [o.kind for o in p.obligations],
            }
            for p in ps.policies
        ]
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_policy_json(text: str) -> PolicySet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(exc.lineno, exc.msg) from None
    try:
        policies = tuple(
            Policy(
                id=p["id"],
                target=Target(
                    subject=tuple(_predicate_from_json(x) for x in p.get("target", {}).get("subject", [])),
                    resource=tuple(_predicate_from_json(x) for x in p.get("target", {}).get("resource", [])),
                    actions=tuple(p.get("target", {}).get("actions", [])),
                ),
                condition=tuple(_predicate_from_json(x) for x in p.get("condition", [])),
                effect=Effect(p.get("effect", "ALLOW")),
                obligations=tuple(Obligation(o) for o in p.get("obligations", [])),
            )
            for p in doc.get("policies", [])
        )
        return PolicySet(policies)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedDocument(1, f"bad JSON policy document: {exc}") from None


def load_policy_file(path) -> PolicySet:
    """Load a policy document; `.json` files use the JSON mirror format."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return parse_policy_json(text)
    return parse_policy_document(text)


# --- Validation ------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def _sensitivity_bounds(pred: Predicate) -> list[int]:
    if getattr(pred, "name", None) != "sensitivity":
        return []
    if isinstance(pred, Equals) and isinstance(pred.value, int):
        return [pred.value]
    if isinstance(pred, Compare) and isinstance(pred.value, int):
        return [pred.value]
    if isinstance(pred, InRange) and isinstance(pred.lo, int):
        return [pred.lo, pred.hi]
    return []


def validate_policy(policy: Policy) -> list[Diagnostic]:
    """Structural diagnostics; an empty list means the invariants hold."""
    diagnostics: list[Diagnostic] = []
    if not policy.id or not policy.id.strip():
        diagnostics.append(Diagnostic("EmptyId", "policy id is empty"))
    for obligation in policy.obligations:
        if obligation.is_extension:
            diagnostics.append(
                Diagnostic("UnknownObligation", f"obligation {obligation.kind!r} outside the built-in vocabulary")
            )
    for pred in (*policy.target.subject, *policy.target.resource, *policy.condition):
        for bound in _sensitivity_bounds(pred):
            if not 1 <= bound <= 5:
                diagnostics.append(
                    Diagnostic("InvalidValue", f"sensitivity bound {bound} outside [1,5] in {pred}")
                )
    return diagnostics
