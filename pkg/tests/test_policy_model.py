from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CARDIAC_POLICY_DOC, REVOKE_POLICY_DOC, policy_sets
from phigate.policy import (
    AllOf,
    AttributeBag,
    BagCategory,
    Compare,
    Effect,
    Equals,
    InRange,
    InvalidValue,
    MalformedDocument,
    MemberOf,
    Obligation,
    Policy,
    PolicyDocumentError,
    PolicySet,
    Target,
    TimeOfDay,
    UnknownElement,
    parse_policy_document,
    parse_policy_json,
    policy_set_to_json,
    serialize_policy_set,
    subject_bag,
    validate_policy,
)


class TestTimeOfDay:
    def test_parse_clock(self):
        assert TimeOfDay.parse("08:30").minutes == 510

    def test_parse_hours(self):
        assert TimeOfDay.parse("18").minutes == 1080

    @pytest.mark.parametrize("bad", ["24:00", "-1", "25", "8:5", "noon"])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            TimeOfDay.parse(bad)

    def test_str_round_trips(self):
        t = TimeOfDay(510)
        assert TimeOfDay.parse(str(t)) == t


class TestAttributeBag:
    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            subject_bag(role="")

    def test_sensitivity_bounds(self):
        with pytest.raises(ValueError):
            AttributeBag(BagCategory.RESOURCE, {"sensitivity": 7})
        AttributeBag(BagCategory.RESOURCE, {"sensitivity": 5})  # ok

    def test_unknown_names_permitted(self):
        bag = subject_bag(role="nurse", favourite_colour="teal")
        assert bag.get("favourite_colour") == "teal"


class TestPredicates:
    def test_absent_attribute_is_false(self):
        bag = subject_bag(role="nurse")
        assert not Equals("department", "icu").holds(bag)
        assert not Compare("clearance", ">=", 2).holds(bag)
        assert not InRange("clearance", 1, 5).holds(bag)
        assert not MemberOf("department", frozenset({"icu"})).holds(bag)

    def test_empty_conjunction_is_true(self):
        assert AllOf(()).holds(subject_bag())

    def test_kind_mismatch_is_false_not_error(self):
        bag = subject_bag(clearance="high")  # text where int is compared
        assert not Compare("clearance", ">=", 2).holds(bag)
        # bool is not int even though Python says True == 1
        bag2 = subject_bag(clearance=True)
        assert not Equals("clearance", 1).holds(bag2)

    def test_range_inclusivity(self):
        bag = AttributeBag(BagCategory.ENVIRONMENT, {"time": TimeOfDay(1080)})
        assert InRange("time", TimeOfDay(480), TimeOfDay(1080), inclusive=True).holds(bag)
        assert not InRange("time", TimeOfDay(480), TimeOfDay(1080), inclusive=False).holds(bag)

    @given(st.integers(0, 1439))
    def test_evaluation_is_pure(self, minutes):
        pred = InRange("time", TimeOfDay(480), TimeOfDay(1080))
        bag = AttributeBag(BagCategory.ENVIRONMENT, {"time": TimeOfDay(minutes)})
        assert pred.holds(bag) == pred.holds(bag) == (480 <= minutes <= 1080)


class TestObligation:
    def test_known_vocabulary(self):
        assert not Obligation("log_access").is_extension
        assert Obligation("notify_dpo").is_extension

    def test_empty_kind_rejected(self):
        with pytest.raises(ValueError):
            Obligation("")


class TestParseDocuments:
    def test_cardiac_document(self):
        ps = parse_policy_document(CARDIAC_POLICY_DOC)
        assert len(ps) == 1
        policy = ps.policies[0]
        assert policy.id == "policy-1"
        assert policy.effect is Effect.ALLOW
        assert Equals("role", "cardiologist") in policy.target.subject
        assert Equals("data_type", "cardiac") in policy.target.resource
        assert policy.target.actions == ("Read",)
        assert policy.condition == (InRange("time", TimeOfDay(480), TimeOfDay(1080), True),)
        assert [o.kind for o in policy.obligations] == ["log_access", "sanitize_phi"]

    def test_revocation_document(self):
        ps = parse_policy_document(REVOKE_POLICY_DOC)
        policy = ps.policies[0]
        assert policy.id == "MW-Revoke"
        assert policy.condition == (Equals("consent_status", "revoked"),)
        assert [o.kind for o in policy.obligations] == ["TERMINATE_SESSION", "DELETE_CACHED_PHI"]

    def test_empty_policy_set(self):
        assert parse_policy_document("<PolicySet/>").policies == ()

    def test_document_order_preserved(self):
        doc = f"<PolicySet>{REVOKE_POLICY_DOC}{CARDIAC_POLICY_DOC}</PolicySet>"
        ps = parse_policy_document(doc)
        assert [p.id for p in ps.policies] == ["MW-Revoke", "policy-2"]


class TestParserErrors:
    def test_unknown_element(self):
        with pytest.raises(UnknownElement):
            parse_policy_document("<PolicySet><Rule/></PolicySet>")

    def test_unknown_element_inside_policy(self):
        with pytest.raises(UnknownElement):
            parse_policy_document("<Policy><Scope/></Policy>")

    def test_malformed_reports_line(self):
        with pytest.raises(MalformedDocument) as exc:
            parse_policy_document("<PolicySet>\n<Policy>\n<Target>")
        assert exc.value.line >= 1

    def test_invalid_sensitivity_value(self):
        doc = (
            '<Policy><Target><ResourceAttributes><Attribute Name="sensitivity" Value="high"/>'
            "</ResourceAttributes></Target></Policy>"
        )
        with pytest.raises(InvalidValue) as exc:
            parse_policy_document(doc)
        assert exc.value.attribute == "sensitivity"

    def test_mixed_strictness_range_rejected(self):
        doc = '<Policy><Condition><EnvironmentAttribute Name="time" Value="8<=t<18"/></Condition></Policy>'
        with pytest.raises(InvalidValue):
            parse_policy_document(doc)

    def test_duplicate_policy_ids(self):
        doc = '<PolicySet><Policy PolicyId="a"/><Policy PolicyId="a"/></PolicySet>'
        with pytest.raises(MalformedDocument):
            parse_policy_document(doc)

    @given(st.text(max_size=80))
    @settings(max_examples=300, deadline=None)
    def test_parser_totality_fuzz(self, text):
        # Any input either parses or raises a diagnostic error, never crashes.
        try:
            parse_policy_document(text)
        except PolicyDocumentError:
            pass


class TestSerialization:
    def test_empty_set_canonical(self):
        assert serialize_policy_set(PolicySet()) == "<PolicySet/>\n"

    def test_shipped_style_documents_round_trip(self):
        for document in (CARDIAC_POLICY_DOC, REVOKE_POLICY_DOC):
            ps = parse_policy_document(document)
            assert parse_policy_document(serialize_policy_set(ps)) == ps

    def test_deny_effect_round_trips(self):
        ps = PolicySet((Policy(id="block", effect=Effect.DENY),))
        assert parse_policy_document(serialize_policy_set(ps)) == ps

    @given(policy_sets())
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, ps):
        assert parse_policy_document(serialize_policy_set(ps)) == ps

    @given(policy_sets())
    @settings(max_examples=100, deadline=None)
    def test_json_mirror_round_trip(self, ps):
        assert parse_policy_json(policy_set_to_json(ps)) == ps

    def test_nested_conjunctions_flatten(self):
        nested = Policy(
            id="n",
            target=Target(subject=(AllOf((Equals("role", "nurse"), AllOf((Equals("department", "icu"),)))),)),
        )
        assert nested.target.subject == (Equals("role", "nurse"), Equals("department", "icu"))

    def test_load_policy_file_dispatches_on_extension(self, tmp_path):
        from phigate.policy import load_policy_file

        ps = parse_policy_document(CARDIAC_POLICY_DOC)
        xml_path = tmp_path / "policies.xml"
        xml_path.write_text(serialize_policy_set(ps), encoding="utf-8")
        json_path = tmp_path / "policies.json"
        json_path.write_text(policy_set_to_json(ps), encoding="utf-8")
        assert load_policy_file(xml_path) == ps
        assert load_policy_file(json_path) == ps


class TestValidatePolicy:
    def test_clean_shipped_policy(self):
        ps = parse_policy_document(CARDIAC_POLICY_DOC)
        assert validate_policy(ps.policies[0]) == []

    def test_sensitivity_out_of_bounds(self):
        policy = Policy(id="x", target=Target(resource=(Equals("sensitivity", 7),)))
        codes = [d.code for d in validate_policy(policy)]
        assert codes == ["InvalidValue"]

    def test_empty_id(self):
        codes = [d.code for d in validate_policy(Policy(id=""))]
        assert codes == ["EmptyId"]

    def test_extension_obligation_flagged(self):
        policy = Policy(id="x", obligations=(Obligation("notify_dpo"),))
        codes = [d.code for d in validate_policy(policy)]
        assert codes == ["UnknownObligation"]
