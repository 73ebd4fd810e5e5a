from __future__ import annotations

import pytest
from hypothesis import strategies as st

from phigate.policy import (
    Compare,
    Effect,
    Equals,
    InRange,
    MemberOf,
    Obligation,
    Policy,
    PolicySet,
    Target,
    TimeOfDay,
    parse_policy_document,
)

# Cardiac-access rule as written in the source policy dialect (no PolicyId:
# the parser assigns document-order ids).
CARDIAC_POLICY_DOC = """\
<Policy>
  <Target>
    <SubjectAttributes>
      <Attribute Name="role" Value="cardiologist"/>
    </SubjectAttributes>
    <ResourceAttributes>
      <Attribute Name="data_type" Value="cardiac"/>
    </ResourceAttributes>
    <Action>Read</Action>
  </Target>
  <Condition>
    <EnvironmentAttribute Name="time" Value="8<=t<=18"/>
  </Condition>
  <Obligations>
    <Obligation>log_access</Obligation>
    <Obligation>sanitize_phi</Obligation>
  </Obligations>
</Policy>
"""

REVOKE_POLICY_DOC = """\
<Policy PolicyId="MW-Revoke">
  <Condition>
    <AttributeMatch AttributeId="consent_status" Value="revoked"/>
  </Condition>
  <Obligations>
    <Obligation>TERMINATE_SESSION</Obligation>
    <Obligation>DELETE_CACHED_PHI</Obligation>
  </Obligations>
</Policy>
"""


@pytest.fixture(scope="session")
def cardiac_policy_set() -> PolicySet:
    return parse_policy_document(CARDIAC_POLICY_DOC)


@pytest.fixture(scope="session")
def gazetteer():
    from phigate.phi import GazetteerDetector

    return GazetteerDetector()


@pytest.fixture(scope="session")
def corpus_500():
    from phigate.harness import generate_corpus

    return generate_corpus(500, 7)


# --- strategies for document round-trip properties ---------------------------

_TOKEN = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_",
    min_size=1,
    max_size=12,
)
_TEXT_VALUE = st.builds(
    lambda head, tail: (head + " " + tail).strip(),
    _TOKEN,
    _TOKEN,
)
_TEXT_ATTRS = st.sampled_from(["role", "department", "data_type", "owner", "network_security", "consent_status"])
_INT_ATTRS = st.sampled_from(["sensitivity", "clearance"])
_TIMES = st.integers(min_value=0, max_value=1439).map(TimeOfDay)


def _eq_text():
    return st.builds(Equals, _TEXT_ATTRS, _TEXT_VALUE)


def _eq_int():
    return st.builds(Equals, _INT_ATTRS, st.integers(min_value=-20, max_value=20))


def _cmp_int():
    return st.builds(Compare, _INT_ATTRS, st.sampled_from(["<", "<=", ">=", ">"]), st.integers(-9, 9))


def _range_int():
    return st.builds(
        lambda name, a, b, inc: InRange(name, min(a, b), max(a, b), inc),
        _INT_ATTRS,
        st.integers(-9, 9),
        st.integers(-9, 9),
        st.booleans(),
    )


def _range_time():
    return st.builds(
        lambda a, b, inc: InRange("time", min(a, b), max(a, b), inc),
        _TIMES,
        _TIMES,
        st.booleans(),
    )


def _member():
    return st.builds(
        MemberOf,
        _TEXT_ATTRS,
        st.frozensets(_TOKEN, min_size=1, max_size=4),
    )


def predicates():
    return st.one_of(_eq_text(), _eq_int(), _cmp_int(), _range_int(), _range_time(), _member())


def policies(index: int | None = None):
    return st.builds(
        lambda pid, subj, res, actions, cond, effect, obls: Policy(
            id=pid,
            target=Target(subject=tuple(subj), resource=tuple(res), actions=tuple(actions)),
            condition=tuple(cond),
            effect=effect,
            obligations=tuple(Obligation(o) for o in obls) if effect is Effect.ALLOW else (),
        ),
        _TOKEN,
        st.lists(predicates(), max_size=3),
        st.lists(predicates(), max_size=3),
        st.lists(st.sampled_from(["read", "write", "export", "Read"]), max_size=2, unique=True),
        st.lists(_range_time() | _eq_text(), max_size=2),
        st.sampled_from([Effect.ALLOW, Effect.ALLOW, Effect.ALLOW, Effect.DENY]),
        st.lists(
            st.sampled_from(["log_access", "sanitize_phi", "REDACT_ALL", "REDACT_DEMO", "MASK_CODES", "notify_dpo"]),
            max_size=3,
            unique=True,
        ),
    )


def policy_sets():
    def rename(items):
        return PolicySet(
            tuple(
                Policy(
                    id=f"p{i}-{p.id}",
                    target=p.target,
                    condition=p.condition,
                    effect=p.effect,
                    obligations=p.obligations,
                )
                for i, p in enumerate(items)
            )
        )

    return st.lists(policies(), max_size=5).map(rename)


# --- acceptance summary -------------------------------------------------------

_ACCEPTANCE: list = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, passed in _ACCEPTANCE:
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
