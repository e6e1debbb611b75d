import textwrap
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsbind import model as m
from wsbind.errors import InvariantViolation, MalformedDocument, UnresolvedReference
from wsbind.model import Activity, Parameter, ProcessDocument, abstract_activities
from wsbind.process import parse_process, serialize_process, validate_process

FIN = "http://example.org/fin#"


def doc_xml(body, kind="micro", roles=("Clerk",)):
    role_xml = "".join(f'<role name="{r}"/>' for r in roles)
    return textwrap.dedent(
        f"""<?xml version="1.0" encoding="UTF-8"?>
        <process id="p" name="P" kind="{kind}"><goal>Do it</goal>{role_xml}{body}</process>"""
    ).encode()


MINIMAL = doc_xml('<activity id="t" kind="task"/><behavior><invoke activity="t"/></behavior>')


def minimal_doc(**overrides):
    base = ProcessDocument(
        id="p", name="P", kind=m.MICRO, goal="Do it", roles=("Clerk",),
        activities=(Activity("t"),), behavior=m.invoke("t"),
    )
    return replace(base, **overrides)


def test_silver_fixture_parses(silver_doc):
    assert silver_doc.kind == m.ELEMENTARY
    assert len(list(silver_doc.iter_activities())) == 8
    assert len(silver_doc.roles) == 3
    assert [a.id for a in abstract_activities(silver_doc)] == ["GetRealTimeSilverPrice", "CurrenciesExchange"]


def test_silver_fixture_is_valid(silver_doc):
    assert validate_process(silver_doc) == []


def test_minimal_document():
    doc = parse_process(MINIMAL)
    assert [a.id for a in doc.iter_activities()] == ["t"]
    assert doc == minimal_doc()


def test_invoke_of_missing_activity():
    with pytest.raises(UnresolvedReference) as err:
        parse_process(doc_xml('<activity id="t" kind="task"/><behavior><invoke activity="nope"/></behavior>'))
    assert "invoke[nope]" in err.value.path


def test_unknown_parameter_type():
    with pytest.raises(UnresolvedReference):
        parse_process(doc_xml('<activity id="t" kind="task"><input name="x" type="Ghost"/></activity>'
                              '<behavior><invoke activity="t"/></behavior>'))


def test_micro_process_with_two_roles():
    with pytest.raises(InvariantViolation) as err:
        parse_process(doc_xml('<activity id="t" kind="task"/><behavior><invoke activity="t"/></behavior>',
                              roles=("A", "B")))
    assert err.value.path == "/process[p]"


@pytest.mark.parametrize("text", [b"<process", b"<service id='x'/>", doc_xml("<bogus/>")])
def test_malformed(text):
    with pytest.raises(MalformedDocument):
        parse_process(text)


def test_task_with_children_is_one_violation():
    doc = minimal_doc(activities=(Activity("t", children=(Activity("c"),)),),
                      behavior=m.sequence(m.invoke("t"), m.invoke("c")))
    violations = validate_process(doc)
    assert len(violations) == 1
    assert "task cannot have child" in violations[0].message


def test_abstract_without_functionality_is_one_violation():
    a = Activity("t", binding=m.ABSTRACT, domain=FIN + "Finance")
    violations = validate_process(minimal_doc(activities=(a,)))
    assert [v.message for v in violations] == ["abstract activity lacks a functionality concept"]


def test_abstract_parameter_needs_concept():
    a = Activity("t", binding=m.ABSTRACT, domain=FIN + "F", functionality=FIN + "G",
                 outputs=(Parameter("x", m.OUTPUT, "decimal"),))
    assert len(validate_process(minimal_doc(activities=(a,)))) == 1


def test_abstract_subprocess_rejected():
    a = Activity("s", kind=m.SUBPROCESS, binding=m.ABSTRACT, domain=FIN + "F", functionality=FIN + "G",
                 children=(Activity("c"),))
    violations = validate_process(minimal_doc(activities=(a,), behavior=m.invoke("s")))
    assert [v.message for v in violations] == ["only tasks can be abstract"]


def test_subprocess_without_children():
    doc = minimal_doc(activities=(Activity("t", kind=m.SUBPROCESS),))
    assert any("at least one child" in v.message for v in validate_process(doc))


def test_activity_invoked_twice():
    doc = minimal_doc(behavior=m.sequence(m.invoke("t"), m.invoke("t")))
    assert any("already invoked" in v.message for v in validate_process(doc))


def test_activity_never_invoked():
    doc = minimal_doc(activities=(Activity("t"), Activity("u")))
    assert [v.path for v in validate_process(doc)] == ["/process[p]/activity[u]"]


def test_kind_nesting_rules():
    child = minimal_doc(id="c", kind=m.MICRO, behavior=None, activities=(Activity("t"),))
    doc = minimal_doc(kind=m.MACRO, roles=(), activities=(), child_processes=(child,), behavior=m.invoke("c"))
    assert any("cannot contain a micro" in v.message for v in validate_process(doc))


def test_recursive_record_type():
    types = (m.DataType("A", m.RECORD, (m.Field("b", "B"),)), m.DataType("B", m.RECORD, (m.Field("a", "A"),)))
    msgs = [v.message for v in validate_process(minimal_doc(types=types))]
    assert msgs.count("recursive type definition") == 2


def test_empty_goal_and_bad_trigger():
    a = Activity("t", events=(m.Event("e", "pause"),))
    msgs = {v.message for v in validate_process(minimal_doc(goal=" ", activities=(a,)))}
    assert msgs == {"goal is empty", "unknown trigger 'pause'"}


def test_violations_sorted_by_path():
    doc = minimal_doc(goal="", activities=(Activity("t", kind="weird"), Activity("u", binding="odd")))
    paths = [v.path for v in validate_process(doc)]
    assert paths == sorted(paths)
    assert len(paths) >= 3


def test_abstract_nested_in_subprocess_is_found():
    leaf = Activity("leaf", binding=m.ABSTRACT, domain=FIN + "F", functionality=FIN + "G")
    sub = Activity("s", kind=m.SUBPROCESS, children=(Activity("x"), leaf))
    doc = minimal_doc(activities=(sub,), behavior=m.invoke("s"))
    assert validate_process(doc) == []
    assert [a.id for a in abstract_activities(doc)] == ["leaf"]


def test_no_abstract_activities():
    assert abstract_activities(parse_process(MINIMAL)) == []


def test_optional_assertion_attribute_is_recorded():
    body = (
        f'<activity id="t" kind="task"><policy><alternative>'
        f'<assertion name="E" concept="{FIN}E" optional="true"/></alternative></policy></activity>'
        '<behavior><invoke activity="t"/></behavior>'
    )
    doc = parse_process(doc_xml(body))
    assert len(doc.warnings) == 1 and "optional" in doc.warnings[0]


def test_serializer_format(silver_doc):
    out = serialize_process(silver_doc)
    text = out.decode("utf-8")
    assert "\r" not in text
    assert text.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<process id="silver-trading" name="SilverTrading" kind="elementary">\n  <goal>')
    assert '<activity id="GetRealTimeSilverPrice" kind="task" binding="abstract">' in text


def test_round_trip_silver(silver_doc):
    again = parse_process(serialize_process(silver_doc))
    assert again == silver_doc
    assert serialize_process(again) == serialize_process(silver_doc)


def test_round_trip_minimal():
    doc = parse_process(MINIMAL)
    assert parse_process(serialize_process(doc)) == doc


# -- generated documents: parse o serialize o parse is the identity, and parse implies valid

@st.composite
def behaviors(draw, ids):
    """A tree that invokes every id in ``ids`` exactly once."""
    if len(ids) == 1 and draw(st.booleans()):
        return m.invoke(ids[0])
    kind = draw(st.sampled_from([m.SEQUENCE, m.PARALLEL, m.EXCLUSIVE]))
    cut = draw(st.integers(0, len(ids)))
    groups = [g for g in (ids[:cut], ids[cut:]) if g] if len(ids) > 1 else [ids]
    kids = [draw(behaviors(g)) for g in groups]
    if kind == m.EXCLUSIVE:
        otherwise = kids.pop() if len(kids) > 1 and draw(st.booleans()) else None
        return m.exclusive(*((f"$x > {i}", k) for i, k in enumerate(kids)), otherwise=otherwise)
    return m.BehaviorNode(kind, children=tuple(kids))


@st.composite
def documents(draw):
    n = draw(st.integers(1, 5))
    acts = []
    for i in range(n):
        abstract = draw(st.booleans())
        params = tuple(
            Parameter(f"p{j}", d, draw(st.sampled_from(["decimal", "string", "Rec"])), FIN + f"c{j}")
            for j, d in enumerate(draw(st.lists(st.sampled_from([m.INPUT, m.OUTPUT]), max_size=3)))
        )
        acts.append(
            Activity(
                f"a{i}",
                binding=m.ABSTRACT if abstract else draw(st.sampled_from([m.INTERNAL, m.EXTERNAL])),
                domain=FIN + "D" if abstract else None,
                functionality=FIN + "F" if abstract else None,
                inputs=tuple(p for p in params if p.direction == m.INPUT),
                outputs=tuple(p for p in params if p.direction == m.OUTPUT),
                resources=(m.Resource("r", draw(st.text("abc <&>", max_size=5)).strip()),) if draw(st.booleans()) else (),
            )
        )
    types = (m.DataType("Rec", m.RECORD, (m.Field("v", "decimal"),)),)
    return ProcessDocument("p", "P", m.MICRO, "goal & <stuff>", ("R",), types, tuple(acts),
                           draw(behaviors([a.id for a in acts])))


@settings(max_examples=60, deadline=None)
@given(documents())
def test_generated_round_trip(doc):
    assert validate_process(doc) == []
    once = parse_process(serialize_process(doc))
    assert once == doc
    assert parse_process(serialize_process(once)) == once
