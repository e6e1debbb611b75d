from pathlib import Path

import pytest

from wsbind import bpel
from wsbind import model as m
from wsbind.errors import AlreadyBound, MalformedDocument, NoCandidate, UnboundActivity, UnknownActivity
from wsbind.matcher import discover
from wsbind.model import Activity, ProcessDocument

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def report(silver_doc, silver_registry, silver_ontology):
    return discover(silver_doc, silver_registry, silver_ontology)


@pytest.fixture(scope="module")
def abstract(silver_doc):
    return bpel.emit_abstract_bpel(silver_doc)


def _doc(behavior, *ids):
    return ProcessDocument("p", "P", m.MICRO, "g", ("Clerk",), (), tuple(Activity(i) for i in ids), behavior)


def test_silver_abstract_document(abstract):
    assert len(abstract.invokes()) == 8
    assert [i.name for i in abstract.abstract_invokes()] == ["GetRealTimeSilverPrice", "CurrenciesExchange"]
    assert all(i.partner_link == bpel.ABSTRACT_LINK for i in abstract.abstract_invokes())
    assert len(abstract.variables) == 16


def test_single_task():
    b = bpel.emit_abstract_bpel(_doc(m.invoke("t"), "t"))
    assert b.shape() == ["sequence", "invoke"]
    [inv] = b.invokes()
    assert (inv.partner_link, inv.input_variable, inv.output_variable) == ("pl_Clerk", "tIn", "tOut")


def test_exclusive_maps_to_if_else():
    beh = m.exclusive(("$x > 1", m.invoke("a")), otherwise=m.invoke("b"))
    b = bpel.emit_abstract_bpel(_doc(beh, "a", "b"))
    node = b.body.children[0]
    assert isinstance(node, bpel.If)
    assert node.branches[0][0] == "$x > 1"
    assert node.else_body is not None
    text = bpel.serialize_bpel(b).decode()
    assert "<condition>$x &gt; 1</condition>" in text and "<else>" in text


def test_parallel_maps_to_flow():
    b = bpel.emit_abstract_bpel(_doc(m.parallel(m.invoke("a"), m.invoke("b")), "a", "b"))
    assert b.shape() == ["sequence", "flow", "invoke", "invoke"]


def test_bind_silver(abstract, report):
    bound = bpel.bind(abstract, bpel.select_top(report, 1))
    assert bound.abstract_invokes() == []
    new = [pl.name for pl in bound.partner_links if pl not in abstract.partner_links]
    assert new == ["pl_fin-realtime-metals", "pl_fin-forex-exchange"]
    assert bound.shape() == abstract.shape()
    changed = [(a.name, b.operation) for a, b in zip(abstract.invokes(), bound.invokes()) if a != b]
    assert changed == [("GetRealTimeSilverPrice", "getSilverSpotPrice"), ("CurrenciesExchange", "convert")]


def test_bind_missing_selection(abstract):
    selection = bpel.parse_binding((FIXTURES / "missing-currencies.binding.xml").read_bytes())
    with pytest.raises(UnboundActivity):
        bpel.bind(abstract, selection)


def test_bind_twice():
    bound = bpel.parse_bpel((FIXTURES / "already-bound.bpel.xml").read_bytes())
    selection = bpel.parse_binding((FIXTURES / "silver.binding.xml").read_bytes())
    with pytest.raises(AlreadyBound):
        bpel.bind(bound, selection)


def test_bind_unknown_activity(abstract, report):
    selection = dict(bpel.select_top(report, 1))
    selection["Pay"] = selection["CurrenciesExchange"]
    with pytest.raises(UnknownActivity):
        bpel.bind(abstract, selection)


def test_select_top(report):
    sel = bpel.select_top(report, 1)
    assert sel["GetRealTimeSilverPrice"].service_id == "fin-realtime-metals"
    with pytest.raises(NoCandidate) as err:
        bpel.select_top(report, 2)
    assert err.value.activity_id == "CurrenciesExchange"


def test_select_second(report):
    silver_only = type(report)(**{**report.__dict__, "activities": report.activities[:1]})
    assert bpel.select_top(silver_only, 2)["GetRealTimeSilverPrice"].service_id == "fin-metals-daily"


def test_select_from_empty_candidates():
    from wsbind.report import parse_report

    rep = parse_report((FIXTURES / "empty-candidates.matches.xml").read_bytes())
    with pytest.raises(NoCandidate, match="CurrenciesExchange"):
        bpel.select_top(rep, 1)


def test_round_trips(abstract, report):
    bound = bpel.bind(abstract, bpel.select_top(report, 1))
    for doc in (abstract, bound):
        data = bpel.serialize_bpel(doc)
        again = bpel.parse_bpel(data)
        assert again == doc
        assert bpel.serialize_bpel(again) == data
    sel = bpel.select_top(report, 1)
    assert bpel.parse_binding(bpel.serialize_binding(sel)) == sel


def test_stored_bpel_fixtures_are_current(abstract):
    assert (FIXTURES / "silver-abstract.bpel.xml").read_bytes() == bpel.serialize_bpel(abstract)
    for name in ("silver-abstract.bpel.xml", "already-bound.bpel.xml"):
        data = (FIXTURES / name).read_bytes()
        assert bpel.serialize_bpel(bpel.parse_bpel(data)) == data


def test_namespaces(abstract, report):
    assert bpel.NS_ABSTRACT.encode() in bpel.serialize_bpel(abstract)
    bound = bpel.bind(abstract, bpel.select_top(report, 1))
    assert bpel.NS_EXECUTABLE.encode() in bpel.serialize_bpel(bound)


def test_inconsistent_bpel_rejected():
    bad = (FIXTURES / "already-bound.bpel.xml").read_bytes().replace(b'partnerLink="pl_fin-forex-exchange"', b'partnerLink="pl_nobody"')
    with pytest.raises(MalformedDocument):
        bpel.parse_bpel(bad)
