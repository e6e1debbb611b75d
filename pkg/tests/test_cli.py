import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from wsbind import bpel
from wsbind.cli import main
from wsbind.fixtures import SILVER_ONTOLOGY, SILVER_PROCESS, SILVER_REGISTRY

FIXTURES = Path(__file__).parent / "fixtures"
P, R, O = str(SILVER_PROCESS), str(SILVER_REGISTRY), str(SILVER_ONTOLOGY)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small_registry(tmp_path):
    d = tmp_path / "reg"
    d.mkdir()
    for sid in ("fin-realtime-metals", "fin-budget-quotes", "log-parcel-tracking"):
        shutil.copy(SILVER_REGISTRY / f"{sid}.service.xml", d)
    return d


def test_validate_ok(capsys):
    assert run(capsys, "validate", "--process", P)[:2] == (0, "OK\n")


def test_validate_task_with_children(capsys):
    code, out, _ = run(capsys, "validate", "--process", str(FIXTURES / "task-with-children.process.xml"))
    assert code == 2
    assert out.splitlines() == ["/process[broken]/activity[t]: a task cannot have child activities"]


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--process", str(tmp_path / "none.xml"))
    assert code == 2 and "cannot read" in err


def test_discover_small_registry(capsys, small_registry):
    code, out, _ = run(capsys, "discover", "--process", P, "--registry", str(small_registry), "--ontology", O)
    # CurrenciesExchange has no candidate in this registry
    assert code == 1
    assert out.count("<activity ") == 2


def test_discover_three_services_covering_both(capsys, tmp_path):
    d = tmp_path / "reg"
    d.mkdir()
    for sid in ("fin-realtime-metals", "fin-forex-exchange", "fin-budget-quotes"):
        shutil.copy(SILVER_REGISTRY / f"{sid}.service.xml", d)
    code, out, err = run(capsys, "discover", "--process", P, "--registry", str(d), "--ontology", O)
    assert code == 0 and err == ""
    assert out.count("<activity ") == 2


def test_discover_full(capsys, tmp_path):
    target = tmp_path / "m.xml"
    code, out, _ = run(capsys, "discover", "--process", P, "--registry", R, "--ontology", O, "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes() == (FIXTURES / "silver.matches.xml").read_bytes()


def test_discover_empty_registry(capsys, tmp_path):
    code, _, err = run(capsys, "discover", "--process", P, "--registry", str(tmp_path), "--ontology", O)
    assert code == 1
    assert "no candidate for activity GetRealTimeSilverPrice" in err


def test_discover_negative_tau(capsys):
    assert run(capsys, "discover", "--process", P, "--registry", R, "--ontology", O, "--tau", "-1")[0] == 2


def test_discover_bad_weights(capsys):
    assert run(capsys, "discover", "--process", P, "--registry", R, "--ontology", O, "--weights", "1,1,1,1")[0] == 2


def test_discover_missing_registry(capsys, tmp_path):
    assert run(capsys, "discover", "--process", P, "--registry", str(tmp_path / "x"), "--ontology", O)[0] == 2


def test_discover_jobs_identical(capsys):
    a = run(capsys, "discover", "--process", P, "--registry", R, "--ontology", O, "--jobs", "1")[1]
    b = run(capsys, "discover", "--process", P, "--registry", R, "--ontology", O, "--jobs", "8")[1]
    assert a == b


def test_abstract(capsys):
    code, out, _ = run(capsys, "abstract", "--process", P)
    assert code == 0
    assert out.encode() == (FIXTURES / "silver-abstract.bpel.xml").read_bytes()


def test_bind_from_report(capsys):
    code, out, _ = run(capsys, "bind", "--process", P, "--matches", str(FIXTURES / "silver.matches.xml"))
    assert code == 0
    doc = bpel.parse_bpel(out.encode())
    assert doc.abstract_invokes() == []
    assert out.encode() == (FIXTURES / "already-bound.bpel.xml").read_bytes()


def test_bind_from_binding_file(capsys):
    code, out, _ = run(capsys, "bind", "--process", P, "--binding", str(FIXTURES / "silver.binding.xml"))
    assert code == 0 and out.encode() == (FIXTURES / "already-bound.bpel.xml").read_bytes()


def test_bind_empty_candidates(capsys):
    code, _, err = run(capsys, "bind", "--process", P, "--matches", str(FIXTURES / "empty-candidates.matches.xml"))
    assert code == 1 and "CurrenciesExchange" in err


def test_bind_rank_99(capsys):
    assert run(capsys, "bind", "--process", P, "--matches", str(FIXTURES / "silver.matches.xml"), "--rank", "99")[0] == 1


def test_bind_partial_selection(capsys):
    code, _, err = run(capsys, "bind", "--process", P, "--binding", str(FIXTURES / "missing-currencies.binding.xml"))
    assert code == 1 and "CurrenciesExchange" in err


def test_bind_needs_a_source(capsys):
    assert run(capsys, "bind", "--process", P)[0] == 2


def test_explain_full_match(capsys):
    code, out, _ = run(capsys, "explain", "--process", P, "--activity", "CurrenciesExchange",
                       "--service", str(SILVER_REGISTRY / "fin-forex-exchange.service.xml"), "--ontology", O)
    assert code == 0
    stages = [l.strip() for l in out.splitlines() if l.strip().split(":")[0] in ("domain", "functionality", "inputs", "outputs")]
    assert len(stages) == 4 and all(": pass" in s for s in stages)
    assert out.splitlines()[-1] == "  result: match"


def test_explain_wrong_domain(capsys):
    code, out, _ = run(capsys, "explain", "--process", P, "--activity", "GetRealTimeSilverPrice",
                       "--service", str(SILVER_REGISTRY / "log-parcel-tracking.service.xml"), "--ontology", O)
    assert code == 0
    assert out.splitlines()[2:6] == [
        "  domain: fail distance=unreachable similarity=0.000000",
        "  functionality: skipped",
        "  inputs: skipped",
        "  outputs: skipped",
    ]


def test_explain_unknown_activity(capsys):
    code, _, err = run(capsys, "explain", "--process", P, "--activity", "Nope",
                       "--service", str(SILVER_REGISTRY / "log-parcel-tracking.service.xml"), "--ontology", O)
    assert code == 2 and "Nope" in err


def test_no_command(capsys):
    assert run(capsys)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wsbind", "validate", "--process", P], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "OK\n"
