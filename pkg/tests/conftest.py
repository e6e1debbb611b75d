import pytest

from wsbind.fixtures import SILVER_ONTOLOGY, SILVER_PROCESS, SILVER_REGISTRY
from wsbind.ontology import load_ontology
from wsbind.process import parse_process
from wsbind.registry import load_registry

FIN = "http://example.org/fin#"
SEC = "http://example.org/sec#"


@pytest.fixture(scope="session")
def silver_doc():
    return parse_process(SILVER_PROCESS.read_bytes())


@pytest.fixture(scope="session")
def silver_registry():
    return load_registry(SILVER_REGISTRY)


@pytest.fixture(scope="session")
def silver_ontology():
    return load_ontology(SILVER_ONTOLOGY.read_bytes())


@pytest.fixture
def services_by_id(silver_registry):
    return {s.id: s for s in silver_registry}
