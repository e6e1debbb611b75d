"""Bundled scenario data: the silver-trading process, registry and ontology."""
from pathlib import Path

SILVER = Path(__file__).parent / "silver"
SILVER_PROCESS = SILVER / "process.xml"
SILVER_ONTOLOGY = SILVER / "ontology.txt"
SILVER_REGISTRY = SILVER / "registry"
