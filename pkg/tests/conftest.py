import json
from pathlib import Path

import pytest

import prodfree
from prodfree import primes, series

SCHEMA_DIR = Path(prodfree.__file__).parent / "schemas"
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ten_million_primes():
    return primes.first_n_primes(10_000_000)


@pytest.fixture(scope="session")
def ten_million_sigma(ten_million_primes):
    return series.power_sums(ten_million_primes, 13, "float")


@pytest.fixture(scope="session")
def ten_million_complete(ten_million_sigma):
    return series.complete_homogeneous(ten_million_sigma)


@pytest.fixture(scope="session")
def validate():
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource

    schemas = {p.name: json.loads(p.read_text()) for p in SCHEMA_DIR.glob("*.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(doc)) for name, doc in schemas.items())

    def check(instance, name):
        Draft202012Validator(schemas[name], registry=registry).validate(instance)

    return check


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
