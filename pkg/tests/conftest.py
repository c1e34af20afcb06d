import pytest

from ssk3primes.dynkin import parse

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str) -> None:
        _CRITERIA[number] = (ok, detail)
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


# glue coordinates on Z/4 x Z/12 x Z/2 x Z/2 for D7+A11+2A1
V = {
    1: (0, 6, 1, 1), 2: (1, 3, 0, 0), 3: (1, 9, 0, 0), 4: (2, 0, 1, 1),
    5: (2, 6, 0, 0), 6: (3, 3, 0, 0), 7: (3, 9, 0, 0),
}


@pytest.fixture(scope="session")
def example_type():
    return parse("D7+A11+2A1")


@pytest.fixture(scope="session")
def example_form(example_type):
    return example_type.disc_form()
