import pytest
from hypothesis import settings

from explicit_mordell.cli_reports import find_curve

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def curves():
    """label -> (curve, generator, stored generator-height lower bound)."""
    out = {}
    for label in ("E1", "E2", "E3", "E4", "E5", "128a1"):
        rec = find_curve(label)
        out[label] = (rec.curve, rec.generator_point, rec.hhat_lower_ball)
    return out


@pytest.fixture(scope="session")
def E1(curves):
    return curves["E1"][0]


@pytest.fixture(scope="session")
def g1(curves):
    return curves["E1"][1]


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record the one-line verdict of an acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> None:
        _CRITERIA[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
