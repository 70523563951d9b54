import pathlib

import pytest

from cohkit import build_grid, load_documents

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def hemingway_doc():
    """The five-sentence excerpt behind the golden grid fixtures."""
    return load_documents(DATA_DIR / "hemingway.jsonl")[0]


@pytest.fixture(scope="session")
def hemingway_grid(hemingway_doc):
    return build_grid(hemingway_doc)


@pytest.fixture()
def data_dir():
    return DATA_DIR


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(n, text): acceptance criterion covered by this test"
    )


def pytest_runtest_logreport(report):
    """One pass/fail line per acceptance criterion at test conclusion."""
    if report.when != "call":
        return
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    number, text = marker
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE CRITERION {number} [{outcome}]: {text}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report._criterion = (marker.args[0], marker.args[1] if len(marker.args) > 1 else "")
