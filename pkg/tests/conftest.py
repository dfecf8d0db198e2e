import httpx
import pytest

from shopbench.backend import Backend
from shopbench.catalog import load_demo_catalog
from shopbench.crawler import build_rag_index, crawl
from shopbench.harness import ShopsConnection
from shopbench.server import inprocess_client

ADMIN = "test-admin-token"


@pytest.fixture(scope="session")
def catalog():
    return load_demo_catalog()


@pytest.fixture
def backend(catalog):
    return Backend.create(catalog, seed=7, admin_token=ADMIN)


@pytest.fixture
def client(backend):
    with inprocess_client(backend) as c:
        yield c


@pytest.fixture
def conn(backend):
    return ShopsConnection.in_process(backend)


@pytest.fixture(scope="session")
def crawled_pages(catalog):
    b = Backend.create(catalog, seed=0, admin_token=ADMIN)
    with httpx.Client(transport=ShopsConnection.in_process(b).transport) as c:
        return crawl(c, catalog.shops)


@pytest.fixture(scope="session")
def rag_index(crawled_pages):
    return build_rag_index(crawled_pages)


# --- acceptance reporting: one line per criterion -----------------------------------

_ACCEPTANCE: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    name = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
        if _ACCEPTANCE.get(name) not in ("FAIL",):
            _ACCEPTANCE[name] = status


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{status}  {name}")
