import numpy as np
import pytest

from sparseinterp.core import SparsePolynomial


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False,
                     help="also run the ten-variable rows and other long cases")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running case, enabled with --slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def showcase():
    return SparsePolynomial(1, {(20,): 3.0, (75,): 1.0, (80,): -6.0})


class AcceptanceLog:
    """Collects one verdict per acceptance criterion across its checks."""

    def __init__(self):
        self.entries: dict[int, dict] = {}

    def record(self, criterion: int, ok: bool, detail: str = "", known: str | None = None) -> None:
        e = self.entries.setdefault(criterion, {"ok": True, "checks": 0, "failed": [], "known": []})
        e["checks"] += 1
        if not ok:
            e["ok"] = False
            (e["known"] if known else e["failed"]).append(detail + (f" [{known}]" if known else ""))


def _log(config) -> AcceptanceLog:
    if not hasattr(config, "_acceptance_log"):
        config._acceptance_log = AcceptanceLog()
    return config._acceptance_log


@pytest.fixture
def acceptance(request):
    return _log(request.config)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = _log(config)
    if not log.entries:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(log.entries):
        e = log.entries[k]
        line = f"criterion {k:>2}: {'PASS' if e['ok'] else 'FAIL'} ({e['checks']} checks)"
        if e["failed"]:
            line += "; failed: " + "; ".join(e["failed"])
        if e["known"]:
            line += "; known deviations: " + "; ".join(e["known"])
        terminalreporter.write_line(line)
