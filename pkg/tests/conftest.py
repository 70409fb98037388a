from __future__ import annotations

import sys

import pytest

from stubsite import StubSite


@pytest.fixture
def stub_site():
    """Factory: ``stub_site(routes)`` starts a local site torn down after the test."""
    sites = []

    def start(routes):
        site = StubSite(routes).__enter__()
        sites.append(site)
        return site

    yield start
    for site in sites:
        site.__exit__(None, None, None)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
