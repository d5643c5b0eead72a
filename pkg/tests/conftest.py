from __future__ import annotations

import pytest

from dyncomplete.dercat import build_hom_table
from dyncomplete.quiver import standard_quiver


@pytest.fixture(autouse=True)
def _cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("DYNCOMPLETE_CACHE", str(tmp_path / "cache"))


def table(name: str):
    return build_hom_table(standard_quiver(name), cache_dir=False)


@pytest.fixture
def a1():
    return table("A1")


@pytest.fixture
def a2():
    return table("A2")


@pytest.fixture
def a3():
    return table("A3")


def pytest_terminal_summary(terminalreporter):
    lines = sorted(v for reports in terminalreporter.stats.values() for r in reports
                   for k, v in getattr(r, "user_properties", ()) if k == "criterion")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in dict.fromkeys(lines):
            terminalreporter.write_line(line)
