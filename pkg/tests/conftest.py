"""Collects the acceptance verdicts and prints one line per criterion at the end of the run."""

import pytest

_LOG: dict[int, dict] = {}


class CriterionLog:
    def __call__(self, number: int, title: str, ok: bool, detail: str = "") -> bool:
        entry = _LOG.setdefault(number, {"title": title, "parts": []})
        entry["parts"].append((bool(ok), detail))
        print(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
        return bool(ok)


@pytest.fixture(scope="session")
def criterion():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _LOG:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_LOG):
        entry = _LOG[number]
        ok = all(p[0] for p in entry["parts"])
        detail = "; ".join(d for _, d in entry["parts"] if d)
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {entry['title']}: {detail}")
