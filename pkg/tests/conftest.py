from collections import defaultdict

import pytest

_RESULTS: dict[int, list[tuple[str, bool]]] = defaultdict(list)
_TITLES: dict[int, str] = {}


class Acceptance:
    """Collects per-check verdicts so each criterion gets one summary line."""

    def check(self, criterion: int, title: str, case: str, ok: bool, detail: str = ""):
        _TITLES[criterion] = title
        _RESULTS[criterion].append((case, bool(ok)))
        assert ok, f"criterion {criterion} [{case}] {detail}"


@pytest.fixture(scope="session")
def acceptance():
    return Acceptance()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_RESULTS):
        checks = _RESULTS[crit]
        failed = [case for case, ok in checks if not ok]
        verdict = "PASS" if not failed else "FAIL"
        line = f"{crit:>2}. {verdict}  {_TITLES[crit]} ({len(checks) - len(failed)}/{len(checks)} checks)"
        if failed:
            line += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
