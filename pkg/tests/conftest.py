import re
import sys
from pathlib import Path

# oracles.py and checks.py live next to the tests
sys.path.insert(0, str(Path(__file__).parent))

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_titles = {}
_results = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = _CRITERION.search(item.name)
        if m and item.function.__doc__:
            _titles[item.nodeid] = (int(m.group(1)), item.function.__doc__.strip().splitlines()[0])


def pytest_runtest_logreport(report):
    if report.nodeid not in _titles:
        return
    if report.when == "call" or report.failed:
        detail = dict(report.user_properties).get("detail", "")
        outcome = "PASS" if report.passed else "FAIL"
        if report.nodeid not in _results or outcome == "FAIL":
            _results[report.nodeid] = (outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (num, title) in sorted(_titles.items(), key=lambda kv: kv[1][0]):
        if nodeid not in _results:
            continue
        outcome, detail = _results[nodeid]
        line = f"criterion {num:2d} {outcome}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
