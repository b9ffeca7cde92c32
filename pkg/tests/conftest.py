import pytest

# criterion number -> {"title", "budget", "runs": [(name, outcome, seconds)]}
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title, budget=None): acceptance criterion checked by this test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        num, title = mark.args
        entry = _CRITERIA.setdefault(num, {"title": title, "budget": None, "runs": []})
        if mark.kwargs.get("budget") is not None:
            entry["budget"] = mark.kwargs["budget"]
        entry["runs"].append((item.name, report.outcome, report.duration))


def _verdict(entry):
    runs = entry["runs"]
    secs = sum(d for _, _, d in runs)
    failed = [name for name, o, _ in runs if o != "passed"]
    over = entry["budget"] is not None and secs >= entry["budget"]
    return secs, failed, over


def pytest_sessionfinish(session, exitstatus):
    # a criterion whose tests pass but blow the time budget still fails
    if exitstatus == 0 and any(_verdict(e)[2] for e in _CRITERIA.values()):
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        secs, failed, over = _verdict(entry)
        ok = not failed and not over
        budget = f" / budget {entry['budget']}s" if entry["budget"] is not None else ""
        notes = []
        if failed:
            notes.append(f"failed: {', '.join(failed)}")
        if over:
            notes.append("over time budget")
        tail = f"  ({'; '.join(notes)})" if notes else ""
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  criterion {num}: {entry['title']}"
            f"  [{len(entry['runs'])} test(s), {secs:.3f}s{budget}]{tail}"
        )
