import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL line per acceptance check as it completes."""
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call" or item.module.__name__ != "test_acceptance":
        return
    status = "PASS" if rep.passed else "FAIL"
    terminal = item.config.pluginmanager.get_plugin("terminalreporter")
    if terminal is not None:
        terminal.write_line(f"[acceptance] {status} {item.name}")
