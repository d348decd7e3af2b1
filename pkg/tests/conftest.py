import pytest

from wopn.dynsys import integrate, lookup, trim


def lorenz_fixture(label):
    """Lorenz at 100 Hz for 100 s, last 20 s kept."""
    return trim(integrate(lookup("lorenz"), 100.0, 100.0, label=label), 0.2)


@pytest.fixture(scope="session")
def lorenz_signals():
    return {lab: lorenz_fixture(lab) for lab in ("periodic", "chaotic")}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
