import pytest

from mmwave_pathloss.dataset import Dataset, GenSpec, PathLossSample, generate_synthetic
from mmwave_pathloss.models import Environment, Scenario

SYNTH = Scenario("other", "test")


def samples_from(points, scenario=SYNTH, env=Environment.NLOS):
    """``[(f, d, pl), ...]`` -> Dataset."""
    return Dataset([PathLossSample(scenario, env, f, d, pl) for f, d, pl in points], source="test")


def synth(model, plan, dist_range, sigma, seed, **kw):
    return generate_synthetic(GenSpec(model, plan, dist_range, sigma, seed, **kw))


@pytest.fixture
def make_samples():
    return samples_from


@pytest.fixture
def make_synth():
    return synth


# one PASS/FAIL line per acceptance criterion in the terminal summary
_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if "test_acceptance.py" in report.nodeid:
            doc = getattr(report, "criterion", None) or report.nodeid.split("::")[-1]
            _ACCEPTANCE.append((doc, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        rep.criterion = marker.args[0]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")
