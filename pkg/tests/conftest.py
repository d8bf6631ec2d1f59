import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_acceptance = []


def unit_vectors(min_z=None):
    def build(xs):
        v = np.array(xs)
        return v / np.linalg.norm(v)

    vecs = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(
        lambda xs: np.linalg.norm(xs) > 1e-3).map(build)
    if min_z is not None:
        vecs = vecs.filter(lambda v: v[2] > min_z)
    return vecs


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
