import itertools

import numpy as np
import pytest

from learnbranch.cp import CPModel, LessOrEqual, NotEqual


def dom(var):
    return [int(v) for v in var.domain.values()]


def random_model(rng, n_vars, max_dom, n_cons):
    """Small model with random domains and NotEqual / LessOrEqual constraints."""
    m = CPModel()
    for i in range(n_vars):
        size = int(rng.integers(1, max_dom + 1))
        vals = sorted(rng.choice(np.arange(1, max_dom + 1), size=size, replace=False))
        m.add_variable(values=[int(v) for v in vals], name=f"x{i}")
    pairs = list(itertools.permutations(range(n_vars), 2))
    for _ in range(n_cons):
        i, j = pairs[int(rng.integers(len(pairs)))]
        cls = NotEqual if rng.random() < 0.6 else LessOrEqual
        m.add_constraint(cls(m.variables[i], m.variables[j]))
    return m


def enumerate_solutions(model):
    """Every full assignment of the current domains satisfying all constraints."""
    doms = [dom(v) for v in model.variables]
    out = []
    for combo in itertools.product(*doms):
        a = dict(enumerate(combo))
        if all(c.is_satisfied(a) for c in model.constraints):
            out.append(combo)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    notes = [v for k, v in item.user_properties if k == "note"]
    _acceptance[mark.args[0]] = (mark.args[1], "PASS" if rep.passed else "FAIL", notes)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        title, verdict, notes = _acceptance[n]
        detail = f" ({'; '.join(notes)})" if notes else ""
        terminalreporter.write_line(f"criterion {n} {verdict}: {title}{detail}")


@pytest.fixture
def note(request):
    """Attach a measured value to the acceptance summary line."""
    return lambda text: request.node.user_properties.append(("note", text))
