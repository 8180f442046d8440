import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def correlations(min_size=1, max_size=4, lo=0.05, hi=0.95):
    """Strictly decreasing canonical correlations, spaced so the ordering is unambiguous."""
    return (
        st.lists(st.floats(lo, hi), min_size=min_size, max_size=max_size)
        .map(lambda xs: np.array(sorted(xs, reverse=True)))
        .filter(lambda d: d.size < 2 or np.min(-np.diff(d)) > 1e-3)
    )


seeds = st.integers(0, 2**32 - 1)


def random_nonsingular(rng, p, max_cond=1e3):
    while True:
        m = rng.standard_normal((p, p))
        if np.linalg.cond(m) < max_cond:
            return m


def random_covariance(rng, p1, p2, rank=None):
    k = p1 + p2 if rank is None else rank
    a = rng.standard_normal((p1 + p2, k))
    return a @ a.T


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
