import numpy as np
import pytest
from hypothesis import settings

from proxgeneric.catalog import AbsSum, EuclNorm, Perturbed, Shifted, Tikhonov, standard_catalog

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def extended_catalog(dim):
    """Standard catalog plus the composite nodes."""
    cat = dict(standard_catalog(dim))
    cat["eucl_norm"] = EuclNorm(dim, 1.5)
    cat["perturbed_abs"] = Perturbed(AbsSum(dim, 1.0), 0.1)
    cat["shifted_huber"] = Shifted(cat["huber"], 3.0)
    cat["tikhonov_box"] = Tikhonov(cat["box"], 0.25)
    return cat


CAT1 = extended_catalog(1)
CAT2 = extended_catalog(2)
ALL = [(f"{k}-1d", f) for k, f in CAT1.items()] + [(f"{k}-2d", f) for k, f in CAT2.items()]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
