import numpy as np
import pytest

from sixvq.qcore import make_root_context
from sixvq.reps import RepParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def complex_normal(rng, scale=0.6):
    return complex(rng.normal(0, scale), rng.normal(0, scale))


def random_params(ctx, rng, kind="cyclic", scale=0.6):
    """Random chart with lam kept away from the unit-circle degeneracies."""
    lam = 1.0 + complex(rng.normal(0, 0.35), rng.normal(0, 0.35))
    if abs(lam) < 0.3:
        lam = lam + 0.8
    if kind == "nilpotent" or ctx.parity == "even":
        return RepParams(0.0, 0.0, lam, ctx)
    if kind == "semi-cyclic":
        return RepParams(0.0, complex_normal(rng, scale), lam, ctx)
    if kind == "semi-cyclic-x":
        return RepParams(complex_normal(rng, scale), 0.0, lam, ctx)
    return RepParams(complex_normal(rng, scale), complex_normal(rng, scale), lam, ctx)


@pytest.fixture
def ctx3():
    return make_root_context(3)


@pytest.fixture
def ctx4():
    return make_root_context(4)


@pytest.fixture
def ctx5():
    return make_root_context(5)


@pytest.fixture
def params3(ctx3):
    return RepParams(0.37 + 0.21j, -0.8 + 0.33j, 1.4 - 0.52j, ctx3)
