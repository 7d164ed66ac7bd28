import pytest
from mpmath import mp

from fractal_zeta.models import get_model, model_names
from fractal_zeta.poincare import build_series
from fractal_zeta.precision import working_precision

# the precision every numeric test runs at unless it says otherwise
DIGITS = 40

GASKET_MODELS = ("sg2-neumann", "sg2-dirichlet", "sg3-dirichlet")


@pytest.fixture(autouse=True)
def _restore_ambient_precision():
    old = mp.dps
    yield
    mp.dps = old


@pytest.fixture(scope="session")
def models():
    return {name: get_model(name) for name in model_names()}


@pytest.fixture(scope="session")
def series(models):
    """Per-model Poincare series built once at the shared test precision."""
    out = {}
    with working_precision(DIGITS):
        for name, model in models.items():
            out[name] = build_series(model.poly, N=120)
    return out
