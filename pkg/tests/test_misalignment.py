import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from beamsinr.errors import DegenerateModelError, DomainError
from beamsinr.misalignment import MisalignmentModel


@pytest.mark.parametrize("rho", [1 / 100, 1 / 20, 1 / 6])
def test_pdf_mass_and_cdf_endpoints(rho):
    m = MisalignmentModel(math.pi / 6, rho)
    mass, _ = integrate.quad(m.pdf, -m.half_width, m.half_width, epsabs=0, epsrel=1e-13)
    assert mass == pytest.approx(1.0, abs=1e-10)
    assert m.cdf(-m.half_width) == pytest.approx(0.0, abs=1e-15)
    assert m.cdf(m.half_width) == pytest.approx(1.0, abs=1e-15)
    assert m.cdf(0.0) == pytest.approx(0.5)
    assert m.pdf(m.half_width * 1.01) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.01, 1 / 6), st.floats(-1.0, 1.0))
def test_cdf_symmetry(theta_m, rho, frac):
    m = MisalignmentModel(theta_m, rho)
    x = frac * m.half_width
    assert m.cdf(x) + m.cdf(-x) == pytest.approx(1.0, abs=1e-12)
    assert m.abs_cdf(abs(x)) == pytest.approx(2 * m.cdf(abs(x)) - 1, abs=1e-12)


def test_samples_truncated_and_ks(rng):
    m = MisalignmentModel(math.pi / 3, 1 / 6)
    x = m.sample(rng, 50_000)
    assert np.all(np.abs(x) <= m.half_width)
    assert stats.kstest(x, m.cdf).pvalue > 0.01
    assert isinstance(m.sample(rng), float)


def test_degenerate_model(rng):
    m = MisalignmentModel(math.pi / 6, 0.0)
    assert m.degenerate and m.normalizer is None
    assert np.all(m.sample(rng, 5) == 0.0)
    assert m.abs_cdf(0.0) == 1.0
    with pytest.raises(DegenerateModelError):
        m.pdf(0.0)


@pytest.mark.parametrize("theta_m,rho", [(1.0, 0.2), (1.0, -0.01), (0.0, 0.05), (4.0, 0.05)])
def test_rejects_out_of_range(theta_m, rho):
    with pytest.raises(DomainError):
        MisalignmentModel(theta_m, rho)
