import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamsinr.distributions import (
    MixedDistribution,
    TabulatedCdf,
    binned_l1,
    dkw_epsilon,
    ks_distance,
    log_grid,
    mixture,
    step_at_zero,
)
from beamsinr.errors import DomainError


def uniform(a=0.0, b=1.0, n=101):
    g = np.linspace(a, b, n)
    return MixedDistribution(g, np.full(n, 1.0 / (b - a)))


def test_uniform_functionals():
    u = uniform(2.0, 4.0)
    assert u.mass == pytest.approx(1.0)
    assert u.cdf(3.0) == pytest.approx(0.5)
    assert u.mean() == pytest.approx(3.0)
    assert u.quantile(0.25) == pytest.approx(2.5)
    assert u.cdf(1.0) == 0.0 and u.cdf(5.0) == pytest.approx(1.0)


def test_atoms_right_continuous():
    d = MixedDistribution(np.linspace(0, 1, 11), np.full(11, 0.5), ((0.5, 0.5),))
    assert d.mass == pytest.approx(1.0)
    assert d.cdf(0.5) - d.cdf_left(0.5) == pytest.approx(0.5)
    assert d.atom_mass == pytest.approx(0.5)
    assert d.continuous_mass == pytest.approx(0.5)


def test_merge_close_atoms():
    d = MixedDistribution(np.array([0.0, 1.0]), np.zeros(2), ((0.5, 0.25), (0.5 * (1 + 1e-14), 0.75)))
    assert len(d.atoms) == 1 and d.atoms[0][1] == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=3, max_size=30))
def test_from_cdf_gives_exact_node_masses(ws):
    grid = np.cumsum(ws)
    exact = lambda x: np.clip((np.asarray(x) - grid[0]) / (grid[-1] - grid[0]), 0, 1) ** 2
    d = MixedDistribution.from_cdf(exact, grid)
    nodes, masses = d.to_discrete()
    assert masses.sum() == pytest.approx(1.0)
    assert np.all(np.diff(d.cdf(np.linspace(grid[0], grid[-1], 50))) >= -1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_scale_and_shift(c, s):
    u = uniform()
    assert u.scaled(c).mean() == pytest.approx(c * 0.5)
    assert u.shifted(s).mean() == pytest.approx(0.5 + s)
    assert u.scaled(c).cdf(0.3 * c) == pytest.approx(0.3)


def test_mixture_mass():
    m = mixture([uniform(0, 1), uniform(1, 3)], [0.25, 0.75], np.linspace(0, 3, 301))
    assert m.mass == pytest.approx(1.0)
    assert m.cdf(1.0) == pytest.approx(0.25, abs=1e-3)


def test_tabulated_cdf_kinds():
    lin = TabulatedCdf(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    step = TabulatedCdf(np.array([0.0, 1.0]), np.array([0.5, 1.0]), kind="step")
    assert lin(0.5) == pytest.approx(0.5) and lin(-1) == 0.0 and lin(2) == 1.0
    assert step(0.5) == 0.5 and step(-0.1) == 0.0
    assert step_at_zero()(0.0) == 1.0 and step_at_zero()(-1e-300) == 0.0
    with pytest.raises(DomainError):
        TabulatedCdf(np.array([0.0]), np.array([0.0, 1.0]))


def test_log_grid():
    g = log_grid(1e-3, 1e3, 7)
    np.testing.assert_allclose(g, np.geomspace(1e-3, 1e3, 7))
    assert np.all(np.diff(log_grid(0.0, 1.0, 5)) > 0)


def test_ks_and_l1_sanity(rng):
    x = rng.random(20_000)
    u = uniform()
    assert ks_distance(u.cdf, x) < 0.02
    assert ks_distance(u.cdf, x + 0.5) > 0.4
    assert binned_l1(u.cdf, x, np.linspace(0, 1, 21)) < 0.05


def test_dkw_epsilon():
    assert dkw_epsilon(100_000) == pytest.approx(math.sqrt(math.log(200) / 200_000))


def test_invalid_construction():
    with pytest.raises(DomainError):
        MixedDistribution(np.array([0.0, 0.0]), np.zeros(2))
    with pytest.raises(DomainError):
        MixedDistribution(np.array([0.0, 1.0]), np.array([-1.0, 0.0]))


def test_shift_atom_only_law_beyond_grid_resolution():
    d = MixedDistribution.point_mass(3e-12).shifted(1.0)
    assert d.atoms == ((1.0 + 3e-12, 1.0),)
    assert d.cdf(1.0 + 1e-9) == 1.0
