import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamsinr.errors import DeploymentError, NearFieldError
from beamsinr.geometry import (
    DEPLOYMENT_HEADER,
    Deployment,
    NodePair,
    OrientationMode,
    departure_angle,
    pair_angles,
    path_loss,
    read_deployment,
    sample_center_batch,
    sample_deployment,
    sample_paired_batch,
    signed_angle,
    write_deployment,
)


def test_path_loss_law():
    assert path_loss(1.0, 5e-3, 2.45) == pytest.approx((5e-3 / (4 * math.pi)) ** 2)
    assert path_loss(2.0, 5e-3, 2.45) / path_loss(1.0, 5e-3, 2.45) == pytest.approx(2.0**-2.45)
    with pytest.raises(NearFieldError):
        path_loss(0.4, 5e-3, 2.45, d0=0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-1, 1))
def test_departure_angle_in_range(phi, eps):
    assert 0.0 <= departure_angle(phi, eps) <= math.pi


def test_signed_angle():
    assert signed_angle(1 + 0j, 1j) == pytest.approx(math.pi / 2)
    assert signed_angle(1j, 1 + 0j) == pytest.approx(-math.pi / 2)


def test_pair_angles_aligned_geometry():
    q1 = NodePair(5 + 0j, 0j, 0)
    qj = NodePair(0 + 5j, 0 + 10j, 1)  # points away from RX_1
    phi_t, phi_r = pair_angles(q1, qj)
    assert abs(phi_t) == pytest.approx(math.pi)
    assert abs(phi_r) == pytest.approx(math.pi / 2)


def test_center_batch_shapes_and_floor(rng):
    tx, rx, tb, rb = sample_center_batch(rng, 500, 6, 15.0, 0.5)
    assert tx.shape == (500, 6) and rx.shape == (500,) and tb.shape == (500, 6) and rb.shape == (500,)
    assert np.all(np.abs(tx) <= 15.0)
    assert np.all(np.abs(tx) >= 0.5)
    np.testing.assert_allclose(np.exp(1j * tb[:, 0]), np.exp(1j * np.angle(-tx[:, 0])))
    tx, *_ = sample_center_batch(rng, 100, 2, 15.0, 0.5, link_distance=7.5)
    np.testing.assert_allclose(np.abs(tx[:, 0]), 7.5)


def test_paired_batch_link_floor(rng):
    tx, rx, tb, rb = sample_paired_batch(rng, 1000, 5, 3.0, 0.5)
    assert np.all(np.abs(rx - tx) >= 0.5)
    np.testing.assert_allclose(np.exp(1j * tb), np.exp(1j * np.angle(rx - tx)))
    np.testing.assert_allclose(np.exp(1j * rb), np.exp(1j * np.angle(tx - rx)))


@pytest.mark.parametrize("mode", list(OrientationMode))
def test_deployment_roundtrip(tmp_path, rng, mode):
    dep = sample_deployment(5, 15.0, rng, mode)
    dep.check()
    path = tmp_path / "dep.txt"
    write_deployment(dep, path)
    assert DEPLOYMENT_HEADER in path.read_text().splitlines()
    back = read_deployment(path)
    assert back == dep


def test_read_minimal_deployment(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("index,tx_x,tx_y,rx_x,rx_y\n0,5,0,0,0\n1,-3,4,-6,8\n")
    dep = read_deployment(path)
    assert dep.n == 2 and dep.region_radius == 15.0
    assert dep.typical.length == pytest.approx(5.0)


@pytest.mark.parametrize("text", ["0,1,2\n", "a,1,2,3,4\n", "", "# region_radius=x\n0,1,0,0,0\n"])
def test_read_deployment_errors(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(DeploymentError):
        read_deployment(path)


def test_deployment_check():
    with pytest.raises(DeploymentError):
        Deployment((NodePair(20 + 0j, 0j, 0),), 15.0).check()
    with pytest.raises(DeploymentError):
        Deployment((NodePair(0.1 + 0j, 0j, 0),), 15.0).check()
