import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from contact_sense.errors import InvalidInputError, OutOfPatchError
from contact_sense.mathcore import Rng
from contact_sense.terrain import NOISELESS, NoiseModel, TerrainPatch, contact_at, make_wedge, slips

from conftest import unit_vectors

inclinations = st.floats(-1.5, 1.5)


@pytest.mark.parametrize("theta, mu, expected", [
    (0.0, 0.5, [0, 0, 1]),
    (0.2, 0.6, [-0.19866933079506122, 0, 0.9800665778412416]),
    (0.5, 0.4, [-0.479425538604203, 0, 0.8775825618903728]),
])
def test_make_wedge_normal(theta, mu, expected):
    patch = make_wedge(theta, mu)
    assert np.allclose(patch.true_normal, expected, atol=1e-15)
    assert patch.true_friction == mu


def test_make_wedge_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        make_wedge(math.pi / 2, 0.5)
    with pytest.raises(InvalidInputError):
        make_wedge(0.1, 0.0)
    with pytest.raises(InvalidInputError):
        make_wedge(0.1, 2.5)
    with pytest.raises(InvalidInputError):
        make_wedge(0.1, 0.5, extent=0.0)


def test_patch_must_face_up():
    with pytest.raises(InvalidInputError):
        TerrainPatch(true_normal=np.array([0, 0, -1.0]), true_friction=0.5, extent=1.0)
    with pytest.raises(InvalidInputError):
        TerrainPatch(true_normal=np.array([0, 0, 2.0]), true_friction=0.5, extent=1.0)


@given(inclinations)
def test_wedge_normal_is_unit(theta):
    assert abs(np.linalg.norm(make_wedge(theta, 0.5).true_normal) - 1) <= 1e-12


def test_contact_at_examples():
    rng = Rng(0)
    flat = make_wedge(0.0, 0.5)
    assert np.array_equal(contact_at(flat, (0.1, 0.2), NOISELESS, rng), [0.1, 0.2, 0.0])
    wedge = make_wedge(0.2, 0.5)
    c = contact_at(wedge, (0.1, 0.0), NOISELESS, rng)
    assert np.allclose(c, [0.1, 0.0, 0.1 * math.tan(0.2)], atol=1e-15)
    assert c[2] == pytest.approx(0.02027100355086725, abs=1e-15)
    with pytest.raises(OutOfPatchError):
        contact_at(flat, (0.3, 0.0), NOISELESS, rng)


def test_contact_at_noise_statistics():
    rng = Rng(7)
    flat = make_wedge(0.0, 0.5)
    pts = np.array([contact_at(flat, (0, 0), NoiseModel(0.01, 0), rng) for _ in range(4000)])
    assert np.allclose(pts.mean(axis=0), 0, atol=1e-3)
    assert np.allclose(pts.std(axis=0), 0.01, rtol=0.05)


@given(unit_vectors(min_z=0.05), st.floats(-0.2, 0.2), st.floats(-0.2, 0.2),
       st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_noiseless_contact_lies_on_plane(n, x, y, origin):
    patch = TerrainPatch(true_normal=n, true_friction=0.7, extent=0.25, origin=np.array(origin))
    c = contact_at(patch, (origin[0] + x, origin[1] + y), NOISELESS, Rng(0))
    assert abs(n @ (c - patch.origin)) <= 1e-12


def test_slips_examples():
    patch = make_wedge(0.0, 0.5)
    assert not slips(patch, 4.0, 10.0)
    assert slips(patch, 6.0, 10.0)
    assert not slips(patch, 5.0, 10.0)
    with pytest.raises(InvalidInputError):
        slips(patch, -1.0, 10.0)
    with pytest.raises(InvalidInputError):
        slips(patch, 1.0, -10.0)


@given(st.floats(0.01, 2), st.floats(0, 100), st.floats(0, 100), st.floats(0, 100))
def test_slips_monotone(mu, normal, t1, t2):
    patch = make_wedge(0.0, mu)
    lo, hi = sorted((t1, t2))
    if slips(patch, lo, normal):
        assert slips(patch, hi, normal)


def test_noise_model_validation():
    with pytest.raises(InvalidInputError):
        NoiseModel(-0.1, 0.0)
    with pytest.raises(InvalidInputError):
        NoiseModel(0.0, math.inf)
