import numpy as np
import pytest
from hypothesis import given

from pcs import spinors as sp
from pcs import su2

from conftest import sl2c, spins, unit_vectors


@given(sl2c(0.7), sl2c(0.7), spins)
def test_rep_is_homomorphism(a, b, r):
    D = su2.rep_matrix(a @ b, r)
    assert np.allclose(D, su2.rep_matrix(a, r) @ su2.rep_matrix(b, r), atol=1e-10 * max(1, np.abs(D).max()))


@given(spins)
def test_rep_dimension_and_identity(r):
    D = su2.rep_matrix(np.eye(2), r)
    assert D.shape == (r + 1, r + 1)
    assert np.allclose(D, np.eye(r + 1))


@given(unit_vectors(), spins)
def test_unitary_on_su2(m, r):
    u = su2.rotation_to(m)
    D = su2.rep_matrix(u, r)
    assert np.allclose(D @ np.conj(D.T), np.eye(r + 1), atol=1e-10)


@given(unit_vectors(), unit_vectors(), spins)
def test_overlap_law(m1, m2, r):
    brute = np.vdot(su2.su2_coherent(m1, r), su2.su2_coherent(m2, r))
    assert brute == pytest.approx(su2.su2_overlap(m1, m2, r), abs=1e-10)
    assert abs(brute) ** 2 == pytest.approx(((1 + m1 @ m2) / 2) ** r, abs=1e-10)


@given(sl2c(0.7), spins)
def test_highest_weight_entry(beta, r):
    assert su2.rep_matrix(beta, r)[0, 0] == pytest.approx(beta[0, 0] ** r, rel=1e-10, abs=1e-12)


@given(unit_vectors())
def test_rotation_sends_z_to_m(m):
    u = su2.rotation_to(m)
    assert np.allclose(sp.sl2c_to_lorentz(u)[1:, 3], m, atol=1e-12)


def test_coherent_vector_is_normalised_for_unit_spinor():
    c = np.array([np.cos(0.3), np.exp(0.4j) * np.sin(0.3)])
    for r in range(6):
        assert np.linalg.norm(su2.coherent_vector(c, r)) == pytest.approx(1.0)


def test_negative_spin_rejected():
    with pytest.raises(ValueError):
        su2.rep_matrix(np.eye(2), -1)
