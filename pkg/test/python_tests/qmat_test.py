import numpy as np
import pytest

from esdlab.exceptions import DimensionError, HermiticityError, NormalizationError, PositivityError
from esdlab.qmat import I2, I4, SIGMA_X, DensityMatrix, herm_eig, kron, psd_sqrt

from .utilities import max_abs_diff, random_hermitian, random_psd


def test_kron_identity_and_flip():
    assert max_abs_diff(kron(I2, I2), I4) == 0
    xx = kron(SIGMA_X, SIGMA_X)
    assert max_abs_diff(xx, np.fliplr(I4)) == 0


def test_kron_damping_pair():
    P = 0.3
    k = kron(np.diag([1, np.sqrt(1 - P)]), [[0, np.sqrt(P)], [0, 0]])
    expected = np.zeros((4, 4))
    expected[0, 1] = np.sqrt(P)
    expected[2, 3] = np.sqrt(P * (1 - P))
    assert max_abs_diff(k, expected) < 1e-15


def test_kron_rejects_more_than_two_qubits():
    with pytest.raises(DimensionError):
        kron(I4, I2)


def test_kron_mixed_product_property():
    rng = np.random.default_rng(7)
    a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
    assert max_abs_diff(kron(a, b) @ kron(c, d), kron(a @ c, b @ d)) < 1e-12
    assert max_abs_diff(kron(a + c, b), kron(a, b) + kron(c, b)) < 1e-12


def test_herm_eig_examples():
    values, _ = herm_eig(I4)
    assert values == pytest.approx([1, 1, 1, 1])
    values, _ = herm_eig(np.diag([1, 3, 4, 2]))
    assert values == pytest.approx([4, 3, 2, 1])
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    values, vectors = herm_eig(np.outer(phi, phi))
    assert values == pytest.approx([1, 0, 0, 0], abs=1e-12)
    assert abs(abs(np.vdot(vectors[:, 0], phi)) - 1) < 1e-12


def test_herm_eig_reconstructs_random_hermitian():
    rng = np.random.default_rng(11)
    for _ in range(50):
        h = random_hermitian(rng)
        values, vectors = herm_eig(h)
        assert list(values) == sorted(values, reverse=True)
        assert max_abs_diff(vectors @ np.diag(values) @ vectors.conj().T, h) < 1e-8
        assert max_abs_diff(vectors.conj().T @ vectors, I4) < 1e-9


def test_herm_eig_names_offending_norm():
    m = np.zeros((4, 4))
    m[0, 1] = 1.0
    with pytest.raises(HermiticityError) as excinfo:
        herm_eig(m)
    assert excinfo.value.norm == pytest.approx(1.0)
    assert "1.000e+00" in str(excinfo.value)


def test_psd_sqrt_examples():
    assert max_abs_diff(psd_sqrt(I4), I4) < 1e-12
    assert max_abs_diff(psd_sqrt(np.diag([4, 9, 16, 25])), np.diag([2, 3, 4, 5])) < 1e-12
    psi = np.array([0.6, 0, 0, 0.8])
    projector = np.outer(psi, psi)
    assert max_abs_diff(psd_sqrt(projector), projector) < 1e-9


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        m = random_psd(rng)
        r = psd_sqrt(m)
        assert max_abs_diff(r @ r, m) < 1e-8


def test_psd_sqrt_rejects_negative_eigenvalue():
    with pytest.raises(PositivityError):
        psd_sqrt(np.diag([1, 1, 1, -1e-6]))


def test_density_matrix_validation():
    rho = DensityMatrix(np.diag([0.5, 0, 0, 0.5]))
    assert rho.trace == pytest.approx(1.0)
    assert rho.element("VV", "VV") == pytest.approx(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1
    with pytest.raises(NormalizationError):
        DensityMatrix(np.diag([1.0, 0.5, 0, 0]))
    with pytest.raises(PositivityError):
        DensityMatrix(np.diag([1.0, 0.1, 0, -0.1]))
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(2) / 2)


def test_density_matrix_allows_post_selected_trace():
    rho = DensityMatrix(np.diag([0.3, 0, 0, 0.3]))
    assert not rho.is_normalized()
    assert rho.trace == pytest.approx(0.6)
