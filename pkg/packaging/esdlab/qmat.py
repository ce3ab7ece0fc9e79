# -*- coding: utf-8 -*-

"""Small dense complex linear algebra for 2×2 and 4×4 matrices.

Every matrix in esdlab is a numpy array of complex128. Two-qubit matrices
use the basis order (HH, HV, VH, VV), with H the first single-qubit basis
vector and V the second.
"""

import logging

import numpy as np
import scipy.linalg

from esdlab.exceptions import DimensionError, HermiticityError, NormalizationError, PositivityError

# tolerances used throughout the package
TOL_ALGEBRAIC = 1e-12
TOL_PSD = 1e-10
TOL_EIGEN = 1e-9

ALLOWED_DIMS = (2, 4)

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

BASIS_LABELS = ("HH", "HV", "VH", "VV")

L = logging.getLogger("esdlab.qmat")


def as_matrix(m):
    """Coerce m into a finite complex matrix with rows and cols in {2, 4}."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] not in ALLOWED_DIMS or a.shape[1] not in ALLOWED_DIMS:
        raise DimensionError("expected a 2x2 or 4x4 matrix, got shape %s" % (a.shape,))
    if not np.all(np.isfinite(a)):
        raise DimensionError("matrix has non-finite entries")
    return a


def kron(a, b):
    """Kronecker product, restricted to results no larger than 4×4.

    >>> complex(kron(SIGMA_X, SIGMA_X)[0, 3])
    (1+0j)
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > 4 or cols > 4:
        raise DimensionError("kron result %dx%d exceeds the two-qubit space" % (rows, cols))
    return np.kron(a, b)


def dagger(m):
    return np.conj(np.transpose(m))


def hermiticity_norm(m):
    """Largest entry of |M − M†|."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - dagger(m))))


def herm_eig(m, tol=TOL_PSD):
    """
    Hermitian eigendecomposition.

    Returns (eigenvalues, eigenvectors) with real eigenvalues sorted in
    descending order and eigenvectors as the orthonormal columns of a matrix.
    Raises HermiticityError naming the offending norm when m is further than
    tol from Hermitian.
    """
    m = as_matrix(m)
    norm = hermiticity_norm(m)
    if norm > tol:
        raise HermiticityError(norm)
    values, vectors = scipy.linalg.eigh(0.5 * (m + dagger(m)))
    return values[::-1].copy(), vectors[:, ::-1].copy()


def psd_sqrt(m, cutoff=0.0):
    """
    Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues at or below cutoff are treated as exact zeros, so rounding
    noise in a null space does not surface as its square root.
    """
    values, vectors = herm_eig(m)
    if values[-1] < -TOL_PSD:
        raise PositivityError(values[-1])
    roots = np.sqrt(np.where(values > cutoff, values, 0.0))
    return (vectors * roots) @ dagger(vectors)


def random_unitary(rng, dim=2):
    """Haar-random unitary from a numpy Generator."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


class DensityMatrix(object):

    """
    Validated 4×4 two-qubit state.

    The matrix must be Hermitian (‖M − M†‖∞ ≤ 1e-12), positive semidefinite
    (smallest eigenvalue ≥ −1e-10) and have trace in (0, 1 + 1e-12]. A trace
    below 1 marks a post-selected output of a trace-decreasing channel; call
    esdlab.states.renormalize before computing normalized observables.

    The stored array is read-only.
    """

    def __init__(self, matrix, validate=True):
        m = np.array(matrix, dtype=complex)
        if m.shape != (4, 4):
            raise DimensionError("density matrix must be 4x4, got %s" % (m.shape,))
        if validate:
            if not np.all(np.isfinite(m)):
                raise DimensionError("density matrix has non-finite entries")
            norm = hermiticity_norm(m)
            if norm > TOL_ALGEBRAIC:
                raise HermiticityError(norm)
            m = 0.5 * (m + dagger(m))
            smallest = scipy.linalg.eigvalsh(m)[0]
            if smallest < -TOL_PSD:
                raise PositivityError(smallest)
            trace = float(np.real(np.trace(m)))
            if not 0.0 < trace <= 1.0 + TOL_ALGEBRAIC:
                raise NormalizationError("density matrix trace %.17g outside (0, 1]" % trace)
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self):
        return self._matrix

    @property
    def trace(self):
        return float(np.real(np.trace(self._matrix)))

    def is_normalized(self, tol=TOL_ALGEBRAIC):
        return abs(self.trace - 1.0) <= tol

    def element(self, row, col):
        """Entry addressed by basis labels, e.g. element('HH', 'VV')."""
        return self._matrix[BASIS_LABELS.index(row), BASIS_LABELS.index(col)]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._matrix.copy()
        return self._matrix.astype(dtype)

    def __repr__(self):
        return "DensityMatrix(trace=%.6f)" % self.trace
