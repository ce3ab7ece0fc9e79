# -*- coding: utf-8 -*-

"""Two-qubit states: the α|HH⟩ ± β|VV⟩ family, Bell states and products."""

import dataclasses
import logging
import math

import numpy as np

from esdlab.exceptions import NormalizationError, PostSelectionError, ValidationError
from esdlab.qmat import BASIS_LABELS, TOL_ALGEBRAIC, DensityMatrix, dagger, psd_sqrt

L = logging.getLogger("esdlab.states")

H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)
D = (H + V) / math.sqrt(2)
A = (H - V) / math.sqrt(2)
R = (H + 1j * V) / math.sqrt(2)
LEFT = (H - 1j * V) / math.sqrt(2)

SINGLE_QUBIT_KETS = {"H": H, "V": V, "D": D, "A": A, "R": R, "L": LEFT}


@dataclasses.dataclass(frozen=True)
class StateParams:
    """
    Parameters of α|HH⟩ + sign·β|VV⟩ with real non-negative α and β = √(1 − α²).

    The default sign is −1, the state prepared by the source.
    """
    alpha: float
    relative_sign: int = -1

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and 0.0 <= self.alpha <= 1.0):
            raise ValidationError("alpha must be a real number in [0, 1], got %r" % (self.alpha,))
        if self.relative_sign not in (1, -1):
            raise ValidationError("relative_sign must be +1 or -1, got %r" % (self.relative_sign,))

    @property
    def beta(self):
        return math.sqrt(max(0.0, 1.0 - self.alpha * self.alpha))

    def ket(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = self.alpha
        psi[3] = self.relative_sign * self.beta
        return psi

    def to_dict(self):
        return {"alpha": self.alpha, "sign": self.relative_sign}

    @classmethod
    def from_dict(cls, doc):
        return cls(alpha=float(doc["alpha"]), relative_sign=int(doc.get("sign", -1)))


def as_array(rho):
    """Plain complex array view of a DensityMatrix or matrix-like."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def pure_state(psi):
    psi = np.asarray(psi, dtype=complex).reshape(4)
    norm = np.vdot(psi, psi).real
    if norm <= TOL_ALGEBRAIC:
        raise ValidationError("ket has zero norm")
    psi = psi / math.sqrt(norm)
    return DensityMatrix(np.outer(psi, np.conj(psi)))


def make_state(params):
    """Rank-1 projector onto α|HH⟩ + sign·β|VV⟩."""
    return pure_state(params.ket())


def basis_state(label):
    """Computational basis projector, e.g. basis_state('VV')."""
    if label not in BASIS_LABELS:
        raise ValidationError("unknown basis label %r, expected one of %s" % (label, ", ".join(BASIS_LABELS)))
    psi = np.zeros(4, dtype=complex)
    psi[BASIS_LABELS.index(label)] = 1.0
    return pure_state(psi)


def product_state(a, b):
    """Projector onto |a⟩⊗|b⟩ for single-qubit kets or labels from H, V, D, A, R, L."""
    a = SINGLE_QUBIT_KETS[a] if isinstance(a, str) else np.asarray(a, dtype=complex)
    b = SINGLE_QUBIT_KETS[b] if isinstance(b, str) else np.asarray(b, dtype=complex)
    return pure_state(np.kron(a, b))


def bell_state(kind="phi+"):
    """One of the four Bell states: phi+, phi-, psi+, psi-."""
    s = 1 / math.sqrt(2)
    kets = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    if kind not in kets:
        raise ValidationError("unknown Bell state %r" % (kind,))
    return pure_state(kets[kind])


def purity(rho):
    """Tr(ρ²) of a normalized state."""
    if isinstance(rho, DensityMatrix) and not rho.is_normalized():
        raise NormalizationError("purity needs a trace-1 state (trace %.12g); renormalize first" % rho.trace)
    m = as_array(rho)
    return float(np.real(np.trace(m @ m)))


def renormalize(rho):
    """Scale ρ to unit trace, the post-selection on detected coincidences."""
    trace = rho.trace if isinstance(rho, DensityMatrix) else float(np.real(np.trace(rho)))
    if trace <= TOL_ALGEBRAIC:
        raise PostSelectionError(trace)
    if abs(trace - 1.0) <= TOL_ALGEBRAIC and isinstance(rho, DensityMatrix):
        return rho
    L.debug("renormalizing post-selected state, trace before %.12g", trace)
    return DensityMatrix(as_array(rho) / trace)


def fidelity(rho, sigma):
    """Uhlmann fidelity (Tr √(√ρ σ √ρ))² of two states."""
    root = psd_sqrt(as_array(rho))
    inner = root @ as_array(sigma) @ root
    inner = 0.5 * (inner + dagger(inner))
    values = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(values)) ** 2))


def random_density_matrix(rng, rank=4):
    """Random full or reduced-rank state from the Ginibre ensemble."""
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    m = g @ dagger(g)
    return DensityMatrix(m / np.real(np.trace(m)))
