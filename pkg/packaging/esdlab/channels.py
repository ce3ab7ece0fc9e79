# -*- coding: utf-8 -*-

"""Quantum operations in Kraus form.

The damping channels act on polarization qubits: |V⟩ decays to |H⟩ with
probability P. The correlated channel is the two-photon operation realized
by one displaced Sagnac interferometer per photon, where the temporal
mismatch parameter z decides whether mixed decay branches (one photon
delayed, the other not) survive the coincidence window.
"""

import dataclasses
import json
import logging
import math
import os

import numpy as np

from esdlab.exceptions import ChannelError, DimensionError, NormalizationError, ValidationError
from esdlab.qmat import SIGMA_X, TOL_ALGEBRAIC, TOL_PSD, DensityMatrix, dagger, hermiticity_norm, kron
from esdlab.states import as_array, renormalize

L = logging.getLogger("esdlab.channels")

DEFAULT_OPERATOR_CAP = 64


def operator_cap():
    """Largest operator count compose() will build, from ESDLAB_OPERATOR_CAP."""
    return int(os.environ.get("ESDLAB_OPERATOR_CAP", DEFAULT_OPERATOR_CAP))


def _check_probability(name, value):
    if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
        raise ValidationError("%s must be in [0, 1], got %r" % (name, value))
    return float(value)


class KrausChannel(object):

    """
    Ordered Kraus operators with the completeness deficit I − Σ K†K.

    The deficit must be Hermitian positive semidefinite within 1e-10, so every
    channel is trace-nonincreasing. Passing trace_preserving=True additionally
    requires ‖deficit‖∞ ≤ 1e-12.
    """

    def __init__(self, operators, label="", trace_preserving=False):
        ops = [np.array(k, dtype=complex) for k in operators]
        if not ops:
            raise ChannelError("a channel needs at least one operator")
        dim = ops[0].shape[0]
        if dim not in (2, 4) or any(k.shape != (dim, dim) for k in ops):
            raise DimensionError("operators of %r must share one square 2x2 or 4x4 shape" % label)
        for k in ops:
            k.setflags(write=False)
        deficit = np.eye(dim, dtype=complex) - sum(dagger(k) @ k for k in ops)
        if hermiticity_norm(deficit) > TOL_PSD:
            raise ChannelError("completeness deficit of %r is not Hermitian" % label)
        smallest = np.linalg.eigvalsh(0.5 * (deficit + dagger(deficit)))[0]
        if smallest < -TOL_PSD:
            raise ChannelError("channel %r increases trace (deficit eigenvalue %.3e)" % (label, smallest))
        if trace_preserving and self._norm(deficit) > TOL_ALGEBRAIC:
            raise ChannelError("channel %r declared trace-preserving but deficit norm is %.3e"
                               % (label, self._norm(deficit)))
        deficit.setflags(write=False)
        self._operators = tuple(ops)
        self._deficit = deficit
        self.label = label

    @staticmethod
    def _norm(m):
        return float(np.max(np.abs(m)))

    @property
    def operators(self):
        return self._operators

    @property
    def dim(self):
        return self._operators[0].shape[0]

    @property
    def completeness_deficit(self):
        return self._deficit

    @property
    def deficit_norm(self):
        return self._norm(self._deficit)

    @property
    def is_trace_preserving(self):
        return self.deficit_norm <= TOL_ALGEBRAIC

    def __len__(self):
        return len(self._operators)

    def __iter__(self):
        return iter(self._operators)

    def __repr__(self):
        return "KrausChannel(%r, dim=%d, operators=%d, deficit=%.3e)" % (
            self.label, self.dim, len(self), self.deficit_norm)

    def without_zero_operators(self, atol=TOL_ALGEBRAIC):
        ops = [k for k in self._operators if np.max(np.abs(k)) > atol]
        return KrausChannel(ops or [np.zeros((self.dim, self.dim))], label=self.label)

    def to_json(self):
        """Channel document: operators as row-major [re, im] pairs."""
        return json.dumps({
            "label": self.label,
            "dim": self.dim,
            "operators": [[[float(z.real), float(z.imag)] for z in k.ravel()] for k in self._operators],
            "deficit_norm": self.deficit_norm,
        })

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        dim = int(doc["dim"])
        ops = []
        for entries in doc["operators"]:
            if len(entries) != dim * dim:
                raise ValidationError("operator has %d entries, expected %d" % (len(entries), dim * dim))
            ops.append(np.array([complex(re, im) for re, im in entries]).reshape(dim, dim))
        return cls(ops, label=doc.get("label", ""))


@dataclasses.dataclass(frozen=True)
class TemporalMismatch:
    """
    Temporal mismatch between the two photons' delayed paths.

    In binary mode z is 0 (delay beyond the coincidence window, mixed decay
    branches are lost) or 1 (delay inside the window). In phase mode
    z = exp(−iχ) and the mixed branches carry Re(√z) = cos(χ/2); that mode is
    exploratory and has no closed-form reference.
    """
    mode: str = "binary"
    value: float = 1.0

    def __post_init__(self):
        if self.mode == "binary":
            if self.value not in (0, 1):
                raise ValidationError("binary z must be 0 or 1, got %r" % (self.value,))
        elif self.mode == "phase":
            if not math.isfinite(self.value):
                raise ValidationError("phase chi must be finite")
        else:
            raise ValidationError("unknown temporal mismatch mode %r" % (self.mode,))

    @classmethod
    def binary(cls, z):
        return cls("binary", int(z))

    @classmethod
    def phase(cls, chi):
        return cls("phase", float(chi))

    @property
    def cross_factor(self):
        """Re(√z), the amplitude factor on mixed decay branches."""
        if self.mode == "binary":
            return float(self.value)
        return math.cos(self.value / 2.0)

    @property
    def exploratory(self):
        return self.mode == "phase"

    def to_json(self):
        if self.mode == "binary":
            return int(self.value)
        return {"chi": self.value}

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, dict):
            return cls.phase(doc["chi"])
        return cls.binary(doc)

    def __str__(self):
        if self.mode == "binary":
            return "z=%d" % self.value
        return "chi=%.6g" % self.value


def adc_pair(P):
    """The single-qubit amplitude-damping pair diag(1, √(1−P)) and √P|H⟩⟨V|."""
    P = _check_probability("P", P)
    a1 = np.array([[1, 0], [0, math.sqrt(1 - P)]], dtype=complex)
    a2 = np.array([[0, math.sqrt(P)], [0, 0]], dtype=complex)
    return a1, a2


def standard_adc_kraus(P):
    return KrausChannel(adc_pair(P), label="adc(P=%.6g)" % P, trace_preserving=True)


def product_channel(c):
    """K_i ⊗ K_j for every pair of a trace-preserving single-qubit channel."""
    if c.dim != 2:
        raise DimensionError("product_channel needs a single-qubit channel, got dim %d" % c.dim)
    if not c.is_trace_preserving:
        raise ChannelError("product_channel needs a trace-preserving channel, %r is not" % c.label)
    ops = [kron(a, b) for a in c.operators for b in c.operators]
    return KrausChannel(ops, label="%s⊗%s" % (c.label, c.label), trace_preserving=True)


def not_unitary():
    """σx ⊗ σx, the NOT on both photons."""
    return kron(SIGMA_X, SIGMA_X)


def unitary_channel(u, label="unitary"):
    return KrausChannel([u], label=label, trace_preserving=True)


def identity_channel(dim=4):
    return KrausChannel([np.eye(dim, dtype=complex)], label="identity", trace_preserving=True)


def correlated_adc_kraus(p, z=TemporalMismatch(), embed_not=True):
    """
    The two-photon damping channel of the displaced Sagnac pair.

    Operators are (σx⊗σx)·(A_i⊗A_j) with embed_not, A_i⊗A_j without, where
    {A} is the amplitude-damping pair at strength p and the mixed branches
    i ≠ j carry Re(√z). The operator order is (11, 12, 21, 22). The set is
    trace-preserving iff Re(√z) = 1; otherwise the deficit is
    (1 − Re(√z)²)·diag(0, p, p, 2p(1−p)).
    """
    a = adc_pair(p)
    f = z.cross_factor
    flip = not_unitary()
    ops = []
    for i in range(2):
        for j in range(2):
            k = kron(a[i], a[j])
            if i != j:
                k = f * k
            if embed_not:
                k = flip @ k
            ops.append(k)
    label = "correlated_adc(p=%.6g, %s%s)" % (p, z, ", not" if embed_not else "")
    return KrausChannel(ops, label=label)


def channel_action(c, m):
    """Σ K m K† on an arbitrary matrix of the channel's dimension."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (c.dim, c.dim):
        raise DimensionError("channel %r acts on %dx%d matrices, got %s" % (c.label, c.dim, c.dim, m.shape))
    return sum(k @ m @ dagger(k) for k in c.operators)


def apply_channel(rho, c, renorm=False):
    """
    ρ → Σ K ρ K†.

    Trace-decreasing channels leave the trace below 1 unless renorm is set,
    in which case the output is post-selected back to unit trace and a
    vanishing trace raises PostSelectionError. Without renorm any positive
    trace is returned as is; an output with nothing left is not a state.
    """
    out = channel_action(c, as_array(rho))
    out = 0.5 * (out + dagger(out))
    if renorm:
        return renormalize(out)
    trace = float(np.real(np.trace(out)))
    if trace <= 0.0:
        raise NormalizationError("channel %r transmits nothing from this state (trace %.3e)" % (c.label, trace))
    return DensityMatrix(out)


def compose(first, second, cap=None):
    """The channel 'first, then second': operators K2_j · K1_i."""
    if first.dim != second.dim:
        raise DimensionError("cannot compose %r (dim %d) with %r (dim %d)"
                             % (first.label, first.dim, second.label, second.dim))
    cap = operator_cap() if cap is None else cap
    count = len(first) * len(second)
    if count > cap:
        raise ChannelError("composition would hold %d operators (cap %d); apply the channels "
                           "one after another instead" % (count, cap))
    ops = [k2 @ k1 for k1 in first.operators for k2 in second.operators]
    return KrausChannel(ops, label="%s ∘ %s" % (second.label, first.label))


def channels_equivalent(a, b, atol=TOL_ALGEBRAIC):
    """True when both channels act identically on every matrix unit."""
    if a.dim != b.dim:
        return False
    for row in range(a.dim):
        for col in range(a.dim):
            unit = np.zeros((a.dim, a.dim), dtype=complex)
            unit[row, col] = 1.0
            if np.max(np.abs(channel_action(a, unit) - channel_action(b, unit))) > atol:
                return False
    return True
