# -*- coding: utf-8 -*-

"""Mode-level model of the displaced Sagnac interferometer.

A photon is tracked as sparse amplitudes over (polarization, path) modes.
Components act on the modes of their paths and pass the rest through. The
train of one interferometer maps its input port '0' onto the output paths
a, b, a' and b'; the primed paths are the delayed arm. Blocks of that map,
one per output path, are the Kraus operators of the photon's channel.

Amplitudes may be floats, complex numbers or sympy expressions; the same
components then yield a symbolic train for first-order expansions.
"""

import dataclasses
import json
import logging
import math
from typing import ClassVar

import numpy as np
import scipy.optimize
import sympy

from esdlab.channels import KrausChannel, TemporalMismatch
from esdlab.exceptions import TrainError, ValidationError
from esdlab.qmat import kron

L = logging.getLogger("esdlab.optics")

H = "H"
V = "V"
POLARIZATIONS = (H, V)
PATHS = ("0", "1", "2", "3", "4", "5", "5'", "a", "b", "a'", "b'")
OUTPUTS = ("a", "b", "a'", "b'")
NEGLECTED_PORT = "1"
MAX_EXTINCTION = 0.1


def _symbolic(x):
    return isinstance(x, sympy.Basic)


def _cos(x):
    return sympy.cos(x) if _symbolic(x) else math.cos(x)


def _sin(x):
    return sympy.sin(x) if _symbolic(x) else math.sin(x)


def _is_zero(amp, atol=0.0):
    if _symbolic(amp):
        return amp == 0
    return abs(amp) <= atol


def is_delayed(path):
    return path.endswith("'")


def angle_to_damping(theta):
    """Damping strength sin²(2θ) of a half-wave plate at angle θ."""
    return math.sin(2 * theta) ** 2


def damping_to_angle(p):
    """Half-wave plate angle in [0, π/4] that realizes damping strength p."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError("damping strength must be in [0, 1], got %r" % (p,))
    return 0.5 * math.asin(math.sqrt(p))


class ModeState(dict):

    """Sparse amplitudes keyed by (polarization, path)."""

    def add(self, mode, amplitude):
        self[mode] = self.get(mode, 0) + amplitude

    def paths(self, atol=0.0):
        return sorted({path for (_, path), amp in self.items() if not _is_zero(amp, atol)})

    def norm2(self):
        return float(sum(abs(complex(a)) ** 2 for a in self.values()))


@dataclasses.dataclass(frozen=True)
class PbsPort:
    """H transmits to `transmit`, V reflects to `reflect`; leaks cross over."""
    input: str
    transmit: str
    reflect: str
    leak_h: float = 0.0
    leak_v: float = 0.0


@dataclasses.dataclass(frozen=True)
class Pbs:
    """
    Polarizing beam splitter with port-dependent extinction ratios.

    For each used port, H_in → (1 − leak_h)·H_T + leak_h·H_R and
    V_in → (1 − leak_v)·V_R + leak_v·V_T.
    """
    name: str
    ports: tuple
    kind: ClassVar[str] = "pbs"

    def apply(self, state):
        by_input = {port.input: port for port in self.ports}
        out = ModeState()
        for (pol, path), amp in state.items():
            port = by_input.get(path)
            if port is None:
                out.add((pol, path), amp)
            elif pol == H:
                out.add((H, port.transmit), (1 - port.leak_h) * amp)
                out.add((H, port.reflect), port.leak_h * amp)
            else:
                out.add((V, port.reflect), (1 - port.leak_v) * amp)
                out.add((V, port.transmit), port.leak_v * amp)
        return out

    def idealized(self):
        return dataclasses.replace(self, ports=tuple(dataclasses.replace(p, leak_h=0.0, leak_v=0.0)
                                                     for p in self.ports))

    def check(self):
        for port in self.ports:
            for leak in (port.leak_h, port.leak_v):
                if not 0.0 <= leak <= MAX_EXTINCTION:
                    raise ValidationError("extinction ratio %r of %s port %s outside [0, %g]"
                                          % (leak, self.name, port.input, MAX_EXTINCTION))

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "ports": [dataclasses.asdict(p) for p in self.ports]}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["name"], tuple(PbsPort(**p) for p in doc["ports"]))


def pbs_matrix(delta, delta_prime, delta1, delta1_prime):
    """
    Two-port imperfect PBS in the basis (H_in1, V_in1, H_in2, V_in2) → outputs,
    zero leakage giving the ideal transmit-H / reflect-V splitter.
    """
    return np.array([
        [1 - delta, 0, delta, 0],
        [0, delta_prime, 0, 1 - delta_prime],
        [delta1, 0, 1 - delta1, 0],
        [0, 1 - delta1_prime, 0, delta1_prime],
    ], dtype=float)


@dataclasses.dataclass(frozen=True)
class WavePlate:
    """
    Half- or quarter-wave plate at `angle` on the listed paths.

    The half-wave plate maps |H⟩ → −cos2φ|H⟩ + sin2φ|V⟩ and
    |V⟩ → sin2φ|H⟩ + cos2φ|V⟩.
    """
    name: str
    angle: float
    paths: tuple
    retardance: str = "hwp"
    least_count: float = 0.0
    kind: ClassVar[str] = "waveplate"

    def jones(self):
        a = self.angle
        if self.retardance == "hwp":
            c, s = _cos(2 * a), _sin(2 * a)
            return ((-c, s), (s, c))
        if self.retardance == "qwp":
            c, s = _cos(a), _sin(a)
            j = sympy.I if _symbolic(a) else 1j
            off = (1 - j) * s * c
            return ((c * c + j * s * s, off), (off, s * s + j * c * c))
        raise ValidationError("unknown retardance %r" % (self.retardance,))

    def apply(self, state):
        return _apply_jones(state, self.paths, lambda path: self.jones())

    def check(self):
        if not 0.0 <= self.angle <= math.pi / 2:
            raise ValidationError("waveplate %s angle %r outside [0, pi/2]" % (self.name, self.angle))
        if self.least_count < 0:
            raise ValidationError("waveplate %s least count must be non-negative" % self.name)

    def idealized(self):
        return self

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "angle": self.angle, "paths": list(self.paths),
                "retardance": self.retardance, "least_count": self.least_count}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["name"], doc["angle"], tuple(doc["paths"]), doc.get("retardance", "hwp"),
                   doc.get("least_count", 0.0))


@dataclasses.dataclass(frozen=True)
class NotPlate:
    """
    Half-wave plate at 45° with angle error μ: σx − μσz on co-propagating
    paths and σx + μσz on the counter-propagating `mirrored` paths.
    """
    name: str = "not"
    mu: float = 0.0
    paths: tuple = ("2", "3")
    mirrored: tuple = ("3",)
    kind: ClassVar[str] = "not_plate"

    def jones_for(self, path):
        m = self.mu if path in self.mirrored else -self.mu
        return ((m, 1), (1, -m))

    def apply(self, state):
        return _apply_jones(state, self.paths, self.jones_for)

    def check(self):
        if self.mu < 0:
            raise ValidationError("NOT plate angle error must be non-negative")

    def idealized(self):
        return dataclasses.replace(self, mu=0.0)

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "mu": self.mu, "paths": list(self.paths),
                "mirrored": list(self.mirrored)}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc.get("name", "not"), doc.get("mu", 0.0), tuple(doc.get("paths", ("2", "3"))),
                   tuple(doc.get("mirrored", ("3",))))


@dataclasses.dataclass(frozen=True)
class PathDelay:
    """Relabels `path` to its delayed twin, e.g. '5' → "5'"."""
    name: str
    path: str
    kind: ClassVar[str] = "path_delay"

    @property
    def delayed(self):
        return self.path + "'"

    def apply(self, state):
        out = ModeState()
        for (pol, path), amp in state.items():
            out.add((pol, self.delayed if path == self.path else path), amp)
        return out

    def check(self):
        if is_delayed(self.path):
            raise ValidationError("path %s is already delayed" % self.path)

    def idealized(self):
        return self

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "path": self.path}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["name"], doc["path"])


@dataclasses.dataclass(frozen=True)
class Compensator:
    """Coherence-length compensator; identity on amplitudes."""
    name: str
    paths: tuple = ()
    kind: ClassVar[str] = "compensator"

    def apply(self, state):
        L.debug("compensator %s acts as identity", self.name)
        return state

    def check(self):
        pass

    def idealized(self):
        return self

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "paths": list(self.paths)}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["name"], tuple(doc.get("paths", ())))


COMPONENT_KINDS = {cls.kind: cls for cls in (Pbs, WavePlate, NotPlate, PathDelay, Compensator)}


def _apply_jones(state, paths, jones_for):
    out = ModeState()
    for (pol, path), amp in state.items():
        if path not in paths:
            out.add((pol, path), amp)
            continue
        j = jones_for(path)
        col = POLARIZATIONS.index(pol)
        out.add((H, path), j[0][col] * amp)
        out.add((V, path), j[1][col] * amp)
    return out


@dataclasses.dataclass(frozen=True)
class PbsLeaks:
    """
    Extinction ratios of one interferometer: (delta, delta_prime) on the
    input PBS port and the recombining ports 4 and 5', (delta1, delta1_prime)
    on the recombining port 2 and (delta2, delta2_prime) on the inner PBS.
    """
    delta: float = 0.0
    delta_prime: float = 0.0
    delta1: float = 0.0
    delta1_prime: float = 0.0
    delta2: float = 0.0
    delta2_prime: float = 0.0

    @classmethod
    def uniform(cls, value):
        return cls(*([value] * 6))

    @classmethod
    def names(cls):
        return tuple(f.name for f in dataclasses.fields(cls))


@dataclasses.dataclass(frozen=True)
class OpticalTrain:
    """Ordered components with the input port and the retained output paths."""
    components: tuple
    inputs: tuple = ("0",)
    outputs: tuple = OUTPUTS
    label: str = ""

    def idealized(self):
        return dataclasses.replace(self, components=tuple(c.idealized() for c in self.components))

    def check(self):
        for c in self.components:
            c.check()

    def to_json(self):
        return json.dumps({
            "label": self.label,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "components": [c.to_dict() for c in self.components],
        }, indent=2)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        components = []
        for i, c in enumerate(doc.get("components", ())):
            kind = c.get("kind")
            if kind not in COMPONENT_KINDS:
                raise ValidationError("component %d has unknown kind %r" % (i, kind))
            components.append(COMPONENT_KINDS[kind].from_dict(c))
        train = cls(tuple(components), tuple(doc.get("inputs", ("0",))), tuple(doc.get("outputs", OUTPUTS)),
                    doc.get("label", ""))
        train.check()
        return train


# (component, port) -> names of its (leak_h, leak_v) in PbsLeaks
LEAK_NAMES = {
    ("P1", "0"): ("delta", "delta_prime"),
    ("P2", "3"): ("delta2", "delta2_prime"),
    ("P1out", "2"): ("delta1", "delta1_prime"),
    ("P1out", "4"): ("delta", "delta_prime"),
    ("P1out", "5'"): ("delta", "delta_prime"),
}


def sagnac_components(theta, phi, mu=0.0, leaks=None, not_plate=True, second_plate=True):
    d = leaks or PbsLeaks()
    components = [
        Pbs("P1", (PbsPort("0", "2", "3", d.delta, d.delta_prime),)),
        WavePlate("H1", theta, ("3",)),
    ]
    if not_plate:
        components.append(NotPlate("NOT", mu))
    components += [
        Pbs("P2", (PbsPort("3", "4", "5", d.delta2, d.delta2_prime),)),
        PathDelay("delay", "5"),
    ]
    if second_plate:
        components.append(WavePlate("H2", phi, ("2", "5'")))
    components.append(Pbs("P1out", (
        PbsPort("2", "a", "b", d.delta1, d.delta1_prime),
        PbsPort("4", "b", "a", d.delta, d.delta_prime),
        PbsPort("5'", "b'", "a'", d.delta, d.delta_prime),
    )))
    return tuple(components)


def displaced_sagnac(p, P=0.0, mu=0.0, leaks=None, not_plate=True, second_plate=True, least_count=0.0):
    """
    One displaced Sagnac interferometer: first damping p on the clockwise
    arm, the NOT plate on both arms, second damping P at the exit waveplate.

    The ideal map is H0 → sin2φ·H_a + cos2φ·V_b and
    V0 → cos2θ·H_b + sin2θ·(sin2φ·H_b' + cos2φ·V_a'), with p = sin²2θ and
    P = sin²2φ.
    """
    theta, phi = damping_to_angle(p), damping_to_angle(P)
    components = list(sagnac_components(theta, phi, mu, leaks or PbsLeaks(), not_plate, second_plate))
    if least_count:
        components = [dataclasses.replace(c, least_count=least_count) if isinstance(c, WavePlate) else c
                      for c in components]
    return OpticalTrain(tuple(components), label="dsi(p=%.6g, P=%.6g)" % (p, P))


class TrainMap(object):

    """Images of the input polarization modes under a train."""

    def __init__(self, columns, inputs, outputs):
        self.columns = columns
        self.inputs = inputs
        self.outputs = outputs

    def column(self, pol, path="0"):
        return self.columns[(pol, path)]

    def jones_block(self, out_path, in_path="0"):
        """2×2 block ⟨out_pol, out_path| U |in_pol, in_path⟩."""
        block = np.zeros((2, 2), dtype=complex)
        for col, pol in enumerate(POLARIZATIONS):
            state = self.columns[(pol, in_path)]
            for row, out_pol in enumerate(POLARIZATIONS):
                block[row, col] = complex(state.get((out_pol, out_path), 0))
        return block

    def as_matrix(self, in_path="0"):
        """Dense map from (H, V) at in_path to every (pol, output path)."""
        return np.vstack([self.jones_block(path, in_path) for path in self.outputs])


def build_train_unitary(components, ideal=False, inputs=None, outputs=None, validate=True):
    """
    Compose the train and return the images of its input modes.

    Raises TrainError naming the path when amplitude ends on a path that is
    not a retained output. Input port '1' is neglected with a warning.
    """
    if isinstance(components, OpticalTrain):
        train = components
    else:
        train = OpticalTrain(tuple(components))
    if ideal:
        train = train.idealized()
    if validate:
        train.check()
    inputs = tuple(inputs or train.inputs)
    outputs = tuple(outputs or train.outputs)
    if NEGLECTED_PORT in inputs:
        L.warning("input port %s is neglected; its amplitudes are not propagated", NEGLECTED_PORT)
        inputs = tuple(i for i in inputs if i != NEGLECTED_PORT)
    columns = {}
    for path in inputs:
        for pol in POLARIZATIONS:
            state = ModeState({(pol, path): 1})
            for component in train.components:
                state = component.apply(state)
            for stray in state.paths():
                if stray == NEGLECTED_PORT:
                    L.warning("train populates the neglected port %s", NEGLECTED_PORT)
                if stray not in outputs:
                    raise TrainError("amplitude left on unconnected path %s" % stray, path=stray)
            columns[(pol, path)] = state
    return TrainMap(columns, inputs, outputs)


def _as_map(train):
    return train if isinstance(train, TrainMap) else build_train_unitary(train, validate=False)


def derive_kraus_operators(train, env_in=("0", "0"), env_out_set=None, mismatch=TemporalMismatch.binary(1),
                           second=None):
    """
    Two-photon operators K_ij = ⟨i|U_A|in⟩ ⊗ ⟨j|U_B|in⟩ for output path pairs.

    A pair whose photons disagree in delay carries Re(√z). Returns
    [((i, j), K)] in output order; operators may be trace-increasing for
    imperfect trains, so no channel validation happens here.
    """
    map_a = _as_map(train)
    map_b = map_a if second is None else _as_map(second)
    pairs = env_out_set or [(i, j) for i in map_a.outputs for j in map_b.outputs]
    blocks_a = {path: map_a.jones_block(path, env_in[0]) for path in map_a.outputs}
    blocks_b = {path: map_b.jones_block(path, env_in[1]) for path in map_b.outputs}
    operators = []
    for i, j in pairs:
        k = kron(blocks_a[i], blocks_b[j])
        if is_delayed(i) != is_delayed(j):
            k = mismatch.cross_factor * k
        operators.append(((i, j), k))
    return operators


def derive_kraus(train, env_in=("0", "0"), env_out_set=None, mismatch=TemporalMismatch.binary(1), second=None,
                 drop_zero=True):
    """Two-photon Kraus channel of a train pair, tracing out the output paths."""
    operators = derive_kraus_operators(train, env_in, env_out_set, mismatch, second)
    ops = [k for _, k in operators if not (drop_zero and np.max(np.abs(k)) <= 1e-15)]
    return KrausChannel(ops or [np.zeros((4, 4))], label="oracle(%s)" % mismatch)


def derive_single_kraus(train, env_in="0", groups=None):
    """
    Single-photon channel; each group of output paths contributes the
    coherent sum of its blocks as one operator.
    """
    m = _as_map(train)
    groups = groups or [(path,) for path in m.outputs]
    ops = [sum(m.jones_block(path, env_in) for path in group) for group in groups]
    return KrausChannel(ops, label="single photon oracle")


def _phase_aligned(k):
    flat = k.ravel()
    idx = int(np.argmax(np.abs(flat)))
    if abs(flat[idx]) == 0:
        return k
    return k * (abs(flat[idx]) / flat[idx])


def match_kraus_sets(derived, expected, zero_tol=1e-12):
    """
    Largest element-wise deviation between two Kraus sets after per-operator
    phase alignment and an optimal one-to-one matching. Zero operators are
    ignored; sets of different size give infinity.
    """
    a = [_phase_aligned(k) for k in derived if np.max(np.abs(k)) > zero_tol]
    b = [_phase_aligned(k) for k in expected if np.max(np.abs(k)) > zero_tol]
    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    cost = np.array([[np.max(np.abs(x - y)) for y in b] for x in a])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def first_order_columns(not_plate=True, second_plate=True):
    """
    Symbolic U = |F⟩⟨H0| + |G⟩⟨V0| of one interferometer with symbolic
    extinction ratios and NOT error, truncated at first order in them.

    Returns (F, G, symbols) with F and G mapping (pol, path) to expressions.
    """
    theta, phi = sympy.symbols("theta phi", real=True)
    small = sympy.symbols("delta delta_prime delta1 delta1_prime delta2 delta2_prime mu", real=True)
    eps = sympy.Symbol("epsilon")
    leaks = PbsLeaks(*[eps * s for s in small[:6]])
    components = sagnac_components(theta, phi, eps * small[6], leaks, not_plate, second_plate)
    columns = []
    for pol in POLARIZATIONS:
        state = ModeState({(pol, "0"): sympy.Integer(1)})
        for component in components:
            state = component.apply(state)
        truncated = {}
        for mode, amp in state.items():
            poly = sympy.Poly(sympy.expand(amp), eps)
            expr = poly.coeff_monomial(1) + poly.coeff_monomial(eps)
            if expr != 0:
                truncated[mode] = expr
        columns.append(truncated)
    names = dict(zip(("delta", "delta_prime", "delta1", "delta1_prime", "delta2", "delta2_prime", "mu"), small))
    names.update(theta=theta, phi=phi)
    return columns[0], columns[1], names


def reported_mu_columns(theta, phi, mu):
    """
    Leak-free F and G to first order in the NOT error, in the reported form:
    F = (sin2φ + μcos2φ)H_a + (cos2φ − μsin2φ)V_b and
    G = f₊H_b + g₋(sin2φ H_b' + cos2φ V_a') with f₊ = cos2θ + μsin2θ,
    g₋ = sin2θ − μcos2θ.
    """
    f_plus = sympy.cos(2 * theta) + mu * sympy.sin(2 * theta)
    g_minus = sympy.sin(2 * theta) - mu * sympy.cos(2 * theta)
    F = {(H, "a"): sympy.sin(2 * phi) + mu * sympy.cos(2 * phi),
         (V, "b"): sympy.cos(2 * phi) - mu * sympy.sin(2 * phi)}
    G = {(H, "b"): f_plus,
         (H, "b'"): g_minus * sympy.sin(2 * phi),
         (V, "a'"): g_minus * sympy.cos(2 * phi)}
    return F, G
