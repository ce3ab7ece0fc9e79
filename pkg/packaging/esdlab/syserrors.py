# -*- coding: utf-8 -*-

"""Systematic-error propagation into the measured concurrence.

Error sources are knobs on the optical train: PBS extinction ratios, the
NOT plate angle error μ, the two damping waveplates and the pump waveplate
that sets the state parameter. Each knob shifts the output matrix to first
order; the concurrence shift follows from first-order perturbation of the
eigenvalues of ρ·ρ̃. A Monte Carlo run over the same knobs cross-checks the
linear estimate.
"""

import dataclasses
import json
import logging
import math
from typing import Optional, Union

import numpy as np
import scipy.linalg

from esdlab.analysis import spin_flip, yield_weighted_concurrence
from esdlab.channels import TemporalMismatch
from esdlab.exceptions import DegeneracyError, ValidationError
from esdlab.optics import (LEAK_NAMES, NotPlate, Pbs, PbsLeaks, WavePlate, angle_to_damping,
                           damping_to_angle, derive_kraus_operators, displaced_sagnac)
from esdlab.qmat import TOL_ALGEBRAIC, dagger
from esdlab.states import StateParams

L = logging.getLogger("esdlab.syserrors")

LEAST_COUNT = math.pi / 90
NOT_ANGLE_ERROR = math.pi / 180
PUMP_ANGLE_ERROR = math.pi / 360
DEGENERACY_GAP = 1e-8
DIFFERENCE_STEP = 1e-6
MIN_SAMPLES = 100

GROUPS = ("pbs", "not_plate", "first_damping", "second_damping", "state_prep")


def state_prep_error(phi, delta_phi):
    """δα = 2·cos(2φ)·δφ for a pump waveplate at φ preparing α = sin(2φ)."""
    return 2.0 * math.cos(2.0 * phi) * delta_phi


def pump_angle(alpha):
    return 0.5 * math.asin(alpha)


def damping_error(theta, delta_theta):
    """δp = 2·sin(4θ)·δθ."""
    return 2.0 * math.sin(4.0 * theta) * delta_theta


def damping_error_from_p(p, least_count=LEAST_COUNT):
    """δp = √(p(1−p))·least_count; equals damping_error at δθ = least_count/4."""
    return math.sqrt(max(0.0, p * (1.0 - p))) * least_count


def _angle_deviation(p, delta_p):
    """Waveplate angle error that realizes a damping error delta_p at p."""
    if delta_p == 0:
        return 0.0
    theta = damping_to_angle(p)
    slope = 2.0 * math.sin(4.0 * theta)
    if abs(slope) > 1e-9:
        return delta_p / slope
    # sin²2θ is flat at the ends of its range
    sign, size = math.copysign(1.0, delta_p), abs(delta_p)
    if p < 0.5:
        return sign * damping_to_angle(min(1.0, size))
    return sign * (math.pi / 4 - damping_to_angle(max(0.0, 1.0 - size)))


@dataclasses.dataclass(frozen=True)
class ErrorBudget:
    """
    Magnitudes of the systematic errors.

    pbs_deltas is either one extinction ratio shared by every PBS port or a
    mapping from PbsLeaks field names to independent ratios.
    """
    mu: float = 0.0
    delta_p: float = 0.0
    delta_P: float = 0.0
    pbs_deltas: Union[float, dict] = 0.0
    delta_phi: float = 0.0

    def __post_init__(self):
        for name in ("mu", "delta_p", "delta_P", "delta_phi"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise ValidationError("budget entry %s must be a finite non-negative number, got %r" % (name, value))
        ratios = self.pbs_deltas.values() if isinstance(self.pbs_deltas, dict) else [self.pbs_deltas]
        if isinstance(self.pbs_deltas, dict):
            unknown = set(self.pbs_deltas) - set(PbsLeaks.names())
            if unknown:
                raise ValidationError("unknown extinction ratios %s" % ", ".join(sorted(unknown)))
        for value in ratios:
            if not (isinstance(value, (int, float)) and 0.0 <= value <= 0.1):
                raise ValidationError("extinction ratio must be in [0, 0.1], got %r" % (value,))

    @classmethod
    def headline(cls, delta, p=0.0, P=0.0, least_count=LEAST_COUNT):
        """Common extinction ratio delta with the reported plate errors at (p, P)."""
        return cls(mu=NOT_ANGLE_ERROR, delta_p=damping_error_from_p(p, least_count),
                   delta_P=damping_error_from_p(P, least_count), pbs_deltas=delta, delta_phi=PUMP_ANGLE_ERROR)

    def scaled(self, factor):
        pbs = ({k: v * factor for k, v in self.pbs_deltas.items()} if isinstance(self.pbs_deltas, dict)
               else self.pbs_deltas * factor)
        return ErrorBudget(self.mu * factor, self.delta_p * factor, self.delta_P * factor, pbs,
                           self.delta_phi * factor)

    def knobs(self):
        """(group, knob, magnitude) for every independent error parameter."""
        if isinstance(self.pbs_deltas, dict):
            pbs = [("pbs", name, float(v)) for name, v in sorted(self.pbs_deltas.items())]
        else:
            pbs = [("pbs", "pbs", float(self.pbs_deltas))]
        return pbs + [("not_plate", "mu", self.mu),
                      ("first_damping", "delta_p", self.delta_p),
                      ("second_damping", "delta_P", self.delta_P),
                      ("state_prep", "delta_phi", self.delta_phi)]

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text) if isinstance(text, str) else dict(text)
        unknown = set(doc) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValidationError("unknown budget fields %s" % ", ".join(sorted(unknown)))
        return cls(**doc)


@dataclasses.dataclass(frozen=True)
class OperatingPoint:
    """Input state and damping strengths at which errors are evaluated."""
    state: StateParams = StateParams(0.55)
    p: float = 0.0
    P: float = 0.0
    z: TemporalMismatch = TemporalMismatch.binary(1)

    @classmethod
    def from_config(cls, cfg):
        return cls(cfg.state, cfg.p, cfg.P_grid[0], cfg.z)

    def train(self):
        return displaced_sagnac(self.p, self.P)


DAMPING_PLATES = {"delta_p": "H1", "delta_P": "H2"}


def _plate_angles(train):
    return {c.name: c.angle for c in train.components if isinstance(c, WavePlate)}


def _as_shifts(train, values):
    """Knob values with damping errors converted to angle shifts of their plates."""
    angles = _plate_angles(train)
    shifts = {}
    for knob, value in values.items():
        plate = DAMPING_PLATES.get(knob)
        if plate is None:
            shifts[knob] = value
        elif value and plate in angles:
            shifts[plate] = _angle_deviation(angle_to_damping(angles[plate]), value)
    return shifts


def _shift_train(train, values):
    """
    Copy of train with deviations added: 'pbs' or PbsLeaks names to the
    extinction ratios, 'mu' to the NOT plate, 'H1'/'H2' to plate angles.
    """
    components = []
    for c in train.components:
        if isinstance(c, Pbs):
            ports = []
            for port in c.ports:
                if "pbs" in values:
                    dh = dv = values["pbs"]
                else:
                    names = LEAK_NAMES.get((c.name, port.input), (None, None))
                    dh, dv = values.get(names[0], 0.0), values.get(names[1], 0.0)
                ports.append(dataclasses.replace(port, leak_h=port.leak_h + dh, leak_v=port.leak_v + dv))
            c = dataclasses.replace(c, ports=tuple(ports))
        elif isinstance(c, NotPlate):
            c = dataclasses.replace(c, mu=c.mu + values.get("mu", 0.0))
        elif isinstance(c, WavePlate) and c.name in values:
            c = dataclasses.replace(c, angle=c.angle + values[c.name])
        components.append(c)
    return dataclasses.replace(train, components=tuple(components))


def _check_consistent(budget, train):
    names = {c.name for c in train.components}
    if budget.delta_p and "H1" not in names:
        raise ValidationError("budget has delta_p but the train has no first damping plate H1")
    if budget.delta_P and "H2" not in names:
        raise ValidationError("budget has delta_P but the train has no second damping plate H2")
    if budget.mu and not any(isinstance(c, NotPlate) for c in train.components):
        raise ValidationError("budget has a NOT plate error but the train has no NOT plate")


@dataclasses.dataclass
class PerturbedOperator:
    """Nominal two-photon operator and its first-order shift per knob."""
    pair: tuple
    k0: np.ndarray
    deltas: dict = dataclasses.field(default_factory=dict)

    @property
    def delta(self):
        return sum(self.deltas.values(), np.zeros_like(self.k0))


def perturb_kraus(budget, train, mismatch=TemporalMismatch.binary(1), step=DIFFERENCE_STEP):
    """
    Zeroth-order operators of the train pair and their first-order shifts.

    Each knob's δK is the central difference of the operators along that
    knob, scaled by its budget magnitude. The pump waveplate acts on the
    input state, not the operators, and is left out here.
    """
    _check_consistent(budget, train)
    nominal = derive_kraus_operators(train, mismatch=mismatch)
    result = [PerturbedOperator(pair, k) for pair, k in nominal]
    angles = _plate_angles(train)
    for group, knob, magnitude in budget.knobs():
        if group == "state_prep":
            continue
        target, scale = knob, magnitude
        if knob in DAMPING_PLATES:
            target = DAMPING_PLATES[knob]
            scale = _angle_deviation(angle_to_damping(angles[target]), magnitude) if magnitude else 0.0
        plus = derive_kraus_operators(_shift_train(train, {target: step}), mismatch=mismatch)
        minus = derive_kraus_operators(_shift_train(train, {target: -step}), mismatch=mismatch)
        for op, (_, kp), (_, km) in zip(result, plus, minus):
            op.deltas[knob] = (kp - km) * (scale / (2.0 * step))
    return result


def _ket(state, phi):
    psi = np.zeros(4, dtype=complex)
    psi[0] = math.sin(2.0 * phi)
    psi[3] = state.relative_sign * math.cos(2.0 * phi)
    return psi


def _output(train, point, values=None, phi_shift=0.0):
    if values:
        train = _shift_train(train, _as_shifts(train, values))
    ops = derive_kraus_operators(train, mismatch=point.z)
    psi = _ket(point.state, pump_angle(point.state.alpha) + phi_shift)
    rho = np.outer(psi, np.conj(psi))
    out = sum(k @ rho @ dagger(k) for _, k in ops)
    return 0.5 * (out + dagger(out))


def delta_rho(operators, rho, knob):
    """Σ δK ρ K0† + K0 ρ δK† for one knob."""
    total = np.zeros((4, 4), dtype=complex)
    for op in operators:
        dk = op.deltas.get(knob)
        if dk is None:
            continue
        term = dk @ rho @ dagger(op.k0)
        total += term + dagger(term)
    return total


def _state_prep_delta_rho(operators, point, delta_phi):
    phi = pump_angle(point.state.alpha)
    psi = _ket(point.state, phi)
    dpsi = np.zeros(4, dtype=complex)
    dpsi[0] = 2.0 * math.cos(2.0 * phi)
    dpsi[3] = -2.0 * point.state.relative_sign * math.sin(2.0 * phi)
    d_in = (np.outer(dpsi, np.conj(psi)) + np.outer(psi, np.conj(dpsi))) * delta_phi
    return sum(op.k0 @ d_in @ dagger(op.k0) for op in operators)


@dataclasses.dataclass
class ConcurrencePerturbation:
    """
    First-order or sampled concurrence shift.

    For method 'first_order', delta_lambdas are the shifts of the
    eigenvalues of ρ·ρ̃ in descending order of `lambdas`. For 'monte_carlo',
    delta_C is the mean shift, std its sample standard deviation, rms the
    root-mean-square shift and standard_error the standard error of `spread`.
    """
    delta_lambdas: Optional[tuple]
    delta_C: float
    method: str = "first_order"
    samples: Optional[int] = None
    lambdas: tuple = ()
    std: Optional[float] = None
    rms: Optional[float] = None
    standard_error: Optional[float] = None
    seed: Optional[int] = None

    @property
    def spread(self):
        """Half-width of the uniform distribution with the sampled mean-square shift."""
        return None if self.rms is None else math.sqrt(3.0) * self.rms

    def to_json(self):
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


def _clusters(values, scale):
    groups = [[0]]
    for i in range(1, len(values)):
        if values[groups[-1][-1]] - values[i] > DEGENERACY_GAP * scale:
            groups.append([i])
        else:
            groups[-1].append(i)
    return groups


def first_order_delta_c(rho0, delta_rho):
    """
    First-order concurrence shift ΔC = ½·Σ ±Δλᵢ/√λᵢ of ρ0 → ρ0 + δρ.

    λ are the eigenvalues of R = ρ0·ρ̃0, a non-normal product, so each shift
    uses the biorthogonal projector of its cluster of (numerically)
    equal eigenvalues. Zero eigenvalues contribute nothing. Raises
    DegeneracyError when the largest eigenvalue is degenerate.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    delta_rho = np.asarray(delta_rho, dtype=complex)
    r = rho0 @ spin_flip(rho0)
    dr = delta_rho @ spin_flip(rho0) + rho0 @ spin_flip(delta_rho)
    values, left, right = scipy.linalg.eig(r, left=True, right=True)
    order = np.argsort(-values.real)
    values, left, right = values.real[order], left[:, order], right[:, order]
    scale = max(1.0, abs(values[0]))
    lambdas = tuple(float(max(0.0, v)) for v in values)
    deltas = [0.0] * 4
    delta_c = 0.0
    for k, cluster in enumerate(_clusters(values, scale)):
        lam = float(np.mean(values[cluster]))
        if lam <= DEGENERACY_GAP * scale:
            continue
        if k == 0 and len(cluster) > 1:
            raise DegeneracyError(values)
        lc, rc = left[:, cluster], right[:, cluster]
        shift = float(np.real(np.trace(np.linalg.solve(dagger(lc) @ rc, dagger(lc) @ dr @ rc))))
        for i in cluster:
            deltas[i] = shift / len(cluster)
        delta_c += (0.5 if k == 0 else -0.5) * shift / math.sqrt(lam)
    roots = [math.sqrt(v) for v in lambdas]
    if roots[0] - sum(roots[1:]) <= TOL_ALGEBRAIC:
        # separable at zeroth order; the clamp at zero has no linear part
        delta_c = 0.0
    return ConcurrencePerturbation(tuple(deltas), float(delta_c), lambdas=lambdas)


@dataclasses.dataclass
class DeltaCReport:
    """First-order concurrence shift of a whole budget."""
    concurrence: float
    contributions: dict
    groups: dict
    delta_C: float
    combination: str = "quadrature"

    def to_json(self):
        return {
            "concurrence": self.concurrence,
            "delta_c_first_order": self.delta_C,
            "combination": self.combination,
            "groups": self.groups,
            "contributions": {k: v.to_json() for k, v in self.contributions.items()},
        }


def delta_c_for_budget(budget, point=None, train=None, correlated=False):
    """
    Concurrence shift of the yield-weighted output at `point`.

    Independent knobs add in quadrature; correlated=True adds the signed
    shifts linearly instead.
    """
    point = point or OperatingPoint()
    train = train or point.train()
    operators = perturb_kraus(budget, train, point.z)
    psi = _ket(point.state, pump_angle(point.state.alpha))
    rho_in = np.outer(psi, np.conj(psi))
    rho0 = _output(train, point)
    contributions = {}
    for group, knob, magnitude in budget.knobs():
        if group == "state_prep":
            d = _state_prep_delta_rho(operators, point, magnitude)
        else:
            d = delta_rho(operators, rho_in, knob)
        contributions[knob] = first_order_delta_c(rho0, d)
    knob_groups = {knob: group for group, knob, _ in budget.knobs()}
    groups = {}
    for knob, result in contributions.items():
        group = knob_groups[knob]
        groups[group] = math.hypot(groups.get(group, 0.0), result.delta_C)
    if correlated:
        total = abs(math.fsum(r.delta_C for r in contributions.values()))
    else:
        total = math.sqrt(math.fsum(r.delta_C ** 2 for r in contributions.values()))
    L.info("first-order delta C at alpha=%.6g p=%.6g P=%.6g: %.6g", point.state.alpha, point.p, point.P, total)
    return DeltaCReport(yield_weighted_concurrence(rho0), contributions, groups, total,
                        "linear" if correlated else "quadrature")


def _draw(rng, group, magnitude):
    # extinction ratios are non-negative; plate and angle errors are signed
    if group == "pbs":
        return magnitude * rng.uniform(0.0, 1.0)
    return magnitude * rng.uniform(-1.0, 1.0)


def monte_carlo_delta_c(cfg, budget, samples=10000, seed=0, train=None):
    """
    Sampled concurrence shift. Extinction ratios are drawn uniformly in
    [0, budget], every other knob uniformly within ±budget. Sample k uses the
    k-th spawned child of SeedSequence(seed).

    The mean shift carries the bias of the one-sided leaks; `spread`, √3
    times the root-mean-square shift, compares with the quadrature
    first-order ΔC.
    """
    if samples < MIN_SAMPLES:
        raise ValidationError("Monte Carlo needs at least %d samples, got %d" % (MIN_SAMPLES, samples))
    point = cfg if isinstance(cfg, OperatingPoint) else OperatingPoint.from_config(cfg)
    train = train or point.train()
    _check_consistent(budget, train)
    knobs = budget.knobs()
    c0 = yield_weighted_concurrence(_output(train, point))
    shifts = []
    for child in np.random.SeedSequence(seed).spawn(samples):
        rng = np.random.default_rng(child)
        draws = {knob: _draw(rng, group, magnitude) for group, knob, magnitude in knobs}
        phi_shift = draws.pop("delta_phi")
        shifts.append(yield_weighted_concurrence(_output(train, point, draws, phi_shift)) - c0)
    mean = math.fsum(shifts) / samples
    std = math.sqrt(math.fsum((s - mean) ** 2 for s in shifts) / (samples - 1))
    mean_square = math.fsum(s * s for s in shifts) / samples
    rms = math.sqrt(mean_square)
    if mean_square > 0:
        var_q = math.fsum((s * s - mean_square) ** 2 for s in shifts) / (samples - 1)
        error = math.sqrt(var_q / samples) / (2.0 * rms)
    else:
        error = 0.0
    L.info("monte carlo delta C over %d samples (seed %d): mean %.6g std %.6g", samples, seed, mean, std)
    return ConcurrencePerturbation(None, mean, "monte_carlo", samples, std=std, rms=rms,
                                   standard_error=math.sqrt(3.0) * error, seed=seed)


def concurrence_vs_alpha(alphas, budget, point=None):
    """
    Yield-weighted concurrence over the state parameter, ideal and with every
    knob at +budget, plus the first-order shift.
    """
    point = point or OperatingPoint()
    train = point.train()
    values = {knob: magnitude for group, knob, magnitude in budget.knobs() if group != "state_prep"}
    rows = []
    for alpha in alphas:
        at = dataclasses.replace(point, state=dataclasses.replace(point.state, alpha=float(alpha)))
        ideal = yield_weighted_concurrence(_output(train, at))
        imperfect = yield_weighted_concurrence(_output(train, at, values))
        rows.append({"alpha": float(alpha), "ideal": ideal, "imperfect": imperfect,
                     "delta_c_first_order": delta_c_for_budget(budget, at, train).delta_C})
    return rows


def spread_over_state_parameter(budget, point=None):
    """
    First-order ΔC at the two ends of the state-parameter interval that the
    pump waveplate error allows.
    """
    point = point or OperatingPoint()
    phi = pump_angle(point.state.alpha)
    ends = []
    for sign in (-1.0, 1.0):
        alpha = min(1.0, max(0.0, math.sin(2.0 * (phi + sign * budget.delta_phi))))
        at = dataclasses.replace(point, state=dataclasses.replace(point.state, alpha=alpha))
        ends.append((alpha, delta_c_for_budget(budget, at).delta_C))
    (a_low, c_low), (a_high, c_high) = ends
    center = delta_c_for_budget(budget, point).delta_C
    return {"alpha_low": a_low, "alpha_high": a_high, "delta_c_low": c_low, "delta_c_high": c_high,
            "delta_c": center, "half_width": 0.5 * abs(c_high - c_low)}
