# -*- coding: utf-8 -*-

"""Simulated two-photon polarization tomography.

Each setting projects both photons onto single-qubit analyzer states and
collects coincidences for a fixed number of pairs. Counts are drawn from a
Poisson law around N·Tr(Πρ); the state is recovered by linear inversion
with eigenvalue clipping or by maximum likelihood.
"""

import csv
import dataclasses
import itertools
import logging
import math
import os
from typing import Optional, Union

import numpy as np

from esdlab.analysis import concurrence
from esdlab.exceptions import IncompletenessError, ValidationError
from esdlab.optics import WavePlate
from esdlab.qmat import I4, TOL_ALGEBRAIC, TOL_PSD, DensityMatrix, dagger, herm_eig, hermiticity_norm
from esdlab.states import SINGLE_QUBIT_KETS, as_array, fidelity, purity

L = logging.getLogger("esdlab.tomography")

DEFAULT_PAIRS_PER_SETTING = 10000
MAX_ITERATIONS = 10000
LIKELIHOOD_TOLERANCE = 1e-10
DEFAULT_ITERATIONS = 5
ANALYZERS_16 = ("H", "V", "D", "R")
ANALYZERS_36 = ("H", "V", "D", "A", "R", "L")
METHODS = ("linear_inversion", "max_likelihood")


def pairs_per_setting():
    return int(os.environ.get("ESDLAB_PAIRS_PER_SETTING", DEFAULT_PAIRS_PER_SETTING))


@dataclasses.dataclass(frozen=True)
class MeasurementSetting:
    """Rank-1 two-photon projector with the pairs collected for it."""
    label: str
    projector: np.ndarray
    duration_counts: int = DEFAULT_PAIRS_PER_SETTING

    def __post_init__(self):
        p = np.asarray(self.projector, dtype=complex)
        if p.shape != (4, 4):
            raise ValidationError("projector %s must be 4x4" % self.label)
        if hermiticity_norm(p) > TOL_PSD or np.max(np.abs(p @ p - p)) > TOL_PSD:
            raise ValidationError("setting %s is not a Hermitian idempotent projector" % self.label)
        if self.duration_counts <= 0:
            raise ValidationError("setting %s needs a positive pair count" % self.label)
        p.setflags(write=False)
        object.__setattr__(self, "projector", p)

    @classmethod
    def from_label(cls, label, pairs=None):
        """Setting from two analyzer labels out of H, V, D, A, R, L, e.g. 'DR'."""
        if len(label) != 2 or any(c not in SINGLE_QUBIT_KETS for c in label):
            raise ValidationError("unknown setting label %r" % (label,))
        ket = np.kron(SINGLE_QUBIT_KETS[label[0]], SINGLE_QUBIT_KETS[label[1]])
        return cls(label, np.outer(ket, np.conj(ket)), pairs or pairs_per_setting())

    def probability(self, rho):
        return float(np.real(np.trace(self.projector @ as_array(rho))))


def standard_settings(count=16, pairs=None):
    """The 16 projections over {H, V, D, R} or the 36 over all six analyzer states."""
    if count not in (16, 36):
        raise ValidationError("standard setting sets have 16 or 36 projections, got %d" % count)
    analyzers = ANALYZERS_16 if count == 16 else ANALYZERS_36
    return [MeasurementSetting.from_label(a + b, pairs) for a, b in itertools.product(analyzers, repeat=2)]


def analyzer_ket(qwp_angle, hwp_angle):
    """Single-photon state transmitted to the H port by a QWP, HWP, PBS analyzer."""
    qwp = np.array(WavePlate("QWP", qwp_angle, ("0",), retardance="qwp").jones(), dtype=complex)
    hwp = np.array(WavePlate("HWP", hwp_angle, ("0",)).jones(), dtype=complex)
    return dagger(hwp @ qwp) @ np.array([1, 0], dtype=complex)


def settings_from_analyzer(analyzers, pairs=None):
    """
    Settings over every pair of analyzer configurations.

    `analyzers` maps a one-letter label to the (qwp, hwp) angles that send
    that polarization to the transmitted port.
    """
    kets = {label: analyzer_ket(*angles) for label, angles in analyzers.items()}
    settings = []
    for a, b in itertools.product(kets, repeat=2):
        ket = np.kron(kets[a], kets[b])
        settings.append(MeasurementSetting(a + b, np.outer(ket, np.conj(ket)), pairs or pairs_per_setting()))
    return settings


@dataclasses.dataclass(frozen=True)
class CountRecord:
    """Coincidences of one setting; pairs is the number of photon pairs sent, when known."""
    label: str
    observed: Union[int, float]
    expected: float
    pairs: Optional[int] = None

    def __post_init__(self):
        if self.observed < 0:
            raise ValidationError("negative count for setting %s" % self.label)
        if self.pairs is not None and self.pairs <= 0:
            raise ValidationError("setting %s needs a positive pair count" % self.label)


def _seed_sequence(seed):
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def simulate_counts(rho, settings=None, pairs=None, seed=0, noiseless=False):
    """
    Coincidence counts per setting, observed ~ Poisson(N·Tr(Πρ)).

    Setting k draws from the k-th child of SeedSequence(seed). With
    noiseless, observed equals the expected value.
    """
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    if not rho.is_normalized():
        raise ValidationError("tomography needs a trace-1 state (trace %.12g)" % rho.trace)
    settings = settings or standard_settings()
    children = _seed_sequence(seed).spawn(len(settings))
    records = []
    for setting, child in zip(settings, children):
        n = pairs or setting.duration_counts
        expected = n * max(0.0, setting.probability(rho))
        observed = expected if noiseless else int(np.random.default_rng(child).poisson(expected))
        records.append(CountRecord(setting.label, observed, expected, n))
    return records


def _settings_for(records, settings):
    by_label = {s.label: s for s in (settings or [])}
    out = []
    for r in records:
        if r.label not in by_label:
            by_label[r.label] = MeasurementSetting.from_label(r.label)
        out.append(by_label[r.label])
    return out


def _exposures(records, settings):
    return np.array([float(r.pairs or s.duration_counts) for r, s in zip(records, settings)])


def _design(settings):
    a = np.array([s.projector.T.ravel() for s in settings])
    rank = np.linalg.matrix_rank(a)
    if rank < 16:
        raise IncompletenessError(16 - rank)
    return a


def physical_projection(m):
    """Nearest state by eigenvalue clipping and rescaling; zero maps to I/4."""
    m = 0.5 * (m + dagger(m))
    values, vectors = herm_eig(m)
    values = np.clip(values, 0.0, None)
    if values.sum() <= TOL_ALGEBRAIC:
        L.warning("estimate has no positive weight, returning the maximally mixed state")
        return DensityMatrix(I4 / 4)
    values = values / values.sum()
    return DensityMatrix((vectors * values) @ dagger(vectors))


def linear_inversion(records, settings=None):
    settings = _settings_for(records, settings)
    a = _design(settings)
    freqs = np.array([float(r.observed) for r in records]) / _exposures(records, settings)
    solution, *_ = np.linalg.lstsq(a, freqs.astype(complex), rcond=None)
    return physical_projection(solution.reshape(4, 4))


def _log_likelihood(counts, exposures, probs):
    total = float(np.dot(exposures, probs))
    mask = counts > 0
    return float(np.sum(counts[mask] * np.log(exposures[mask] * probs[mask] / total)))


def max_likelihood(records, settings=None, max_iterations=MAX_ITERATIONS, tol=LIKELIHOOD_TOLERANCE):
    """
    Poisson maximum likelihood by the diluted R·ρ·R ascent.

    The projector set need not sum to the identity: the step uses
    G⁻¹·R with G = Σ Nⱼ Πⱼ, and the dilution ε is halved whenever a step
    would lower the likelihood. Stops when the improvement drops below tol.
    """
    settings = _settings_for(records, settings)
    _design(settings)
    counts = np.array([float(r.observed) for r in records])
    if counts.sum() <= 0:
        L.warning("all counts are zero, returning the maximally mixed state")
        return DensityMatrix(I4 / 4)
    projectors = np.array([s.projector for s in settings])
    exposures = _exposures(records, settings)
    g_inv = np.linalg.inv(np.einsum("k,kij->ij", exposures, projectors))

    def probs_of(r):
        return np.clip(np.real(np.einsum("kij,ji->k", projectors, r)), 1e-15, None)

    rho = I4 / 4
    probs = probs_of(rho)
    current = _log_likelihood(counts, exposures, probs)
    epsilon = 1.0
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        scale = float(np.dot(exposures, probs)) / counts.sum()
        r = scale * np.einsum("k,kij->ij", counts / probs, projectors)
        step = (I4 + epsilon * g_inv @ r) / (1.0 + epsilon)
        candidate = step @ rho @ dagger(step)
        candidate = candidate / np.real(np.trace(candidate))
        candidate_probs = probs_of(candidate)
        value = _log_likelihood(counts, exposures, candidate_probs)
        if value < current - 1e-12:
            epsilon /= 2.0
            if epsilon < 1e-12:
                break
            continue
        improvement = value - current
        rho, probs, current = candidate, candidate_probs, value
        if improvement < tol:
            break
    L.debug("max likelihood stopped after %d iterations, log-likelihood %.12g", iterations, current)
    return physical_projection(rho)


def reconstruct(records, method="linear_inversion", settings=None):
    """State estimate from counts; raises IncompletenessError for rank-deficient settings."""
    if method == "linear_inversion":
        return linear_inversion(records, settings)
    if method == "max_likelihood":
        return max_likelihood(records, settings)
    raise ValidationError("method must be one of %s" % ", ".join(METHODS))


@dataclasses.dataclass
class RepeatedQst:
    mean: float
    std: float
    concurrences: list
    fidelities: list

    def __iter__(self):
        return iter((self.mean, self.std))


def repeated_qst(rho, settings=None, pairs=None, iterations=DEFAULT_ITERATIONS, seed=0, method="max_likelihood",
                 noiseless=False):
    """
    Concurrence mean and sample standard deviation over repeated
    tomography runs, iteration k seeded by the k-th child of seed.
    """
    if iterations < 2:
        raise ValidationError("repeated tomography needs at least 2 iterations, got %d" % iterations)
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    concurrences, fidelities = [], []
    for child in _seed_sequence(seed).spawn(iterations):
        estimate = reconstruct(simulate_counts(rho, settings, pairs, child, noiseless), method, settings)
        concurrences.append(concurrence(estimate))
        fidelities.append(fidelity(rho, estimate))
    mean = math.fsum(concurrences) / iterations
    std = math.sqrt(math.fsum((c - mean) ** 2 for c in concurrences) / (iterations - 1))
    return RepeatedQst(mean, std, concurrences, fidelities)


def reconstruction_report(truth, estimate):
    return {
        "fidelity": fidelity(truth, estimate),
        "concurrence": concurrence(estimate),
        "purity": purity(estimate),
        "true_concurrence": concurrence(truth),
    }


COUNT_COLUMNS = ("setting_label", "observed", "expected")


def write_counts(path, records):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COUNT_COLUMNS)
        for r in records:
            observed = r.observed if isinstance(r.observed, int) else "%.17g" % r.observed
            writer.writerow([r.label, observed, "%.17g" % r.expected])


def read_counts(path, pairs=None):
    """Count records of a counts file; the file has no pair counts, pass pairs to attach one."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != COUNT_COLUMNS:
            raise ValidationError("counts file %s must have columns %s" % (path, ", ".join(COUNT_COLUMNS)))
        records = []
        for row in reader:
            observed = float(row["observed"])
            records.append(CountRecord(row["setting_label"], int(observed) if observed.is_integer() else observed,
                                       float(row["expected"]), pairs))
        return records
