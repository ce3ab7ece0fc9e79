import math
import os

import numpy as np
import pytest

from esdlab.analysis import (EsdThreshold, Regime, ThresholdKind, Trajectory, classify, concurrence,
                             find_esd_threshold, is_xstate, pipeline_thresholds, regime_boundaries, regime_map,
                             spin_flip, xstate_concurrence, xstate_parts, yield_weighted_concurrence)
from esdlab.channels import apply_channel, not_unitary, product_channel, standard_adc_kraus
from esdlab.exceptions import NormalizationError, ValidationError
from esdlab.qmat import DensityMatrix, kron, random_unitary
from esdlab.states import StateParams, basis_state, bell_state, make_state, random_density_matrix

from .utilities import ALPHA, BETA, pure_family_trajectory, random_xstate


def damped_family(alpha):
    rho = make_state(StateParams(alpha))
    return lambda P: apply_channel(rho, product_channel(standard_adc_kraus(P)))


def test_concurrence_examples():
    assert concurrence(bell_state("phi+")) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(basis_state("HH")) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(make_state(StateParams(ALPHA))) == pytest.approx(2 * ALPHA * BETA, abs=1e-12)
    assert concurrence(make_state(StateParams(ALPHA))) == pytest.approx(0.9185, abs=1e-4)


def test_concurrence_requires_normalized_state():
    with pytest.raises(NormalizationError):
        concurrence(DensityMatrix(np.diag([0.5, 0, 0, 0.2])))


def test_yield_weighted_concurrence_is_homogeneous():
    rho = make_state(StateParams(0.4))
    assert yield_weighted_concurrence(0.3 * rho.matrix) == pytest.approx(0.3 * concurrence(rho), abs=1e-12)


def test_closed_form_matches_wootters_on_random_xstates():
    rng = np.random.default_rng(2024)
    for _ in range(10000):
        pops, c1, c2, m = random_xstate(rng)
        assert xstate_concurrence(pops, c1, c2) == pytest.approx(concurrence(m), abs=1e-10)


def test_xstate_concurrence_examples():
    assert xstate_concurrence([0.5, 0, 0, 0.5], 0.5, 0) == pytest.approx(1.0)
    assert xstate_concurrence([0.25, 0.25, 0.25, 0.25], 0, 0) == 0
    with pytest.raises(ValidationError):
        xstate_concurrence([0.5, 0, 0, 0.5], 0.6, 0)
    with pytest.raises(ValidationError):
        xstate_concurrence([0.5, 0, 0, 0.4], 0.1, 0)


def test_closed_form_matches_wootters_on_damped_family():
    source = damped_family(ALPHA)
    for P in np.linspace(0, 1, 101):
        rho = source(float(P))
        assert is_xstate(rho)
        pops, c1, c2 = xstate_parts(rho)
        expected = pure_family_trajectory(ALPHA, P)
        assert xstate_concurrence(pops, c1, c2) == pytest.approx(expected, abs=1e-10)
        assert concurrence(rho) == pytest.approx(expected, abs=1e-10)


def test_local_unitary_invariance():
    rng = np.random.default_rng(9)
    xx = not_unitary()
    for _ in range(200):
        rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        c = concurrence(rho)
        u = kron(random_unitary(rng), random_unitary(rng))
        assert concurrence(xx @ rho.matrix @ xx) == pytest.approx(c, abs=1e-10)
        assert concurrence(u @ rho.matrix @ u.conj().T) == pytest.approx(c, abs=1e-10)


def test_spin_flip_conjugation_irrelevant_for_real_states():
    rho = apply_channel(make_state(StateParams(ALPHA)), product_channel(standard_adc_kraus(0.3)))
    assert np.max(np.abs(spin_flip(rho) - spin_flip(rho, conjugate=False))) == 0


def test_threshold_of_pure_family():
    threshold = find_esd_threshold(damped_family(ALPHA))
    assert threshold.kind == ThresholdKind.sudden_death
    assert threshold.value == pytest.approx(ALPHA / BETA, abs=1e-6)
    assert threshold.value == pytest.approx(0.64, abs=0.03)
    assert not threshold.revival
    threshold = find_esd_threshold(damped_family(0.45))
    assert threshold.value == pytest.approx(0.45 / math.sqrt(1 - 0.2025), abs=1e-6)
    assert threshold.value == pytest.approx(0.5038, abs=1e-4)


def test_threshold_matches_ratio_across_family():
    for alpha in (0.1, 0.3, 0.5, 0.65, 0.7):
        beta = math.sqrt(1 - alpha**2)
        assert find_esd_threshold(damped_family(alpha)).value == pytest.approx(alpha / beta, abs=1e-6)


def test_bell_state_decays_asymptotically():
    threshold = find_esd_threshold(damped_family(1 / math.sqrt(2)))
    assert threshold == EsdThreshold.asymptotic()
    assert threshold.to_json() == "asymptotic"


def test_threshold_reports_revival():
    def dip(P):
        c = 0.0 if 0.3 <= P <= 0.5 else 0.4
        m = np.diag([0.5, 0, 0, 0.5]).astype(complex)
        m[0, 3] = m[3, 0] = c / 2
        return DensityMatrix(m)

    threshold = find_esd_threshold(dip)
    assert threshold.revival
    assert threshold.value == pytest.approx(0.3, abs=1e-7)


def test_threshold_validation():
    with pytest.raises(ValidationError):
        EsdThreshold(None, ThresholdKind.sudden_death)
    with pytest.raises(ValidationError):
        EsdThreshold(0.5, ThresholdKind.asymptotic)


def test_classify_examples():
    asym = EsdThreshold.asymptotic()
    assert classify(EsdThreshold.sudden_death(0.48), asym) == Regime.avoided
    assert classify(EsdThreshold.sudden_death(0.62), EsdThreshold.sudden_death(0.93)) == Regime.delayed
    assert classify(EsdThreshold.sudden_death(0.84), EsdThreshold.sudden_death(0.60)) == Regime.hastened
    assert classify(asym, EsdThreshold.sudden_death(0.6)) == Regime.induced
    assert classify(asym, asym) == Regime.unchanged
    assert classify(EsdThreshold.sudden_death(0.5), EsdThreshold.sudden_death(0.5 + 1e-7)) == Regime.unchanged


def test_classify_antisymmetry():
    a, b = EsdThreshold.sudden_death(0.4), EsdThreshold.sudden_death(0.7)
    assert classify(a, b) == Regime.delayed
    assert classify(b, a) == Regime.hastened


def test_regime_boundaries_for_reference_state():
    bounds = regime_boundaries(ALPHA)
    assert bounds["avoided_delayed"] == pytest.approx(0.2480, abs=1e-3)
    assert bounds["delayed_hastened"] == pytest.approx(0.28315, abs=1e-5)
    assert bounds["delayed_hastened"] == pytest.approx(0.2832, abs=0.005)
    assert bounds["baseline_asymptotic"] == pytest.approx(1 - ALPHA / BETA, abs=1e-12)
    with pytest.raises(ValidationError):
        regime_boundaries(0.8)


def test_pipeline_thresholds_closed_form():
    baseline, with_not = pipeline_thresholds(ALPHA, 0.43)
    assert not baseline.is_sudden_death
    assert with_not.value == pytest.approx(0.6068, abs=1e-4)
    baseline, with_not = pipeline_thresholds(ALPHA, 0.0)
    assert baseline.value == pytest.approx(ALPHA / BETA)
    assert not with_not.is_sudden_death


def test_regime_map_reference_state():
    result = regime_map(ALPHA, [0.0, 0.1, 0.26, 0.3, 0.4], refine_width=1e-4)
    assert [r for _, r in result] == [Regime.avoided, Regime.avoided, Regime.delayed, Regime.hastened,
                                      Regime.induced]
    transitions = {(b["from"], b["to"]): b["p"] for b in result.numeric_boundaries}
    assert transitions[("avoided", "delayed")] == pytest.approx(result.analytic_boundaries["avoided_delayed"],
                                                                abs=2e-4)
    assert transitions[("delayed", "hastened")] == pytest.approx(0.28315, abs=2e-4)
    assert any("0.17" in note for note in result.notes)
    assert any("0.96" in note for note in result.notes)


def test_regime_map_symmetric_state():
    result = regime_map(1 / math.sqrt(2), [0.0, 0.2, 0.5], refine_width=1e-3)
    assert [r for _, r in result] == [Regime.unchanged, Regime.induced, Regime.induced]


def test_trajectory_csv(tmp_path):
    trajectory = Trajectory(grid=[0.0, 0.5, 1.0], concurrence=[0.9, 0.1, -1e-12], purity=[1, 0.7, 1],
                            trace_before_renorm=[0.76, 0.76, 0.76])
    assert trajectory.concurrence[-1] == 0.0
    path = os.path.join(str(tmp_path), "trajectory.csv")
    trajectory.to_csv(path)
    with open(path) as f:
        assert f.readline().strip() == "P,concurrence,purity,trace_before_renorm"
    back = Trajectory.from_csv(path)
    assert back.grid == trajectory.grid
    assert back.concurrence == trajectory.concurrence
    assert back.trace_before_renorm == trajectory.trace_before_renorm


def test_trajectory_validation():
    with pytest.raises(ValidationError):
        Trajectory(grid=[0.0, 0.0], concurrence=[0, 0], purity=[1, 1])
    with pytest.raises(ValidationError):
        Trajectory(grid=[0.0, 1.0], concurrence=[0, -0.1], purity=[1, 1])
