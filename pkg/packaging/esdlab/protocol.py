# -*- coding: utf-8 -*-

"""The ESD manipulation pipeline and the channel characterization runs.

A two-photon state first passes the correlated damping channel at strength
p, then optionally the NOT on both photons, then the product damping
channel whose strength P is swept. Comparing the sudden-death threshold of
that curve with a baseline without NOT classifies the manipulation.
"""

import dataclasses
import logging
from typing import Optional

import numpy as np

from esdlab.analysis import Regime, Trajectory, classify, find_esd_threshold, scan_concurrence
from esdlab.channels import (TemporalMismatch, apply_channel, correlated_adc_kraus, not_unitary, product_channel,
                             standard_adc_kraus, unitary_channel)
from esdlab.exceptions import ValidationError
from esdlab.qmat import TOL_ALGEBRAIC
from esdlab.states import StateParams, basis_state, make_state, purity, renormalize

L = logging.getLogger("esdlab.protocol")

DEFAULT_GRID_POINTS = 201

VARIANTS = ("single_flip", "literal")
BASELINES = ("first_channel", "input_state")


def uniform_grid(points=DEFAULT_GRID_POINTS):
    if points < 2:
        raise ValidationError("a damping grid needs at least 2 points, got %d" % points)
    return [float(v) for v in np.linspace(0.0, 1.0, points)]


@dataclasses.dataclass
class ProtocolConfig:
    """
    One run of the manipulation pipeline.

    Args:
        state: input state parameters.
        p: strength of the first (correlated) damping channel.
        z: temporal mismatch of the first channel.
        pipeline_variant: 'single_flip' (default) models one physical flip,
            toggled by apply_not, after the flip-free first channel;
            'literal' applies the first channel with its built-in flip and
            then the NOT again.
        apply_not: apply the NOT between the two channels.
        renormalize_after_first: post-select the first channel output to
            unit trace. None resolves to True whenever the first channel is
            trace-decreasing (Re(√z) < 1).
        baseline: reference curve without NOT. 'first_channel' (default)
            keeps the same first channel, 'input_state' damps the undamped
            input directly.
        P_grid: strictly increasing second-channel strengths in [0, 1].
        tomography_comparison: the run feeds simulated tomography, which
            requires normalized states.
    """
    state: StateParams
    p: float = 0.0
    z: TemporalMismatch = dataclasses.field(default_factory=lambda: TemporalMismatch.binary(0))
    pipeline_variant: str = "single_flip"
    apply_not: bool = True
    renormalize_after_first: Optional[bool] = None
    baseline: str = "first_channel"
    P_grid: list = dataclasses.field(default_factory=uniform_grid)
    tomography_comparison: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError("p must be in [0, 1], got %r" % (self.p,))
        if self.pipeline_variant not in VARIANTS:
            raise ValidationError("pipeline_variant must be one of %s" % ", ".join(VARIANTS))
        if self.baseline not in BASELINES:
            raise ValidationError("baseline must be one of %s" % ", ".join(BASELINES))
        grid = list(self.P_grid)
        if not grid or grid[0] < 0.0 or grid[-1] > 1.0:
            raise ValidationError("P_grid must lie within [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("P_grid must be strictly increasing")
        self.P_grid = [float(v) for v in grid]
        trace_decreasing = self.z.cross_factor ** 2 < 1 - TOL_ALGEBRAIC
        if self.renormalize_after_first is None:
            self.renormalize_after_first = trace_decreasing
        if self.tomography_comparison and trace_decreasing and not self.renormalize_after_first:
            raise ValidationError("tomography comparison of a trace-decreasing first channel needs "
                                  "renormalize_after_first")

    def first_channel(self):
        return correlated_adc_kraus(self.p, self.z, embed_not=self.pipeline_variant == "literal")


@dataclasses.dataclass
class PipelineResult:
    manipulated: Trajectory
    baseline: Trajectory
    classification: Regime

    def summary(self):
        return {
            "threshold_with_not": self.manipulated.threshold.to_json(),
            "threshold_without_not": self.baseline.threshold.to_json(),
            "classification": self.classification.value,
            "initial_concurrence_with_not": self.manipulated.concurrence[0],
            "trace_after_first_channel": self.manipulated.trace_before_renorm[0],
        }


def _after_first(cfg, flip, use_first):
    """State entering the second channel and its trace before renormalization."""
    rho = make_state(cfg.state)
    if use_first:
        rho = apply_channel(rho, cfg.first_channel())
    trace = rho.trace
    if cfg.renormalize_after_first and abs(trace - 1.0) > TOL_ALGEBRAIC:
        L.debug("post-selecting first channel output of p=%.6g (%s), trace %.12g", cfg.p, cfg.z, trace)
        rho = renormalize(rho)
    if flip:
        rho = apply_channel(rho, unitary_channel(not_unitary(), "not"))
    return rho, trace


def second_channel(rho, P):
    return apply_channel(rho, product_channel(standard_adc_kraus(P)))


def evolve(cfg, P, apply_not=None):
    """The pipeline state at second-channel strength P."""
    flip = cfg.apply_not if apply_not is None else apply_not
    rho, _ = _after_first(cfg, flip, True)
    return second_channel(rho, P)


def _trajectory(source, grid, trace, label):
    states = [renormalize(source(P)) for P in grid]
    trajectory = Trajectory(grid=list(grid),
                            concurrence=[scan_concurrence(rho) for rho in states],
                            purity=[purity(rho) for rho in states],
                            trace_before_renorm=[trace] * len(grid),
                            label=label)
    trajectory.threshold = find_esd_threshold(lambda P: renormalize(source(P)))
    return trajectory


def _curve(cfg, flip, use_first, label):
    rho, trace = _after_first(cfg, flip, use_first)
    return _trajectory(lambda P: second_channel(rho, P), cfg.P_grid, trace, label)


def run_pipeline(cfg):
    """
    Sweep the second channel for the configured run and its baseline.

    The manipulated curve applies the NOT iff cfg.apply_not. The baseline
    curve never applies the NOT and, for baseline='input_state', also skips
    the first channel. Concurrence and purity are taken on the normalized
    state, the trace before renormalization is recorded alongside.
    """
    manipulated = _curve(cfg, cfg.apply_not, True, "with_not" if cfg.apply_not else "without_not")
    baseline = _curve(cfg, False, cfg.baseline == "first_channel", "baseline")
    regime = classify(baseline.threshold, manipulated.threshold)
    manipulated.classification_tag = regime
    L.info("alpha=%.6g p=%.6g %s: %s (baseline %s, manipulated %s)", cfg.state.alpha, cfg.p, cfg.z,
           regime.value, baseline.threshold.to_json(), manipulated.threshold.to_json())
    return PipelineResult(manipulated, baseline, regime)


def characterize_first_channel(state, p_grid, z=TemporalMismatch.binary(0), embed_not=True):
    """Concurrence and purity of the post-selected first channel output over p, second channel off."""
    rho0 = make_state(state) if isinstance(state, StateParams) else state
    outputs = [apply_channel(rho0, correlated_adc_kraus(float(p), z, embed_not)) for p in p_grid]
    states = [renormalize(rho) for rho in outputs]
    trajectory = Trajectory(grid=list(p_grid),
                            concurrence=[scan_concurrence(rho) for rho in states],
                            purity=[purity(rho) for rho in states],
                            trace_before_renorm=[rho.trace for rho in outputs],
                            label="first_channel")
    trajectory.threshold = find_esd_threshold(
        lambda p: apply_channel(rho0, correlated_adc_kraus(p, z, embed_not), renorm=True))
    return trajectory


def characterize_second_channel(state, P_grid, apply_not=False):
    """Concurrence and purity of the product damping channel alone (first channel off)."""
    rho = make_state(state) if isinstance(state, StateParams) else state
    if apply_not:
        rho = apply_channel(rho, unitary_channel(not_unitary(), "not"))
    return _trajectory(lambda P: second_channel(rho, P), P_grid, rho.trace, "second_channel")


@dataclasses.dataclass
class PurityComparison:
    grid: list
    correlated: list
    product: list
    trace_before_renorm: list


def separable_purity_test(p_grid, z=TemporalMismatch.binary(0), embed_not=True):
    """
    Purity of |VV⟩ through the post-selected correlated channel against the
    product damping channel, ((1−p)⁴ + p⁴)/((1−p)² + p²)² versus ((1−p)² + p²)²
    at z = 0.
    """
    vv = basis_state("VV")
    correlated, product, traces = [], [], []
    for p in p_grid:
        out = apply_channel(vv, correlated_adc_kraus(float(p), z, embed_not))
        traces.append(out.trace)
        correlated.append(purity(renormalize(out)))
        product.append(purity(second_channel(vv, float(p))))
    return PurityComparison([float(p) for p in p_grid], correlated, product, traces)
