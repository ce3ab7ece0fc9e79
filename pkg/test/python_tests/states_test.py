import numpy as np
import pytest

from esdlab.channels import TemporalMismatch, apply_channel, correlated_adc_kraus
from esdlab.exceptions import NormalizationError, PostSelectionError, ValidationError
from esdlab.qmat import DensityMatrix, herm_eig
from esdlab.states import (StateParams, basis_state, bell_state, fidelity, make_state, product_state, purity,
                           random_density_matrix, renormalize)

from .utilities import ALPHA, max_abs_diff


def test_make_state_examples():
    assert max_abs_diff(make_state(StateParams(1.0)).matrix, basis_state("HH").matrix) < 1e-15
    bell = make_state(StateParams(1 / np.sqrt(2)))
    assert bell.element("HH", "HH") == pytest.approx(0.5)
    assert bell.element("VV", "VV") == pytest.approx(0.5)
    assert bell.element("HH", "VV") == pytest.approx(-0.5)
    rho = make_state(StateParams(ALPHA))
    assert rho.element("HH", "HH").real == pytest.approx(0.3025)
    assert rho.element("VV", "VV").real == pytest.approx(0.6975)
    assert rho.element("HH", "VV").real == pytest.approx(-0.459, abs=5e-4)


def test_make_state_is_pure_projector_across_family():
    for alpha in np.linspace(0, 1, 100):
        rho = make_state(StateParams(float(alpha)))
        values, _ = herm_eig(rho.matrix)
        assert rho.trace == pytest.approx(1.0, abs=1e-12)
        assert values[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(values[1:]) < 1e-12)
        assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_state_params_validation():
    assert StateParams(0.6).beta == pytest.approx(0.8)
    with pytest.raises(ValidationError):
        StateParams(1.2)
    with pytest.raises(ValidationError):
        StateParams(0.5, relative_sign=0)
    assert StateParams.from_dict({"alpha": 0.55}).relative_sign == -1


def test_purity_examples():
    assert purity(bell_state("psi-")) == pytest.approx(1.0)
    assert purity(DensityMatrix(np.eye(4) / 4)) == pytest.approx(0.25)
    assert purity(DensityMatrix(np.diag([0.5, 0, 0, 0.5]))) == pytest.approx(0.5)


def test_purity_requires_normalized_state():
    with pytest.raises(NormalizationError):
        purity(DensityMatrix(np.diag([0.25, 0, 0, 0.25])))


def test_renormalize_examples():
    rho = make_state(StateParams(ALPHA))
    assert renormalize(rho) is rho
    half = DensityMatrix(0.5 * basis_state("HH").matrix)
    assert max_abs_diff(renormalize(half).matrix, basis_state("HH").matrix) < 1e-15


def test_renormalize_after_correlated_channel():
    channel = correlated_adc_kraus(0.22, TemporalMismatch.binary(0), embed_not=False)
    out = apply_channel(make_state(StateParams(ALPHA)), channel)
    assert out.trace == pytest.approx(0.76062, abs=1e-5)
    normalized = renormalize(out)
    assert normalized.trace == pytest.approx(1.0, abs=1e-12)
    assert max_abs_diff(renormalize(normalized).matrix, normalized.matrix) < 1e-15


def test_renormalize_fully_post_selected():
    with pytest.raises(PostSelectionError):
        renormalize(np.zeros((4, 4)))


def test_fidelity():
    rng = np.random.default_rng(5)
    rho = random_density_matrix(rng)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)
    assert fidelity(basis_state("HH"), basis_state("VV")) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(bell_state("phi+"), product_state("H", "H")) == pytest.approx(0.5)
