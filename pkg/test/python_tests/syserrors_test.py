import math

import numpy as np
import pytest

from esdlab.analysis import spin_flip, yield_weighted_concurrence
from esdlab.exceptions import DegeneracyError, ValidationError
from esdlab import syserrors
from esdlab.optics import Pbs, displaced_sagnac
from esdlab.qmat import SIGMA_X, kron
from esdlab.states import StateParams, bell_state
from esdlab.syserrors import (LEAST_COUNT, ErrorBudget, OperatingPoint, concurrence_vs_alpha, damping_error,
                              damping_error_from_p, delta_c_for_budget, delta_rho, first_order_delta_c,
                              monte_carlo_delta_c, perturb_kraus, spread_over_state_parameter, state_prep_error)

from .utilities import ALPHA, BETA, max_abs_diff, random_hermitian

POINT = OperatingPoint(StateParams(ALPHA))
BELL = OperatingPoint(StateParams(1 / math.sqrt(2)))
MU = math.pi / 180


def reference_shift(delta):
    """Leak and pump-plate shifts at p = P = 0 added in quadrature."""
    c0 = 2 * ALPHA * BETA
    leaks = 10 * delta * c0
    pump = 4 * (BETA**2 - ALPHA**2) * math.pi / 360
    return math.hypot(leaks, pump)


def test_state_prep_error():
    assert state_prep_error(math.pi / 4, 0.01) == pytest.approx(0.0, abs=1e-15)
    assert state_prep_error(0.0, 0.01) == pytest.approx(0.02)
    assert state_prep_error(math.pi / 8, math.pi / 180) == pytest.approx(0.02468, abs=1e-5)


def test_damping_error_forms():
    assert damping_error(0.0, 0.01) == 0
    assert damping_error(math.pi / 8, 0.01) == pytest.approx(0.02)
    assert damping_error_from_p(0.5) == pytest.approx(0.01745, abs=1e-5)
    for theta in np.linspace(0, math.pi / 4, 41):
        p = math.sin(2 * theta) ** 2
        assert damping_error(float(theta), LEAST_COUNT / 4) == pytest.approx(damping_error_from_p(p), abs=1e-15)


def test_budget_validation():
    with pytest.raises(ValidationError):
        ErrorBudget(mu=-1e-3)
    with pytest.raises(ValidationError):
        ErrorBudget(pbs_deltas=0.2)
    with pytest.raises(ValidationError):
        ErrorBudget(pbs_deltas={"delta9": 1e-3})
    budget = ErrorBudget.from_json('{"mu": 0.01, "pbs_deltas": {"delta": 0.001, "delta2": 0.002}}')
    assert [k for _, k, _ in budget.knobs()][:2] == ["delta", "delta2"]
    with pytest.raises(ValidationError):
        ErrorBudget.from_json('{"mu": 0.01, "gamma": 1}')


def test_zero_budget_leaves_operators_unperturbed():
    for op in perturb_kraus(ErrorBudget(), displaced_sagnac(0.3, 0.2)):
        assert np.max(np.abs(op.delta)) == 0


def test_not_plate_error_inserts_sigma_z_terms():
    ops = {op.pair: op for op in perturb_kraus(ErrorBudget(mu=MU), displaced_sagnac(0.0))}
    h = np.diag([1, 0]).astype(complex)
    v = np.diag([0, 1]).astype(complex)
    assert max_abs_diff(ops[("a", "b")].deltas["mu"], MU * kron(h, SIGMA_X)) < 1e-9
    assert max_abs_diff(ops[("b", "a")].deltas["mu"], MU * kron(SIGMA_X, h)) < 1e-9
    assert max_abs_diff(ops[("a'", "b")].deltas["mu"], -MU * kron(v, SIGMA_X)) < 1e-9
    assert np.max(np.abs(ops[("b", "b")].deltas["mu"])) < 1e-9


def test_output_shift_is_linear_in_leaks():
    psi = StateParams(ALPHA).ket()
    rho = np.outer(psi, psi.conj())
    norms = []
    for delta in (1e-4, 1e-3, 1e-2):
        ops = perturb_kraus(ErrorBudget(pbs_deltas=delta), displaced_sagnac(0.2, 0.3))
        norms.append(np.linalg.norm(delta_rho(ops, rho, "pbs")))
    assert norms[1] / norms[0] == pytest.approx(10, rel=1e-6)
    assert norms[2] / norms[1] == pytest.approx(10, rel=1e-6)


def test_budget_needs_matching_components():
    with pytest.raises(ValidationError):
        perturb_kraus(ErrorBudget(mu=MU), displaced_sagnac(0.2, not_plate=False))


def test_first_order_zero_shift():
    result = first_order_delta_c(bell_state().matrix, np.zeros((4, 4)))
    assert result.delta_C == 0
    assert result.method == "first_order"


def bell_diagonal(weights):
    kinds = ("phi+", "phi-", "psi+", "psi-")
    return sum(w * bell_state(k).matrix for w, k in zip(weights, kinds))


def test_biorthogonal_shifts_match_hermitian_formula():
    rho = bell_diagonal([0.7, 0.15, 0.1, 0.05])
    d = random_hermitian(np.random.default_rng(3))
    result = first_order_delta_c(rho, d)
    values, vectors = np.linalg.eigh(rho)
    order = np.argsort(-values)
    dr = d @ spin_flip(rho) + rho @ spin_flip(d)
    for k, i in enumerate(order):
        v = vectors[:, i]
        assert result.delta_lambdas[k] == pytest.approx(float(np.real(v.conj() @ dr @ v)), abs=1e-10)
    lambdas = result.lambdas
    combination = 0.5 * (result.delta_lambdas[0] / math.sqrt(lambdas[0])
                         - sum(dl / math.sqrt(lam) for dl, lam in zip(result.delta_lambdas[1:], lambdas[1:])))
    assert result.delta_C == pytest.approx(combination, abs=1e-12)


def test_first_order_matches_finite_difference():
    rho = bell_diagonal([0.7, 0.15, 0.1, 0.05])
    d = random_hermitian(np.random.default_rng(5))
    t = 1e-6
    numeric = (yield_weighted_concurrence(rho + t * d) - yield_weighted_concurrence(rho - t * d)) / (2 * t)
    assert first_order_delta_c(rho, d).delta_C == pytest.approx(numeric, abs=1e-5)


def test_degenerate_top_eigenvalue_is_refused():
    with pytest.raises(DegeneracyError):
        first_order_delta_c(np.eye(4) / 4, random_hermitian(np.random.default_rng(1)))


def test_reported_shift_for_reference_state():
    low = delta_c_for_budget(ErrorBudget.headline(1e-3), POINT)
    high = delta_c_for_budget(ErrorBudget.headline(1e-2), POINT)
    assert low.delta_C == pytest.approx(0.0157, abs=0.005)
    assert high.delta_C == pytest.approx(0.098, abs=0.03)
    assert low.delta_C == pytest.approx(reference_shift(1e-3), rel=1e-6)
    assert high.delta_C == pytest.approx(reference_shift(1e-2), rel=1e-6)
    assert low.concurrence == pytest.approx(2 * ALPHA * BETA, abs=1e-12)
    assert low.groups["not_plate"] == pytest.approx(0.0, abs=1e-9)


def test_leak_shift_for_maximal_state():
    for delta in (1e-3, 1e-2):
        report = delta_c_for_budget(ErrorBudget(pbs_deltas=delta), BELL)
        assert report.delta_C == pytest.approx(10 * delta, rel=1e-6)
        assert report.contributions["pbs"].delta_C < 0


def test_shift_is_linear_in_budget():
    budget = ErrorBudget.headline(1e-3, p=0.3, P=0.2)
    point = OperatingPoint(StateParams(ALPHA), p=0.3, P=0.2)
    full = delta_c_for_budget(budget, point).delta_C
    half = delta_c_for_budget(budget.scaled(0.5), point).delta_C
    assert half == pytest.approx(full / 2, rel=0.05)


def test_correlated_combination_adds_signed_shifts():
    budget = ErrorBudget.headline(1e-3)
    report = delta_c_for_budget(budget, POINT, correlated=True)
    expected = abs(sum(r.delta_C for r in report.contributions.values()))
    assert report.delta_C == pytest.approx(expected)
    assert report.combination == "linear"


def test_monte_carlo_zero_budget():
    result = monte_carlo_delta_c(POINT, ErrorBudget(), samples=100, seed=1)
    assert result.delta_C == 0
    assert result.std == 0
    assert result.method == "monte_carlo"


def test_monte_carlo_is_deterministic():
    budget = ErrorBudget.headline(1e-3)
    a = monte_carlo_delta_c(POINT, budget, samples=200, seed=42)
    b = monte_carlo_delta_c(POINT, budget, samples=200, seed=42)
    assert a.delta_C == b.delta_C
    assert a.std == b.std
    with pytest.raises(ValidationError):
        monte_carlo_delta_c(POINT, budget, samples=50, seed=42)


def test_monte_carlo_agrees_with_first_order():
    budget = ErrorBudget.headline(1e-3)
    result = monte_carlo_delta_c(POINT, budget, samples=4000, seed=7)
    first_order = delta_c_for_budget(budget, POINT).delta_C
    assert abs(result.spread - first_order) <= 3 * result.standard_error


def test_monte_carlo_leaks_stay_non_negative(monkeypatch):
    shift_train = syserrors._shift_train
    seen = []

    def checked(train, values):
        shifted = shift_train(train, values)
        for c in shifted.components:
            if isinstance(c, Pbs):
                c.check()
                seen.append(c.name)
        return shifted

    monkeypatch.setattr(syserrors, "_shift_train", checked)
    monte_carlo_delta_c(POINT, ErrorBudget.headline(1e-3), samples=200, seed=3)
    assert seen


def test_monte_carlo_leak_shift_is_one_sided():
    budget = ErrorBudget(pbs_deltas=1e-3)
    first = delta_c_for_budget(budget, POINT).contributions["pbs"].delta_C
    result = monte_carlo_delta_c(POINT, budget, samples=2000, seed=5)
    assert first != 0
    assert result.delta_C * first > 0
    assert result.delta_C == pytest.approx(first / 2, rel=0.1)
    assert result.spread == pytest.approx(abs(first), abs=3 * result.standard_error + 0.02 * abs(first))


def test_concurrence_vs_alpha():
    rows = concurrence_vs_alpha([0.0, 0.3, ALPHA, 1 / math.sqrt(2), 1.0], ErrorBudget.headline(1e-2))
    assert rows[0]["imperfect"] == pytest.approx(0.0, abs=1e-9)
    assert rows[-1]["imperfect"] == pytest.approx(0.0, abs=1e-9)
    assert rows[0]["delta_c_first_order"] == 0
    assert rows[-1]["delta_c_first_order"] == 0
    assert rows[2]["ideal"] == pytest.approx(2 * ALPHA * BETA, abs=1e-12)
    for row in rows[1:-1]:
        assert row["imperfect"] < row["ideal"]


def test_spread_over_state_parameter():
    spread = spread_over_state_parameter(ErrorBudget.headline(1e-3), POINT)
    assert spread["alpha_low"] < ALPHA < spread["alpha_high"]
    assert spread["half_width"] > 0
    assert min(spread["delta_c_low"], spread["delta_c_high"]) <= spread["delta_c"]
