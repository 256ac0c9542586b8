import math

import numpy as np
import pytest

from bosonsim.errors import ConditionViolation, DomainError, ParameterError
from bosonsim.trunc_bounds import (
    TruncationInput,
    hamiltonian_cutoff,
    lambert_w_threshold,
    leakage_oracle,
    short_time_leakage_bound,
    state_truncation_schedule,
    time_dependent_cutoff,
    truncation_defect,
    verify_conditions,
)


def single_mode(omega, g, dim):
    n = np.diag(np.arange(dim, dtype=float))
    b = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    return omega * n + g * omega * (b + b.T), np.arange(dim)


def test_per_step_bound_values():
    b = short_time_leakage_bound(60)
    assert b.log_value == pytest.approx(60 * math.log(math.sqrt(2) * math.e
                                                      / math.sqrt(60)))
    assert b.value == pytest.approx(5.5466565e-19, rel=1e-6)
    # far below double-precision range the linear value underflows to zero
    tiny = short_time_leakage_bound(2000)
    assert tiny.value == 0.0
    assert tiny.log_value < -4000


def test_minimum_increment_enforced():
    with pytest.raises(ParameterError):
        short_time_leakage_bound(59)


def test_state_schedule_accounts_time_exactly():
    inp = TruncationInput(lambda0=1, chi=2.0, t=1.0, eps=1e-2)
    plan = state_truncation_schedule(inp)
    assert sum(plan.durations) == 1.0
    assert plan.cutoffs[-1] == plan.final_cutoff
    assert plan.delta_lambda >= 60
    assert plan.budget["state"]["total_bound"] <= 1e-2
    # steps satisfy the closed-form count
    s = plan.steps
    d = plan.delta_lambda
    assert s == max(1, math.ceil(((math.sqrt(1) + 2.0 * 1.0 * d / 2) ** 2 - 1) / d))


def test_hamiltonian_cutoff_reference_point():
    inp = TruncationInput(lambda0=1, chi=2.0, t=1.0, eps=1e-2)
    lam, plan = hamiltonian_cutoff(inp)
    assert plan.delta_lambda == 60
    assert plan.steps == 62
    assert lam == 3721
    assert set(plan.budget) == {"state", "hamiltonian", "reverse"}
    assert plan.budget["hamiltonian"]["factor"] == 2.0
    for slot in plan.budget.values():
        assert slot["total_bound"] <= slot["eps"]


def test_budget_recomputation_is_self_consistent():
    inp = TruncationInput(lambda0=1, chi=2.0, t=1.0, eps=1e-2)
    _, plan = hamiltonian_cutoff(inp)
    recheck = plan.recompute_total_bound_log()
    for name, slot in plan.budget.items():
        assert recheck[name] == pytest.approx(slot["total_log_bound"],
                                              rel=1e-12)


def test_multi_mode_budget_split():
    one = hamiltonian_cutoff(TruncationInput(1, 2.0, 1.0, 1e-2, n_modes=1))[0]
    many = hamiltonian_cutoff(TruncationInput(1, 2.0, 1.0, 1e-2, n_modes=100))[0]
    assert many >= one  # each mode gets eps/N, never cheaper


def test_constant_profile_reduces_to_constant_chi():
    inp_c = TruncationInput(lambda0=1, chi=2.0, t=1.0, eps=1e-2)
    inp_p = TruncationInput(lambda0=1, chi=0.0, t=1.0, eps=1e-2,
                            profile=((1.0, 2.0),))
    lam_c, plan_c = hamiltonian_cutoff(inp_c)
    lam_p, plan_p = time_dependent_cutoff(inp_p)
    assert lam_p == lam_c
    assert plan_p.steps == plan_c.steps
    assert plan_p.durations == plan_c.durations


def test_profile_cutoff_depends_on_coupling_integral_only():
    # zero coupling for half the time, doubled for the rest: same integral
    base = hamiltonian_cutoff(TruncationInput(1, 2.0, 1.0, 1e-2))[0]
    split = time_dependent_cutoff(TruncationInput(
        1, 0.0, 1.0, 1e-2, profile=((0.5, 0.0), (0.5, 4.0))))[0]
    assert split == base


def test_profile_durations_must_sum_to_t():
    with pytest.raises(ParameterError):
        time_dependent_cutoff(TruncationInput(
            1, 0.0, 1.0, 1e-2, profile=((0.3, 1.0),)))


def test_lambert_threshold_root():
    y = lambert_w_threshold(1.0, 1.0, 0.25)
    # (1/sqrt(y))^y = 1/4 has its root above b^2 = 1 near 2.745
    assert (1.0 / math.sqrt(y)) ** y == pytest.approx(0.25, rel=1e-8)
    assert y == pytest.approx(2.7453680, rel=1e-6)
    with pytest.raises(DomainError):
        lambert_w_threshold(1.0, 1.0, 2.0)  # eps >= f(b^2) = a


def test_leakage_oracle_within_lemma_bound():
    # one step of the lemma: Lambda=1, Lambda'=61, dt = 1/(chi sqrt(Lambda))
    H, occ = single_mode(1.0, 1.0, 61 + 40 + 1)
    chi = 2.0  # |g omega (b+b†) P_L| <= 2 g omega sqrt(L+1)
    rep = leakage_oracle(H, occ, 1, 61, 1.0 / chi)
    bound = short_time_leakage_bound(60).value
    assert rep["value"] <= bound
    assert rep["sensitivity"] < 0.1 * bound


def test_verify_conditions_fit_and_violations():
    dim = 30
    n = np.diag(np.arange(dim, dtype=float))
    b = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    Hw = 0.7 * (b + b.T)
    Hr = 1.0 * n
    occ = np.arange(dim)
    out = verify_conditions(Hw, Hr, occ, 20)
    assert out["ok"]
    assert out["r"] == 0.5
    # chi fit: ||(b+b†) P_L|| grows like 2 sqrt(L+1) up to edge effects
    assert 0.7 <= out["fitted_chi"] <= 2 * 0.7 + 1e-9
    with pytest.raises(ConditionViolation):
        verify_conditions(Hw + np.diag([1e-3] * dim), Hr, occ, 20)
    with pytest.raises(ConditionViolation):
        verify_conditions(Hw, Hr + Hw, occ, 20)


def test_truncation_defect_small_case():
    # tiny end-to-end check: truncating far above the support is harmless
    H, occ = single_mode(1.0, 0.5, 40)
    d = truncation_defect(H, occ, lambda0=1, lambda_tilde=35, t=1.0)
    assert d < 1e-6
    # truncating aggressively is visible
    d_bad = truncation_defect(H, occ, lambda0=1, lambda_tilde=3, t=1.0)
    assert d_bad > d
