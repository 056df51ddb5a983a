import math

import pytest
from hypothesis import given, strategies as st

from dplab.params import (
    AdmissibilityError,
    ExponentParams,
    MultiPhaseParams,
    gamma_exponent,
    gamma_multiphase,
    lipschitz_profile_beta,
    time_exponent_target,
)


def test_gamma_examples():
    assert gamma_exponent(ExponentParams(2, 3, 1, 1, borderline_ok=True)) == 2.0
    assert gamma_exponent(ExponentParams(2, 2, 1, 1)) == 1.0
    assert gamma_exponent(ExponentParams(1.5, 2.5, 1, 2, borderline_ok=True)) == 2.0


def test_gamma_multiphase_examples():
    assert gamma_multiphase(MultiPhaseParams(2, 2.5, 3, borderline_ok=True)) == 2.0
    assert gamma_multiphase(MultiPhaseParams(2, 2, 2)) == 1.0
    # four-way max: the s - p arm dominates here (value 1), so gamma = 2
    assert gamma_multiphase(MultiPhaseParams(1.5, 2, 2.5, 1.2, 1.5, 2, borderline_ok=True)) == 2.0


def test_time_exponent_examples():
    assert time_exponent_target(1.5, 2) == pytest.approx(3 / 7)
    assert time_exponent_target(3, 3.5) == 0.5
    assert time_exponent_target(2, 2) == 0.5
    with pytest.raises(AdmissibilityError):
        time_exponent_target(1.0, 2.0)


def test_lipschitz_profile_beta_examples():
    assert lipschitz_profile_beta(0.5, 1.0) == pytest.approx(1.25)
    # second arm = (1 + (2 - (0.45 + 0.05*0.1)))/2 = 1.2725 < alpha/2 + 1 = 1.45
    assert lipschitz_profile_beta(0.9, 1.05) == pytest.approx(1.2725)
    with pytest.raises(AdmissibilityError):
        lipschitz_profile_beta(0.2, 2.3)  # 0.1 + 1.3*0.8 = 1.14 >= 1


@given(
    st.floats(0.05, 0.95),
    st.floats(1.0, 3.0),
)
def test_lipschitz_profile_beta_invariants(alpha, gamma):
    crit = alpha / 2 + (gamma - 1) * (1 - alpha)
    if crit >= 1.0:
        with pytest.raises(AdmissibilityError):
            lipschitz_profile_beta(alpha, gamma)
        return
    beta = lipschitz_profile_beta(alpha, gamma)
    assert 1.0 < beta < 2.0
    assert beta <= alpha / 2 + 1 + 1e-12
    assert beta + crit < 2.0


@given(
    st.floats(1.05, 3.0),
    st.floats(0.0, 1.0),
    st.floats(0.0, 0.5),
    st.floats(0.0, 0.5),
    st.floats(0.01, 0.5),
)
def test_gamma_monotonicity(p, gap, db1, db2, dp):
    q = p + gap
    base = ExponentParams(p, q, 1.0, 1.0, borderline_ok=True)
    g0 = gamma_exponent(base)
    # nondecreasing in q, beta1, beta2
    assert gamma_exponent(ExponentParams(p, q + 0.3, 1.0, 1.0, borderline_ok=True)) >= g0
    b1 = min(1.0 + db1, p - 1e-6) if p > 1 + 1e-6 else 1.0
    b2 = min(1.0 + db2, q - 1e-6)
    assert gamma_exponent(ExponentParams(p, q, b1, b2, borderline_ok=True)) >= g0 - 1e-12
    # nonincreasing in p (holding q fixed, staying admissible)
    p2 = p + min(dp, gap) if gap > 0 else p
    if p2 > p:
        assert gamma_exponent(ExponentParams(p2, q, 1.0, 1.0, borderline_ok=True)) <= g0 + 1e-12


def test_admissibility_rejections():
    with pytest.raises(AdmissibilityError):
        ExponentParams(1.0, 2.0)
    with pytest.raises(AdmissibilityError):
        ExponentParams(2.0, 1.5)
    with pytest.raises(AdmissibilityError):
        ExponentParams(2.0, 2.5, beta1=2.0)  # beta1 must stay below p
    with pytest.raises(AdmissibilityError):
        ExponentParams(2.0, 2.5, beta2=2.5)
    with pytest.raises(AdmissibilityError):
        ExponentParams(2.0, 3.0)  # borderline q = p + 1 needs the flag
    ExponentParams(2.0, 3.0, borderline_ok=True)
    with pytest.raises(AdmissibilityError):
        ExponentParams(2.0, 2.5, C_f=-1.0)
    with pytest.raises(AdmissibilityError):
        MultiPhaseParams(2.0, 3.0, 2.5)


def test_gap_flags():
    assert ExponentParams(2.0, 2.9).in_gap_range
    assert not ExponentParams(2.0, 3.5).in_gap_range
    assert ExponentParams(1.5, 1.8).singular
    assert not ExponentParams(2.0, 2.0).singular
    assert MultiPhaseParams(2.0, 2.5, 2.9).in_gap_range
    assert not MultiPhaseParams(2.0, 3.5, 4.0).in_gap_range
    assert gamma_exponent(ExponentParams(1.5, 2.5, 1, 2, borderline_ok=True)) == ExponentParams(
        1.5, 2.5, 1, 2, borderline_ok=True
    ).gamma


def test_multiphase_beta_ranges():
    with pytest.raises(AdmissibilityError):
        MultiPhaseParams(2, 2.5, 2.8, beta3=2.8)
    MultiPhaseParams(2, 2.5, 2.8, beta3=2.7)
    assert math.isclose(gamma_multiphase(MultiPhaseParams(2, 2.5, 2.8)), 1.8)
