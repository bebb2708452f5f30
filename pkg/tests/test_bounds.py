from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oretile import PreconditionError
from oretile.bounds import (
    ParamSet, PhiVector, alpha_prime, chain_violations, correction_term, element_leftover_bound,
    extremal_cascade, feasibility_Ii, lambda_lower, leftover_constant, parameter_table,
    phi_k_lower_check, power_ge, power_le, round_weight, s_param, sigma_partials, typicality_threshold,
)
from oretile.chromatic import BottleSpec, gamma_param

PHI3 = {2: F(1, 10), 3: F(4, 15)}


def test_s_param_example():
    assert PhiVector(3, PHI3).is_normalised()
    assert s_param(PHI3, 3, F(1, 10)) == F(1, 15)


def test_s_zero_when_phi_k_is_forced():
    # phi_1 = 0, phi_k = (k-1) gamma, phi_{k-1} takes the rest
    k, g = 4, gamma_param(4, F(1, 2))
    phi = {k: (k - 1) * g, k - 1: (1 - k * (k - 1) * g) / (k - 1)}
    # phi_{k-1} has i = 1 and does not enter the sum
    assert s_param(phi, k, g) == 0


def test_phi_k_lower_examples():
    c = phi_k_lower_check(PHI3, 3, F(1, 10), 0, 0)
    assert c.passed and c.slack == F(1, 15)
    c = phi_k_lower_check({1: 1}, 3, F(1, 10), 0, 0)
    assert not c.passed and c.slack < 0


def test_lambda_lower_example():
    # term by term: 2*(1/10) + (1/2)(1/15) + phi_1 + 0 - 0
    assert lambda_lower(2, PHI3, 3, F(1, 10), F(1, 15), 0, 0) == F(7, 30)


def test_lambda_lower_i1_and_range():
    g, d, eps = F(1, 10), F(1, 1000), F(1, 10000)
    assert lambda_lower(1, PHI3, 3, g, 0, d, eps) == 2 * g - 2 * (d + 2 * eps)
    for bad in (0, 3):
        with pytest.raises(PreconditionError):
            lambda_lower(bad, PHI3, 3, g, 0, 0, 0)


def test_alpha_prime_examples():
    ap = alpha_prime(F(1, 2), 3, F(1, 10))
    assert (ap.value, ap.p, ap.q) == (F(181, 360), 181, 360)
    assert alpha_prime(F(1, 2), 3, 1).value == F(19, 36)
    with pytest.raises(PreconditionError):
        alpha_prime(F(1, 2), 3, F(3, 10))


def test_typicality_examples():
    assert typicality_threshold(F(1, 2), 3) == 5
    assert typicality_threshold(F(19, 36), 3) == 6
    with pytest.raises(PreconditionError):
        typicality_threshold(1, 3)


def test_leftover_constants():
    assert leftover_constant(BottleSpec(3, 2, 2), "balanced") == 60
    assert leftover_constant(BottleSpec(2, 1, 1), "padding", s=0) == 1
    assert leftover_constant(BottleSpec(3, 1, 2)) == 230
    assert leftover_constant(BottleSpec(2, 1, 1)) == 14
    assert leftover_constant(BottleSpec(2, 1, 2)) == 123
    assert leftover_constant(BottleSpec(3, 1, 1)) == 30
    with pytest.raises(PreconditionError):
        leftover_constant(BottleSpec(2, 1, 1), "mixed")


def test_element_leftover_bound():
    assert element_leftover_bound(BottleSpec(3, 1, 2)) == 8
    assert element_leftover_bound(BottleSpec(3, 2, 2)) == 3


def test_cascade_example():
    phi = {2: F(1, 5), 3: F(1, 5)}
    assert s_param(phi, 3, F(1, 10)) == 0
    c = extremal_cascade(phi, 3, F(1, 2), F(1, 100), F(1, 10**6))
    assert c.alpha0 == F(37, 200)
    # phi_1 = 0 forces t = k - 1
    assert (c.t, c.j0) == (2, 3)
    c = extremal_cascade({1: F(1, 20), 2: F(1, 10), 3: F(1, 4)}, 3, F(1, 2), F(1, 100), F(1, 10**6))
    assert (c.t, c.j0) == (1, 2)


def test_cascade_preconditions():
    with pytest.raises(PreconditionError):
        extremal_cascade(PHI3, 3, F(1, 2), F(1, 100), F(1, 10**6))      # s = 1/15 >= mu
    with pytest.raises(PreconditionError):
        extremal_cascade({1: F(1, 2)}, 2, F(1, 2), F(1, 100), F(1, 10**6))


def test_cascade_sandwich_holds():
    phi = {1: F(1, 20), 2: F(1, 10), 3: F(1, 4)}
    c = extremal_cascade(phi, 3, F(1, 2), F(1, 100), F(1, 10**6))
    sig = c.sigma_partials
    assert power_ge(sig[c.t], c.j0, c.alpha0, c.eps, 3)
    assert power_le(sig[c.t - 1], c.j0 - 1, c.alpha0, c.eps, 3)
    lo, hi = c.mu_prime.bracket()
    assert lo <= hi and lo ** 3 <= c.alpha0 ** 2 * c.eps <= hi ** 3


def test_chain_and_paramset():
    assert chain_violations(F(1, 2), F(1, 2000), F(1, 20000), F(1, 20)) == []
    assert chain_violations(F(1, 2), F(1, 10), F(1, 10000), F(1, 20))
    p = ParamSet.build(3, F(1, 2), F(1, 2000), F(1, 20000), F(1, 20), PHI3)
    assert p.gamma == F(1, 10) and p.s == F(1, 15)
    p.validate()
    with pytest.raises(PreconditionError):
        ParamSet.build(3, F(1, 2), F(1, 2000), F(1, 20000), F(1, 20), {3: F(1, 2)}).validate()


def test_parameter_table_is_exact_strings():
    row = parameter_table(3, 1, 2, F(1, 10), F(1, 1000), F(1, 10000))
    assert row["alpha_prime"] == {"value": "181/360", "p": 181, "q": 360}
    assert row["leftover_constant"] == 230 and row["typicality_threshold"] == 6  # ceil(901/179)
    assert row["alpha0"] == str(F(1, 5) - F(3, 20))


def test_feasibility_trivial_case():
    f = feasibility_Ii(1, F(1, 5), {3: F(1, 3)}, F(1, 2), F(181, 360), 3, F(1, 10), mu=F(1, 10))
    assert f.passed and f.availability_slack == F(1, 5)
    assert f.correction == 0


# ---------------------------------------------------------------- properties

fracs = st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=60)


@st.composite
def normalised_phi(draw):
    k = draw(st.integers(3, 6))
    lower = [draw(st.fractions(0, F(1, 20), max_denominator=100)) for _ in range(k - 1)]
    rest = 1 - sum((i + 1) * x for i, x in enumerate(lower))
    return k, lower + [rest / k]


@given(normalised_phi(), fracs)
def test_phi_sum_identities(kp, alpha):
    k, phi = kp
    g = gamma_param(k, alpha)
    s = s_param(phi, k, g)
    assert sum(phi) == F(1, k - 1) - g - s / (k - 1)
    assert sigma_partials(phi, k)[-1] == F(1, k - 1) - k * g - k * s / (k - 1)


@given(normalised_phi(), fracs, st.fractions(0, F(1, 100)), st.fractions(0, F(1, 100)))
def test_lower_check_matches_s(kp, alpha, d, eps):
    k, phi = kp
    g = gamma_param(k, alpha)
    c = phi_k_lower_check(phi, k, g, d, eps)
    assert c.passed == (s_param(phi, k, g) >= -(k - 1) * (d + 2 * eps))


@given(st.integers(1, 6), fracs, fracs)
def test_correction_identity(l, a, b):
    a, ap = min(a, b), max(a, b)
    assert round_weight(l, ap) - round_weight(l, a) == correction_term(l, a, ap)


@given(fracs, st.integers(2, 6), st.integers(1, 30))
def test_alpha_prime_range_and_threshold_monotone(alpha, k, N):
    try:
        ap = alpha_prime(alpha, k, F(1, N))
    except PreconditionError:
        return
    assert alpha < ap.value < 1
    assert typicality_threshold(ap, k) >= typicality_threshold(alpha, k)


@given(st.integers(2, 6), st.integers(1, 5), st.integers(0, 5))
def test_ore_factor_identity(k, sigma, extra):
    spec = BottleSpec(k, sigma, sigma + extra)
    assert 2 * (1 - 1 / spec.chi_cr) == 2 * (1 - F(1, k - 1) + spec.gamma)
