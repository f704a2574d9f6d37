import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orliczkit import (
    CurveError,
    build_young,
    compare_growth,
    conjugate,
    generalized_inverse,
    generalized_inverse_ex,
    integral_mean,
    load_yf1,
    save_yf1,
    scaled_power,
)
from orliczkit.young import make_table, standard_grid

FAMILIES = {
    "p1.5": lambda: build_young("power", 1.5),
    "p2": lambda: build_young("power", 2),
    "p3": lambda: build_young("power", 3),
    "p2log": lambda: build_young("power-log", 2, 1),
    "linear": lambda: build_young("linear"),
}


def brute_conjugate(A, s, r_lo=1e-9, r_hi=1e9, n=200_001):
    """Independent oracle: direct sup of s*r - A(r) over a dense log grid."""
    r = np.geomspace(r_lo, r_hi, n)
    vals = A(r)
    return float(np.max(s * r - vals))


# -- construction -----------------------------------------------------------


def test_power_direct_evaluation():
    A = build_young("power", 2)
    assert A(3.0) == 9.0
    assert A(0.0) == 0.0


def test_linear_shape():
    L = build_young("linear")
    assert L.zero_plateau_bound == 0.0
    assert L.tail_exponent == 1.0
    assert L(5.0) == 5.0


def test_power_log_value():
    A = build_young("power-log", 2, 1)
    assert A(1.0) == pytest.approx(math.log(math.e + 1.0), rel=1e-12)


def test_rejects_p_below_one():
    with pytest.raises(CurveError):
        build_young("power", 0.8)


def test_rejects_non_monotone_density():
    s = np.geomspace(1e-3, 1e3, 64)
    a = np.where(s < 1.0, s, 0.5 * s)  # drops at s=1
    with pytest.raises(CurveError):
        build_young("custom", density=(s, a))


def test_custom_density_bracket():
    # A(s)/s <= a(s) <= A(2s)/s at the density samples
    s = np.geomspace(1e-4, 1e4, 256)
    a = 3 * s**2
    A = build_young("custom", density=(s, a))
    mid = s[(s > s[0] * 4) & (s < s[-1] / 4)]
    lhs = A(mid) / mid
    rhs = A(2 * mid) / mid
    aval = 3 * mid**2
    assert np.all(lhs <= aval * (1 + 1e-6))
    assert np.all(aval <= rhs * (1 + 1e-6))


# -- evaluation --------------------------------------------------------------


def test_eval_examples():
    assert build_young("power", 3)(2.0) == 8.0
    Lt = conjugate(build_young("linear"))
    assert Lt(2.0) == math.inf
    assert Lt(0.5) == 0.0


def test_eval_rejects_negative():
    with pytest.raises(ValueError):
        build_young("power", 2)(-1.0)


# -- conjugation --------------------------------------------------------------


def test_self_conjugate_fixed_point():
    A = scaled_power(0.5, 2)
    At = conjugate(A)
    s = np.geomspace(1e-4, 1e4, 64)
    np.testing.assert_allclose(At(s), A(s), rtol=1e-9)


def test_conjugate_of_linear_is_step():
    Lt = conjugate(build_young("linear"))
    assert Lt(0.999) == 0.0
    assert Lt(1.001) == math.inf


def test_cubic_conjugate_against_brute_force():
    A = scaled_power(1.0 / 3.0, 3)
    At = conjugate(A)
    expected = brute_conjugate(A, 4.0)
    assert expected == pytest.approx(16.0 / 3.0, rel=1e-6)
    assert At(4.0) == pytest.approx(expected, rel=1e-6)


def test_table_conjugate_against_brute_force():
    A = build_young("power-log", 2, 1)
    At = conjugate(A)
    for s in (0.3, 4.0, 170.0):
        assert At(s) == pytest.approx(brute_conjugate(A, s), rel=1e-4)


@pytest.mark.parametrize("name", list(FAMILIES))
def test_involution(name):
    A = FAMILIES[name]()
    Att = conjugate(conjugate(A))
    s = np.geomspace(1e-4, 1e4, 200)
    if A.finite_domain_bound is not None:
        s = s[s < A.finite_domain_bound]
    va, vb = A(s), Att(s)
    mask = va > 0
    assert np.max(np.abs(vb[mask] - va[mask]) / va[mask]) < 1e-3


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(sorted(FAMILIES)),
    st.floats(min_value=-5, max_value=5),
    st.floats(min_value=-5, max_value=5),
)
def test_fenchel_young_inequality(name, ls, lr):
    A = FAMILIES[name]()
    At = conjugate(A)
    s, r = 10.0**ls, 10.0**lr
    assert s * r <= (A(s) + At(r)) * (1 + 1e-6) + 1e-12


# -- generalized inverse -------------------------------------------------------


def test_inverse_examples():
    A = build_young("power", 2)
    assert generalized_inverse(A, 4.0, "right") == pytest.approx(2.0)
    L = build_young("linear")
    assert generalized_inverse(L, 0.0, "right") == 0.0
    Lt = conjugate(L)
    assert generalized_inverse(Lt, 0.5, "right") == pytest.approx(1.0)


def test_inverse_round_trip_one_cell():
    A = build_young("power-log", 2, 1)
    grid = A.samples_s
    for s in (1e-3, 0.7, 42.0, 1e5):
        v = A(s)
        right = generalized_inverse(A, v, "right")
        left = generalized_inverse(A, v, "left")
        cell = np.diff(np.log(grid))[0]
        assert math.log(right) >= math.log(s) - cell
        assert math.log(left) <= math.log(s) + cell


def test_saturation_flag():
    # bounded monotone table: values approach 1 and stay there
    s = np.geomspace(1e-4, 1e4, 128)
    v = s / (1.0 + s)
    F = make_table(s, v, young=False)
    res = generalized_inverse_ex(F, 2.0, "right")
    assert res.saturated
    res2 = generalized_inverse_ex(F, 0.5, "right")
    assert not res2.saturated
    assert res2.value == pytest.approx(1.0, rel=1e-2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(FAMILIES)), st.floats(min_value=-6, max_value=7))
def test_inverse_product_relation(name, lr):
    # r <= A^{-1}(r) * conj(A)^{-1}(r) <= 2r with 1% slack
    A = FAMILIES[name]()
    At = conjugate(A)
    r = 10.0**lr
    prod = generalized_inverse(A, r, "right") * generalized_inverse(At, r, "right")
    assert r * 0.99 <= prod <= 2.0 * r * 1.01


# -- averaged function ---------------------------------------------------------


def test_integral_mean_power():
    Ab = integral_mean(build_young("power", 2))
    assert Ab(2.0) == pytest.approx(2.0, rel=1e-12)


def test_integral_mean_quadrature_vs_closed_form():
    # power-log with lam=0 equals s^3 but exercises the table quadrature
    Ab = integral_mean(build_young("power-log", 3, 0))
    assert Ab(2.0) == pytest.approx(8.0 / 3.0, rel=1e-4)


@pytest.mark.parametrize("name", list(FAMILIES))
def test_averaged_comparison(name):
    A = FAMILIES[name]()
    Ab = integral_mean(A)
    s = A.samples_s if len(A.samples_s) else standard_grid()
    s = s[s <= s[-1] / 2]
    assert np.all(Ab(s) <= A(s) * (1 + 1e-9) + 1e-300)
    assert np.all(A(s) <= Ab(2 * s) * (1 + 1e-9) + 1e-300)


def test_averaged_instance():
    A = build_young("power", 2)
    Ab = integral_mean(A)
    assert Ab(1.0) == pytest.approx(0.5)
    assert A(1.0) == 1.0
    assert Ab(2.0) == pytest.approx(2.0)


# -- growth comparison ----------------------------------------------------------


def test_dominates_near_infinity():
    cmp = compare_growth(build_young("power", 2), build_young("power", 3), "near-infinity")
    assert cmp.dominates and cmp.constant == 1.0


def test_equivalent_reflexive():
    cmp = compare_growth(build_young("power", 2), build_young("power", 2), "global")
    assert cmp.equivalent and cmp.constant == 1.0


def test_log_factor_not_dominated():
    A = build_young("power-log", 2, 1)
    B = build_young("power", 2)
    cmp = compare_growth(A, B, "near-infinity")
    assert not cmp.dominates
    assert cmp.witness is not None


# -- YF1 exchange format ----------------------------------------------------------


@pytest.mark.parametrize("name", ["p2", "p2log", "linear"])
def test_yf1_round_trip(name, tmp_path):
    A = FAMILIES[name]()
    path = tmp_path / "fn.yf1"
    save_yf1(A, path)
    B = load_yf1(path)
    s = np.geomspace(1e-4, 1e4, 50)
    va, vb = A(s), B(s)
    np.testing.assert_allclose(vb, va, rtol=1e-9)


def test_yf1_table_round_trip():
    A = conjugate(build_young("power-log", 2, 1))
    buf = io.StringIO()
    save_yf1(A, buf)
    buf.seek(0)
    B = load_yf1(buf)
    s = np.geomspace(1e-3, 1e3, 40)
    np.testing.assert_allclose(B(s), A(s), rtol=1e-6)
    assert B.tail_exponent == pytest.approx(A.tail_exponent)


def test_yf1_rejects_garbage():
    with pytest.raises(CurveError):
        load_yf1(io.StringIO("not a yf1 file\n"))
