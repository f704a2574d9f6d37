import json
import math

import numpy as np
import pytest

from orliczkit import build_young, compare_growth, scaled_power
from orliczkit.targets import (
    EmbeddingContext,
    first_order_target,
    glue_target,
    higher_order_target,
    integrability_gate,
    phi_n,
    proof_scales,
    ratio_decay_check,
)
from orliczkit.young import CurveError


def sobolev_exponent(n, p):
    return n * p / (n - p)


def higher_sobolev_exponent(n, m, p):
    return n * p / (n - m * p)


def make_counter_family(p_tail=5.0):
    """Quadratic near zero, steep power near infinity: passes the gate but
    has upper growth index p_tail."""
    s = np.geomspace(1e-8, 1e8, 700)
    a = np.where(s < 1.0, 2 * s, p_tail * s ** (p_tail - 1))
    return build_young("custom", density=(s, a))


# -- context -----------------------------------------------------------------


def test_context_validation():
    ctx = EmbeddingContext(3, 1)
    assert ctx.nprime == pytest.approx(1.5)
    assert EmbeddingContext(5, 2).dual_exponent == pytest.approx(5.0 / 3.0)
    with pytest.raises(ValueError):
        EmbeddingContext(1, 1)
    with pytest.raises(ValueError):
        EmbeddingContext(3, 3)


# -- integrability gate -------------------------------------------------------


def test_gate_passes_square_n3():
    rep = integrability_gate(build_young("power", 2), EmbeddingContext(3, 1))
    assert rep.passed and rep.agree
    # oracle: integral of s^{-1/2} from 0 to 1 is 2
    assert rep.primal_partials[-1] == pytest.approx(2.0, rel=1e-3)


def test_gate_linear_passes_both_routes():
    rep = integrability_gate(build_young("linear"), EmbeddingContext(2, 1))
    assert rep.passed and rep.agree
    # primal integrand is identically 1 on (0,1]
    assert rep.primal_partials[-1] == pytest.approx(1.0, rel=1e-3)
    # conjugate vanishes near zero so the dual integral is 0
    assert rep.dual_partials[-1] == pytest.approx(0.0, abs=1e-9)


def test_gate_fails_critical_power():
    # p = n is the borderline case: primal integrand ~ 1/s
    rep = integrability_gate(build_young("power", 2), EmbeddingContext(2, 1))
    assert not rep.passed
    assert rep.primal == "diverged"
    assert rep.primal_rate is not None and abs(rep.primal_rate) < 0.05  # log divergence


def test_gate_reports_diagnostics_not_a_guess():
    rep = integrability_gate(build_young("power", 2.05), EmbeddingContext(2, 1))
    # barely convergent: whatever the verdict, the partials are there to inspect
    assert len(rep.primal_partials) == 8
    assert len(rep.dual_partials) == 8


# -- growth integral -----------------------------------------------------------


def test_phi_closed_form_power():
    # A = s^p: phi(s) = K s^{p'-n'}, K = (p-1) p^{-p'} / (p'-n')
    n, p = 3, 2
    pp = p / (p - 1)
    npr = n / (n - 1)
    K = (p - 1) * p**-pp / (pp - npr)
    phi = phi_n(build_young("power", p), EmbeddingContext(n, 1))
    for s in (1e-3, 1.0, 50.0, 1e5):
        assert phi(s) == pytest.approx(K * s ** (pp - npr), rel=1e-3)


def test_phi_monotone_and_zero_at_origin():
    phi = phi_n(build_young("power-log", 2, 1), EmbeddingContext(3, 1))
    s = np.geomspace(1e-6, 1e6, 80)
    assert np.all(phi(2 * s) >= phi(s))
    assert phi(0.0) == 0.0


def test_phi_requires_gate():
    with pytest.raises(CurveError):
        phi_n(build_young("power", 2), EmbeddingContext(2, 1))


# -- first order target -----------------------------------------------------------


@pytest.mark.parametrize("n,p", [(2, 1.5), (3, 2.0), (3, 2.5), (2, 1.2), (3, 1.2)])
def test_first_order_exponent_recovery(n, p):
    tgt = first_order_target(build_young("power", p), EmbeddingContext(n, 1))
    assert tgt.tail_exponent == pytest.approx(sobolev_exponent(n, p), rel=1e-2)


def test_first_order_square_n3_value():
    # full closed-form chase gives A_n(s) = (4/3) s^6
    tgt = first_order_target(build_young("power", 2), EmbeddingContext(3, 1))
    for s in (0.1, 1.0, 10.0):
        assert tgt(s) == pytest.approx((4.0 / 3.0) * s**6, rel=1e-2)
    assert tgt(0.0) == 0.0


def test_first_order_from_linear_growth():
    # borderline W^{1,1}: target is s^{n'}/n'
    tgt = first_order_target(build_young("linear"), EmbeddingContext(2, 1))
    assert tgt.tail_exponent == pytest.approx(2.0, rel=1e-3)
    assert tgt(2.0) == pytest.approx(2.0, rel=1e-3)


# -- glue ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def square_n3():
    A = build_young("power", 2)
    tgt = first_order_target(A, EmbeddingContext(3, 1))
    return A, tgt, glue_target(A, tgt)


def test_glue_equals_source_below_seam(square_n3):
    A, _, glued = square_n3
    s1 = glued.meta["s1"]
    s = np.geomspace(1e-8, s1, 12)
    np.testing.assert_allclose(glued(s), A(s), rtol=1e-9)
    assert glued(s1) == pytest.approx(A(s1), rel=1e-9)


def test_glue_equivalent_to_target_near_infinity(square_n3):
    _, tgt, glued = square_n3
    cmp = compare_growth(glued, tgt, "near-infinity", threshold=glued.meta["s2"])
    assert cmp.equivalent


def test_glue_convex_across_seams(square_n3):
    _, _, glued = square_n3
    s, v = glued.samples_s, glued.samples_v
    slopes = np.diff(v) / np.diff(s)
    assert np.all(np.diff(slopes) >= -1e-9 * np.maximum(slopes[1:], slopes[:-1]))


# -- proof scales ------------------------------------------------------------------


def test_scale_sandwich_and_inverse_identity():
    ps = proof_scales(build_young("power", 2), EmbeddingContext(3, 1))
    assert ps.sandwich_ok
    assert ps.cinverse_max_rel_err < 1e-2
    # product scale for s^p decays like s^{p'}
    assert ps.D.tail_exponent == pytest.approx(2.0, rel=1e-3)


def test_scale_sandwich_power_log():
    ps = proof_scales(build_young("power-log", 2, 1), EmbeddingContext(3, 1))
    assert ps.sandwich_ok
    assert ps.cinverse_max_rel_err < 1e-2


def test_higher_scales_sandwich():
    ps = proof_scales(build_young("power", 2), EmbeddingContext(5, 2))
    assert ps.sandwich_ok
    c1, c2 = ps.sandwich_constants
    assert c1 is not None and c2 is not None and c1 <= c2


# -- higher order target --------------------------------------------------------------


@pytest.mark.parametrize("n,m,p", [(5, 2, 2.0), (4, 3, 1.2), (3, 2, 1.2)])
def test_higher_order_exponent_recovery(n, m, p):
    tgt = higher_order_target(build_young("power", p), EmbeddingContext(n, m))
    assert tgt.tail_exponent == pytest.approx(higher_sobolev_exponent(n, m, p), rel=1e-2)


def test_higher_order_closed_form_5_2_2():
    tgt = higher_order_target(build_young("power", 2), EmbeddingContext(5, 2))
    for s in (0.5, 1.0, 3.0):
        assert tgt(s) == pytest.approx(s**10 / 729.0, rel=1e-2)
    assert tgt(0.0) == 0.0


def test_higher_order_matches_first_order_at_m1():
    A = build_young("power", 2)
    t1 = first_order_target(A, EmbeddingContext(3, 1))
    t2 = higher_order_target(A, EmbeddingContext(3, 1))
    assert t2.tail_exponent == pytest.approx(t1.tail_exponent, rel=1e-2)
    cmp = compare_growth(t1, t2, "near-infinity")
    assert cmp.equivalent


def test_higher_order_bounded_regime_flagged():
    # quadratic head (gate ok), steep tail: the scale integral converges at
    # infinity and the target jumps to +inf at a finite point
    A = make_counter_family(5.0)
    tgt = first_order_target(A, EmbeddingContext(3, 1))
    assert tgt.finite_domain_bound is not None


def test_higher_order_rejects_gate_failure():
    with pytest.raises(CurveError):
        higher_order_target(build_young("power", 3), EmbeddingContext(5, 2))


# -- ratio decay ------------------------------------------------------------------


def test_ratio_decay_square_n3(square_n3):
    A, _, glued = square_n3
    rep = ratio_decay_check(A, glued, EmbeddingContext(3, 1))
    assert rep.passed
    assert abs(rep.slope) < 0.01
    # rho is asymptotically the constant 1.5**(1/6)
    assert rep.c0 == pytest.approx(1.5 ** (1.0 / 6.0), rel=0.05)
    rho = rep.table[:, 1]
    assert rho.max() / rho.min() < 2.0


def test_ratio_decay_higher_order_constant():
    A = build_young("power", 2)
    ctx = EmbeddingContext(5, 2)
    tgt = higher_order_target(A, ctx)
    rep = ratio_decay_check(A, tgt, ctx)
    assert rep.passed and abs(rep.slope) < 0.02


def test_ratio_decay_counter_family_fails():
    A = make_counter_family(5.0)
    ctx = EmbeddingContext(3, 1)
    tgt = glue_target(A, first_order_target(A, ctx))
    rep = ratio_decay_check(A, tgt, ctx)
    assert not rep.passed
    assert rep.slope == pytest.approx(2.0 / 15.0, abs=0.02)


def test_ratio_decay_json_round_trip(square_n3):
    A, _, glued = square_n3
    rep = ratio_decay_check(A, glued, EmbeddingContext(3, 1))
    payload = json.loads(rep.to_json())
    assert set(payload) == {"r0", "c0", "slope", "pass", "table"}
    assert payload["pass"] is True
    assert len(payload["table"]) == len(rep.table)
