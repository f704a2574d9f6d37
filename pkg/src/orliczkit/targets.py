"""Optimal Orlicz-Sobolev embedding targets and the ratio-decay lemma check.

The first-order target is built by conjugating the source function, forming
the growth integral of the conjugate against t**(1+n'), inverting it
left-continuously, and integrating the resulting kernel.  The higher-order
target composes the source with the inverse of a fractional-integral scale.
Both constructions recover the classical Sobolev exponents for pure powers,
which is what the tests pin them against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .young import (
    CurveError,
    MonotoneCurve,
    YoungFunction,
    conjugate,
    make_table,
    prefix_power_integral,
    standard_grid,
)

__all__ = [
    "EmbeddingContext",
    "GateReport",
    "RatioDecayReport",
    "ProofScales",
    "integrability_gate",
    "phi_n",
    "first_order_target",
    "glue_target",
    "higher_order_target",
    "proof_scales",
    "ratio_decay_check",
]


@dataclass(frozen=True)
class EmbeddingContext:
    """Dimension n >= 2 and derivative order 1 <= m < n."""

    n: int
    m: int = 1

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 2):
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not (isinstance(self.m, int) and 1 <= self.m < self.n):
            raise ValueError(f"m must satisfy 1 <= m < n, got m={self.m}, n={self.n}")

    @property
    def nprime(self) -> float:
        return self.n / (self.n - 1.0)

    @property
    def dual_exponent(self) -> float:
        """n/(n-m): the growth-integral weight; equals n' when m=1."""
        return self.n / (self.n - self.m)


# ---------------------------------------------------------------------------
# integrability gate


@dataclass(frozen=True)
class GateReport:
    primal: str  # converged | diverged | inconclusive
    dual: str
    agree: bool
    primal_partials: tuple
    dual_partials: tuple
    primal_rate: float | None
    dual_rate: float | None

    @property
    def passed(self) -> bool:
        return self.primal == "converged" and self.dual == "converged"


def _improper_zero_integral(f, bands=8, band_width=10.0, panels=4096, u_hi=0.0):
    """Partial integrals of f from exp(u_hi - k*band_width) to exp(u_hi).

    Each depth band is integrated on the same exponential step, so the
    increments between partials measure genuine mass near zero rather than
    discretization differences; per-band values are Richardson-extrapolated.
    Returns the converged/diverged/inconclusive verdict, the partials, and a
    divergence-rate estimate (exponent d in integrand ~ s**(-1-d)).
    """
    band_vals = []
    for k in range(bands):
        u = np.linspace(u_hi - band_width * (k + 1), u_hi - band_width * k, panels + 1)
        t = np.exp(u)
        with np.errstate(over="ignore", invalid="ignore"):
            g = f(t) * t
        g = np.where(np.isfinite(g), g, 1e300)
        coarse = np.trapezoid(g[::2], u[::2])
        fine = np.trapezoid(g, u)
        band_vals.append(float(fine + (fine - coarse) / 3.0))
    partials = [float(x) for x in np.cumsum(band_vals)]
    t4 = partials[-1]
    step = band_width
    d4, d3 = abs(band_vals[-1]), abs(band_vals[-2])
    rate = None
    if d3 > 1e-300:
        rate = float(np.log(max(d4, 1e-300) / d3) / step)
    scale = max(abs(t4), 1e-300)
    if d4 <= 1e-12 * scale:
        # increments already negligible (e.g. integrand vanishes near zero)
        return "converged", tuple(partials), rate
    ratio = d4 / max(d3, 1e-300)
    if ratio < 0.9:
        # geometric decay of the deeper-and-deeper contributions: the
        # unresolved tail extrapolates to d4 * ratio / (1 - ratio)
        remaining = d4 * ratio / (1.0 - ratio)
        verdict = "converged" if remaining <= 1e-4 * scale else "inconclusive"
    elif ratio <= 1.02:
        verdict = "diverged" if d4 > 1e-3 * scale else "inconclusive"
    else:
        verdict = "diverged"
    return verdict, tuple(partials), rate


def integrability_gate(A: YoungFunction, ctx: EmbeddingContext) -> GateReport:
    """Convergence near zero of both equivalent admissibility integrals.

    Primal: (s/A(s))**(m/(n-m)) ds.  Dual: conj(A)(t)/t**(1+n/(n-m)) dt.
    The two verdicts must agree; both are reported.
    """
    expo = ctx.m / (ctx.n - ctx.m)
    At = conjugate(A)
    kappa = 1.0 + ctx.dual_exponent

    def primal(t):
        vals = A(t)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(vals > 0, (t / np.maximum(vals, 1e-300)) ** expo, math.inf)

    def dual(t):
        return At(t) / t**kappa

    # stay below any point where the conjugate jumps to +inf: the condition
    # is about behavior at zero, not about that jump
    dual_hi = 0.0
    if At.finite_domain_bound is not None and At.finite_domain_bound <= 1.0:
        dual_hi = math.log(At.finite_domain_bound) - 1e-9
    pv, pp, pr = _improper_zero_integral(primal)
    dv, dp, dr = _improper_zero_integral(dual, u_hi=dual_hi)
    return GateReport(
        primal=pv, dual=dv, agree=(pv == dv),
        primal_partials=pp, dual_partials=dp,
        primal_rate=pr if pv != "converged" else None,
        dual_rate=dr if dv != "converged" else None,
    )


# ---------------------------------------------------------------------------
# growth integral of the conjugate and the first-order target


def _conjugate_growth_integral(A: YoungFunction, kappa: float) -> MonotoneCurve:
    """Integral from 0 to s of conj(A)(t) / t**(1+kappa), as a monotone table."""
    At = conjugate(A)
    if At.family == "indicator":
        # conjugate is a 0/inf step, so the integral is the same step
        return MonotoneCurve(
            samples_s=np.empty(0), samples_v=np.empty(0),
            tail_exponent=math.nan, tail_coeff=math.nan,
            zero_plateau_bound=At.params[0], finite_domain_bound=At.params[0],
            family="indicator", params=(At.params[0],),
        )
    s = standard_grid()
    plateau = At.zero_plateau_bound
    if plateau > 0:
        s = s[s > plateau * (1 + 1e-12)]
    bound = At.finite_domain_bound
    if bound is not None:
        s = s[s <= bound]
    if len(s) < 8:
        raise CurveError("conjugate growth integral degenerates on the standard grid")
    g = At(s) / s ** (1.0 + kappa)
    if not np.all(np.isfinite(g)):
        raise CurveError("conjugate growth integrand not integrable on the grid")
    vals = prefix_power_integral(s, np.maximum(g, 1e-300))
    return make_table(s, vals, young=False, zero_plateau_bound=plateau,
                      finite_domain_bound=bound, meta={"kappa": kappa})


def phi_n(A: YoungFunction, ctx: EmbeddingContext) -> MonotoneCurve:
    """First-order growth integral of the conjugate (weight exponent 1+n')."""
    gate = integrability_gate(A, EmbeddingContext(ctx.n, 1))
    if not gate.passed:
        raise CurveError(f"integrability gate fails: primal={gate.primal}, dual={gate.dual}")
    return _conjugate_growth_integral(A, EmbeddingContext(ctx.n, 1).nprime)


def first_order_target(A: YoungFunction, ctx: EmbeddingContext) -> YoungFunction:
    """Smallest Orlicz target for one order of differentiation."""
    if ctx.m != 1:
        raise ValueError("first_order_target needs m == 1")
    phi = phi_n(A, ctx)
    np_ = ctx.nprime
    r = standard_grid()
    x, saturated = phi._inverse_vec(r**np_, "left")
    kernel = r ** (np_ - 1.0) * x**np_
    bound = None
    if saturated.any():
        k = int(np.argmax(saturated))
        bound = float(r[k])
        r, kernel = r[:k], kernel[:k]
        if len(r) < 8:
            raise CurveError("growth integral saturates immediately; target degenerate")
    vals = prefix_power_integral(r, kernel)
    return make_table(r, vals, family="table", finite_domain_bound=bound,
                      meta={"source": "first_order_target", "n": ctx.n})


def higher_order_target(A: YoungFunction, ctx: EmbeddingContext) -> YoungFunction:
    """Target for m orders: compose A with the inverse fractional-integral scale."""
    gate = integrability_gate(A, ctx)
    if not gate.passed:
        raise CurveError(f"integrability gate fails: primal={gate.primal}, dual={gate.dual}")
    expo = ctx.m / (ctx.n - ctx.m)
    r = standard_grid()
    with np.errstate(over="ignore"):
        g = (r / A(r)) ** expo
    if not np.all(np.isfinite(g)):
        raise CurveError("fractional-integral kernel overflows")
    inner = prefix_power_integral(r, g)
    H = make_table(r, inner ** ((ctx.n - ctx.m) / ctx.n), young=False, meta={"role": "scale"})
    s = standard_grid()
    x, saturated = H._inverse_vec(s, "left")
    bound = None
    if saturated.any():
        k = int(np.argmax(saturated))
        bound = float(s[k - 1]) if k > 0 else None
        s, x = s[:k], x[:k]
        if len(s) < 8:
            raise CurveError("scale saturates immediately; target degenerate")
    vals = A(x)
    meta = {"source": "higher_order_target", "n": ctx.n, "m": ctx.m}
    if bound is not None:
        meta["regime"] = "essentially bounded"
    return make_table(s, vals, family="table", finite_domain_bound=bound, meta=meta)


# ---------------------------------------------------------------------------
# convex glue


def glue_target(A: YoungFunction, A_target: YoungFunction) -> YoungFunction:
    """Piecewise function equal to A near zero and to the target near infinity.

    The seam [s1, s2] is affine.  s1 scans A's sample abscissae upward; s2 is
    the smallest later target abscissa making the chord slope fit between the
    adjacent one-sided discrete slopes, which keeps the result convex.  Each
    piece keeps its own sample knots so no re-interpolation noise enters.
    """
    ga = A.samples_s if len(A.samples_s) else standard_grid()
    va = A(ga)
    gt, vt = A_target.samples_s, A_target.samples_v
    left_slope = np.empty(len(ga))
    left_slope[1:] = np.diff(va) / np.diff(ga)
    left_slope[0] = va[0] / ga[0]
    right_slope = np.empty(len(gt))
    right_slope[:-1] = np.diff(vt) / np.diff(gt)
    right_slope[-1] = max(right_slope[-2], A_target.tail_exponent * vt[-1] / gt[-1]) if np.isfinite(
        A_target.tail_exponent) else right_slope[-2]

    for i in range(1, len(ga) - 1):
        s1, a1 = ga[i], va[i]
        j_lo = int(np.searchsorted(gt, s1 * (1 + 1e-9), side="right"))
        if j_lo >= len(gt):
            break
        cols = gt[j_lo:]
        with np.errstate(divide="ignore", invalid="ignore"):
            chord = (vt[j_lo:] - a1) / (cols - s1)
        ok = (chord >= left_slope[i] * (1 - 1e-12)) & (chord <= right_slope[j_lo:] * (1 + 1e-12)) & (chord > 0)
        hits = np.where(ok)[0]
        if not len(hits):
            continue
        j = j_lo + int(hits[0])
        s2 = gt[j]
        slope = float((vt[j] - a1) / (s2 - s1))
        seam = np.unique(np.concatenate([ga[(ga > s1) & (ga < s2)], gt[(gt > s1) & (gt < s2)]]))
        merged_s = np.concatenate([ga[: i + 1], seam, gt[j:]])
        merged_v = np.concatenate([va[: i + 1], a1 + slope * (seam - s1), vt[j:]])
        return make_table(
            merged_s, merged_v, family="table",
            tail=(A_target.tail_exponent, A_target.tail_coeff),
            zero_plateau_bound=A.zero_plateau_bound,
            finite_domain_bound=A_target.finite_domain_bound,
            meta={"source": "glue_target", "s1": float(s1), "s2": float(s2)},
        )
    raise CurveError("no convex glue found within the sample window")


# ---------------------------------------------------------------------------
# proof-auxiliary scales


@dataclass(frozen=True)
class ProofScales:
    phi: MonotoneCurve
    C: MonotoneCurve
    D: MonotoneCurve | None = None
    E: MonotoneCurve | None = None
    cinverse_max_rel_err: float | None = None
    cinverse_worst_r: float | None = None
    sandwich_ok: bool = True
    sandwich_constants: tuple[float, float] | None = None


def _pointwise_scale(phi: MonotoneCurve, kappa: float) -> MonotoneCurve:
    """s**kappa * (phi^{-1}(s**kappa))**kappa on the standard grid."""
    s = standard_grid()
    x, sat = phi._inverse_vec(s**kappa, "left")
    vals = s**kappa * x**kappa
    keep = ~sat
    return make_table(s[keep], vals[keep], young=False, meta={"kappa": kappa})


def proof_scales(A: YoungFunction, ctx: EmbeddingContext) -> ProofScales:
    """Scale functions used by the decay lemma, with their internal identities checked."""
    if ctx.m == 1:
        np_ = ctx.nprime
        phi = phi_n(A, ctx)
        C = _pointwise_scale(phi, np_)
        s = phi.samples_s if len(phi.samples_s) else standard_grid()
        D = make_table(s, s**np_ * phi(s), young=False, meta={"role": "product-scale"})
        target = first_order_target(A, ctx)
        # sandwich: C(s/2) <= A_n(s) <= C(s) with 1% slack on the shared range
        cs = C.samples_s
        mid = cs[(cs >= cs[0] * 2) & (cs <= cs[-1] / 2)]
        ok = bool(
            np.all(C(mid / 2) <= target(mid) * 1.01 + 1e-300)
            and np.all(target(mid) <= C(mid) * 1.01 + 1e-300)
        )
        # inverse identity: C^{-1}(r) = r**(1/n') / D^{-1}(r) where both resolve
        r = np.geomspace(max(C.samples_v[0], D.samples_v[0]) * 4,
                         min(C.samples_v[-1], D.samples_v[-1]) / 4, 96)
        ci, csat = C._inverse_vec(r, "right")
        di, dsat = D._inverse_vec(r, "right")
        good = ~(csat | dsat)
        rel = np.abs(ci[good] * di[good] / r[good] ** (1.0 / np_) - 1.0)
        worst = int(np.argmax(rel))
        return ProofScales(
            phi=phi, C=C, D=D,
            cinverse_max_rel_err=float(rel.max()),
            cinverse_worst_r=float(r[good][worst]),
            sandwich_ok=ok,
        )

    kappa = ctx.dual_exponent
    gate = integrability_gate(A, ctx)
    if not gate.passed:
        raise CurveError(f"integrability gate fails: primal={gate.primal}, dual={gate.dual}")
    phi = _conjugate_growth_integral(A, kappa)
    C = _pointwise_scale(phi, kappa)
    cs = C.samples_s
    E = make_table(cs, prefix_power_integral(cs, C(cs) / cs), young=False, meta={"role": "mean-scale"})
    target = higher_order_target(A, ctx)
    # sandwich E(c1 s) <= target(s) <= E(c2 s): search witness constants
    mid = cs[(cs >= cs[0] * 4) & (cs <= cs[-1] / 4)]
    if target.finite_domain_bound is not None:
        mid = mid[mid <= target.finite_domain_bound / 4]
    tv = target(mid)
    c1 = None
    for k in range(0, -21, -1):
        if np.all(E(2.0**k * mid) <= tv * (1 + 1e-9)):
            c1 = 2.0**k
            break
    c2 = None
    for k in range(0, 21):
        if np.all(tv <= E(2.0**k * mid) * (1 + 1e-9)):
            c2 = 2.0**k
            break
    return ProofScales(
        phi=phi, C=C, E=E,
        sandwich_ok=c1 is not None and c2 is not None,
        sandwich_constants=(c1, c2),
    )


# ---------------------------------------------------------------------------
# ratio decay


@dataclass(frozen=True)
class RatioDecayReport:
    r0: float
    c0: float
    slope: float
    passed: bool
    table: np.ndarray = field(repr=False)  # columns (r, rho)

    def to_json(self) -> str:
        return json.dumps(
            {
                "r0": self.r0,
                "c0": self.c0,
                "slope": self.slope,
                "pass": self.passed,
                "table": [[float(a), float(b)] for a, b in self.table],
            },
            sort_keys=True,
        )


def ratio_decay_check(
    A: YoungFunction,
    target: MonotoneCurve,
    ctx: EmbeddingContext,
    r_range: tuple[float, float] = (1e3, 1e8),
    r0: float = 1e3,
    points: int = 160,
) -> RatioDecayReport:
    """Tabulate rho(r) = target^{-1}(2r)/A^{-1}(r) * r**(m/n) and test decay.

    Passes when the last-decade log-log slope of rho stays at or below 0.05;
    c0 is the empirical supremum of rho over r >= r0.
    """
    lo, hi = r_range
    r = np.geomspace(lo, hi, points)
    tinv, _ = target._inverse_vec(2.0 * r, "right")
    ainv, _ = A._inverse_vec(r, "right")
    rho = tinv / ainv * r ** (ctx.m / ctx.n)
    live = r >= r0
    c0 = float(np.max(rho[live])) if live.any() else float(np.max(rho))
    last = r >= r[-1] / 10.0
    slope = float(np.polyfit(np.log(r[last]), np.log(np.maximum(rho[last], 1e-300)), 1)[0])
    passed = bool(np.isfinite(rho).all() and slope <= 0.05)
    return RatioDecayReport(r0=float(r0), c0=c0, slope=slope, passed=passed,
                            table=np.column_stack([r, rho]))
