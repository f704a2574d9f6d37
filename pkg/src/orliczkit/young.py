"""Young-function calculus on log-spaced sample tables.

A curve is stored as strictly increasing positive abscissae with positive
values, plus a fitted power-law tail, an optional zero plateau near the
origin and an optional finite domain bound past which the value is +inf.
Closed-form families (pure powers, scaled powers, power-log, linear, and
the plateau/infinity step that conjugation of linear growth produces) keep
an exact evaluator next to the table, so asymptotic predicates can consult
exact slopes where they are known and fitted ones everywhere else.

Everything here is immutable after construction and safe to share between
workers; all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

__all__ = [
    "CurveError",
    "MonotoneCurve",
    "YoungFunction",
    "GrowthComparison",
    "build_young",
    "scaled_power",
    "conjugate",
    "generalized_inverse",
    "generalized_inverse_ex",
    "integral_mean",
    "compare_growth",
    "save_yf1",
    "load_yf1",
    "standard_grid",
    "S_MIN",
    "S_MAX",
    "GRID_SIZE",
]

S_MIN = 1e-8
S_MAX = 1e8
GRID_SIZE = 512

# relative slack for the discrete convexity test; quadrature-built tables
# carry noise of this order
EPS_CONV = 1e-9

_EXACT_FAMILIES = ("power", "cpower", "power-log", "linear", "indicator")


class CurveError(ValueError):
    """A sample table violates the representation contract."""


def standard_grid(lo: float = S_MIN, hi: float = S_MAX, n: int = GRID_SIZE) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def _fit_power(s: np.ndarray, v: np.ndarray, anchor: int) -> tuple[float, float]:
    """Least-squares log-log slope, coefficient anchored at sample `anchor`.

    Anchoring keeps the extrapolation continuous with the table, which the
    inverse relies on near the first/last sample.
    """
    if len(s) < 2:
        return 1.0, float(v[anchor] / s[anchor])
    ls, lv = np.log(s), np.log(v)
    q = float(np.polyfit(ls, lv, 1)[0])
    c = float(v[anchor] / s[anchor] ** q)
    return q, c


def _decade_slice(x: np.ndarray, decades: float = 1.0, end: str = "tail") -> np.ndarray:
    if end == "tail":
        mask = x >= x[-1] / 10.0**decades
    else:
        mask = x <= x[0] * 10.0**decades
    if mask.sum() < 2:
        mask = np.zeros_like(mask)
        idx = [0, 1] if end == "head" else [len(x) - 2, len(x) - 1]
        mask[idx] = True
    return mask


@dataclass(frozen=True, eq=False)
class MonotoneCurve:
    """Nondecreasing function on [0, oo) backed by a log-spaced sample table."""

    samples_s: np.ndarray
    samples_v: np.ndarray
    tail_exponent: float
    tail_coeff: float
    zero_plateau_bound: float = 0.0
    finite_domain_bound: float | None = None
    family: str = "table"
    params: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples_s", np.ascontiguousarray(self.samples_s, dtype=float))
        object.__setattr__(self, "samples_v", np.ascontiguousarray(self.samples_v, dtype=float))
        self._validate()

    # -- validation -----------------------------------------------------

    def _validate(self):
        s, v = self.samples_s, self.samples_v
        if self.family == "indicator":
            if not self.params or self.params[0] <= 0:
                raise CurveError("indicator needs a positive bound")
            return
        if len(s) < 2:
            raise CurveError("need at least two samples")
        if np.any(~np.isfinite(s)) or np.any(s <= 0) or np.any(np.diff(s) <= 0):
            raise CurveError("abscissae must be finite, positive, strictly increasing")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise CurveError("values must be finite and nonnegative")
        if np.any(np.diff(v) < -1e-12 * np.maximum(v[1:], 1e-300)):
            k = int(np.argmin(np.diff(v)))
            raise CurveError(f"values decrease near s={s[k]:.3g}")
        if np.any(v <= 0):
            raise CurveError("table values must be positive (use zero_plateau_bound for the flat part)")

    # -- cached geometry -------------------------------------------------

    @cached_property
    def _seg_exponents(self) -> np.ndarray:
        s, v = self.samples_s, self.samples_v
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.log(v[1:] / v[:-1]) / np.log(s[1:] / s[:-1])
        return np.where(np.isfinite(q), q, 0.0)

    @cached_property
    def _head(self) -> tuple[float, float]:
        """(exponent, coeff) for the power extrapolation in (s - s0) below the table."""
        s0 = self.zero_plateau_bound
        s, v = self.samples_s, self.samples_v
        mask = _decade_slice(s, 1.0, "head")
        x = s[mask] - s0
        if np.any(x <= 0):
            x = np.maximum(x, s[0] * 1e-12)
        ls, lv = np.log(x), np.log(v[mask])
        if len(ls) < 2 or np.ptp(ls) < 1e-12:
            return 1.0, float(v[0] / max(s[0] - s0, 1e-300))
        q = float(np.polyfit(ls, lv, 1)[0])
        q = max(q, 1e-9)
        c = float(v[0] / (s[0] - s0) ** q) if s[0] > s0 else float(v[0])
        return q, c

    @property
    def value_sup(self) -> float:
        if self.family == "indicator":
            return math.inf
        if self.finite_domain_bound is not None:
            return math.inf
        if np.isfinite(self.tail_exponent) and self.tail_exponent > 1e-9:
            return math.inf
        return float(self.samples_v[-1])

    # -- evaluation -------------------------------------------------------

    def _exact(self, x: np.ndarray) -> np.ndarray | None:
        fam, p = self.family, self.params
        if fam == "power":
            return x ** p[0]
        if fam == "cpower":
            return p[0] * x ** p[1]
        if fam == "linear":
            return x.copy()
        if fam == "power-log":
            return x ** p[0] * np.log(math.e + x) ** p[1]
        if fam == "indicator":
            out = np.zeros_like(x)
            out[x > p[0]] = math.inf
            return out
        return None

    def __call__(self, s):
        scalar = np.isscalar(s) or getattr(s, "ndim", 0) == 0
        x = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(x < 0):
            raise ValueError("argument must be nonnegative")
        out = self._exact(x)
        if out is None:
            out = self._eval_table(x)
        if self.finite_domain_bound is not None:
            out = np.where(x > self.finite_domain_bound, math.inf, out)
        return float(out[0]) if scalar else out.reshape(np.shape(s))

    def _eval_table(self, x: np.ndarray) -> np.ndarray:
        s, v = self.samples_s, self.samples_v
        s0 = self.zero_plateau_bound
        out = np.zeros_like(x)
        head = (x > s0) & (x < s[0])
        body = (x >= s[0]) & (x <= s[-1])
        tail = x > s[-1]
        if head.any():
            hq, hc = self._head
            out[head] = hc * (x[head] - s0) ** hq
        if body.any():
            idx = np.clip(np.searchsorted(s, x[body], side="right") - 1, 0, len(s) - 2)
            q = self._seg_exponents[idx]
            out[body] = v[idx] * (x[body] / s[idx]) ** q
        if tail.any():
            if np.isfinite(self.tail_exponent):
                out[tail] = self.tail_coeff * x[tail] ** self.tail_exponent
            else:
                # bounded-domain curve without a fitted tail: constant up to the bound
                out[tail] = v[-1]
        return out

    # -- generalized inverses ----------------------------------------------

    def inverse_ex(self, r: float, side: str = "right") -> "InverseResult":
        val, sat = self._inverse_vec(np.asarray([float(r)]), side)
        return InverseResult(float(val[0]), bool(sat[0]))

    def inverse(self, r, side: str = "right"):
        scalar = np.isscalar(r) or getattr(r, "ndim", 0) == 0
        val, _ = self._inverse_vec(np.atleast_1d(np.asarray(r, dtype=float)), side)
        return float(val[0]) if scalar else val.reshape(np.shape(r))

    def _inverse_vec(self, r: np.ndarray, side: str) -> tuple[np.ndarray, np.ndarray]:
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        if np.any(r < 0):
            raise ValueError("inverse argument must be nonnegative")
        if self.family == "indicator":
            b = self.params[0]
            if side == "right":
                return np.full_like(r, b), np.zeros(r.shape, dtype=bool)
            return np.where(r == 0, 0.0, b), np.zeros(r.shape, dtype=bool)
        if self.family in ("power", "cpower", "linear"):
            coeff, p = (1.0, self.params[0]) if self.family == "power" else (
                (self.params[0], self.params[1]) if self.family == "cpower" else (1.0, 1.0))
            return (r / coeff) ** (1.0 / p), np.zeros(r.shape, dtype=bool)

        s, v = self.samples_s, self.samples_v
        out = np.empty_like(r)
        sat = np.zeros(r.shape, dtype=bool)
        s0 = self.zero_plateau_bound
        hq, hc = self._head

        zero = r == 0.0
        out[zero] = s0 if side == "right" else 0.0
        low = (~zero) & (r <= v[0])
        if low.any():
            out[low] = np.minimum(s0 + (r[low] / hc) ** (1.0 / hq), s[0])
        high = r > v[-1]
        if high.any():
            # a near-flat fitted tail means the table is essentially bounded:
            # inverting above the plateau would extrapolate absurdly far
            if np.isfinite(self.tail_exponent) and self.tail_exponent > 5e-3:
                with np.errstate(over="ignore"):
                    x = (r[high] / self.tail_coeff) ** (1.0 / self.tail_exponent)
                if self.finite_domain_bound is not None:
                    x = np.minimum(x, self.finite_domain_bound)
                bad = ~np.isfinite(x)
                x[bad] = s[-1]
                sat[high] = bad
                out[high] = x
            elif self.finite_domain_bound is not None:
                out[high] = self.finite_domain_bound
            else:
                out[high] = s[-1]
                sat[high] = True
        mid = (~zero) & (~low) & (~high)
        if mid.any():
            k = np.searchsorted(v, r[mid], side=side)
            k = np.clip(k, 1, len(v) - 1)
            i = k - 1
            q = self._seg_exponents[i]
            with np.errstate(divide="ignore", invalid="ignore"):
                x = s[i] * (r[mid] / v[i]) ** (1.0 / q)
            # flat segment at exactly this level: the side picks the end
            flat = q <= 0
            if flat.any():
                x[flat] = s[i][flat] if side == "left" else s[i + 1][flat]
            out[mid] = np.clip(x, s[i], s[i + 1])
        return out, sat


class InverseResult(NamedTuple):
    value: float
    saturated: bool


class YoungFunction(MonotoneCurve):
    """Convex increasing function with A(0)=0, closed under the calculus below."""

    def _validate(self):
        super()._validate()
        if self.family == "indicator":
            return
        s, v = self.samples_s, self.samples_v
        slopes = np.diff(v) / np.diff(s)
        scale = np.maximum(np.maximum(slopes[1:], slopes[:-1]), 1e-300)
        if np.any(np.diff(slopes) < -EPS_CONV * scale - 1e-300):
            k = int(np.argmin(np.diff(slopes) / scale))
            raise CurveError(f"discrete convexity fails near s={s[k + 1]:.6g}")
        ratio = v / s
        rscale = np.maximum(ratio[1:], 1e-300)
        if np.any(np.diff(ratio) < -1e-6 * rscale):
            k = int(np.argmin(np.diff(ratio) / rscale))
            raise CurveError(f"A(s)/s decreases near s={s[k]:.6g}")
        if np.isfinite(self.tail_exponent) and self.tail_exponent < 1.0 - 1e-6:
            raise CurveError(f"tail exponent {self.tail_exponent:.4g} < 1")


def make_table(
    s,
    v,
    *,
    young: bool = True,
    family: str = "table",
    params: tuple = (),
    tail: tuple[float, float] | None = None,
    zero_plateau_bound: float = 0.0,
    finite_domain_bound: float | None = None,
    meta: dict | None = None,
) -> MonotoneCurve:
    """Assemble a curve from raw samples, dropping unusable entries and fitting the tail."""
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    keep = np.isfinite(s) & np.isfinite(v) & (s > 0) & (v > 1e-300)
    if finite_domain_bound is not None:
        keep &= s <= finite_domain_bound
    s, v = s[keep], v[keep]
    if len(s) < 8:
        raise CurveError("fewer than 8 usable samples after filtering")
    if tail is None:
        mask = _decade_slice(s, 1.0, "tail")
        q = _fit_power(s[mask], v[mask], -1)[0]
        tail = (q, float(v[-1] / s[-1] ** q))
    cls = YoungFunction if young else MonotoneCurve
    return cls(
        samples_s=s,
        samples_v=v,
        tail_exponent=tail[0],
        tail_coeff=tail[1],
        zero_plateau_bound=zero_plateau_bound,
        finite_domain_bound=finite_domain_bound,
        family=family,
        params=params,
        meta=meta or {},
    )


# ---------------------------------------------------------------------------
# construction


def _exact_family(family: str, params: tuple) -> YoungFunction:
    if family == "indicator":
        b = float(params[0])
        return YoungFunction(
            samples_s=np.empty(0),
            samples_v=np.empty(0),
            tail_exponent=math.nan,
            tail_coeff=math.nan,
            zero_plateau_bound=b,
            finite_domain_bound=b,
            family="indicator",
            params=(b,),
        )
    grid = standard_grid()
    if family == "power":
        p = float(params[0])
        return make_table(grid, grid**p, family="power", params=(p,), tail=(p, 1.0))
    if family == "cpower":
        c, p = float(params[0]), float(params[1])
        return make_table(grid, c * grid**p, family="cpower", params=(c, p), tail=(p, c))
    if family == "linear":
        return make_table(grid, grid, family="linear", params=(), tail=(1.0, 1.0))
    if family == "power-log":
        p, lam = float(params[0]), float(params[1])
        vals = grid**p * np.log(math.e + grid) ** lam
        return make_table(grid, vals, family="power-log", params=(p, lam))
    raise CurveError(f"unknown family {family!r}")


def build_young(family: str, *params: float, density=None) -> YoungFunction:
    """Build a Young function from a family tag.

    Families: ``power`` (p), ``power-log`` (p, lam), ``linear``,
    ``custom`` with ``density=(s, a)`` samples of an increasing density.
    """
    if family in ("power", "power-log"):
        p = float(params[0])
        if p < 1.0:
            raise CurveError(f"power exponent {p} < 1 would break convexity")
        return _exact_family(family, params if family == "power-log" else (p,))
    if family == "linear":
        return _exact_family("linear", ())
    if family == "custom":
        if density is None:
            raise CurveError("custom family needs density=(s, a) samples")
        return _from_density(*density)
    if family in ("cpower", "indicator"):
        return _exact_family(family, params)
    raise CurveError(f"unknown family {family!r}")


def scaled_power(coeff: float, p: float) -> YoungFunction:
    if coeff <= 0 or p < 1.0:
        raise CurveError("need coeff > 0 and p >= 1")
    return _exact_family("cpower", (coeff, p))


def _from_density(ds, da) -> YoungFunction:
    ds = np.asarray(ds, dtype=float)
    da = np.asarray(da, dtype=float)
    if len(ds) < 8 or np.any(np.diff(ds) <= 0):
        raise CurveError("density abscissae must be strictly increasing, >= 8 points")
    if np.any(da < 0) or np.any(~np.isfinite(da)):
        raise CurveError("density must be nonnegative and finite")
    if np.any(np.diff(da) < -1e-12 * np.maximum(da[1:], 1e-300)):
        k = int(np.argmin(np.diff(da)))
        raise CurveError(f"density decreases near s={ds[k]:.6g}: not a Young density")
    if not np.any(da > 0):
        raise CurveError("density is identically zero")
    # trapezoid prefix integral; increasing density makes the result convex
    inc = 0.5 * (da[1:] + da[:-1]) * np.diff(ds)
    vals = np.concatenate([[0.5 * da[0] * ds[0]], 0.5 * da[0] * ds[0] + np.cumsum(inc)])
    return make_table(ds, vals, family="table", meta={"source": "density"})


# ---------------------------------------------------------------------------
# conjugation


def conjugate(A: YoungFunction) -> YoungFunction:
    """Legendre-type conjugate: sup over r > 0 of (s*r - A(r))."""
    fam, p = A.family, A.params
    if fam == "linear":
        return _exact_family("indicator", (1.0,))
    if fam == "power":
        return conjugate(scaled_power(1.0, p[0]))
    if fam == "cpower":
        c, q = p
        if abs(q - 1.0) < 1e-12:
            return _exact_family("indicator", (c,))
        qq = q / (q - 1.0)
        cc = (q - 1.0) / q * (c * q) ** (-1.0 / (q - 1.0))
        return _exact_family("cpower", (cc, qq))
    if fam == "indicator":
        return _exact_family("cpower", (p[0], 1.0)) if p[0] != 1.0 else _exact_family("linear", ())
    return _conjugate_table(A)


def _conjugate_table(A: YoungFunction) -> YoungFunction:
    s, v = A.samples_s, A.samples_v
    q = A._seg_exponents
    c = v[:-1] / s[:-1] ** q
    # slope of the interpolant at each left endpoint; convexity makes it ~monotone
    deriv = q * v[:-1] / s[:-1]
    deriv = np.maximum.accumulate(deriv)

    x = standard_grid()
    best = np.zeros_like(x)

    j0 = np.searchsorted(deriv, x) - 1
    for off in range(-2, 3):
        j = np.clip(j0 + off, 0, len(q) - 1)
        qj, cj = q[j], c[j]
        lo, hi = s[j], s[j + 1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            rstar = np.where(qj > 1.0, (x / (cj * qj)) ** (1.0 / np.maximum(qj - 1.0, 1e-12)), hi)
        r = np.clip(rstar, lo, hi)
        cand = x * r - cj * r**qj
        best = np.maximum(best, cand)
        best = np.maximum(best, x * lo - v[j])
        best = np.maximum(best, x * hi - v[j + 1])

    s0_in = A.zero_plateau_bound
    if s0_in > 0:
        best = np.maximum(best, x * s0_in)
    else:
        hq, hc = A._head
        if hq > 1.0 + 1e-9:
            with np.errstate(over="ignore"):
                r = np.clip((x / (hc * hq)) ** (1.0 / (hq - 1.0)), 0.0, s[0])
            best = np.maximum(best, x * r - hc * r**hq)

    bound_out: float | None = None
    tail_out: tuple[float, float] | None = None
    qt, ct = A.tail_exponent, A.tail_coeff
    if A.finite_domain_bound is not None:
        B = A.finite_domain_bound
        best = np.maximum(best, x * B - float(A(B)))
        tail_out = (1.0, B)
    elif qt > 1.0 + 1e-6:
        with np.errstate(over="ignore"):
            rstar = np.maximum((x / (ct * qt)) ** (1.0 / (qt - 1.0)), s[-1])
        best = np.maximum(best, x * rstar - ct * rstar**qt)
        qq = qt / (qt - 1.0)
        cc = (qt - 1.0) / qt * (ct * qt) ** (-1.0 / (qt - 1.0))
        tail_out = (qq, cc)
    else:
        # asymptotically linear input: conjugate is finite only below the slope
        bound_out = ct
        tail_out = (math.nan, math.nan)

    # plateau of the output = slope of A at the origin
    hq, hc = A._head
    s0_out = hc if (s0_in == 0 and abs(hq - 1.0) < 1e-3) else 0.0
    pos = best > 1e-300
    if s0_in == 0 and hq > 1.0 + 1e-3:
        s0_out = 0.0
    if (~pos).any():
        s0_out = max(s0_out, float(x[~pos].max(initial=0.0)))
    keep = pos & (x > s0_out)
    if bound_out is not None:
        keep &= x <= bound_out
    if keep.sum() < 8:
        raise CurveError("conjugate not representable on the standard grid")
    return make_table(
        x[keep],
        best[keep],
        family="table",
        tail=tail_out if (tail_out is not None and np.isfinite(tail_out[0])) else (math.nan, math.nan),
        zero_plateau_bound=s0_out,
        finite_domain_bound=bound_out,
        meta={"source": "conjugate"},
    )


# ---------------------------------------------------------------------------
# inverses, averaged function, growth comparison


def generalized_inverse(F: MonotoneCurve, r, side: str = "right"):
    """Right inverse sup{s: F(s) <= r} or left inverse inf{s: F(s) >= r}."""
    return F.inverse(r, side)


def generalized_inverse_ex(F: MonotoneCurve, r: float, side: str = "right") -> InverseResult:
    """Like `generalized_inverse` but also reports saturation (r above a bounded range)."""
    return F.inverse_ex(r, side)


def prefix_power_integral(
    x: np.ndarray, g: np.ndarray, head_exponent: float | None = None, include_head: bool = True
) -> np.ndarray:
    """Integral of g from 0 to each x, treating g as a power law on each segment.

    The head contribution below x[0] uses the first segment's exponent (or
    `head_exponent`); it must be > -1 for the integral to exist.  With
    ``include_head=False`` the integral starts at x[0] instead of 0.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.log(g[1:] / g[:-1]) / np.log(x[1:] / x[:-1])
    beta = np.where(np.isfinite(beta), beta, 0.0)
    ratio = x[1:] / x[:-1]
    bp1 = beta + 1.0
    seg = np.where(
        np.abs(bp1) > 1e-9,
        g[:-1] * x[:-1] * (ratio**bp1 - 1.0) / np.where(np.abs(bp1) > 1e-9, bp1, 1.0),
        g[:-1] * x[:-1] * np.log(ratio),
    )
    if not include_head:
        return np.concatenate([[0.0], np.cumsum(seg)])
    b0 = beta[0] if head_exponent is None else head_exponent
    if b0 <= -1.0 + 1e-12:
        raise CurveError(f"head exponent {b0:.4g} <= -1: integral diverges at 0")
    head = g[0] * x[0] / (b0 + 1.0)
    return np.concatenate([[head], head + np.cumsum(seg)])


def integral_mean(A: YoungFunction) -> YoungFunction:
    """The averaged function: integral of A(r)/r from 0 to s."""
    fam, p = A.family, A.params
    if fam == "power":
        return scaled_power(1.0 / p[0], p[0]) if p[0] != 1.0 else _exact_family("linear", ())
    if fam == "cpower":
        return scaled_power(p[0] / p[1], p[1]) if p[1] != 1.0 else _exact_family("cpower", (p[0], 1.0))
    if fam == "linear":
        return _exact_family("linear", ())
    if fam == "indicator":
        return _exact_family("indicator", p)
    s = A.samples_s
    g = A.samples_v / s
    if A.zero_plateau_bound > 0:
        vals = prefix_power_integral(s, np.maximum(g, 1e-300))
    else:
        vals = prefix_power_integral(s, g)
    return make_table(
        s, vals, family="table", finite_domain_bound=A.finite_domain_bound,
        zero_plateau_bound=A.zero_plateau_bound, meta={"source": "integral_mean"},
    )


@dataclass(frozen=True)
class GrowthComparison:
    dominates: bool
    equivalent: bool
    constant: float | None
    witness: float | None
    inconclusive: bool
    mode: str


def _dominates(A: MonotoneCurve, B: MonotoneCurve, mode: str, threshold: float):
    """Smallest c in the 2**k grid with A(s) <= B(c s) on the required range, tail-aware."""
    s = A.samples_s if len(A.samples_s) else standard_grid()
    if mode == "near-infinity":
        s = s[s >= threshold]
    qa, qb = A.tail_exponent, B.tail_exponent
    tail_possible = True
    if np.isfinite(qa) and np.isfinite(qb):
        # log-factor growth shows up as a fitted-exponent gap; equality within
        # 2% is treated as "same power scale"
        if qa > qb + 0.02:
            tail_possible = False
    elif np.isfinite(qa) and not np.isfinite(qb):
        tail_possible = True  # B jumps to +inf: dominates any finite tail
    va = A(s)
    best_fail = None
    for k in range(-20, 21):
        c = 2.0**k
        vb = B(np.minimum(c * s, 1e300))
        ok = np.all(va <= vb * (1 + 1e-9) + 1e-300)
        if ok and tail_possible:
            return c, None, False
        if ok and not tail_possible:
            best_fail = float(s[-1])
    if not tail_possible:
        return None, best_fail if best_fail is not None else float(s[-1]), False
    # samples always fail: either genuinely or oscillation around equal tails
    inconclusive = bool(np.isfinite(qa) and np.isfinite(qb) and abs(qa - qb) <= 0.02)
    with np.errstate(invalid="ignore", over="ignore"):
        vb = B(np.minimum(2.0**20 * s, 1e300))
        bad = np.where(va > vb * (1 + 1e-9))[0]
    witness = float(s[bad[0]]) if len(bad) else float(s[-1])
    return None, witness, inconclusive


def compare_growth(A: MonotoneCurve, B: MonotoneCurve, mode: str = "global", threshold: float = 1.0) -> GrowthComparison:
    """Does B dominate A (A(s) <= B(cs))?  Checks samples and fitted tails."""
    if mode not in ("global", "near-infinity"):
        raise ValueError("mode must be 'global' or 'near-infinity'")
    c_fwd, wit, inc1 = _dominates(A, B, mode, threshold)
    c_rev, _, inc2 = _dominates(B, A, mode, threshold)
    return GrowthComparison(
        dominates=c_fwd is not None,
        equivalent=c_fwd is not None and c_rev is not None,
        constant=c_fwd,
        witness=wit,
        inconclusive=inc1 or inc2,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# YF1 exchange format


def save_yf1(f: MonotoneCurve, path) -> None:
    lines = []
    if f.family in _EXACT_FAMILIES and f.family != "indicator":
        lines.append("YF1 " + " ".join([f.family] + [repr(float(x)) for x in f.params]))
    elif f.family == "indicator":
        lines.append(f"YF1 indicator {float(f.params[0])!r}")
    else:
        lines.append("YF1 table")
    for s, v in zip(f.samples_s, f.samples_v):
        lines.append(f"{float(s)!r} {float(v)!r}")
    lines.append(f"tail {float(f.tail_exponent)!r} {float(f.tail_coeff)!r}")
    if f.zero_plateau_bound > 0:
        lines.append(f"plateau {float(f.zero_plateau_bound)!r}")
    if f.finite_domain_bound is not None:
        lines.append(f"bound {float(f.finite_domain_bound)!r}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def load_yf1(path) -> MonotoneCurve:
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path) as fh:
            text = fh.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("YF1"):
        raise CurveError("not a YF1 file")
    header = lines[0].split()
    family, params = header[1], tuple(float(x) for x in header[2:])
    samples, tail, plateau, bound = [], None, 0.0, None
    for ln in lines[1:]:
        tok = ln.split()
        if tok[0] == "tail":
            tail = (float(tok[1]), float(tok[2]))
        elif tok[0] == "plateau":
            plateau = float(tok[1])
        elif tok[0] == "bound":
            bound = float(tok[1])
        else:
            samples.append((float(tok[0]), float(tok[1])))
    if family in _EXACT_FAMILIES:
        return _exact_family(family, params)
    if not samples:
        raise CurveError("table YF1 file with no samples")
    arr = np.asarray(samples)
    return make_table(
        arr[:, 0], arr[:, 1], family="table",
        tail=tail if (tail is not None and np.isfinite(tail[0])) else (math.nan, math.nan),
        zero_plateau_bound=plateau, finite_domain_bound=bound,
    )
