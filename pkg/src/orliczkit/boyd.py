"""Upper growth-index estimation and the pointwise/integral growth conditions.

The index is inf over t in (0,1) of log t / log h(t), where h(t) is a limsup
of inverse ratios at infinity.  A limsup is not computable from finitely many
samples; h is estimated from per-decade maxima of the ratio over the last
three value decades, extrapolated linearly in 1/log s to kill the leading
drift of slowly varying factors, and flagged unstable when the decade maxima
disagree by more than 5%.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .young import MonotoneCurve, YoungFunction, conjugate, prefix_power_integral

__all__ = [
    "HUpperEstimate",
    "BoydEstimate",
    "GrowthConditionResult",
    "h_upper",
    "boyd_upper_index",
    "growth_condition",
]

_DECADES = 3
_POINTS_PER_DECADE = 16
_STABILITY_TOL = 0.05
_BOUNDARY_MARGIN = 0.05


@dataclass(frozen=True)
class HUpperEstimate:
    t: float
    value: float
    decade_maxima: tuple[float, ...]
    stable: bool


@dataclass(frozen=True)
class BoydEstimate:
    index: float
    stable: bool
    table: tuple[tuple[float, float], ...]  # (t, h) pairs
    notes: tuple[str, ...] = ()

    def verdict(self, threshold: float) -> str:
        """Answer 'index < threshold': pass / fail / boundary / indeterminate."""
        if not self.stable:
            return "indeterminate"
        if abs(self.index - threshold) < _BOUNDARY_MARGIN:
            return "boundary"
        return "pass" if self.index < threshold else "fail"

    def to_json(self) -> str:
        return json.dumps(
            {
                "index": self.index,
                "stable": self.stable,
                "table": [[t, h] for t, h in self.table],
                "notes": list(self.notes),
            },
            sort_keys=True,
        )


def _value_window(A: MonotoneCurve) -> np.ndarray:
    """Log grid over the last _DECADES decades of attained values."""
    if len(A.samples_v):
        v_hi = float(A.samples_v[-1])
    else:
        v_hi = 1e16
    return np.geomspace(v_hi / 10.0**_DECADES, v_hi, _DECADES * _POINTS_PER_DECADE + 1)


def h_upper(A: YoungFunction, t: float) -> HUpperEstimate:
    """Estimate of the inverse-ratio limsup at infinity for scale factor t."""
    if not (0.0 < t < 1.0):
        raise ValueError(f"t must lie in (0, 1), got {t}")
    s = _value_window(A)
    inv_s, _ = A._inverse_vec(s, "right")
    inv_st, _ = A._inverse_vec(s * t, "right")
    ratio = inv_st / inv_s
    per_decade = ratio.reshape(_DECADES, -1) if len(ratio) % _DECADES == 0 else None
    k = _POINTS_PER_DECADE
    maxima = tuple(float(np.max(ratio[i * k:(i + 1) * k + 1])) for i in range(_DECADES))
    stable = (max(maxima) - min(maxima)) <= _STABILITY_TOL * max(maxima)
    value = _extrapolate_decades(s, maxima)
    value = min(max(value, t), 1.0)
    return HUpperEstimate(t=t, value=value, decade_maxima=maxima, stable=stable)


def _extrapolate_decades(s: np.ndarray, maxima: tuple[float, ...]) -> float:
    """Linear fit of log(maxima) against 1/log(s-decade) at 1/log s -> 0.

    Pure powers have equal decade maxima and come back exactly; slowly
    varying factors drift like 1/log s and get their drift removed.  A
    non-monotone decade trend falls back to the plain maximum.
    """
    d = np.diff(maxima)
    if not (np.all(d >= -1e-12) or np.all(d <= 1e-12)):
        return float(max(maxima))
    mids = np.array([np.sqrt(s[0] * s[-1]) / 10.0 ** (_DECADES - 1 - i) for i in range(_DECADES)])
    x = 1.0 / np.log(mids)
    y = np.log(np.maximum(maxima, 1e-300))
    slope, intercept = np.polyfit(x, y, 1)
    est = float(np.exp(intercept))
    lo, hi = min(maxima), max(maxima)
    return float(np.clip(est, lo * 0.9, hi))


def boyd_upper_index(A: YoungFunction, t_points: int = 64) -> BoydEstimate:
    """Infimum over a geometric t-grid of log t / log h(t)."""
    t_grid = np.geomspace(1e-3, 1.0, t_points + 2)[1:-1]
    table = []
    candidates = []
    unstable = 0
    for t in t_grid:
        est = h_upper(A, float(t))
        table.append((float(t), est.value))
        if est.value >= 1.0 - 1e-12:
            continue
        cand = math.log(t) / math.log(est.value)
        if est.stable:
            candidates.append(cand)
        else:
            unstable += 1
    notes = []
    if not candidates:
        return BoydEstimate(index=math.nan, stable=False, table=tuple(table),
                            notes=("all h estimates unstable",))
    index = float(min(candidates))
    stable = unstable < len(t_grid) // 2
    if unstable:
        notes.append(f"{unstable} of {len(t_grid)} h estimates unstable")
    return BoydEstimate(index=index, stable=stable, table=tuple(table), notes=tuple(notes))


@dataclass(frozen=True)
class GrowthConditionResult:
    variant: str
    passed: bool
    constant: float | None  # sigma for iii, k for ii
    c: float | None  # the (0,1) factor for iii
    witness_lo: float
    witness_hi: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "variant": self.variant,
                "pass": self.passed,
                "constant": self.constant,
                "c": self.c,
                "witness": [self.witness_lo, self.witness_hi],
            },
            sort_keys=True,
        )


def _tail_samples(A: YoungFunction) -> np.ndarray:
    s = A.samples_s
    if not len(s):
        return np.geomspace(1e5, 1e8, 64)
    return s[s >= s[-1] / 10.0**_DECADES]


def growth_condition(A: YoungFunction, alpha: float, variant: str) -> GrowthConditionResult:
    """Near-infinity growth conditions at a given alpha in (0, 1).

    Variant iii: A(sigma t) <= c sigma**(1/alpha) A(t) for some sigma > 1,
    c in (0, 1), at all tail samples.  Variant ii: the prefix integral of
    conj(A)(s)/s**(1/(1-alpha)+1) from 1 is bounded by conj(A)(k t)/t**(1/(1-alpha)).
    Failure is a legitimate verdict, not an error.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if variant not in ("ii", "iii"):
        raise ValueError("variant must be 'ii' or 'iii'")
    t = _tail_samples(A)

    if variant == "iii":
        power = 1.0 / alpha
        vt = A(t)
        for sigma in (2.0, 4.0, 8.0, 16.0):
            with np.errstate(over="ignore"):
                ratio = A(sigma * t) / (sigma**power * vt)
            if not np.all(np.isfinite(ratio)):
                continue
            c = float(np.max(ratio))
            if c < 1.0 - 1.0 / 1024.0:
                return GrowthConditionResult("iii", True, sigma, c, float(t[0]), float(t[-1]))
        return GrowthConditionResult("iii", False, None, None, float(t[0]), float(t[-1]))

    beta = 1.0 / (1.0 - alpha)
    At = conjugate(A)
    grid = At.samples_s[At.samples_s >= 1.0]
    if len(grid) < 8:
        return GrowthConditionResult("ii", False, None, None, float(t[0]), float(t[-1]))
    g = At(grid) / grid ** (1.0 + beta)
    psi = prefix_power_integral(grid, np.maximum(g, 1e-300), include_head=False)
    tail = grid >= grid[-1] / 10.0**_DECADES
    tg, tp = grid[tail], psi[tail]
    if np.all(tp <= 0):
        return GrowthConditionResult("ii", True, 2.0, None, float(tg[0]), float(tg[-1]))
    # the inequality is asymptotic: a large k can cheat on any finite window,
    # so the left side must not outgrow the right side in log-log slope
    slope_lhs = float(np.polyfit(np.log(tg), np.log(np.maximum(tp, 1e-300)), 1)[0])
    rhs1 = At(tg) / tg**beta
    slope_rhs = float(np.polyfit(np.log(tg), np.log(np.maximum(rhs1, 1e-300)), 1)[0])
    if slope_lhs > slope_rhs + 0.02:
        return GrowthConditionResult("ii", False, None, None, float(tg[0]), float(tg[-1]))
    for k in (2.0**j for j in range(1, 11)):
        rhs = At(np.minimum(k * tg, 1e300)) / tg**beta
        if np.all(tp <= rhs * (1 + 1e-9)):
            return GrowthConditionResult("ii", True, float(k), None, float(tg[0]), float(tg[-1]))
    return GrowthConditionResult("ii", False, None, None, float(tg[0]), float(tg[-1]))
