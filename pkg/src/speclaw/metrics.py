"""Distances between spectral measures and against the semicircle law.

Kolmogorov (sup-CDF) and Wasserstein-1 distances are computed exactly:
sups are evaluated at atom breakpoints, never on grids, and the integral
against the semicircle CDF is done piecewise with closed-form
antiderivatives and bisection-located sign changes.  The bounded-Lipschitz
distance itself is never computed; callers get the computable sandwich
(the trace upper bound, and KS / W1 as surrogates from below).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import DenseSymMatrix, trace_of_squared_difference
from .spectra import (
    SpectralMeasure,
    eigvals_sym,
    semicircle_cdf,
    semicircle_cdf_antiderivative,
)

RANK_INEQ_SLACK = 1e-9


@dataclass(frozen=True)
class DistanceReport:
    """KS and W1 distances, plus the trace upper bound when a matrix pair
    (rather than a reference law) was compared."""

    ks: float
    w1: float
    bl_upper: float | None = None

    def to_json(self) -> str:
        parts = [f'"ks": {self.ks:.17g}', f'"w1": {self.w1:.17g}']
        if self.bl_upper is not None:
            parts.append(f'"bl_upper": {self.bl_upper:.17g}')
        return "{" + ", ".join(parts) + "}"


def ks_distance(a: SpectralMeasure, b: SpectralMeasure) -> float:
    """sup |F_a - F_b| over the union of atoms, checked at and just below
    every atom (where the sup of a difference of step CDFs is attained)."""
    atoms = np.union1d(a.values, b.values)
    fa_r = np.searchsorted(a.values, atoms, side="right") / a.n
    fb_r = np.searchsorted(b.values, atoms, side="right") / b.n
    fa_l = np.searchsorted(a.values, atoms, side="left") / a.n
    fb_l = np.searchsorted(b.values, atoms, side="left") / b.n
    return float(max(np.max(np.abs(fa_r - fb_r)), np.max(np.abs(fa_l - fb_l))))


def ks_to_semicircle(s: SpectralMeasure) -> float:
    """Exact sup |F_hat - F_sc|: at sorted atom i the empirical CDF jumps
    from (i-1)/n to i/n, so both sides are compared against F_sc there."""
    n = s.n
    f = semicircle_cdf(s.values)
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.max(np.maximum(np.abs(i / n - f), np.abs((i - 1.0) / n - f))))


def w1_equal_size(a: SpectralMeasure, b: SpectralMeasure) -> float:
    """Mean |a_(i) - b_(i)| over sorted atoms: the optimal coupling for
    equal-size empirical measures."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    return float(np.mean(np.abs(a.values - b.values)))


def _bisect_cdf_level(x_lo: np.ndarray, x_hi: np.ndarray, level: np.ndarray) -> np.ndarray:
    """Roots of F_sc(x) = level, bracketed by [x_lo, x_hi], to < 1e-10."""
    lo, hi = x_lo.copy(), x_hi.copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(mid) < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def w1_to_semicircle(s: SpectralMeasure) -> float:
    """Integral of |F_hat - F_sc| over an interval covering both supports.

    Between consecutive breakpoints (atoms and the support edges) the
    empirical CDF is constant at some k/n, so each piece reduces to
    integrating |k/n - F_sc| with at most one sign change, located by
    bisection; the F_sc integrals use the closed-form antiderivative.
    """
    atoms = s.values
    n = s.n
    lo = min(-2.0, float(atoms[0])) - 1.0
    hi = max(2.0, float(atoms[-1])) + 1.0
    bps = np.unique(np.concatenate((np.array([lo, -2.0, 2.0, hi]), atoms)))
    x0, x1 = bps[:-1], bps[1:]
    level = np.searchsorted(atoms, x0, side="right") / n
    f0 = semicircle_cdf(x0) - level
    f1 = semicircle_cdf(x1) - level
    g0 = semicircle_cdf_antiderivative(x0)
    g1 = semicircle_cdf_antiderivative(x1)

    crossing = (f0 * f1) < 0.0
    total = 0.0
    plain = ~crossing
    total += float(np.sum(np.abs(level[plain] * (x1[plain] - x0[plain])
                                 - (g1[plain] - g0[plain]))))
    if np.any(crossing):
        r = _bisect_cdf_level(x0[crossing], x1[crossing], level[crossing])
        gr = semicircle_cdf_antiderivative(r)
        lc = level[crossing]
        total += float(np.sum(np.abs(lc * (r - x0[crossing]) - (gr - g0[crossing]))))
        total += float(np.sum(np.abs(lc * (x1[crossing] - r) - (g1[crossing] - gr))))
    return total


def bl_upper_bound(a: DenseSymMatrix, b: DenseSymMatrix) -> float:
    """sqrt(tr((b - a)^2) / n): the trace bound on the bounded-Lipschitz
    distance between the two empirical spectral distributions."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    return float(np.sqrt(trace_of_squared_difference(a, b) / a.n))


def rank_inequality_check(a: DenseSymMatrix, b: DenseSymMatrix, r: int) -> bool:
    """True iff KS between the two spectra is <= rank(a - b)/n (+ slack),
    with the rank r supplied by the caller."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    d = ks_distance(eigvals_sym(a), eigvals_sym(b))
    return d <= r / a.n + RANK_INEQ_SLACK
