"""Per-replicate trace statistics, degree events, and Monte-Carlo aggregation.

The central quantity is t = (1/n) tr((proxy - target)^2) for the configured
matrix pair, computed edge by edge in O(|E|) without materializing either
matrix.  Degree-concentration events are counted alongside: an edge fails
the local event when an endpoint degree leaves [u/2, 3u/2] (closed), the
global typical event fails when any vertex degree leaves (u/2, 3u/2)
(open; boundary conventions differ deliberately).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as _beta_dist

from .matrices import pseudo_inv_sqrt_degrees
from .metrics import DistanceReport
from .models import ChungLuSpec, GraphSample

Z95 = 1.959963984540054  # two-sided 95% normal quantile
CP_COUNT_THRESHOLD = 5  # below this, use exact binomial intervals


@dataclass(frozen=True)
class TraceStat:
    """One realization of the trace statistic with its event decomposition."""

    t_value: float
    u_n: float
    e1_fail_count: int
    gamma_fail: int
    isolated_count: int


def event_counters(g: GraphSample, u_n: float) -> tuple[int, int, int]:
    """(edges with an endpoint degree outside [u/2, 3u/2],
    1 if any degree leaves the open interval (u/2, 3u/2), isolated count)."""
    if not u_n > 0.0:
        raise ValueError(f"need u_n > 0, got {u_n}")
    d = g.degrees
    lo, hi = u_n / 2.0, 1.5 * u_n
    inside_closed = (d >= lo) & (d <= hi)
    if g.edge_count:
        i, j = g.edges[:, 0], g.edges[:, 1]
        e1_fail = int(np.count_nonzero(~(inside_closed[i] & inside_closed[j])))
    else:
        e1_fail = 0
    gamma_fail = int(not bool(np.all((d > lo) & (d < hi))))
    isolated = int(np.count_nonzero(d == 0))
    return e1_fail, gamma_fail, isolated


def trace_stat_er(g: GraphSample, p: float) -> TraceStat:
    """Trace statistic for the pair (I - A/u, normalized Laplacian).

    t = (2/n) * sum over edges of (1/u - 1/sqrt(d_i d_j))^2 with
    u = (n-1) p.  Edge endpoints always have degree >= 1, so the
    pseudoinverse convention never contributes a zero on an edge.
    """
    if p <= 0.0:
        raise ValueError(f"need p > 0 for the proxy comparison, got p={p}")
    u_n = (g.n - 1) * p
    v = pseudo_inv_sqrt_degrees(g)
    if g.edge_count:
        inv_u = 1.0 / u_n
        diffs = inv_u - v[g.edges[:, 0]] * v[g.edges[:, 1]]
        t = 2.0 * float(np.sum(diffs * diffs)) / g.n
    else:
        t = 0.0
    e1, gamma, iso = event_counters(g, u_n)
    return TraceStat(t_value=t, u_n=u_n, e1_fail_count=e1, gamma_fail=gamma,
                     isolated_count=iso)


def trace_stat_chung_lu(g: GraphSample, spec: ChungLuSpec) -> TraceStat:
    """Trace statistic for the pair (weight-normalized, degree-normalized
    adjacency); the event scale is the mean weight."""
    spec.validate()
    if spec.n != g.n:
        raise ValueError(f"spec n={spec.n} does not match sample n={g.n}")
    v = pseudo_inv_sqrt_degrees(g)
    iw = 1.0 / np.sqrt(spec.weights)
    if g.edge_count:
        i, j = g.edges[:, 0], g.edges[:, 1]
        diffs = iw[i] * iw[j] - v[i] * v[j]
        t = 2.0 * float(np.sum(diffs * diffs)) / g.n
    else:
        t = 0.0
    w_bar = spec.w_bar
    e1, gamma, iso = event_counters(g, w_bar)
    return TraceStat(t_value=t, u_n=w_bar, e1_fail_count=e1, gamma_fail=gamma,
                     isolated_count=iso)


def clopper_pearson(count: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    """Exact binomial confidence interval for an event probability."""
    if trials < 1:
        raise ValueError("need at least one trial")
    lo = 0.0 if count == 0 else float(_beta_dist.ppf(alpha / 2.0, count, trials - count + 1))
    hi = 1.0 if count == trials else float(_beta_dist.ppf(1.0 - alpha / 2.0, count + 1, trials - count))
    return lo, hi


def _event_interval(count: int, trials: int) -> tuple[float, float]:
    p_hat = count / trials
    if count < CP_COUNT_THRESHOLD or trials - count < CP_COUNT_THRESHOLD:
        return clopper_pearson(count, trials)
    half = Z95 * math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return max(0.0, p_hat - half), min(1.0, p_hat + half)


@dataclass(frozen=True)
class CellSummary:
    """Aggregated Monte-Carlo results for one sweep cell."""

    n: int
    schedule: str
    p: float  # nan for Chung-Lu cells
    u_n: float
    replicates: int
    mean_t: float
    var_t: float
    ci_lo_t: float
    ci_hi_t: float
    mean_ks: float
    ci_lo_ks: float
    ci_hi_ks: float
    mean_w1: float
    gamma_fail_count: int
    p_gamma_fail: float
    gamma_ci: tuple[float, float]
    chernoff_bound: float
    isolated_exists_count: int
    p_isolated: float
    isolated_ci: tuple[float, float]
    seed: int
    w_min: float = math.nan  # Chung-Lu cells only


def _mean_ci(values: np.ndarray) -> tuple[float, float, float, float]:
    r = values.size
    mean = float(np.mean(values))
    if r >= 2:
        var = float(np.var(values, ddof=1))
        half = Z95 * math.sqrt(var / r)
        return mean, var, mean - half, mean + half
    return mean, math.nan, mean, mean


def aggregate(trace_stats: list[TraceStat],
              reports: list[DistanceReport] | None = None, *,
              n: int, schedule: str, p: float, u_n: float, seed: int,
              w_min: float = math.nan) -> CellSummary:
    """Fold replicate results into a CellSummary (95% normal CIs for means,
    exact binomial intervals for rare event probabilities)."""
    if not trace_stats:
        raise ValueError("cannot aggregate an empty replicate list")
    r = len(trace_stats)
    t = np.array([ts.t_value for ts in trace_stats])
    mean_t, var_t, lo_t, hi_t = _mean_ci(t)

    if reports:
        if len(reports) != r:
            raise ValueError("distance report count does not match replicate count")
        ks = np.array([d.ks for d in reports])
        w1 = np.array([d.w1 for d in reports])
        mean_ks, _, lo_ks, hi_ks = _mean_ci(ks)
        mean_w1 = float(np.mean(w1))
    else:
        mean_ks = lo_ks = hi_ks = mean_w1 = math.nan

    gamma_count = sum(ts.gamma_fail for ts in trace_stats)
    iso_count = sum(1 for ts in trace_stats if ts.isolated_count > 0)
    return CellSummary(
        n=n, schedule=schedule, p=p, u_n=u_n, replicates=r,
        mean_t=mean_t, var_t=var_t, ci_lo_t=lo_t, ci_hi_t=hi_t,
        mean_ks=mean_ks, ci_lo_ks=lo_ks, ci_hi_ks=hi_ks, mean_w1=mean_w1,
        gamma_fail_count=gamma_count, p_gamma_fail=gamma_count / r,
        gamma_ci=_event_interval(gamma_count, r),
        chernoff_bound=2.0 * n * math.exp(-u_n / 12.0),
        isolated_exists_count=iso_count, p_isolated=iso_count / r,
        isolated_ci=_event_interval(iso_count, r),
        seed=seed, w_min=w_min,
    )


CSV_COLUMNS = (
    "n", "schedule", "p", "u_n", "R", "mean_t", "ci_lo_t", "ci_hi_t",
    "mean_ks", "ci_lo_ks", "ci_hi_ks", "mean_w1", "p_gamma_fail",
    "chernoff_bound", "p_isolated", "seed",
)


def csv_row(cell: CellSummary) -> list[str]:
    def f(x: float) -> str:
        return f"{x:.17g}"

    return [
        str(cell.n), cell.schedule, f(cell.p), f(cell.u_n), str(cell.replicates),
        f(cell.mean_t), f(cell.ci_lo_t), f(cell.ci_hi_t),
        f(cell.mean_ks), f(cell.ci_lo_ks), f(cell.ci_hi_ks), f(cell.mean_w1),
        f(cell.p_gamma_fail), f(cell.chernoff_bound), f(cell.p_isolated),
        str(cell.seed),
    ]


@dataclass(frozen=True)
class SlopeFit:
    """Ordinary least squares on log-log axes."""

    slope: float
    intercept: float
    r_squared: float
    stderr_slope: float
    points: int

    def to_json(self) -> str:
        return (
            "{"
            f'"slope": {self.slope:.17g}, '
            f'"intercept": {self.intercept:.17g}, '
            f'"r_squared": {self.r_squared:.17g}, '
            f'"stderr_slope": {self.stderr_slope:.17g}, '
            f'"points": {self.points}'
            "}"
        )


def _ols(x: np.ndarray, y: np.ndarray) -> SlopeFit:
    k = x.size
    xb, yb = x.mean(), y.mean()
    sxx = float(np.sum((x - xb) ** 2))
    if sxx == 0.0:
        raise ValueError("degenerate fit: all x values identical")
    sxy = float(np.sum((x - xb) * (y - yb)))
    slope = sxy / sxx
    intercept = yb - slope * xb
    resid = y - (intercept + slope * x)
    sse = float(np.sum(resid**2))
    syy = float(np.sum((y - yb) ** 2))
    r2 = 1.0 if syy == 0.0 else min(1.0, max(0.0, 1.0 - sse / syy))
    stderr = math.sqrt(sse / (k - 2) / sxx) if k > 2 else math.nan
    return SlopeFit(slope=slope, intercept=intercept, r_squared=r2,
                    stderr_slope=stderr, points=k)


FIT_MODES = ("lemma1", "chunglu-key")


def fit_decay(cells: list[CellSummary], mode: str = "lemma1") -> SlopeFit:
    """Decay-exponent fit across sweep cells.

    lemma1:      log(mean_t)       against log(u_n)
    chunglu-key: log(u_n * mean_t) against log(w_min), with u_n the mean
                 weight of the cell
    """
    if mode not in FIT_MODES:
        raise ValueError(f"unknown fit mode {mode!r}")
    if len(cells) < 3:
        raise ValueError(f"need at least 3 cells to fit a slope, got {len(cells)}")
    for c in cells:
        if not c.mean_t > 0.0:
            raise ValueError(
                f"cell (n={c.n}, schedule={c.schedule}) has nonpositive mean_t={c.mean_t}"
            )
    if mode == "lemma1":
        x = np.log([c.u_n for c in cells])
        y = np.log([c.mean_t for c in cells])
    else:
        for c in cells:
            if not (math.isfinite(c.w_min) and c.w_min > 0.0):
                raise ValueError(
                    f"cell (n={c.n}, schedule={c.schedule}) lacks a positive w_min"
                )
        x = np.log([c.w_min for c in cells])
        y = np.log([c.u_n * c.mean_t for c in cells])
    return _ols(x, y)
