"""Eigenvalue spectra and the semicircle reference law.

The empirical spectral distribution (ESD) of an n x n symmetric matrix is
the uniform measure on its n eigenvalues; it is represented here as the
sorted eigenvalue vector.  The semicircle law on [-2, 2] is provided in
closed form (density, CDF, CDF antiderivative, quantiles) so that distance
computations downstream carry no interpolation error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrices import DENSE_CAP, DenseSymMatrix

SUPPORT = (-2.0, 2.0)


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Empirical spectral distribution: n atoms of mass 1/n each.

    ``values`` is sorted ascending; atom i carries mass 1/n.
    """

    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_values(cls, values) -> "SpectralMeasure":
        v = np.sort(np.asarray(values, dtype=np.float64))
        if v.size == 0:
            raise ValueError("a spectral measure needs at least one atom")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite eigenvalue in spectral measure")
        v.flags.writeable = False
        return cls(v)


def eigvals_sym(m: DenseSymMatrix) -> SpectralMeasure:
    """All eigenvalues of a dense symmetric matrix, sorted ascending.

    Backed by the LAPACK symmetric solver (tridiagonal reduction plus
    divide and conquer).  Accuracy contract, enforced by the test suite:
    |sum(lambda) - tr(m)| <= 1e-9 * n * ||m||_F and
    |sum(lambda^2) - tr(m^2)| <= 1e-8 * n * ||m||_F^2.
    """
    if m.n > DENSE_CAP:
        raise ValueError(f"n = {m.n} exceeds the dense eigensolve cap {DENSE_CAP}")
    if not np.all(np.isfinite(m.data)):
        raise ValueError("matrix has non-finite entries")
    return SpectralMeasure.from_values(np.linalg.eigvalsh(m.data))


def esd_cdf(s: SpectralMeasure, x: float):
    """Right-continuous empirical CDF: (number of atoms <= x) / n."""
    return np.searchsorted(s.values, x, side="right") / s.n


# ---------------------------------------------------------------------------
# Semicircle law on [-2, 2]


def semicircle_pdf(x):
    """Density sqrt(4 - x^2) / (2 pi) on [-2, 2], zero outside."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(x)
    inside = np.abs(x) <= 2.0
    xi = x[inside]
    out[inside] = np.sqrt(4.0 - xi * xi) / (2.0 * math.pi)
    return float(out[0]) if scalar else out


def semicircle_cdf(x):
    """Exact CDF: 1/2 + x sqrt(4 - x^2) / (4 pi) + arcsin(x/2) / pi."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(x)
    out[x <= -2.0] = 0.0
    out[x >= 2.0] = 1.0
    inside = (x > -2.0) & (x < 2.0)
    xi = x[inside]
    out[inside] = 0.5 + xi * np.sqrt(4.0 - xi * xi) / (4.0 * math.pi) + np.arcsin(xi / 2.0) / math.pi
    return float(out[0]) if scalar else out


def semicircle_cdf_antiderivative(x):
    """G with G' = semicircle_cdf and G(-2) = 0, in closed form.

    Used to integrate |empirical CDF - semicircle CDF| exactly piece by
    piece.  G(x) = 0 for x <= -2 and G(x) = x for x >= 2.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(x)
    out[x <= -2.0] = 0.0
    out[x >= 2.0] = x[x >= 2.0]
    inside = (x > -2.0) & (x < 2.0)
    xi = x[inside]
    root = np.sqrt(4.0 - xi * xi)
    out[inside] = (
        xi / 2.0
        - (4.0 - xi * xi) * root / (12.0 * math.pi)
        + (xi * np.arcsin(xi / 2.0) + root) / math.pi
    )
    return float(out[0]) if scalar else out


def semicircle_quantile(q):
    """Inverse CDF by bisection; |F(result) - q| <= ~3e-13."""
    scalar = np.ndim(q) == 0
    q = np.atleast_1d(np.asarray(q, dtype=np.float64))
    if np.any((q < 0.0) | (q > 1.0)):
        raise ValueError("quantile levels must lie in [0, 1]")
    lo = np.full_like(q, SUPPORT[0])
    hi = np.full_like(q, SUPPORT[1])
    # 52 halvings of [-2, 2]: bracket width 4 * 2^-52, density <= 1/pi,
    # so the CDF error is far below the 1e-10 contract
    for _ in range(52):
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    mid = 0.5 * (lo + hi)
    return float(mid[0]) if scalar else mid


def semicircle_sample_quantiles(n: int) -> np.ndarray:
    """Mid-quantile grid F^{-1}((i - 1/2) / n), i = 1..n; strictly increasing."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    targets = (np.arange(1, n + 1) - 0.5) / n
    return semicircle_quantile(targets)


def write_spectrum_csv(s: SpectralMeasure, path) -> None:
    """CSV dump 'index,eigenvalue' with 17-significant-digit values."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("index,eigenvalue\n")
        for i, v in enumerate(s.values):
            fh.write(f"{i},{v:.17g}\n")
