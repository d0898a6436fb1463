import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from oracles import charpoly_eigs
from speclaw.matrices import DenseSymMatrix, MatrixKind, ScaleShift, apply_scale_shift, build
from speclaw.models import ErSpec, replicate_stream, sample_er
from speclaw.spectra import (
    SpectralMeasure,
    eigvals_sym,
    esd_cdf,
    semicircle_cdf,
    semicircle_cdf_antiderivative,
    semicircle_pdf,
    semicircle_quantile,
    semicircle_sample_quantiles,
    write_spectrum_csv,
)

RNG = np.random.default_rng(20240)


def rand_sym(n, rng=RNG):
    a = rng.standard_normal((n, n))
    return DenseSymMatrix.from_lower(a + a.T)


def test_eigvals_examples():
    s = eigvals_sym(DenseSymMatrix.wrap(np.diag([3.0, 1.0, 2.0])))
    assert np.allclose(s.values, [1.0, 2.0, 3.0], atol=1e-14)
    k3 = sample_er(ErSpec(3, 1.0), replicate_stream(0))
    s = eigvals_sym(build(k3, MatrixKind.NORMALIZED_ADJACENCY))
    assert np.allclose(s.values, [-0.5, -0.5, 1.0], atol=1e-12)
    s = eigvals_sym(DenseSymMatrix.wrap(np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert np.allclose(s.values, [-1.0, 1.0], atol=1e-14)


def test_eigvals_rejects_non_finite():
    bad = np.eye(3)
    bad[1, 1] = np.nan
    with pytest.raises(ValueError):
        eigvals_sym(DenseSymMatrix.wrap(bad))


def test_eigensolve_accuracy_contract():
    rng = np.random.default_rng(64)
    for trial in range(64):
        n = int(rng.integers(2, 65))
        m = rand_sym(n, rng)
        s = eigvals_sym(m)
        fro = m.frobenius_norm()
        assert abs(float(np.sum(s.values)) - m.trace()) <= 1e-9 * n * fro
        tr2 = float(np.sum(m.data * m.data))
        assert abs(float(np.sum(s.values ** 2)) - tr2) <= 1e-8 * n * fro ** 2


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_eigvals_match_charpoly_oracle(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(50):
        m = rand_sym(n, rng)
        ours = eigvals_sym(m).values
        assert np.max(np.abs(ours - charpoly_eigs(m.data))) <= 1e-8


def test_scale_shift_covariance():
    rng = np.random.default_rng(5)
    for gamma, rho in ((2.5, 0.3), (-1.7, 0.4), (1.0, 0.0)):
        m = rand_sym(30, rng)
        base = eigvals_sym(m).values
        mapped = eigvals_sym(apply_scale_shift(m, ScaleShift(gamma, rho))).values
        expected = np.sort(gamma * base + rho)
        tol = 1e-9 * (1.0 + abs(gamma)) * m.frobenius_norm()
        assert np.max(np.abs(mapped - expected)) <= tol


def _pdf_quadrature(a: float, b: float) -> float:
    # x = 2 sin(t) removes the square-root endpoint singularities, making
    # adaptive quadrature rigorous well below the 1e-10 target
    f = lambda t: 4.0 * math.cos(t) ** 2 / (2.0 * math.pi)
    val, err = quad(f, math.asin(a / 2.0), math.asin(b / 2.0), epsabs=1e-13)
    assert err < 1e-10
    return val


def test_semicircle_cdf_values():
    assert semicircle_cdf(0.0) == 0.5
    assert semicircle_cdf(2.0) == 1.0
    assert semicircle_cdf(-2.0) == 0.0
    assert semicircle_cdf(-5.0) == 0.0
    assert semicircle_cdf(5.0) == 1.0
    # quadrature oracle for F(1), frozen value from the same oracle
    quad_val = _pdf_quadrature(-2.0, 1.0)
    assert semicircle_cdf(1.0) == pytest.approx(quad_val, abs=1e-9)
    assert semicircle_cdf(1.0) == pytest.approx(0.8044988905221147, abs=1e-12)


def test_semicircle_density_integrates_to_one():
    assert _pdf_quadrature(-2.0, 2.0) == pytest.approx(1.0, abs=1e-9)
    # direct integration of the density itself agrees too
    total, _ = quad(semicircle_pdf, -2.0, 2.0, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_semicircle_cdf_monotone_on_dense_grid():
    grid = np.linspace(-2.5, 2.5, 100_000)
    f = semicircle_cdf(grid)
    assert np.all(np.diff(f) >= 0.0)
    assert np.all((f >= 0.0) & (f <= 1.0))


def test_semicircle_antiderivative_matches_quadrature():
    for x in (-1.7, -0.3, 0.9, 1.999, 2.5):
        val, _ = quad(semicircle_cdf, -2.0, x, epsabs=1e-12, limit=200)
        assert semicircle_cdf_antiderivative(x) == pytest.approx(val, abs=1e-9)
    assert semicircle_cdf_antiderivative(-2.0) == 0.0
    assert semicircle_cdf_antiderivative(2.0) == pytest.approx(2.0, abs=1e-14)


def test_sample_quantiles():
    assert abs(semicircle_sample_quantiles(1)[0]) <= 1e-9
    q2 = semicircle_sample_quantiles(2)
    assert q2[0] == pytest.approx(-q2[1], abs=1e-12)
    assert semicircle_cdf(q2[1]) == pytest.approx(0.75, abs=1e-10)
    q4 = semicircle_sample_quantiles(4)
    assert np.allclose(q4, -q4[::-1], atol=1e-12)
    # independent root-finder oracle for the third quantile level 0.625
    oracle = brentq(lambda x: semicircle_cdf(x) - 0.625, -2.0, 2.0, xtol=1e-13)
    assert q4[2] == pytest.approx(oracle, abs=1e-9)


def test_sample_quantiles_grid_properties():
    n = 1000
    q = semicircle_sample_quantiles(n)
    assert np.all(np.diff(q) > 0.0)
    targets = (np.arange(1, n + 1) - 0.5) / n
    assert np.max(np.abs(semicircle_cdf(q) - targets)) <= 1e-10


def test_esd_cdf():
    s = SpectralMeasure.from_values([-1.0, 0.0, 1.0])
    assert esd_cdf(s, 0.0) == pytest.approx(2.0 / 3.0)
    assert esd_cdf(s, -5.0) == 0.0
    assert esd_cdf(s, 1.0) == 1.0  # right-continuous: the atom counts
    assert esd_cdf(s, 0.999) == pytest.approx(2.0 / 3.0)


def test_spectral_measure_sorts_and_validates():
    s = SpectralMeasure.from_values([3.0, -1.0, 2.0])
    assert s.values.tolist() == [-1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        SpectralMeasure.from_values([])
    with pytest.raises(ValueError):
        SpectralMeasure.from_values([np.inf, 0.0])


def test_spectrum_csv_roundtrip(tmp_path):
    s = SpectralMeasure.from_values([0.1, -0.25, 1.0 / 3.0])
    path = tmp_path / "spec.csv"
    write_spectrum_csv(s, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,eigenvalue"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == s.values.tolist()  # 17 significant digits round-trip
