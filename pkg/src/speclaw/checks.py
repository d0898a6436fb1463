"""Deterministic self-check suites behind the `check` CLI subcommand.

Each suite runs a batch of exact or tightly-toleranced identities; the
report carries per-suite counts and the first violated invariant aborts
with its name.
"""
from __future__ import annotations

import numpy as np

from .matrices import DenseSymMatrix, MatrixKind, build, trace_of_squared_difference
from .metrics import bl_upper_bound, rank_inequality_check, w1_equal_size
from .models import ChungLuSpec, ErSpec, GraphSample, Provenance, ramp_weights, replicate_stream, sample_chung_lu, sample_er
from .spectra import eigvals_sym
from .stats import trace_stat_chung_lu, trace_stat_er

CHECK_SEED = 0x5EED5
FAULTS = ("dbl-sign",)


class CheckFailure(AssertionError):
    pass


def run_checks(fault: str | None = None) -> tuple[bool, list[str]]:
    """Run all suites; returns (all_passed, report_lines)."""
    suites = (
        ("closed-form-spectra", _suite_closed_form),
        ("dbl-chain", lambda: _suite_dbl_chain(fault)),
        ("rank-inequality", _suite_rank_inequality),
        ("edge-sum-vs-matrix", _suite_edge_sum),
        ("eigensolve-contract", _suite_eigensolve_contract),
    )
    lines = []
    ok = True
    for name, fn in suites:
        try:
            count = fn()
            lines.append(f"suite {name}: {count}/{count} ok")
        except CheckFailure as exc:
            lines.append(f"suite {name}: FAILED: {exc}")
            ok = False
            break
    lines.append("CHECK " + ("PASS" if ok else "FAIL") + f" ({len(suites)} suites)")
    return ok, lines


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise CheckFailure(message)


def _complete_graph(n: int) -> GraphSample:
    edges = np.array([(i, j) for i in range(n) for j in range(i + 1, n)], dtype=np.int64)
    return GraphSample.from_edges(n, edges, Provenance(master_seed=0))


def _suite_closed_form() -> int:
    count = 0
    # complete graphs: normalized adjacency spectrum {1, -1/(n-1) x (n-1)}
    for n in range(3, 9):
        s = eigvals_sym(build(_complete_graph(n), MatrixKind.NORMALIZED_ADJACENCY))
        expect = np.array([-1.0 / (n - 1)] * (n - 1) + [1.0])
        _require(np.max(np.abs(s.values - expect)) <= 1e-12,
                 f"K_{n} normalized adjacency spectrum off")
        count += 1
    # single edge plus isolated vertex: pseudoinverse convention
    g = GraphSample.from_edges(3, np.array([[0, 1]]), Provenance(master_seed=0))
    s = eigvals_sym(build(g, MatrixKind.NORMALIZED_ADJACENCY))
    _require(np.max(np.abs(s.values - np.array([-1.0, 0.0, 1.0]))) <= 1e-12,
             "single-edge pseudoinverse spectrum off")
    count += 1
    # diagonal and 2x2 exchange matrices
    s = eigvals_sym(DenseSymMatrix.wrap(np.diag([3.0, 1.0, 2.0])))
    _require(np.allclose(s.values, [1.0, 2.0, 3.0], atol=1e-14), "diagonal spectrum off")
    count += 1
    s = eigvals_sym(DenseSymMatrix.wrap(np.array([[0.0, 1.0], [1.0, 0.0]])))
    _require(np.allclose(s.values, [-1.0, 1.0], atol=1e-14), "exchange spectrum off")
    count += 1
    return count


def _random_sym_pair(rng: np.random.Generator) -> tuple[DenseSymMatrix, DenseSymMatrix]:
    n = int(rng.integers(5, 51))
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    return DenseSymMatrix.from_lower(a + a.T), DenseSymMatrix.from_lower(b + b.T)


def _suite_dbl_chain(fault: str | None = None) -> int:
    rng = replicate_stream(CHECK_SEED, 1)
    for trial in range(1000):
        a, b = _random_sym_pair(rng)
        sa, sb = eigvals_sym(a), eigvals_sym(b)
        w1 = w1_equal_size(sa, sb)
        rms = float(np.sqrt(np.mean((sa.values - sb.values) ** 2)))
        bl = bl_upper_bound(a, b)
        if fault == "dbl-sign":
            bl = -bl  # deliberate sign corruption for mutation sanity checks
        _require(w1 <= rms + 1e-9, f"trial {trial}: W1 > rms eigenvalue gap ({w1} > {rms})")
        _require(rms <= bl + 1e-9, f"trial {trial}: rms gap > trace bound ({rms} > {bl})")
    return 1000


def _suite_rank_inequality() -> int:
    n = 200
    spec = ChungLuSpec(ramp_weights(n, 15.0, 45.0))
    for rep in range(100):
        g = sample_chung_lu(spec, replicate_stream(CHECK_SEED, 2, rep))
        tilde = build(g, MatrixKind.WEIGHT_NORMALIZED, spec)
        centered = build(g, MatrixKind.CENTERED_C, spec)
        _require(rank_inequality_check(tilde, centered, 1),
                 f"replicate {rep}: KS between weight-normalized and centered "
                 f"spectra exceeds 1/n")
    return 100


def _suite_edge_sum() -> int:
    rng = replicate_stream(CHECK_SEED, 3)
    count = 0
    for trial in range(100):
        n = int(rng.integers(20, 101))
        p = float(rng.uniform(0.02, 0.6))
        g = sample_er(ErSpec(n, p), replicate_stream(CHECK_SEED, 4, trial))
        t = trace_stat_er(g, p).t_value
        spec_er = ErSpec(n, p)
        m = trace_of_squared_difference(
            build(g, MatrixKind.PROXY_TILDE_L, spec_er),
            build(g, MatrixKind.NORMALIZED_LAPLACIAN),
        ) / n
        _require(abs(t - m) <= 1e-12 * (1.0 + t),
                 f"er trial {trial}: edge sum {t} vs matrix trace {m}")
        count += 1
    for trial in range(100):
        n = int(rng.integers(20, 101))
        # keep max(w)^2 < sum(w) even at n = 20
        w_lo = float(rng.uniform(1.0, 2.5))
        spec = ChungLuSpec(ramp_weights(n, w_lo, 3.0 * w_lo))
        g = sample_chung_lu(spec, replicate_stream(CHECK_SEED, 5, trial))
        t = trace_stat_chung_lu(g, spec).t_value
        m = trace_of_squared_difference(
            build(g, MatrixKind.WEIGHT_NORMALIZED, spec),
            build(g, MatrixKind.NORMALIZED_ADJACENCY),
        ) / n
        _require(abs(t - m) <= 1e-12 * (1.0 + t),
                 f"chung-lu trial {trial}: edge sum {t} vs matrix trace {m}")
        count += 1
    return count


def _suite_eigensolve_contract() -> int:
    rng = replicate_stream(CHECK_SEED, 6)
    for trial in range(64):
        n = int(rng.integers(2, 65))
        a = rng.standard_normal((n, n))
        m = DenseSymMatrix.from_lower(a + a.T)
        s = eigvals_sym(m)
        fro = m.frobenius_norm()
        _require(abs(float(np.sum(s.values)) - m.trace()) <= 1e-9 * n * fro,
                 f"trial {trial}: eigenvalue sum misses the trace")
        tr2 = float(np.sum(m.data * m.data))
        _require(abs(float(np.sum(s.values**2)) - tr2) <= 1e-8 * n * fro**2,
                 f"trial {trial}: eigenvalue square sum misses tr(m^2)")
    return 64
