"""Dense symmetric matrices derived from a graph sample.

Covers the adjacency matrix, both Laplacians, the degree- and
weight-normalized adjacencies, the deterministic-degree proxy I - A/u,
the rank-one expected-degree matrix and its centered complement, and the
affine rescalings under which the spectra approach the semicircle law.
Zero-degree vertices are handled with the pseudoinverse convention:
1/sqrt(d) is taken to be 0 when d = 0, so every builder is total on
graphs with isolated vertices.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .models import ChungLuSpec, ErSpec, GraphSample

# Full-spectrum eigensolves are the downstream consumer; refuse to
# materialize anything too large to solve at desk scale.
DENSE_CAP = 8192


class ConfigurationError(ValueError):
    """Matrix kind and model context do not match."""


class MatrixKind(enum.Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    NORMALIZED_LAPLACIAN = "normalized-laplacian"
    NORMALIZED_ADJACENCY = "normalized-adjacency"
    PROXY_TILDE_L = "proxy-tilde-l"
    WEIGHT_NORMALIZED = "weight-normalized"
    CENTERED_C = "centered-c"
    RANK_ONE_RW = "rank-one-rw"
    THEOREM_SCALED = "theorem-scaled"


# Kinds that need the ER edge probability / the Chung-Lu weight vector.
ER_CONTEXT_KINDS = frozenset({MatrixKind.PROXY_TILDE_L, MatrixKind.THEOREM_SCALED})
CL_CONTEXT_KINDS = frozenset(
    {MatrixKind.WEIGHT_NORMALIZED, MatrixKind.CENTERED_C, MatrixKind.RANK_ONE_RW}
)


@dataclass(frozen=True, eq=False)
class DenseSymMatrix:
    """Immutable dense symmetric matrix (float64, exact m[i,j] == m[j,i])."""

    data: np.ndarray

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    @classmethod
    def wrap(cls, data: np.ndarray) -> "DenseSymMatrix":
        """Wrap an array built symmetrically; freezes it against mutation."""
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {data.shape}")
        data.flags.writeable = False
        return cls(data)

    @classmethod
    def from_lower(cls, data: np.ndarray) -> "DenseSymMatrix":
        """Mirror the lower triangle onto the upper one, guaranteeing symmetry."""
        a = np.array(data, dtype=np.float64)
        il, ju = np.tril_indices(a.shape[0], k=-1)
        a[ju, il] = a[il, ju]
        return cls.wrap(a)

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.data * self.data)))

    def trace(self) -> float:
        return float(np.trace(self.data))


@dataclass(frozen=True)
class ScaleShift:
    """Affine spectral map m -> gamma * m + rho * I."""

    gamma: float
    rho: float

    @classmethod
    def theorem_er(cls, n: int, p: float) -> "ScaleShift":
        """(gamma, rho) = (-s, s) with s = sqrt(n p / (1-p)); maps the
        normalized Laplacian to the matrix whose spectrum is semicircular."""
        s = math.sqrt(n * p / (1.0 - p))
        return cls(gamma=-s, rho=s)

    @classmethod
    def theorem_cl(cls, w_bar: float) -> "ScaleShift":
        s = math.sqrt(w_bar)
        return cls(gamma=-s, rho=s)


def pseudo_inv_sqrt_degrees(g: GraphSample | np.ndarray) -> np.ndarray:
    """d_i^(-1/2) per vertex, with 0 for isolated vertices.

    Accepts a graph sample or a bare degree vector.
    """
    degrees = g.degrees if isinstance(g, GraphSample) else np.asarray(g)
    v = np.zeros(degrees.size, dtype=np.float64)
    nz = degrees > 0
    v[nz] = 1.0 / np.sqrt(degrees[nz].astype(np.float64))
    return v


def _check_cap(n: int) -> None:
    if n > DENSE_CAP:
        raise ValueError(
            f"n = {n} exceeds the dense materialization cap {DENSE_CAP}; "
            f"use a smaller n"
        )


def _edge_symmetric(n: int, edges: np.ndarray, values: np.ndarray,
                    diag: np.ndarray | float = 0.0) -> np.ndarray:
    """Assemble a symmetric matrix from per-edge off-diagonal values."""
    a = np.zeros((n, n), dtype=np.float64)
    if edges.size:
        i, j = edges[:, 0], edges[:, 1]
        a[i, j] = values
        a[j, i] = values
    if np.ndim(diag) or diag != 0.0:
        np.fill_diagonal(a, diag)
    return a


def build(g: GraphSample, kind: MatrixKind,
          ctx: ErSpec | ChungLuSpec | None = None) -> DenseSymMatrix:
    """Construct the requested matrix for a graph sample.

    ``ctx`` supplies the model context: an :class:`ErSpec` for the proxy
    and semicircle-scaled kinds (the edge probability enters directly),
    a :class:`ChungLuSpec` for the weight-normalized family.  Purely
    graph-determined kinds take no context.
    """
    _check_cap(g.n)
    n, edges = g.n, g.edges
    ones = np.ones(edges.shape[0], dtype=np.float64)

    if kind in ER_CONTEXT_KINDS:
        if not isinstance(ctx, ErSpec):
            raise ConfigurationError(f"{kind.value} requires an ErSpec context")
        if ctx.n != n:
            raise ConfigurationError(f"context n={ctx.n} does not match sample n={n}")
    elif kind in CL_CONTEXT_KINDS:
        if not isinstance(ctx, ChungLuSpec):
            raise ConfigurationError(f"{kind.value} requires a ChungLuSpec context")
        if ctx.n != n:
            raise ConfigurationError(f"context n={ctx.n} does not match sample n={n}")

    if kind is MatrixKind.ADJACENCY:
        return DenseSymMatrix.wrap(_edge_symmetric(n, edges, ones))

    if kind is MatrixKind.LAPLACIAN:
        return DenseSymMatrix.wrap(
            _edge_symmetric(n, edges, -ones, diag=g.degrees.astype(np.float64))
        )

    if kind is MatrixKind.NORMALIZED_ADJACENCY:
        v = pseudo_inv_sqrt_degrees(g)
        vals = v[edges[:, 0]] * v[edges[:, 1]] if edges.size else ones
        return DenseSymMatrix.wrap(_edge_symmetric(n, edges, vals))

    if kind is MatrixKind.NORMALIZED_LAPLACIAN:
        v = pseudo_inv_sqrt_degrees(g)
        vals = -(v[edges[:, 0]] * v[edges[:, 1]]) if edges.size else ones
        return DenseSymMatrix.wrap(_edge_symmetric(n, edges, vals, diag=1.0))

    if kind is MatrixKind.PROXY_TILDE_L:
        u_n = ctx.u_n
        if not u_n > 0.0:
            raise ConfigurationError(f"proxy needs u_n = (n-1)p > 0, got {u_n}")
        inv_u = 1.0 / u_n
        return DenseSymMatrix.wrap(_edge_symmetric(n, edges, -inv_u * ones, diag=1.0))

    if kind is MatrixKind.THEOREM_SCALED:
        if not (0.0 <= ctx.p < 1.0):
            raise ConfigurationError(f"semicircle scaling needs p in [0, 1), got {ctx.p}")
        scale = math.sqrt(n * ctx.p / (1.0 - ctx.p))
        v = pseudo_inv_sqrt_degrees(g)
        vals = scale * (v[edges[:, 0]] * v[edges[:, 1]]) if edges.size else ones
        return DenseSymMatrix.wrap(_edge_symmetric(n, edges, vals))

    if kind is MatrixKind.WEIGHT_NORMALIZED:
        iw = 1.0 / np.sqrt(ctx.weights)
        vals = iw[edges[:, 0]] * iw[edges[:, 1]] if edges.size else ones
        return DenseSymMatrix.wrap(_edge_symmetric(n, edges, vals))

    if kind is MatrixKind.RANK_ONE_RW:
        s = np.sqrt(ctx.weights * ctx.phi)
        return DenseSymMatrix.wrap(np.outer(s, s))

    if kind is MatrixKind.CENTERED_C:
        tilde = build(g, MatrixKind.WEIGHT_NORMALIZED, ctx)
        rank_one = build(g, MatrixKind.RANK_ONE_RW, ctx)
        return DenseSymMatrix.wrap(tilde.data - rank_one.data)

    raise ConfigurationError(f"unknown matrix kind {kind!r}")


def apply_scale_shift(m: DenseSymMatrix, s: ScaleShift) -> DenseSymMatrix:
    """gamma * m + rho * I; eigenvalues map to gamma * lambda + rho."""
    out = s.gamma * m.data
    idx = np.arange(m.n)
    out[idx, idx] += s.rho
    return DenseSymMatrix.wrap(out)


def trace_of_squared_difference(a: DenseSymMatrix, b: DenseSymMatrix) -> float:
    """tr((b - a)^2) = sum of squared entry differences; no eigensolve."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    d = b.data - a.data
    return float(np.sum(d * d))


def write_triplets(m: DenseSymMatrix, path) -> None:
    """Dump the lower triangle as 'i j value' lines for external cross-checks."""
    with open(path, "w", encoding="ascii") as fh:
        for i in range(m.n):
            row = m.data[i]
            for j in range(i + 1):
                fh.write(f"{i} {j} {row[j]:.17g}\n")
