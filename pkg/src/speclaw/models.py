"""Seeded samplers for Erdős–Rényi and Chung–Lu random graphs.

Everything downstream (matrix builders, trace statistics, sweeps) consumes
the :class:`GraphSample` produced here.  Sampling is reproducible by
construction: every replicate draws from a counter-based Philox stream
derived statelessly from ``(master_seed, cell_id, replicate_index)``, so
results do not depend on scheduling or worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SEED_MASK = (1 << 64) - 1

# Edge probability below which pair-by-pair Bernoulli draws are replaced
# by geometric skipping over the C(n,2) pair sequence.
SPARSE_SAMPLING_THRESHOLD = 0.1

EDGELIST_MAGIC = "# speclaw-edgelist v1"


class ValidationError(ValueError):
    """Model parameters violate their invariants."""


class ScheduleRangeError(ValidationError):
    """A schedule evaluated to a probability outside (0, 1)."""


def replicate_stream(master_seed: int, cell_id: int = 0, replicate_index: int = 0) -> np.random.Generator:
    """Counter-based RNG stream for one replicate.

    The stream is a pure function of the three indices, so replicate tasks
    may execute in any order on any number of workers and still draw
    identical variates.
    """
    entropy = [int(master_seed) & _SEED_MASK, int(cell_id), int(replicate_index)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=entropy)))


@dataclass(frozen=True)
class Provenance:
    """Where a sample came from: seed triple plus an optional profile note."""

    master_seed: int
    cell_id: int = 0
    replicate_index: int = 0
    profile: str | None = None

    def seed_label(self) -> str:
        return f"{self.master_seed}:{self.cell_id}:{self.replicate_index}"


@dataclass(frozen=True, eq=False)
class ErSpec:
    """G(n, p): each of the C(n,2) vertex pairs is an edge with probability p."""

    n: int
    p: float

    def validate(self) -> None:
        if self.n < 1:
            raise ValidationError(f"vertex count must be >= 1, got {self.n}")
        if not (0.0 <= self.p <= 1.0) or not math.isfinite(self.p):
            raise ValidationError(f"edge probability must lie in [0, 1], got {self.p}")

    @property
    def u_n(self) -> float:
        """Expected degree scale (n - 1) * p."""
        return (self.n - 1) * self.p


@dataclass(frozen=True, eq=False)
class ChungLuSpec:
    """Inhomogeneous random graph with edge probabilities w_i * w_j * phi.

    ``weights`` prescribes the expected degrees; ``phi`` is the normalizer
    1 / sum(weights).  Validity requires max(w)^2 < sum(w) so that every
    pair probability stays below one.
    """

    weights: np.ndarray
    phi: float = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)  # own copy, frozen below
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "phi", 1.0 / float(w.sum()) if w.size else math.nan)

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def w_bar(self) -> float:
        """Mean weight: the expected-degree scale of the model."""
        return float(self.weights.mean())

    @property
    def w_min(self) -> float:
        return float(self.weights.min())

    def validate(self) -> None:
        w = self.weights
        if w.size < 1:
            raise ValidationError("weight vector must be non-empty")
        if not np.all(np.isfinite(w)):
            i = int(np.flatnonzero(~np.isfinite(w))[0])
            raise ValidationError(f"weight w[{i}] = {w[i]} is not finite")
        bad = np.flatnonzero(w <= 0.0)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"weight w[{i}] = {w[i]} must be positive")
        total = float(w.sum())
        imax = int(np.argmax(w))
        if w[imax] ** 2 >= total:
            raise ValidationError(
                f"max weight squared must stay below the weight sum so that every "
                f"pair probability is < 1: w[{imax}]^2 = {w[imax] ** 2} >= {total}"
            )


SCHEDULE_KINDS = (
    "const-p",
    "c-over-n",
    "c-logn-over-n",
    "c-log2n-over-n",
    "power",
    "c-sqrt-logn-over-n",
    "logn-plus-c-loglogn-over-n",
)


@dataclass(frozen=True)
class Schedule:
    """Edge-probability sequence p(n) for sparse-regime sweeps.

    Kinds:
      const-p                     p = c
      c-over-n                    p = c / n
      c-logn-over-n               p = c * ln(n) / n
      c-log2n-over-n              p = c * (ln n)^2 / n
      power                       p = c * n^(alpha - 1), i.e. n*p = c * n^alpha
      c-sqrt-logn-over-n          p = c * sqrt(ln n) / n
      logn-plus-c-loglogn-over-n  p = (ln n + c * ln ln n) / n
    """

    kind: str
    c: float
    alpha: float | None = None

    def validate(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ValidationError(f"unknown schedule kind {self.kind!r}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValidationError(f"schedule coefficient must be positive, got {self.c}")
        if self.kind == "power":
            if self.alpha is None or not (0.0 < self.alpha <= 1.0):
                raise ValidationError(f"power schedule needs alpha in (0, 1], got {self.alpha}")
        elif self.alpha is not None:
            raise ValidationError(f"alpha only applies to the power kind, got kind={self.kind!r}")

    def describe(self) -> str:
        if self.kind == "power":
            return f"power(c={self.c:g},alpha={self.alpha:g})"
        return f"{self.kind}(c={self.c:g})"


def eval_schedule(schedule: Schedule, n: int) -> float:
    """Evaluate p(n); raises ScheduleRangeError unless 0 < p(n) < 1."""
    schedule.validate()
    if n < 2:
        raise ValidationError(f"schedules are defined for n >= 2, got n={n}")
    c = schedule.c
    if schedule.kind == "const-p":
        p = c
    elif schedule.kind == "c-over-n":
        p = c / n
    elif schedule.kind == "c-logn-over-n":
        p = c * math.log(n) / n
    elif schedule.kind == "c-log2n-over-n":
        p = c * math.log(n) ** 2 / n
    elif schedule.kind == "power":
        p = c * n ** (schedule.alpha - 1.0)
    elif schedule.kind == "c-sqrt-logn-over-n":
        p = c * math.sqrt(math.log(n)) / n
    else:  # logn-plus-c-loglogn-over-n
        p = (math.log(n) + c * math.log(math.log(n))) / n
    if not (0.0 < p < 1.0):
        raise ScheduleRangeError(
            f"schedule {schedule.describe()} gives p({n}) = {p}, outside (0, 1)"
        )
    return p


@dataclass(frozen=True, eq=False)
class GraphSample:
    """One sampled simple undirected graph.

    ``edges`` is an (m, 2) int64 array of pairs (i, j) with i < j in strictly
    increasing lexicographic order; ``degrees`` is recomputed from the edges
    on construction, never trusted from the caller.
    """

    n: int
    edges: np.ndarray
    degrees: np.ndarray
    provenance: Provenance

    @classmethod
    def from_edges(cls, n: int, edges: np.ndarray, provenance: Provenance) -> "GraphSample":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            i, j = edges[:, 0], edges[:, 1]
            if i.min() < 0 or j.max() >= n:
                raise ValidationError("edge endpoint out of range")
            if np.any(i >= j):
                raise ValidationError("edges must satisfy i < j (no self-loops)")
            key = i * n + j
            if np.any(np.diff(key) <= 0):
                raise ValidationError("edges must be strictly increasing lexicographically")
            degrees = np.bincount(edges.ravel(), minlength=n).astype(np.int64)
        else:
            degrees = np.zeros(n, dtype=np.int64)
        edges.flags.writeable = False
        degrees.flags.writeable = False
        return cls(n=n, edges=edges, degrees=degrees, provenance=provenance)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def isolated_count(self) -> int:
        return int(np.count_nonzero(self.degrees == 0))


def _pair_row_starts(i: np.ndarray, n: int) -> np.ndarray:
    # number of pairs (r, s), r < s, with r < i under lexicographic order
    return i * n - i * (i + 1) // 2


def _pairs_from_indices(ks: np.ndarray, n: int) -> np.ndarray:
    """Invert the lexicographic linear index k -> pair (i, j), i < j."""
    b = 2.0 * n - 1.0
    i = ((b - np.sqrt(b * b - 8.0 * ks.astype(np.float64))) / 2.0).astype(np.int64)
    # sqrt rounding can land one row off; nudge back exactly in integers
    for _ in range(2):
        i -= _pair_row_starts(i, n) > ks
        i += _pair_row_starts(i + 1, n) <= ks
    j = ks - _pair_row_starts(i, n) + i + 1
    return np.column_stack((i, j))


def _skip_pair_indices(rng: np.random.Generator, m_pairs: int, p: float) -> np.ndarray:
    """Geometric skipping: indices of successes in m_pairs Bernoulli(p) trials."""
    chunks = []
    pos = -1
    batch = max(int(m_pairs * p * 1.1) + 16, 64)
    while True:
        ks = pos + np.cumsum(rng.geometric(p, size=batch))
        if ks[-1] >= m_pairs:
            chunks.append(ks[ks < m_pairs])
            break
        chunks.append(ks)
        pos = int(ks[-1])
    return np.concatenate(chunks)


def sample_er(spec: ErSpec, rng: np.random.Generator,
              provenance: Provenance | None = None) -> GraphSample:
    """Sample G(n, p).

    Sparse p uses geometric skipping (expected O(edges) draws); otherwise
    one vectorized Bernoulli pass per row.  p = 0 and p = 1 are exact.
    """
    spec.validate()
    n, p = spec.n, spec.p
    provenance = provenance or Provenance(master_seed=0)
    m_pairs = n * (n - 1) // 2
    if p == 0.0 or m_pairs == 0:
        edges = np.empty((0, 2), dtype=np.int64)
    elif p == 1.0:
        edges = _pairs_from_indices(np.arange(m_pairs, dtype=np.int64), n)
    elif p < SPARSE_SAMPLING_THRESHOLD:
        edges = _pairs_from_indices(_skip_pair_indices(rng, m_pairs, p), n)
    else:
        rows_i, rows_j = [], []
        for i in range(n - 1):
            hits = np.flatnonzero(rng.random(n - 1 - i) < p)
            if hits.size:
                rows_i.append(np.full(hits.size, i, dtype=np.int64))
                rows_j.append(hits + i + 1)
        edges = _stack_edge_rows(rows_i, rows_j)
    return GraphSample.from_edges(n, edges, provenance)


def sample_chung_lu(spec: ChungLuSpec, rng: np.random.Generator,
                    provenance: Provenance | None = None) -> GraphSample:
    """Sample the Chung–Lu graph: edge {i, j} with probability w_i * w_j * phi."""
    spec.validate()
    w, phi, n = spec.weights, spec.phi, spec.n
    provenance = provenance or Provenance(master_seed=0)
    rows_i, rows_j = [], []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - 1 - i) < w[i] * w[i + 1:] * phi)
        if hits.size:
            rows_i.append(np.full(hits.size, i, dtype=np.int64))
            rows_j.append(hits + i + 1)
    return GraphSample.from_edges(n, _stack_edge_rows(rows_i, rows_j), provenance)


def _stack_edge_rows(rows_i: list, rows_j: list) -> np.ndarray:
    if not rows_i:
        return np.empty((0, 2), dtype=np.int64)
    return np.column_stack((np.concatenate(rows_i), np.concatenate(rows_j)))


# ---------------------------------------------------------------------------
# Weight profiles


def constant_weights(n: int, w: float) -> np.ndarray:
    return np.full(n, float(w))


def ramp_weights(n: int, w_lo: float, w_hi: float) -> np.ndarray:
    """Linear ramp from w_lo (vertex 0) to w_hi (vertex n-1)."""
    if n == 1:
        return np.array([float(w_lo)])
    return w_lo + (w_hi - w_lo) * np.arange(n) / (n - 1)


def two_block_weights(n: int, w_lo: float, w_hi: float, frac_lo: float) -> np.ndarray:
    """First floor(frac_lo * n) vertices get w_lo, the rest w_hi."""
    if not (0.0 <= frac_lo <= 1.0):
        raise ValidationError(f"block fraction must lie in [0, 1], got {frac_lo}")
    k = int(frac_lo * n)
    return np.concatenate((np.full(k, float(w_lo)), np.full(n - k, float(w_hi))))


def weights_from_profile(n: int, profile: dict) -> np.ndarray:
    """Build a weight vector from a named profile descriptor.

    Descriptors: {"kind": "constant", "w": ...},
    {"kind": "ramp", "wmin": ..., "wmax": ...},
    {"kind": "two-block", "wlo": ..., "whi": ..., "frac": ...}.
    """
    kind = profile.get("kind")
    if kind == "constant":
        return constant_weights(n, profile["w"])
    if kind == "ramp":
        return ramp_weights(n, profile["wmin"], profile["wmax"])
    if kind == "two-block":
        return two_block_weights(n, profile["wlo"], profile["whi"], profile["frac"])
    raise ValidationError(f"unknown weight profile kind {kind!r}")


def profile_label(profile: dict) -> str:
    kind = profile.get("kind")
    if kind == "constant":
        return f"constant(w={profile['w']:g})"
    if kind == "ramp":
        return f"ramp(wmin={profile['wmin']:g},wmax={profile['wmax']:g})"
    if kind == "two-block":
        return f"two-block(wlo={profile['wlo']:g},whi={profile['whi']:g},frac={profile['frac']:g})"
    raise ValidationError(f"unknown weight profile kind {kind!r}")


def parse_profile_label(label: str) -> dict:
    """Inverse of profile_label, used when recovering profiles from CSV rows."""
    kind, _, body = label.partition("(")
    body = body.rstrip(")")
    params = {}
    for item in body.split(","):
        key, _, val = item.partition("=")
        params[key.strip()] = float(val)
    if kind == "constant":
        return {"kind": "constant", "w": params["w"]}
    if kind == "ramp":
        return {"kind": "ramp", "wmin": params["wmin"], "wmax": params["wmax"]}
    if kind == "two-block":
        return {"kind": "two-block", "wlo": params["wlo"], "whi": params["whi"], "frac": params["frac"]}
    raise ValidationError(f"cannot parse weight profile label {label!r}")


# ---------------------------------------------------------------------------
# File formats


def write_edgelist(sample: GraphSample, path) -> None:
    """Write the v1 edge-list format: header, then one 'i j' pair per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{EDGELIST_MAGIC} n={sample.n} seed={sample.provenance.seed_label()}\n")
        for i, j in sample.edges:
            fh.write(f"{i} {j}\n")


def read_edgelist(path) -> GraphSample:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(EDGELIST_MAGIC):
            raise ValidationError(f"{path}: not a speclaw edge-list (bad header)")
        fields = dict(item.split("=", 1) for item in header[len(EDGELIST_MAGIC):].split())
        n = int(fields["n"])
        seed_parts = [int(s) for s in fields.get("seed", "0:0:0").split(":")]
        while len(seed_parts) < 3:
            seed_parts.append(0)
        pairs = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            i, j = line.split()
            pairs.append((int(i), int(j)))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    prov = Provenance(master_seed=seed_parts[0], cell_id=seed_parts[1], replicate_index=seed_parts[2])
    return GraphSample.from_edges(n, edges, prov)


def read_weights(path) -> np.ndarray:
    """Read a weight file: one positive decimal per line."""
    vals = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: not a decimal: {line!r}") from None
    return np.asarray(vals, dtype=np.float64)


def write_weights(weights: np.ndarray, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for w in np.asarray(weights, dtype=np.float64):
            fh.write(f"{w:.17g}\n")
