"""Finite reversible Markov chains: model, validation, builders and file I/O.

A chain is a row-stochastic kernel K on a finite state set together with its
reversible stationary measure pi.  Every row of K sums to one, so jump
attempts occur at unit rate and the generator is L = K - I.  The per-state
jump rate J(x) = 1 - K(x, x) measures how often an attempt actually moves.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import (
    NonFiniteDistance,
    NotIrreducible,
    NotReversible,
    RowSumViolation,
    UnsupportedSize,
)

HYPERCUBE_DIM_CAP = 20


@dataclass(frozen=True)
class Tolerances:
    """Validation tolerances; defaults sit well above double-precision noise."""

    row_sum: float = 1e-12
    detailed_balance: float = 1e-12
    density: float = 1e-10
    metric: float = 1e-9


@dataclass(frozen=True)
class MarkovChain:
    """Validated chain: immutable after construction, safe to share."""

    states: tuple[str, ...]
    kernel: np.ndarray
    pi: np.ndarray
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        self.kernel.setflags(write=False)
        self.pi.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def jump_rates(self) -> np.ndarray:
        """Per-state J(x) = 1 - K(x, x)."""
        return 1.0 - np.diag(self.kernel)

    @property
    def laziness(self) -> float:
        """Global J = max_x J(x)."""
        return float(self.jump_rates.max())

    def index(self, label: str) -> int:
        return self.states.index(label)

    def check_density(self, f: np.ndarray) -> None:
        """Raise unless f >= 0 and integrates to one against pi."""
        from .errors import DimensionMismatch, NegativeDensity

        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise DimensionMismatch(f"density has shape {f.shape}, expected ({self.n},)")
        if (f < 0).any():
            raise NegativeDensity("density has negative entries")
        total = float(f @ self.pi)
        if abs(total - 1.0) > self.tol.density:
            raise NegativeDensity(f"density integrates to {total!r}, not 1")


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with a provenance tag."""

    d: np.ndarray
    kind: str  # "graph", "gamma" or "custom"

    def __post_init__(self):
        self.d.setflags(write=False)

    @property
    def n(self) -> int:
        return self.d.shape[0]


def validate_distance(dm: DistanceMatrix, tol: float = 1e-9) -> None:
    """Check symmetry, zero diagonal, finiteness and the triangle inequality."""
    d = dm.d
    if not np.isfinite(d).all():
        raise NonFiniteDistance("distance matrix has non-finite entries")
    if (d < 0).any() or abs(np.diag(d)).max() > tol:
        raise NonFiniteDistance("distances must be nonnegative with zero diagonal")
    if abs(d - d.T).max() > tol:
        raise NonFiniteDistance("distance matrix is not symmetric")
    # d(x,y) <= d(x,z) + d(z,y) for all triples
    viol = (d[:, None, :] - d[:, :, None] - d[None, :, :]).max()
    if viol > tol:
        raise NonFiniteDistance(f"triangle inequality violated by {viol:.3e}")


def _stationary(kernel: np.ndarray) -> np.ndarray:
    """Solve pi K = pi, sum(pi) = 1 by least squares on the stacked system."""
    n = kernel.shape[0]
    a = np.vstack([kernel.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    return pi


def _validate_kernel(states, kernel: np.ndarray, tol: Tolerances) -> MarkovChain:
    n = kernel.shape[0]
    if kernel.shape != (n, n) or len(states) != n:
        from .errors import DimensionMismatch

        raise DimensionMismatch("kernel must be square and match the label list")
    if (kernel < 0).any() or not np.isfinite(kernel).all():
        raise RowSumViolation("kernel entries must be finite and nonnegative")
    rows = kernel.sum(axis=1)
    bad = np.abs(rows - 1.0) > tol.row_sum
    if bad.any():
        i = int(np.argmax(np.abs(rows - 1.0)))
        raise RowSumViolation(f"row {states[i]!r} sums to {rows[i]!r}")

    support = csr_matrix(kernel > 0)
    ncomp, _ = connected_components(support, directed=True, connection="strong")
    if ncomp != 1:
        raise NotIrreducible(f"support graph has {ncomp} strongly connected components")
    if np.isclose(np.diag(kernel), 1.0, atol=tol.row_sum).any():
        # an absorbing state has J(x) = 0, which irreducibility excludes for n >= 2
        raise NotIrreducible("a state with K(x,x) = 1 makes the chain reducible")

    pi = _stationary(kernel)
    if (pi <= 0).any():
        raise NotIrreducible("stationary solve produced non-positive mass")
    flux = kernel * pi[:, None]
    gap = np.abs(flux - flux.T).max()
    if gap > tol.detailed_balance:
        raise NotReversible(f"detailed balance violated by {gap:.3e}")
    return MarkovChain(states=tuple(states), kernel=kernel, pi=pi, tol=tol)


def build_chain(labels, entries, tol: Tolerances | None = None) -> MarkovChain:
    """Build and validate a chain from (src, dst, rate) triplets.

    Labels are opaque strings; entries may index states by label or by
    position.  Missing entries are zero, so each row must be fully specified
    to sum to one.
    """
    tol = tol or Tolerances()
    labels = [str(s) for s in labels]
    if len(set(labels)) != len(labels):
        raise UnsupportedSize("state labels must be distinct")
    n = len(labels)
    pos = {s: i for i, s in enumerate(labels)}
    kernel = np.zeros((n, n))
    for src, dst, rate in entries:
        i = pos[str(src)] if not isinstance(src, (int, np.integer)) else int(src)
        j = pos[str(dst)] if not isinstance(dst, (int, np.integer)) else int(dst)
        if rate < 0:
            raise RowSumViolation(f"negative rate on ({src}, {dst})")
        kernel[i, j] += float(rate)
    return _validate_kernel(labels, kernel, tol)


def standard_chain(name: str, n: int = 1, tol: Tolerances | None = None) -> MarkovChain:
    """Construct one of the standard test chains.

    two_point            the lazy coin flip (identical to hypercube(1))
    hypercube(N)         lazy walk on {0,1}^N, K(x,y) = 1/(2N) across each edge
    cycle(n), n >= 3     nearest-neighbour walk, no holding
    complete(n), n >= 2  uniform resampling, K(x,y) = 1/n for every y
    """
    tol = tol or Tolerances()
    if name == "two_point":
        return standard_chain("hypercube", 1, tol)
    if n < 1:
        raise UnsupportedSize("size must be at least 1")
    if name == "hypercube":
        if n > HYPERCUBE_DIM_CAP:
            raise UnsupportedSize(f"hypercube dimension capped at {HYPERCUBE_DIM_CAP}")
        size = 2**n
        kernel = np.zeros((size, size))
        for x in range(size):
            kernel[x, x] = 0.5
            for i in range(n):
                kernel[x, x ^ (1 << i)] = 1.0 / (2 * n)
        states = [format(x, f"0{n}b") for x in range(size)]
        return _validate_kernel(states, kernel, tol)
    if name == "cycle":
        if n < 3:
            raise UnsupportedSize("cycle needs at least 3 states")
        kernel = np.zeros((n, n))
        for x in range(n):
            kernel[x, (x + 1) % n] = 0.5
            kernel[x, (x - 1) % n] = 0.5
        return _validate_kernel([str(x) for x in range(n)], kernel, tol)
    if name == "complete":
        if n < 2:
            raise UnsupportedSize("complete chain needs at least 2 states")
        kernel = np.full((n, n), 1.0 / n)
        return _validate_kernel([str(x) for x in range(n)], kernel, tol)
    raise UnsupportedSize(f"unknown builder {name!r}")


def graph_distance(chain: MarkovChain) -> DistanceMatrix:
    """Shortest-path hop count on the off-diagonal support of the kernel."""
    off = ~np.eye(chain.n, dtype=bool)
    adj = csr_matrix((chain.kernel > 0) & off)
    d = shortest_path(adj, method="D", unweighted=True)
    return DistanceMatrix(d=d, kind="graph")


def laziness(chain: MarkovChain) -> tuple[np.ndarray, float]:
    """Per-state jump rates J(x) and the global J = max_x J(x)."""
    return chain.jump_rates, chain.laziness


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def chain_to_dict(chain: MarkovChain, meta: dict | None = None) -> dict:
    triplets = [
        [int(i), int(j), float(chain.kernel[i, j])]
        for i in range(chain.n)
        for j in range(chain.n)
        if chain.kernel[i, j] != 0.0
    ]
    return {
        "states": list(chain.states),
        "kernel": {"triplets": triplets},
        "meta": meta or {},
    }


def chain_from_dict(data: dict, tol: Tolerances | None = None) -> MarkovChain:
    states = [str(s) for s in data["states"]]
    entries = [(int(i), int(j), float(r)) for i, j, r in data["kernel"]["triplets"]]
    return build_chain(states, entries, tol)


def write_chain_json(chain: MarkovChain, path, meta: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(chain_to_dict(chain, meta), fh, indent=2)
        fh.write("\n")


def read_chain_json(path, tol: Tolerances | None = None) -> MarkovChain:
    with open(path) as fh:
        return chain_from_dict(json.load(fh), tol)


def write_chain_csv(chain: MarkovChain, path) -> None:
    """Edge list `src,dst,rate`, diagonal entries included."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "rate"])
        for i in range(chain.n):
            for j in range(chain.n):
                if chain.kernel[i, j] != 0.0:
                    writer.writerow([chain.states[i], chain.states[j],
                                     repr(float(chain.kernel[i, j]))])


def read_chain_csv(path, complete_diagonal: bool = False, tol: Tolerances | None = None) -> MarkovChain:
    """Read a `src,dst,rate` edge list.

    Rows summing below one are only topped up with diagonal mass when
    `complete_diagonal` is set; otherwise the deficit is a RowSumViolation.
    """
    tol = tol or Tolerances()
    entries = []
    labels: list[str] = []
    seen = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["src", "dst", "rate"]:
            raise RowSumViolation("CSV header must be exactly src,dst,rate")
        for row in reader:
            src, dst, rate = row["src"], row["dst"], float(row["rate"])
            for s in (src, dst):
                if s not in seen:
                    seen.add(s)
                    labels.append(s)
            entries.append((src, dst, rate))
    if complete_diagonal:
        pos = {s: i for i, s in enumerate(labels)}
        rows = np.zeros(len(labels))
        diag = {s: 0.0 for s in labels}
        for src, dst, rate in entries:
            rows[pos[src]] += rate
            if src == dst:
                diag[src] += rate
        extra = []
        for s in labels:
            deficit = 1.0 - rows[pos[s]]
            if deficit > tol.row_sum:
                extra.append((s, s, deficit))
        entries = entries + extra
    return build_chain(labels, entries, tol)


def write_distance_csv(dm: DistanceMatrix, chain: MarkovChain, path) -> None:
    """Dense row-major CSV, header row = state labels."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(chain.states)
        for row in dm.d:
            writer.writerow([repr(float(v)) for v in row])
