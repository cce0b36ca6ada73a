"""Gilbert graph edges at radius delta and edge-derived statistics.

build_edges is the performance core: a uniform cell grid of width delta over
the window's bounding box, each point compared only against its own and
neighboring cells. build_edges_bruteforce is the O(n^2) oracle with the same
output contract; both compute final edge lengths through one canonical code
path so the results agree bitwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .point_process import PointSample


@dataclass(frozen=True, eq=False)
class EdgeSet:
    """Edges (i < j) with their Euclidean lengths, all <= delta."""

    i: np.ndarray  # int64
    j: np.ndarray  # int64
    lengths: np.ndarray  # float64
    delta: float
    sample: PointSample

    @property
    def n_edges(self) -> int:
        return self.i.shape[0]

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(l)) for a, b, l in zip(self.i, self.j, self.lengths)]


@dataclass(frozen=True)
class LengthPowerSpec:
    """Distinct length-power exponents; admissible range depends on consumer."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.alphas)) != len(self.alphas):
            raise ValueError("alphas must be distinct")
        if not self.alphas:
            raise ValueError("alphas must be non-empty")


def _canonical_edgeset(points: np.ndarray, a: np.ndarray, b: np.ndarray,
                       delta: float, sample: PointSample) -> EdgeSet:
    """Orient i<j, sort by (i, j), compute lengths in one canonical pass."""
    i = np.minimum(a, b).astype(np.int64)
    j = np.maximum(a, b).astype(np.int64)
    # pairs are unique, so one fused key sorts lexicographically by (i, j)
    order = np.argsort(i * np.int64(points.shape[0]) + j)
    i = i[order]
    j = j[order]
    diff = points[i] - points[j]
    lengths = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return EdgeSet(i=i.astype(np.int64), j=j.astype(np.int64), lengths=lengths,
                   delta=float(delta), sample=sample)


def _empty_edgeset(delta: float, sample: PointSample) -> EdgeSet:
    z = np.zeros(0, dtype=np.int64)
    return EdgeSet(i=z, j=z.copy(), lengths=np.zeros(0), delta=float(delta), sample=sample)


def _pair_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = points[a] - points[b]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def build_edges(sample: PointSample, delta: float) -> EdgeSet:
    """Exact edge set via a cell grid of width delta (3^d neighbor stencil)."""
    if not (delta > 0):
        raise ValueError("delta must be > 0")
    pts = sample.points
    n, d = pts.shape
    if n < 2:
        return _empty_edgeset(delta, sample)

    lo, hi = sample.window.bounding_box()
    dims = np.maximum(np.ceil((hi - lo) / delta).astype(np.int64), 1)
    cells = np.clip(((pts - lo) / delta).astype(np.int64), 0, dims - 1)
    cell_id = np.ravel_multi_index(tuple(cells.T), tuple(dims))

    order = np.argsort(cell_id, kind="stable")
    sorted_id = cell_id[order]
    uniq, starts = np.unique(sorted_id, return_index=True)
    ends = np.append(starts[1:], n)
    counts = ends - starts

    pair_a: list[np.ndarray] = []
    pair_b: list[np.ndarray] = []

    # Within-cell pairs: point paired with each later point of its own cell.
    end_per_pos = np.repeat(ends, counts)
    pos = np.arange(n)
    for shift in range(1, int(counts.max())):
        ok = pos + shift < end_per_pos
        if not ok.any():
            break
        a = order[pos[ok]]
        b = order[pos[ok] + shift]
        keep = _pair_distance(pts, a, b) <= delta
        pair_a.append(a[keep])
        pair_b.append(b[keep])

    # Cross-cell pairs: lexicographically positive half of the 3^d stencil.
    strides = np.ones(d, dtype=np.int64)
    for k in range(d - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    offsets = [np.array(o) for o in itertools.product((-1, 0, 1), repeat=d)
               if any(v != 0 for v in o)]
    half = [o for o in offsets if next(v for v in o if v != 0) > 0]
    for off in half:
        nb = cells + off
        valid = np.all((nb >= 0) & (nb < dims), axis=1)
        if not valid.any():
            continue
        src = np.nonzero(valid)[0]
        nb_id = cell_id[src] + off @ strides
        g = np.searchsorted(uniq, nb_id)
        hit = (g < uniq.size) & (uniq[np.minimum(g, uniq.size - 1)] == nb_id)
        if not hit.any():
            continue
        src = src[hit]
        g = g[hit]
        lens = counts[g]
        a = np.repeat(src, lens)
        # flat candidate positions: starts[g] .. ends[g] per source point
        cum = np.concatenate(([0], np.cumsum(lens)))
        b_pos = np.arange(cum[-1]) - np.repeat(cum[:-1], lens) + np.repeat(starts[g], lens)
        b = order[b_pos]
        keep = _pair_distance(pts, a, b) <= delta
        pair_a.append(a[keep])
        pair_b.append(b[keep])

    if not pair_a:
        return _empty_edgeset(delta, sample)
    a = np.concatenate(pair_a)
    b = np.concatenate(pair_b)
    if a.size == 0:
        return _empty_edgeset(delta, sample)
    return _canonical_edgeset(pts, a, b, delta, sample)


def build_edges_bruteforce(sample: PointSample, delta: float, block: int = 512) -> EdgeSet:
    """All-pairs oracle; same output contract and sort order as build_edges."""
    if not (delta > 0):
        raise ValueError("delta must be > 0")
    pts = sample.points
    n = pts.shape[0]
    if n < 2:
        return _empty_edgeset(delta, sample)
    pair_a: list[np.ndarray] = []
    pair_b: list[np.ndarray] = []
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        diff = pts[i0:i1, None, :] - pts[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        rows = np.arange(i0, i1)[:, None]
        cols = np.arange(n)[None, :]
        mask = (dist <= delta) & (cols > rows)
        a, b = np.nonzero(mask)
        pair_a.append(a + i0)
        pair_b.append(b)
    a = np.concatenate(pair_a)
    b = np.concatenate(pair_b)
    if a.size == 0:
        return _empty_edgeset(delta, sample)
    return _canonical_edgeset(pts, a, b, delta, sample)


def length_power(edges: EdgeSet, spec) -> np.ndarray:
    """Sum of length^alpha over edges, one entry per alpha.

    Equals the half-sum over ordered distinct pairs within delta, since each
    unordered edge is stored once.
    """
    alphas = spec.alphas if isinstance(spec, LengthPowerSpec) else tuple(spec)
    out = np.zeros(len(alphas))
    if edges.n_edges == 0:
        return out
    for k, alpha in enumerate(alphas):
        out[k] = float(np.sum(edges.lengths**alpha))
    return out


def local_statistic(sample: PointSample, idx: int, delta: float, alpha: float) -> float:
    """Sum of length^alpha over edges incident to vertex idx."""
    pts = sample.points
    n = pts.shape[0]
    if not 0 <= idx < n:
        raise IndexError(f"vertex index {idx} out of range")
    diff = pts - pts[idx]
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    mask = (dist <= delta)
    mask[idx] = False
    if not mask.any():
        return 0.0
    return float(np.sum(dist[mask] ** alpha))


def max_degree(edges: EdgeSet) -> int:
    if edges.n_edges == 0:
        return 0
    n = edges.sample.n_points
    deg = np.bincount(edges.i, minlength=n) + np.bincount(edges.j, minlength=n)
    return int(deg.max())


def degree_histogram(edges: EdgeSet) -> np.ndarray:
    """Counts of vertices by degree (index = degree)."""
    n = edges.sample.n_points
    if edges.n_edges == 0:
        return np.array([n], dtype=np.int64)
    deg = np.bincount(edges.i, minlength=n) + np.bincount(edges.j, minlength=n)
    return np.bincount(deg)


def _smallest_powers(lengths: np.ndarray, alpha: float, m: int) -> np.ndarray:
    """m smallest values of length^alpha, +inf padded (no exponent checks)."""
    out = np.full(m, np.inf)
    if lengths.size == 0:
        return out
    powers = np.sort(lengths**alpha)
    k = min(m, powers.size)
    out[:k] = powers[:k]
    return out


def edge_length_order_statistics(edges: EdgeSet, alpha: float, m: int) -> np.ndarray:
    """m smallest edge length powers in nondecreasing order, +inf padded."""
    if not (alpha > 0):
        raise ValueError("alpha must be > 0 for order statistics")
    if m < 1:
        raise ValueError("m must be >= 1")
    return _smallest_powers(edges.lengths, alpha, m)
