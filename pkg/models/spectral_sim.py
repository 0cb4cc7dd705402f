"""
Spectral Simulator

Monte Carlo and exact small-N checks of the limit theorems for the sparse
random graph in which each pair of N vertices is joined independently with
probability p/N. Computes adjacency and Laplacian spectra, trace moments,
the normalized eigenvalue counting function and degree statistics.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import poisson

from models.graph_components import UnionFind
from models.moment_core import MomentSequence, as_intensity, moment_sequence

logger = logging.getLogger(__name__)

# Dense eigensolver guard
MAX_DENSE_N = 4096

# Guards for the exhaustive finite-N expectation
MAX_EXACT_N = 6
MAX_EXACT_S = 6

# |lambda| below this counts as a zero Laplacian eigenvalue
ZERO_EIGENVALUE_TOL = 1e-6

# Relative tolerance of the post-solve trace identities
TRACE_RTOL = 1e-8

# The Laplacian is positive semidefinite up to this slack
LAPLACIAN_FLOOR_TOL = 1e-8

# Finite-size allowance c/n for limit comparisons; a cap, not a fitted
# coefficient (3 stderr dominates at the sample counts used)
FINITE_SIZE_C = 64

# Degree-law acceptance threshold
TV_THRESHOLD = 0.05

MAX_SEED = 2 ** 64 - 1

IntensityLike = Union[int, float, Fraction, str]


class MatrixKind(Enum):
    ADJACENCY = 'adjacency'
    LAPLACIAN = 'laplacian'


class EigensolverError(RuntimeError):
    """Eigensolver failed to converge or produced inconsistent eigenvalues."""


@dataclass(frozen=True, eq=False)
class GraphSample:
    """One realization of the random graph; edges are (i, j) rows with i < j."""
    n: int
    intensity: IntensityLike
    edges: np.ndarray = field(repr=False)
    seed: int

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def edge_set(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset((int(i), int(j)) for i, j in self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n), dtype=np.float64)
        if self.edge_count:
            matrix[self.edges[:, 0], self.edges[:, 1]] = 1.0
            matrix[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return matrix

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def laplacian_matrix(self) -> np.ndarray:
        """V - A, with V the diagonal degree matrix."""
        return np.diag(self.degrees().astype(np.float64)) - self.adjacency_matrix()


def _edge_probability(n: int, intensity: IntensityLike) -> float:
    p = float(as_intensity(intensity))
    if not 0 < p <= n:
        raise ValueError(f"Intensity must satisfy 0 < p <= n={n}, got {intensity}")
    return p / n


def sample_graph(n: int, intensity: IntensityLike, seed: int) -> GraphSample:
    """
    Sample the random graph on n vertices.

    Pairs (i, j), i < j, are visited in row-major order; pair number t uses
    output t of a Philox counter-based stream keyed by seed, so each edge
    indicator depends only on (seed, pair index).

    Args:
        n: Vertex count
        intensity: p, with 0 < p <= n
        seed: 64-bit unsigned seed

    Returns:
        GraphSample
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    probability = _edge_probability(n, intensity)
    rng = np.random.Generator(np.random.Philox(key=seed))

    blocks = []
    for i in range(n - 1):
        draws = rng.random(n - 1 - i)
        js = np.flatnonzero(draws < probability) + i + 1
        if js.size:
            blocks.append(np.column_stack((np.full(js.size, i, dtype=np.int64), js)))
    edges = np.vstack(blocks).astype(np.int64) if blocks else np.empty((0, 2), dtype=np.int64)
    return GraphSample(n=n, intensity=intensity, edges=edges, seed=seed)


# =============================================================================
# SPECTRA
# =============================================================================

@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Ascending eigenvalues of the adjacency matrix or the Laplacian."""
    eigenvalues: np.ndarray = field(repr=False)
    matrix_kind: MatrixKind

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    def power_sum(self, s: int) -> float:
        return float(np.sum(self.eigenvalues ** s))

    def zero_multiplicity(self, tol: float = ZERO_EIGENVALUE_TOL) -> int:
        return int(np.count_nonzero(np.abs(self.eigenvalues) < tol))


def _verify_trace_identities(eigenvalues: np.ndarray, sample: GraphSample, kind: MatrixKind) -> None:
    n = sample.n
    edges2 = 2.0 * sample.edge_count
    first = float(np.sum(eigenvalues))
    second = float(np.sum(eigenvalues ** 2))

    if kind == MatrixKind.ADJACENCY:
        checks = [
            ('trace', first, 0.0, TRACE_RTOL * max(1, n)),
            ('squared trace', second, edges2, TRACE_RTOL * max(1.0, edges2)),
        ]
    else:
        degrees = sample.degrees().astype(np.float64)
        frobenius = float(np.sum(degrees ** 2)) + edges2
        checks = [
            ('trace', first, edges2, TRACE_RTOL * max(1.0, edges2)),
            ('squared trace', second, frobenius, TRACE_RTOL * max(1.0, frobenius)),
        ]

    for name, got, expected, tol in checks:
        if abs(got - expected) > tol:
            raise EigensolverError(
                f"{kind.value} {name} identity failed: {got!r} vs {expected!r} (n={n}, seed={sample.seed})"
            )

    if kind == MatrixKind.LAPLACIAN and eigenvalues.size and eigenvalues[0] < -LAPLACIAN_FLOOR_TOL:
        raise EigensolverError(f"Negative Laplacian eigenvalue {eigenvalues[0]!r} (seed={sample.seed})")


def spectrum(sample: GraphSample, kind: Union[MatrixKind, str] = MatrixKind.ADJACENCY) -> SpectrumResult:
    """
    All eigenvalues of the adjacency matrix or the Laplacian V - A.

    Raises:
        ValueError: n above MAX_DENSE_N
        EigensolverError: LAPACK non-convergence or a failed trace identity
    """
    kind = MatrixKind(kind)
    if sample.n > MAX_DENSE_N:
        raise ValueError(f"Dense eigensolve limited to n <= {MAX_DENSE_N}, got {sample.n}")
    matrix = sample.adjacency_matrix() if kind == MatrixKind.ADJACENCY else sample.laplacian_matrix()
    try:
        eigenvalues = np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"Eigensolver did not converge (n={sample.n}, seed={sample.seed}): {e}") from e
    _verify_trace_identities(eigenvalues, sample, kind)
    return SpectrumResult(eigenvalues=eigenvalues, matrix_kind=kind)


def counting_function(eigenvalues: Sequence[float], lam: float) -> float:
    """sigma(lam) = #{lambda_j <= lam} / total."""
    pool = np.sort(np.asarray(eigenvalues, dtype=np.float64))
    if pool.size == 0:
        raise ValueError("Empty eigenvalue pool")
    return float(np.searchsorted(pool, lam, side='right')) / pool.size


def ecdf_and_histogram(eigenvalues: Sequence[float], bin_count: int) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Counting-function step points and a normalized histogram of a pool.

    Returns:
        Tuple of (histogram with bin_center/mass, ECDF with lambda/sigma)
    """
    pool = np.asarray(eigenvalues, dtype=np.float64)
    if pool.size == 0:
        raise ValueError("Empty eigenvalue pool")
    if bin_count < 1:
        raise ValueError(f"bin_count must be positive, got {bin_count}")

    counts, edges = np.histogram(pool, bins=bin_count)
    histogram = pd.DataFrame({
        'bin_center': (edges[:-1] + edges[1:]) / 2.0,
        'mass': counts / pool.size,
    })

    values, multiplicity = np.unique(pool, return_counts=True)
    ecdf = pd.DataFrame({
        'lambda': values,
        'sigma': np.cumsum(multiplicity) / pool.size,
    })
    return histogram, ecdf


# =============================================================================
# MONTE CARLO MOMENTS
# =============================================================================

@dataclass(eq=False)
class SpectralEstimate:
    """Monte Carlo moment estimates plus the pooled eigenvalues."""
    n: int
    intensity: IntensityLike
    sample_count: int
    base_seed: int
    moments: pd.DataFrame           # s, mean, stderr
    eigenvalues: np.ndarray = field(repr=False)
    edge_counts: np.ndarray = field(repr=False)
    matrix_kind: MatrixKind = MatrixKind.ADJACENCY

    def moment(self, s: int) -> Tuple[float, float]:
        row = self.moments.loc[self.moments['s'] == s]
        if row.empty:
            raise ValueError(f"Order s={s} was not estimated")
        return float(row['mean'].iloc[0]), float(row['stderr'].iloc[0])

    def ecdf_and_histogram(self, bin_count: int) -> Tuple[pd.DataFrame, pd.DataFrame]:
        return ecdf_and_histogram(self.eigenvalues, bin_count)


def _sample_task(n: int, intensity: IntensityLike, seed: int, max_s: int,
                 kind: MatrixKind) -> Tuple[np.ndarray, np.ndarray, int]:
    sample = sample_graph(n, intensity, seed)
    adjacency = spectrum(sample, MatrixKind.ADJACENCY).eigenvalues
    traces = np.empty(max_s + 1, dtype=np.float64)
    power = np.ones_like(adjacency)
    for s in range(max_s + 1):
        traces[s] = np.sum(power) / n
        power = power * adjacency
    pooled = adjacency if kind == MatrixKind.ADJACENCY else spectrum(sample, kind).eigenvalues
    return traces, pooled, sample.edge_count


def estimate_moments(n: int, intensity: IntensityLike, max_s: int, sample_count: int,
                     base_seed: int = 0, kind: Union[MatrixKind, str] = MatrixKind.ADJACENCY,
                     n_jobs: int = 1) -> SpectralEstimate:
    """
    Estimate M_s = E N^-1 Tr A^s for s = 0..max_s by Monte Carlo.

    Sample t uses seed base_seed + t; results are reduced in sample order,
    so the estimate does not depend on n_jobs.

    Args:
        n: Vertex count
        intensity: Edge intensity p
        max_s: Largest moment order
        sample_count: Number of graphs (>= 2)
        base_seed: Seed of the first sample
        kind: Spectrum pooled for the counting function
        n_jobs: joblib workers, one task per sample

    Returns:
        SpectralEstimate
    """
    kind = MatrixKind(kind)
    if sample_count < 2:
        raise ValueError(f"sample_count must be at least 2, got {sample_count}")
    if max_s < 0:
        raise ValueError(f"max_s must be nonnegative, got {max_s}")
    if n > MAX_DENSE_N:
        raise ValueError(f"Dense eigensolve limited to n <= {MAX_DENSE_N}, got {n}")
    if base_seed < 0 or base_seed + sample_count - 1 > MAX_SEED:
        raise ValueError(f"Seeds {base_seed}..{base_seed + sample_count - 1} leave the 64-bit range")
    _edge_probability(n, intensity)

    logger.info(f"Estimating moments: n={n}, p={intensity}, {sample_count} samples, max_s={max_s}")
    results = Parallel(n_jobs=n_jobs)(
        delayed(_sample_task)(n, intensity, base_seed + t, max_s, kind)
        for t in range(sample_count)
    )

    traces = np.vstack([r[0] for r in results])
    moments = pd.DataFrame({
        's': np.arange(max_s + 1),
        'mean': traces.mean(axis=0),
        'stderr': traces.std(axis=0, ddof=1) / np.sqrt(sample_count),
    })
    logger.info(f"Estimated {max_s + 1} moment orders from {sample_count} samples")
    return SpectralEstimate(
        n=n,
        intensity=intensity,
        sample_count=sample_count,
        base_seed=base_seed,
        moments=moments,
        eigenvalues=np.sort(np.concatenate([r[1] for r in results])),
        edge_counts=np.array([r[2] for r in results], dtype=np.int64),
        matrix_kind=kind,
    )


def expected_second_moment(n: int, intensity: IntensityLike) -> Fraction:
    """Exact E N^-1 Tr A^2 = p (n-1) / n."""
    p = as_intensity(intensity)
    return p * (n - 1) / n


def expected_third_moment(n: int, intensity: IntensityLike) -> Fraction:
    """Exact E N^-1 Tr A^3 = p^3 (n-1)(n-2) / n^3; only triangles contribute."""
    p = as_intensity(intensity)
    return p ** 3 * (n - 1) * (n - 2) / n ** 3


def exact_finite_moment(n: int, intensity: IntensityLike, s: int) -> Fraction:
    """
    E N^-1 Tr A^s for a tiny graph, by summing over closed index sequences.

    A sequence x_1..x_s (x_{s+1} = x_1) with no repeated consecutive index
    contributes (p/n)^(number of distinct pairs it uses). The ensemble is
    invariant under relabelling, so only sequences with x_1 = 0 are summed.
    """
    if not 1 <= n <= MAX_EXACT_N:
        raise ValueError(f"n={n} outside 1..{MAX_EXACT_N}")
    if not 0 <= s <= MAX_EXACT_S:
        raise ValueError(f"s={s} outside 0..{MAX_EXACT_S}")
    p = as_intensity(intensity)
    if p > n:
        raise ValueError(f"Intensity {p} exceeds n={n}")
    if s == 0:
        return Fraction(1)

    q = p / n
    q_powers = [q ** e for e in range(s + 1)]
    total = Fraction(0)
    for tail in itertools.product(range(n), repeat=s - 1):
        walk = (0,) + tail + (0,)
        if any(x == y for x, y in zip(walk, walk[1:])):
            continue
        used = {(min(x, y), max(x, y)) for x, y in zip(walk, walk[1:])}
        total += q_powers[len(used)]
    return total


def compare_to_limits(estimate: SpectralEstimate, sequence: Optional[MomentSequence] = None,
                      finite_size_c: float = FINITE_SIZE_C) -> pd.DataFrame:
    """
    Verdicts of the Monte Carlo moments against their targets.

    s = 2 and s = 3 are compared with their exact finite-n expectations
    within 3 standard errors; other orders s >= 1 with the limit (m_{s/2}
    or 0) within 3 standard errors plus finite_size_c / n.

    Returns:
        DataFrame with s, mean, stderr, target, allowance, within
    """
    max_s = int(estimate.moments['s'].max())
    if sequence is None:
        sequence = moment_sequence(max_s // 2, estimate.intensity)

    rows = []
    for s in range(1, max_s + 1):
        mean, stderr = estimate.moment(s)
        if s == 2:
            target, allowance = float(expected_second_moment(estimate.n, estimate.intensity)), 3 * stderr
        elif s == 3:
            target, allowance = float(expected_third_moment(estimate.n, estimate.intensity)), 3 * stderr
        else:
            target = float(sequence.limit(s))
            allowance = 3 * stderr + finite_size_c / estimate.n
        allowance += 1e-9
        rows.append({
            's': s,
            'mean': mean,
            'stderr': stderr,
            'target': target,
            'allowance': allowance,
            'within': bool(abs(mean - target) <= allowance),
        })
    return pd.DataFrame(rows, columns=['s', 'mean', 'stderr', 'target', 'allowance', 'within'])


def estimate_moment_sweep(ns: Sequence[int], intensity: IntensityLike, max_s: int, sample_count: int,
                          base_seed: int = 0, n_jobs: int = 1) -> pd.DataFrame:
    """
    Monte Carlo moments over several n, with the gap to the limit.

    Returns:
        DataFrame with n, s, mean, stderr, target, gap
    """
    sequence = moment_sequence(max_s // 2, intensity)
    frames = []
    for n in ns:
        estimate = estimate_moments(n, intensity, max_s, sample_count, base_seed, n_jobs=n_jobs)
        frame = estimate.moments.copy()
        frame.insert(0, 'n', n)
        frame['target'] = [float(sequence.limit(int(s))) for s in frame['s']]
        frame['gap'] = frame['target'] - frame['mean']
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


# =============================================================================
# GRAPH STATISTICS
# =============================================================================

def component_count(sample: GraphSample) -> int:
    """Connected components by union-find over the edge set."""
    forest = UnionFind(sample.n)
    for i, j in sample.edges:
        forest.union(int(i), int(j))
    return forest.num_components


def degree_statistics(sample: GraphSample) -> pd.DataFrame:
    """Empirical degree distribution with columns degree, count."""
    counts = np.bincount(sample.degrees(), minlength=1)
    observed = np.flatnonzero(counts)
    return pd.DataFrame({'degree': observed, 'count': counts[observed]})


def pool_degree_tables(tables: List[pd.DataFrame]) -> pd.DataFrame:
    pooled = pd.concat(tables).groupby('degree', as_index=False)['count'].sum()
    return pooled.sort_values('degree', ignore_index=True)


def poisson_tv_distance(degree_table: pd.DataFrame, intensity: IntensityLike) -> float:
    """
    Total-variation distance between a degree table and Poisson(p).

    The Poisson mass above the largest observed degree is included.
    """
    mu = float(as_intensity(intensity))
    total = degree_table['count'].sum()
    if total == 0:
        raise ValueError("Empty degree table")
    max_degree = int(degree_table['degree'].max())
    support = np.arange(max_degree + 1)
    empirical = np.zeros(max_degree + 1)
    empirical[degree_table['degree'].to_numpy()] = degree_table['count'].to_numpy() / total
    reference = poisson.pmf(support, mu)
    return float(0.5 * (np.abs(empirical - reference).sum() + poisson.sf(max_degree, mu)))
