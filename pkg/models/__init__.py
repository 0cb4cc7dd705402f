"""
Sparse Random Graph Spectra - Core Models

- moment_core: exact walk-count table W_u(v) and limiting moments m_k(p)
- walk_oracle: plane rooted trees and riding-rule walk enumeration
- spectral_sim: graph sampling, spectra and Monte Carlo moment estimates
- graph_components: union-find component counting
"""

from .moment_core import (
    WalkCountTable,
    MomentSequence,
    BoundReport,
    build_walk_table,
    moment_limit,
    moment_sequence,
    check_bounds,
)
from .walk_oracle import PlaneRootedTree, CoveringWalk, enumerate_trees, oracle_moment
from .spectral_sim import GraphSample, SpectrumResult, SpectralEstimate, sample_graph, spectrum
from .graph_components import UnionFind

__all__ = [
    'WalkCountTable',
    'MomentSequence',
    'BoundReport',
    'build_walk_table',
    'moment_limit',
    'moment_sequence',
    'check_bounds',
    'PlaneRootedTree',
    'CoveringWalk',
    'enumerate_trees',
    'oracle_moment',
    'GraphSample',
    'SpectrumResult',
    'SpectralEstimate',
    'sample_graph',
    'spectrum',
    'UnionFind',
]
