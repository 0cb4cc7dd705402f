"""
Run Executor

Dispatches a RunConfig to the computational cores, collects the result
tables and maps the outcome to an exit code.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import ValidationError

from models.moment_core import (
    CONSTANT_SEARCH_LIMIT, BoundFamily, build_walk_table, check_bounds,
    moment_sequence, smallest_sufficient_constants,
)
from models.spectral_sim import (
    TV_THRESHOLD, EigensolverError, compare_to_limits, component_count,
    degree_statistics, estimate_moments, poisson_tv_distance,
    pool_degree_tables, sample_graph,
)
from models.walk_oracle import oracle_moment, walks_by_returns
from formatters.artifact_writer import ArtifactWriter
from pipelines.run_config import RunConfig, Subcommand

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_VALIDATION = 1
EXIT_ORACLE_MISMATCH = 2
EXIT_TOLERANCE_BREACH = 3
EXIT_INTERNAL = 4


def exact_text(value) -> str:
    """Exact integers and rationals as full decimal or 'a/b' strings."""
    return str(value)


@dataclass
class RunResult:
    """Tables and summary of one run, plus its exit code."""
    config: RunConfig
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_SUCCESS


class RunExecutor:
    """
    Executes one subcommand.

    Args:
        n_jobs: joblib workers for oracle trees and Monte Carlo samples
    """

    def __init__(self, n_jobs: int = 1):
        self.n_jobs = n_jobs

    def execute(self, config: RunConfig) -> RunResult:
        logger.info(f"Executing {config.subcommand.value}")
        if config.subcommand == Subcommand.MOMENTS:
            return self._execute_moments(config)
        elif config.subcommand == Subcommand.ORACLE_CHECK:
            return self._execute_oracle_check(config)
        elif config.subcommand == Subcommand.SIMULATE:
            return self._execute_simulate(config)
        elif config.subcommand == Subcommand.BOUNDS:
            return self._execute_bounds(config)
        elif config.subcommand == Subcommand.DEGREES:
            return self._execute_degrees(config)
        raise ValueError(f"Unknown subcommand: {config.subcommand}")

    def _execute_moments(self, config: RunConfig) -> RunResult:
        if config.max_k == 0:
            rows = [(0, exact_text(1))]
        else:
            sequence = moment_sequence(config.max_k, config.exact_intensity)
            rows = [(k, exact_text(sequence.moment(k))) for k in range(1, config.max_k + 1)]
        table = pd.DataFrame(rows, columns=['k', 'm_k'])
        return RunResult(
            config=config,
            tables={'moments': table},
            summary={'intensity': config.intensity, 'max_k': config.max_k},
        )

    def _execute_oracle_check(self, config: RunConfig) -> RunResult:
        table = build_walk_table(config.max_k, 1)

        moment_rows = []
        for k in range(1, config.max_k + 1):
            recurrence = table.row_sum(k)
            oracle = oracle_moment(k, n_jobs=self.n_jobs)
            moment_rows.append({
                'k': k,
                'recurrence': exact_text(recurrence),
                'oracle': exact_text(oracle),
                'match': recurrence == oracle,
            })

        return_rows = []
        for u in range(config.max_k + 1):
            tally = walks_by_returns(u)
            for v, recurrence in table.column(u).items():
                oracle = tally[v]
                return_rows.append({
                    'u': u,
                    'v': v,
                    'recurrence': exact_text(recurrence),
                    'oracle': exact_text(oracle),
                    'match': recurrence == oracle,
                })

        moments = pd.DataFrame(moment_rows, columns=['k', 'recurrence', 'oracle', 'match'])
        returns = pd.DataFrame(return_rows, columns=['u', 'v', 'recurrence', 'oracle', 'match'])
        mismatches = int((~moments['match']).sum() + (~returns['match']).sum())
        if mismatches:
            logger.error(f"Oracle disagrees with the recurrence in {mismatches} entries")

        return RunResult(
            config=config,
            tables={'oracle_moments': moments, 'returns': returns},
            summary={'max_k': config.max_k, 'mismatches': mismatches},
            exit_code=EXIT_ORACLE_MISMATCH if mismatches else EXIT_SUCCESS,
        )

    def _execute_simulate(self, config: RunConfig) -> RunResult:
        estimate = estimate_moments(
            n=config.n,
            intensity=config.intensity,
            max_s=2 * config.max_k,
            sample_count=config.sample_count,
            base_seed=config.base_seed,
            n_jobs=self.n_jobs,
        )
        verdicts = compare_to_limits(estimate)
        histogram, ecdf = estimate.ecdf_and_histogram(config.bin_count)
        breaches = int((~verdicts['within']).sum())
        if breaches:
            logger.warning(f"{breaches} moment orders outside tolerance")

        return RunResult(
            config=config,
            tables={
                'moments': estimate.moments,
                'verdicts': verdicts,
                'histogram': histogram,
                'ecdf': ecdf,
            },
            summary={
                'mean_edges': float(estimate.edge_counts.mean()),
                'breaches': breaches,
            },
            exit_code=EXIT_TOLERANCE_BREACH if breaches else EXIT_SUCCESS,
        )

    def _execute_bounds(self, config: RunConfig) -> RunResult:
        table = build_walk_table(config.max_k, 1)
        c1, c2 = smallest_sufficient_constants(config.max_k, table=table)
        report = check_bounds(
            config.max_k,
            c1=c1 or CONSTANT_SEARCH_LIMIT,
            c2=c2 or CONSTANT_SEARCH_LIMIT,
            table=table,
        )
        records = []
        for record in report.records:
            row = record.to_dict()
            row['value'] = exact_text(row['value'])
            row['bound'] = exact_text(row['bound'])
            row['r'] = '' if row['r'] is None else row['r']
            records.append(row)

        summary: Dict[str, Any] = {
            'max_order': config.max_k,
            'c1': exact_text(report.c1),
            'c2': exact_text(report.c2),
            'c1_sufficient': c1 is not None,
            'c2_sufficient': c2 is not None,
        }
        for family in BoundFamily:
            summary[f'{family.value}_passed'] = report.family_passed(family)

        return RunResult(
            config=config,
            tables={'bounds': pd.DataFrame(records, columns=['family', 'k', 'r', 'value', 'bound', 'holds'])},
            summary=summary,
            exit_code=EXIT_SUCCESS if report.passed else EXIT_TOLERANCE_BREACH,
        )

    def _execute_degrees(self, config: RunConfig) -> RunResult:
        seeds = [config.base_seed + t for t in range(config.sample_count)]
        results = Parallel(n_jobs=self.n_jobs)(
            delayed(_degree_task)(config.n, config.intensity, seed) for seed in seeds
        )
        per_sample = pd.DataFrame(
            [{'seed': seed, **stats} for seed, (_, stats) in zip(seeds, results)],
            columns=['seed', 'tv_distance', 'max_degree', 'components'],
        )
        pooled = pool_degree_tables([table for table, _ in results])
        mean_tv = float(per_sample['tv_distance'].mean())

        return RunResult(
            config=config,
            tables={'degrees': pooled, 'samples': per_sample},
            summary={
                'mean_tv_distance': mean_tv,
                'tv_threshold': TV_THRESHOLD,
                'median_max_degree': float(np.median(per_sample['max_degree'])),
            },
            exit_code=EXIT_SUCCESS if mean_tv < TV_THRESHOLD else EXIT_TOLERANCE_BREACH,
        )


def _degree_task(n: int, intensity: str, seed: int):
    sample = sample_graph(n, intensity, seed)
    table = degree_statistics(sample)
    stats = {
        'tv_distance': poisson_tv_distance(table, intensity),
        'max_degree': int(table['degree'].max()),
        'components': component_count(sample),
    }
    return table, stats


def run(config: RunConfig, n_jobs: int = 1) -> int:
    """
    Execute config, write its artifact and return the exit code.

    Artifacts are written for successful runs and for oracle mismatches and
    tolerance breaches; validation and eigensolver failures write nothing.
    An output path that cannot be written counts as a validation failure.
    """
    try:
        result = RunExecutor(n_jobs=n_jobs).execute(config)
    except EigensolverError as e:
        logger.error(f"Eigensolver failure: {e}")
        return EXIT_INTERNAL
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid run: {e}")
        return EXIT_VALIDATION
    except Exception as e:
        logger.exception(f"Internal failure: {e}")
        return EXIT_INTERNAL

    for key, value in result.summary.items():
        logger.info(f"  {key}: {value}")
    try:
        path = ArtifactWriter(config.output_format).write(result)
    except OSError as e:
        logger.error(f"Cannot write artifact to {config.output_path}: {e}")
        return EXIT_VALIDATION
    logger.info(f"Wrote {config.subcommand.value} artifact to {path} (exit {result.exit_code})")
    return result.exit_code
